import logging
import os

from django.apps import AppConfig

from cogsense.constants import LOG_ENV_VAR

LOG_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def log_level_from_env(environ=None):
    environ = os.environ if environ is None else environ
    name = environ.get(LOG_ENV_VAR, "error").strip().lower()
    return LOG_LEVELS.get(name), name


class CogsenseConfig(AppConfig):
    name = "cogsense"
    stream = None

    def ready(self):
        # Setup default logging on standard error.
        log = logging.getLogger("cogsense")
        level, name = log_level_from_env()

        if self.stream is None:
            self.stream = logging.StreamHandler()
            self.stream.setFormatter(
                logging.Formatter("%(levelname)s %(name)s: %(message)s")
            )
            log.addHandler(self.stream)

        if level is None:
            level = logging.ERROR
            log.warning(
                "Unknown %s value '%s'; using 'error'.", LOG_ENV_VAR, name
            )

        self.stream.setLevel(level)
        log.setLevel(level)
