import logging

from django.conf import settings

LEVEL_METHODS = ("debug", "info", "warning", "error", "exception", "critical")


def getLogger(name):
    real_logger = logging.getLogger(name)
    return LoggingFacade(real_logger)


def describe_context(context):
    """Renders ``{"seed": 11, "trial": 4}`` as ``"[seed 11, trial 4] "``."""
    if not context:
        return ""
    return "[%s] " % ", ".join("%s %s" % (key, context[key]) for key in context)


class LoggingFacade(object):
    """
    Wraps a standard logger.

    Every call becomes a no-op when ``COGSENSE_LOGGING`` is ``False``. A
    facade returned by ``bind`` prefixes its messages with the bound run
    context, so lines from worker threads still name their experiment.
    """

    def __init__(self, real_logger, context=None):
        self.real_logger = real_logger
        self.context = dict(context or {})

    def noop(self, *args, **kwargs):
        pass

    def bind(self, **context):
        merged = dict(self.context)
        merged.update(context)
        return LoggingFacade(self.real_logger, merged)

    def __getattr__(self, attr):
        if not getattr(settings, "COGSENSE_LOGGING", True):
            return self.noop

        method = getattr(self.real_logger, attr)
        if attr not in LEVEL_METHODS or not self.context:
            return method

        prefix = describe_context(self.context)

        def bound(msg, *args, **kwargs):
            return method(prefix + str(msg), *args, **kwargs)

        return bound
