"""
The ``cogsense`` console script.

Runs the management commands without a Django project: when no settings
module is configured, a minimal one holding only this app is set up first.
"""
import os
import sys

import django
from django.conf import settings

COMMANDS = ("simulate", "roc", "train", "report")


def configure():
    if settings.configured or os.environ.get("DJANGO_SETTINGS_MODULE"):
        return
    settings.configure(
        INSTALLED_APPS=["cogsense"],
        USE_TZ=True,
        COGSENSE_LOGGING=True,
    )


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    configure()
    django.setup()

    from django.core.management import execute_from_command_line

    if len(argv) < 2 or argv[1] not in COMMANDS + ("help", "--help", "-h", "--version"):
        sys.stderr.write(
            "Usage: cogsense {%s} [options]\n" % ",".join(COMMANDS)
        )
        return 2
    execute_from_command_line(argv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
