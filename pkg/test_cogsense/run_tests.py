#!/usr/bin/env python
import os
import sys
from os.path import abspath, dirname


def run_all(argv=None):
    sys.path.insert(0, dirname(dirname(abspath(__file__))))
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "test_cogsense.settings")

    # always measure coverage when running tests through setup.py
    cov = None
    if argv is None:
        import coverage

        cov = coverage.Coverage(source=["cogsense"])
        cov.erase()
        cov.start()

    import django
    from django.test.runner import DiscoverRunner

    django.setup()

    labels = argv[1:] if argv and len(argv) > 1 else ["test_cogsense"]
    runner = DiscoverRunner(verbosity=2)
    failures = runner.run_tests(labels)

    if cov is not None:
        cov.stop()
        cov.save()
        cov.report(show_missing=True)
    sys.exit(bool(failures))


if __name__ == "__main__":
    run_all(sys.argv)
