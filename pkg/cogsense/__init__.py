from importlib.metadata import PackageNotFoundError, version

__author__ = "The cogsense developers"

try:
    __version__ = version("django-cogsense")
except PackageNotFoundError:
    __version__ = "0.0.dev0"
