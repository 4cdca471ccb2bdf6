import copy
import importlib
import threading

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from cogsense import constants


def import_class(path):
    path_bits = path.split(".")
    # Cut off the class name at the end.
    class_name = path_bits.pop()
    module_path = ".".join(path_bits)
    module_itself = importlib.import_module(module_path)

    if not hasattr(module_itself, class_name):
        raise ImportError(
            "The Python module '%s' has no '%s' class." % (module_path, class_name)
        )

    return getattr(module_itself, class_name)


def load_fuser(full_fuser_path):
    """
    Loads a fuser engine for combining per-user reports at the fusion center.

    Requires a ``full_fuser_path``. It should be a string resembling a Python
    import path, pointing to a ``BaseFuser`` subclass. The built-in options
    available include::

      * cogsense.fusion.hard_rules.AndFuser
      * cogsense.fusion.hard_rules.OrFuser
      * cogsense.fusion.hard_rules.MajorityFuser
      * cogsense.fusion.hard_rules.KOfMFuser
      * cogsense.fusion.nlms.NlmsFuser
      * cogsense.fusion.mlp.MlpEngine

    If you've implemented a custom fuser, you can provide the path to it.
    For example::

      ``myapp.fusers.LikelihoodRatioFuser``

    """
    path_bits = full_fuser_path.split(".")

    if len(path_bits) < 2:
        raise ImproperlyConfigured(
            "The provided fuser '%s' is not a complete Python path to a BaseFuser subclass."
            % full_fuser_path
        )

    return import_class(full_fuser_path)


def split_alias(name):
    """
    Splits ``k_of_m:3`` into ``("k_of_m", "3")``. Plain aliases get ``None``.
    """
    alias, sep, argument = name.partition(constants.ALIAS_SEPARATOR)
    return alias.strip(), (argument.strip() if sep else None)


class FuserHandler(object):
    def __init__(self, fusers_info=None):
        self._fusers_info = fusers_info
        self.thread_local = threading.local()

    @property
    def fusers_info(self):
        if self._fusers_info is None:
            self._fusers_info = copy.deepcopy(
                getattr(settings, "COGSENSE_FUSERS", constants.DEFAULT_FUSERS)
            )
        return self._fusers_info

    def ensure_defaults(self, alias):
        try:
            info = self.fusers_info[alias]
        except KeyError:
            raise ImproperlyConfigured("The key '%s' isn't an available fuser." % alias)

        if not info.get("ENGINE"):
            raise ImproperlyConfigured(
                "The fuser '%s' does not declare an ENGINE." % alias
            )

    def __getitem__(self, key):
        """Returns the engine class registered under ``key``."""
        alias, _ = split_alias(key)

        if not hasattr(self.thread_local, "engines"):
            self.thread_local.engines = {}
        elif alias in self.thread_local.engines:
            return self.thread_local.engines[alias]

        self.ensure_defaults(alias)
        self.thread_local.engines[alias] = load_fuser(
            self.fusers_info[alias]["ENGINE"]
        )
        return self.thread_local.engines[alias]

    def options(self, key):
        alias, _ = split_alias(key)
        self.ensure_defaults(alias)
        return {k: v for k, v in self.fusers_info[alias].items() if k != "ENGINE"}

    def build(self, key, **overrides):
        """
        Creates a fresh, untrained fuser for ``key``.

        Settings options are applied first, then ``overrides``.
        """
        alias, argument = split_alias(key)
        options = self.options(alias)
        options.update(overrides)
        return self[alias](alias=key, argument=argument, **options)

