from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from cogsense.exceptions import CogsenseError
from cogsense.experiment import train_fuser
from cogsense.fusion import save_fuser

from .simulate import DEFAULT_THREADS, LOG, add_scenario_arguments, scenario_from_options


class Command(BaseCommand):
    help = "Trains one fuser on the training trials of a scenario and saves it."  # noqa A003

    def add_arguments(self, parser):
        add_scenario_arguments(parser)
        parser.add_argument(
            "-f",
            "--fuser",
            required=True,
            help="Name of the fuser to train, e.g. 'nlms' or 'mlp'.",
        )
        parser.add_argument(
            "-o",
            "--out",
            required=True,
            help="Path of the JSON file receiving the fuser parameters.",
        )

    def handle(self, **options):
        self.verbosity = int(options.get("verbosity", 1))
        config = scenario_from_options(options)

        try:
            fuser = train_fuser(
                config,
                options["fuser"],
                threads=options.get("threads", DEFAULT_THREADS),
            )
            save_fuser(fuser, options["out"])
        except (CogsenseError, ImproperlyConfigured) as exc:
            LOG.exception("Training failed")
            raise CommandError(str(exc))
        except OSError as exc:
            raise CommandError(
                "Can not write the fuser to '%s': %s" % (options["out"], exc)
            )

        if self.verbosity >= 1:
            self.stdout.write(
                "Saved fuser '%s' trained on %d trials to '%s'."
                % (fuser.alias, config.train_trials, options["out"])
            )
