from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from cogsense.config import build_config, load_config
from cogsense.exceptions import CogsenseError
from cogsense.experiment import emit_outputs, run_experiment
from cogsense.fusion import load_fuser
from cogsense.utils.log import getLogger

DEFAULT_OUT_DIR = "results"
DEFAULT_THREADS = 1

LOG = getLogger("cogsense.management")


def scenario_from_options(options):
    """Builds the scenario from ``--config``/``--preset`` and ``--seed``."""
    path = options.get("config")
    preset = options.get("preset")
    seed = options.get("seed")

    if path and preset:
        raise CommandError("--config and --preset are mutually exclusive.")
    if not path and not preset:
        raise CommandError("Either --config or --preset is required.")

    try:
        if path:
            config = load_config(path)
            if seed is not None:
                config = config.override(seed=seed)
        else:
            values = {"preset": preset}
            if seed is not None:
                values["seed"] = seed
            config = build_config(values)
    except CogsenseError as exc:
        raise CommandError(str(exc))
    return config


def add_scenario_arguments(parser):
    parser.add_argument(
        "-c", "--config", help="Path of the scenario file (key = value lines)."
    )
    parser.add_argument(
        "-p",
        "--preset",
        help="Run a named preset scenario instead of a scenario file.",
    )
    parser.add_argument(
        "-s",
        "--seed",
        type=int,
        help="Overrides the seed of the scenario.",
    )
    parser.add_argument(
        "-k",
        "--threads",
        type=int,
        default=DEFAULT_THREADS,
        help="Number of threads simulating trials. Results do not depend on it.",
    )


class Command(BaseCommand):
    help = "Runs a Monte Carlo fusion experiment and writes its result files."  # noqa A003

    def add_arguments(self, parser):
        add_scenario_arguments(parser)
        parser.add_argument(
            "-o",
            "--out",
            default=DEFAULT_OUT_DIR,
            help="Directory receiving the result files.",
        )
        parser.add_argument(
            "-f",
            "--fusers",
            help="Comma-separated fuser names replacing the scenario's 'fuser' list.",
        )
        parser.add_argument(
            "-l",
            "--load-fuser",
            action="append",
            default=[],
            dest="load_fuser",
            help="Evaluate a fuser saved by 'train' instead of training it "
            "(can be used multiple times).",
        )

    def handle(self, **options):
        self.verbosity = int(options.get("verbosity", 1))
        config = scenario_from_options(options)

        names = None
        if options.get("fusers"):
            names = [name.strip() for name in options["fusers"].split(",") if name.strip()]

        try:
            loaded = {}
            for path in options.get("load_fuser") or []:
                fuser = load_fuser(path)
                loaded[fuser.alias] = fuser
            if loaded:
                names = list(names or config.fuser)
                names.extend(alias for alias in loaded if alias not in names)

            summary = run_experiment(
                config,
                threads=options.get("threads", DEFAULT_THREADS),
                fusers=names,
                loaded=loaded,
            )
            written = emit_outputs(summary, options["out"])
        except (CogsenseError, ImproperlyConfigured) as exc:
            LOG.exception("Simulation failed")
            raise CommandError(str(exc))
        except OSError as exc:
            raise CommandError(str(exc))

        if self.verbosity >= 1:
            for name, item in summary.fusers.items():
                area = "n/a" if item.area is None else "%.4f" % item.area
                self.stdout.write(
                    "%s: AUC %s, P_d %.4f, P_f %.4f"
                    % (name, area, item.detection_rate, item.false_alarm_rate)
                )
            self.stdout.write(
                "Wrote %d files to '%s' in %.2f s."
                % (len(written), options["out"], summary.wall_clock_seconds)
            )
