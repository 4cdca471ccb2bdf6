import json

from django.core.management.base import BaseCommand, CommandError

from cogsense import constants


def _rate(value):
    return "n/a" if value is None else "%.4f" % value


def _percent(value):
    return "n/a" if value is None else "%.2f" % value


def describe_summary(summary):
    """Yields the console lines for a loaded summary.json."""
    config = summary["config"]
    yield "Seed %s: %d users, N = %d, target P_f %s, %s reports." % (
        summary["seed"],
        config["m_users"],
        config["n_samples"],
        config["target_pfa"],
        config["report_mode"],
    )
    yield "Trained on %d trials, evaluated on %d." % (
        summary["train_trials"],
        summary["evaluation_trials"],
    )

    for name, item in summary["fusers"].items():
        yield "  - %s: AUC %s, P_d %s, P_f %s, accuracy %s" % (
            name,
            _rate(item["auc"]),
            _rate(item["detection_rate"]),
            _rate(item["false_alarm_rate"]),
            _rate(item["accuracy"]),
        )
        training = item.get("training")
        if training and training["epochs"]:
            yield "    best epoch %d of %d" % (training["best_epoch"], training["epochs"])
        for split in item.get("splits") or ():
            yield "    %s: %d trials, MSE %s, error %s%%, AUC %s" % (
                split["name"],
                split["trials"],
                _rate(split["mse"]),
                _percent(split["percent_error"]),
                _rate(split["auc"]),
            )


class Command(BaseCommand):
    help = "Summarizes a summary.json written by 'simulate'."  # noqa A003

    def add_arguments(self, parser):
        parser.add_argument("path", help="Path of a summary.json file.")

    def handle(self, **options):
        path = options["path"]
        try:
            with open(path) as handle:
                summary = json.load(handle)
        except OSError as exc:
            raise CommandError("Can not read '%s': %s" % (path, exc))
        except ValueError as exc:
            raise CommandError("'%s' is not valid JSON: %s" % (path, exc))

        if not isinstance(summary, dict) or summary.get("schema") != constants.SUMMARY_SCHEMA:
            raise CommandError("'%s' is not a cogsense run summary." % path)

        try:
            lines = list(describe_summary(summary))
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise CommandError("'%s' is not a complete run summary: %r" % (path, exc))
        for line in lines:
            self.stdout.write(line)
