import csv
import math

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from cogsense import constants
from cogsense.detector import pd_as_printed, pd_theoretical
from cogsense.exceptions import CogsenseError
from cogsense.signal import db_to_linear
from cogsense.utils import format_float

DEFAULT_GRID = "0.01:0.99:99"
DEFAULT_SAMPLES = 1000


def parse_grid(text):
    """Parses ``start:stop:count`` into an evenly spaced P_f grid."""
    bits = text.split(":")
    if len(bits) != 3:
        raise CommandError("--pfa-grid expects 'start:stop:count', got %r." % text)
    try:
        start, stop, count = float(bits[0]), float(bits[1]), int(bits[2])
    except ValueError:
        raise CommandError("--pfa-grid expects 'start:stop:count', got %r." % text)
    if count < 1:
        raise CommandError("--pfa-grid needs at least one point, got %d." % count)
    return np.linspace(start, stop, count)


def theory_rows(grid, snr_db_values, n_samples, noise_variance, convention, as_printed):
    """
    Rows of ``(snr_db, p_fa, p_d[, p_d_as_printed])``.

    The first block is the zero-SNR baseline, written with ``snr_db = -inf``.
    """
    rows = []
    for snr_db in [-math.inf] + list(snr_db_values):
        snr = 0.0 if math.isinf(snr_db) else float(db_to_linear(snr_db))
        for p_fa in grid:
            row = [
                format_float(snr_db),
                format_float(p_fa),
                format_float(pd_theoretical(p_fa, snr, n_samples, convention=convention)),
            ]
            if as_printed:
                row.append(
                    format_float(
                        pd_as_printed(p_fa, snr, math.sqrt(noise_variance), n_samples)
                    )
                )
            rows.append(row)
    return rows


class Command(BaseCommand):
    help = "Writes theoretical ROC curves of the energy detector as CSV."  # noqa A003

    def add_arguments(self, parser):
        parser.add_argument(
            "-g",
            "--pfa-grid",
            default=DEFAULT_GRID,
            dest="pfa_grid",
            help="False-alarm grid as 'start:stop:count'.",
        )
        parser.add_argument(
            "--snr-db",
            type=float,
            nargs="+",
            default=[],
            dest="snr_db",
            help="Sensing SNRs in dB; a zero-SNR baseline is always included.",
        )
        parser.add_argument(
            "-n",
            "--n",
            type=int,
            default=DEFAULT_SAMPLES,
            dest="n_samples",
            help="Samples per sensing window.",
        )
        parser.add_argument(
            "--noise-variance",
            type=float,
            default=1.0,
            dest="noise_variance",
            help="Noise variance used by the as-printed curve.",
        )
        parser.add_argument(
            "--convention",
            choices=constants.CONVENTIONS,
            default=constants.REAL,
            help="Statistic convention of the theoretical curve.",
        )
        parser.add_argument(
            "--as-printed",
            action="store_true",
            default=False,
            dest="as_printed",
            help="Add the published closed form, evaluated as typeset, "
            "beside the corrected curve.",
        )
        parser.add_argument(
            "-o",
            "--out",
            help="Path of the CSV file. Defaults to standard output.",
        )

    def handle(self, **options):
        grid = parse_grid(options["pfa_grid"])
        if not options["noise_variance"] > 0:
            raise CommandError(
                "--noise-variance must be > 0, got %r." % options["noise_variance"]
            )
        try:
            rows = theory_rows(
                grid,
                options["snr_db"],
                options["n_samples"],
                options["noise_variance"],
                options["convention"],
                options["as_printed"],
            )
        except CogsenseError as exc:
            raise CommandError(str(exc))

        header = ["snr_db", "p_fa", "p_d"]
        if options["as_printed"]:
            header.append("p_d_as_printed")

        path = options.get("out")
        try:
            if path:
                with open(path, "w", newline="") as handle:
                    self.write_rows(handle, header, rows)
            else:
                self.write_rows(self.stdout, header, rows)
        except OSError as exc:
            raise CommandError("Can not write '%s': %s" % (path, exc))

    def write_rows(self, handle, header, rows):
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
