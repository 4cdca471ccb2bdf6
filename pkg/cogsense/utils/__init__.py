import math

from cogsense.constants import FLOAT_DIGITS


def format_float(value, digits=FLOAT_DIGITS):
    """Formats a float with ``digits`` significant digits for CSV output."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return "%.*g" % (digits, value)


def round_float(value, digits=FLOAT_DIGITS):
    """Rounds a float to ``digits`` significant digits for JSON output."""
    value = float(value)
    if not math.isfinite(value):
        return None
    return float("%.*g" % (digits, value))
