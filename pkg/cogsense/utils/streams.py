"""
Counter-based random streams.

Every random draw in a run comes from a stream keyed by ``(seed, trial,
purpose)``, so results never depend on the order in which trials run.
"""
import numpy as np

from cogsense.exceptions import ConfigurationError

PURPOSES = {
    "hypothesis": 0,
    "signal": 1,
    "noise": 2,
    "fading": 3,
    "reporting": 4,
    "init": 5,
    "split": 6,
}

MAX_SEED = 2 ** 64 - 1


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigurationError("seed must be an integer, got %r." % (seed,))
    if not 0 <= int(seed) <= MAX_SEED:
        raise ConfigurationError("seed must lie in [0, 2**64 - 1], got %d." % seed)
    return int(seed)


def stream(seed, trial=0, purpose="init", user=0):
    """
    Returns a ``numpy.random.Generator`` for one (seed, trial, purpose, user).
    """
    try:
        tag = PURPOSES[purpose]
    except KeyError:
        raise ConfigurationError("Unknown random stream purpose '%s'." % purpose)

    sequence = np.random.SeedSequence(
        entropy=check_seed(seed), spawn_key=(int(trial), tag, int(user))
    )
    return np.random.default_rng(sequence)
