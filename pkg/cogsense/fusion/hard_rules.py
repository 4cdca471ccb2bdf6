"""
Counting rules over the users' hard decisions.

AND, OR and Majority are all k-of-M rules: declare H1 when at least ``k`` of
the ``M`` bits are one, with ``k = M``, ``k = 1`` and ``k = ceil((M + 1) / 2)``
respectively. Even-sized majorities therefore resolve ties to H0.
"""
import math

import numpy as np

from cogsense import constants
from cogsense.exceptions import ConfigurationError, InputError
from cogsense.fusion import BaseFuser


def _bits(bits):
    bits = np.asarray(bits)
    if bits.ndim != 1 or len(bits) < 1:
        raise InputError("At least one decision bit is required.")
    if not np.isin(bits, (0, 1)).all():
        raise InputError("Decision bits must be 0 or 1.")
    return bits.astype(int)


def majority_k(m_users):
    return int(math.ceil((m_users + 1) / 2.0))


def fuse_k_of_m(bits, k):
    bits = _bits(bits)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= len(bits):
        raise ConfigurationError("k must lie in [1, %d], got %r." % (len(bits), k))
    return constants.H1 if int(bits.sum()) >= k else constants.H0


def fuse_and(bits):
    return fuse_k_of_m(bits, len(_bits(bits)))


def fuse_or(bits):
    return fuse_k_of_m(bits, 1)


def fuse_majority(bits):
    return fuse_k_of_m(bits, majority_k(len(_bits(bits))))


class HardRuleFuser(BaseFuser):
    """
    Applies a counting rule to bits recovered from the fusion features.

    A user's bit is one when its feature exceeds ``BIT_THRESHOLD``. The score
    is the fused bit itself.
    """

    def __init__(self, alias, argument=None, **options):
        super().__init__(alias, argument=argument, **options)
        self.bit_threshold = float(
            options.get("BIT_THRESHOLD", constants.HARD_BIT_THRESHOLD)
        )

    def bits(self, features):
        values = np.asarray(features, dtype=float)[:-1]
        return (values > self.bit_threshold).astype(int)

    def k_for(self, m_users):
        raise NotImplementedError

    def score(self, features):
        bits = self.bits(features)
        return float(fuse_k_of_m(bits, self.k_for(len(bits))))

    def get_state(self):
        return {"bit_threshold": self.bit_threshold}

    def set_state(self, state):
        self.bit_threshold = float(
            state.get("bit_threshold", constants.HARD_BIT_THRESHOLD)
        )


class AndFuser(HardRuleFuser):
    def k_for(self, m_users):
        return m_users


class OrFuser(HardRuleFuser):
    def k_for(self, m_users):
        return 1


class MajorityFuser(HardRuleFuser):
    def k_for(self, m_users):
        return majority_k(m_users)


class KOfMFuser(HardRuleFuser):
    """``k_of_m:k``; ``K`` may also come from the fuser options."""

    def __init__(self, alias, argument=None, **options):
        super().__init__(alias, argument=argument, **options)
        k = argument if argument is not None else options.get("K")
        if k is None:
            raise ConfigurationError(
                "The k_of_m fuser needs k, e.g. 'k_of_m:3'."
            )
        try:
            self.k = int(k)
        except (TypeError, ValueError):
            raise ConfigurationError("k must be an integer, got %r." % (k,))
        if self.k < 1:
            raise ConfigurationError("k must be >= 1, got %d." % self.k)

    def k_for(self, m_users):
        if self.k > m_users:
            raise ConfigurationError(
                "k must lie in [1, %d], got %d." % (m_users, self.k)
            )
        return self.k
