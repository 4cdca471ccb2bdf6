import numpy as np

from cogsense.fusion import BaseFuser


class MockFuser(BaseFuser):
    """Scores a window by the mean of its per-user features."""

    def __init__(self, alias, argument=None, **options):
        super().__init__(alias, argument=argument, **options)
        self.options = options

    def score(self, features):
        return float(np.mean(np.asarray(features, dtype=float)[:-1]))


class MockAdaptiveFuser(MockFuser):
    adaptive = True

    def __init__(self, alias, argument=None, **options):
        super().__init__(alias, argument=argument, **options)
        self.seen = 0

    def fit(self, dataset):
        self.seen = len(dataset)
        return self
