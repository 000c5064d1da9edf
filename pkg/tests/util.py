"""Shared helpers for the test suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ptf_lab.distributions import RootModel, Seed, random_instance
from ptf_lab.instances import Instance
from ptf_lab.oracle import Oracle, QuerySet


def trial_rng(master: int, stream: int = 0) -> np.random.Generator:
    return Seed(master, stream).rng()


def make_instance(n, d, seed, backend="float", model="uniform", alpha=None):
    rng = trial_rng(seed)
    return random_instance(n, RootModel(model, d, alpha), rng, backend=backend)


def full_oracle(instance: Instance) -> Oracle:
    return Oracle(instance.hidden, QuerySet.full(instance.d))


def label_oracle(instance: Instance) -> Oracle:
    return Oracle(instance.hidden, QuerySet.label_only(instance.d))


def frac(num, den=1) -> Fraction:
    return Fraction(num, den)


def ks_statistic_uniform(sample: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance against Uniform[0,1]."""
    xs = np.sort(np.asarray(sample))
    n = len(xs)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - xs), np.max(xs - (grid - 1 / n))))
