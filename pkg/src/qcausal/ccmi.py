"""Classical conditional mutual information on tables and binned time series.

Two layers: exact Shannon-entropy CMI on explicit discrete joint
distributions, and a plug-in estimator for the asymmetric time-series form
I(x_j ; x'_{j+tau} | x'_j, x'_{j-eta0}, x'_{j-2eta0}), where the driver x is
scored against the future of the response x' conditioned on the response's
own present and past. Series are discretized with equiquantal (equal-count)
bins; ties are broken by stable sample order, and an all-equal series
collapses to a single bin carrying zero entropy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import (
    DegenerateSeries,
    InsufficientData,
    InvalidInput,
    NumericalInstability,
)

TABLE_SUM_TOL = 1e-12
EQUIVALENCE_TOL = 1e-12


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over named discrete variables, one axis per name."""

    names: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        if not names:
            raise InvalidInput("distribution needs at least one variable")
        if len(set(names)) != len(names):
            raise InvalidInput(f"variable names must be unique, got {names}")
        table = np.asarray(self.table, dtype=float)
        if table.ndim != len(names):
            raise InvalidInput(
                f"table has {table.ndim} axes for {len(names)} variables"
            )
        if table.min() < 0.0:
            raise InvalidInput(f"probabilities must be non-negative, min {table.min():.3e}")
        total = table.sum()
        if abs(total - 1.0) > TABLE_SUM_TOL:
            raise InvalidInput(f"probabilities sum to {total!r}, expected 1")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "table", table)

    @property
    def alphabet_sizes(self) -> tuple[int, ...]:
        return self.table.shape

    def _axes(self, variables: Sequence[str]) -> tuple[int, ...]:
        unknown = [v for v in variables if v not in self.names]
        if unknown:
            raise InvalidInput(f"unknown variables {unknown}; known: {self.names}")
        if len(set(variables)) != len(tuple(variables)):
            raise InvalidInput(f"duplicate variables in {tuple(variables)}")
        return tuple(self.names.index(v) for v in variables)


def _plugin_entropy(probabilities: np.ndarray) -> float:
    p = probabilities[probabilities > 0.0]
    if p.size == 0:
        return 0.0
    value = float(-np.sum(p * np.log2(p)))
    return value if value > 0.0 else 0.0


def shannon_entropy(dist: JointDistribution, variables: Sequence[str]) -> float:
    """Shannon entropy in bits of the marginal on `variables`."""
    variables = tuple(variables)
    if not variables:
        raise InvalidInput("entropy needs a non-empty variable subset")
    keep = dist._axes(variables)
    drop = tuple(i for i in range(dist.table.ndim) if i not in keep)
    marginal = dist.table.sum(axis=drop) if drop else dist.table
    return _plugin_entropy(np.asarray(marginal).reshape(-1))


def _marginal_entropy(dist: JointDistribution, variables: tuple[str, ...]) -> float:
    if not variables:
        return 0.0
    return shannon_entropy(dist, variables)


def ccmi_symmetric(
    dist: JointDistribution,
    a: Sequence[str],
    b: Sequence[str],
    c: Sequence[str] = (),
) -> float:
    """H(AC) + H(BC) - H(C) - H(ABC), cross-checked against H(A|C) - H(A|BC)."""
    a, b, c = tuple(a), tuple(b), tuple(c)
    if not a or not b:
        raise InvalidInput("A and B must be non-empty")
    combined = a + b + c
    if len(set(combined)) != len(combined):
        raise InvalidInput(f"A, B, C must be disjoint, got {a}, {b}, {c}")
    dist._axes(combined)

    h_ac = _marginal_entropy(dist, a + c)
    h_bc = _marginal_entropy(dist, b + c)
    h_c = _marginal_entropy(dist, c)
    h_abc = _marginal_entropy(dist, combined)

    value = h_ac + h_bc - h_c - h_abc
    conditional_form = (h_ac - h_c) - (h_abc - h_bc)
    if abs(value - conditional_form) > EQUIVALENCE_TOL:
        raise NumericalInstability(
            f"entropy identities disagree by {abs(value - conditional_form):.3e}"
        )
    if value < -EQUIVALENCE_TOL:
        raise NumericalInstability(f"classical CMI {value:.3e} below -{EQUIVALENCE_TOL}")
    return value if value > 0.0 else 0.0


def equiquantal_bins(values: Sequence[float], bins: int) -> np.ndarray:
    """Equal-count bin labels; stable-order tie break; all-equal -> one bin."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInput("binning expects a non-empty 1-d series")
    if bins < 2:
        raise InvalidInput(f"need at least 2 bins, got {bins}")
    if not np.all(np.isfinite(v)):
        raise DegenerateSeries("series contains non-finite values; quantile bins undefined")
    if v.min() == v.max():
        return np.zeros(v.size, dtype=np.intp)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.intp)
    ranks[order] = np.arange(v.size)
    return (ranks * bins) // v.size


@dataclass(frozen=True)
class SeriesEmbedding:
    """Driver/response pair with horizon tau, delay eta0 and bin count."""

    driver: np.ndarray
    response: np.ndarray
    horizon: int
    delay: int
    bins: int = 4

    def __post_init__(self):
        driver = np.asarray(self.driver, dtype=float)
        response = np.asarray(self.response, dtype=float)
        if driver.ndim != 1 or response.ndim != 1:
            raise InvalidInput("series must be one-dimensional")
        if driver.size != response.size:
            raise InvalidInput(
                f"series lengths differ: {driver.size} vs {response.size}"
            )
        if self.horizon < 1 or self.delay < 1:
            raise InvalidInput("horizon and delay must be positive integers")
        if self.bins < 2:
            raise InvalidInput(f"need at least 2 bins, got {self.bins}")
        if not (np.all(np.isfinite(driver)) and np.all(np.isfinite(response))):
            raise DegenerateSeries("series contain non-finite values")
        if driver.size <= self.horizon + 2 * self.delay:
            raise InsufficientData(
                f"series of length {driver.size} too short for horizon {self.horizon} "
                f"and delay {self.delay}"
            )
        driver = driver.copy()
        response = response.copy()
        driver.setflags(write=False)
        response.setflags(write=False)
        object.__setattr__(self, "driver", driver)
        object.__setattr__(self, "response", response)

    @property
    def n_samples(self) -> int:
        return self.driver.size - self.horizon - 2 * self.delay


_EMBED_NAMES = ("driver_now", "response_future", "response_now", "response_past1", "response_past2")


def _embedded_joint(emb: SeriesEmbedding) -> JointDistribution:
    n_s = emb.driver.size
    tau, eta = emb.horizon, emb.delay
    start = 2 * eta
    stop = n_s - tau  # exclusive upper bound on j
    columns = (
        emb.driver[start:stop],
        emb.response[start + tau : stop + tau],
        emb.response[start:stop],
        emb.response[start - eta : stop - eta],
        emb.response[start - 2 * eta : stop - 2 * eta],
    )
    binned = [equiquantal_bins(col, emb.bins) for col in columns]
    counts = np.zeros([emb.bins] * len(columns), dtype=float)
    np.add.at(counts, tuple(binned), 1.0)
    return JointDistribution(_EMBED_NAMES, counts / emb.n_samples)


def ccmi_asymmetric_series(emb: SeriesEmbedding) -> float:
    """Plug-in estimate of the directional time-series CMI, in bits."""
    dist = _embedded_joint(emb)
    return ccmi_symmetric(
        dist,
        ("driver_now",),
        ("response_future",),
        ("response_now", "response_past1", "response_past2"),
    )


def surrogate_baseline(emb: SeriesEmbedding, n_surrogates: int, seed: int = 0) -> np.ndarray:
    """CMI values for driver-shuffled surrogates; estimates the bias floor."""
    if n_surrogates < 1:
        raise InvalidInput(f"need at least one surrogate, got {n_surrogates}")
    rng = np.random.default_rng(seed)
    values = np.empty(n_surrogates)
    for i in range(n_surrogates):
        shuffled = rng.permutation(emb.driver)
        surrogate = SeriesEmbedding(shuffled, emb.response, emb.horizon, emb.delay, emb.bins)
        values[i] = ccmi_asymmetric_series(surrogate)
    return values
