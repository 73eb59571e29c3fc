"""Directional-QCMI time series, arrival detection and velocity fits.

Two intervention protocols are supported. ``measure-at-t`` evolves the
initial state to each grid time and measures A there; this is the protocol
behind arrival times. ``quench-at-zero`` measures A once at t=0 and evolves
every outcome branch separately. Distances start at d=2 because at d=1 the
conditioning set C between sender and receiver is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .exceptions import EmptyConditioner, InsufficientData, InvalidInput
from .infomeasures import Partition, asymmetric_qcmi, mutual_information_sites
from .instrument import apply_instrument, projective_z_instrument
from .qstate import Ket, basis_ket
from .spinchain import ChainModel, Hamiltonian, build_model, evolve, evolve_ket, ground_state, propagator

PROTOCOLS = ("measure-at-t", "quench-at-zero")
CROSSINGS = ("first-sample", "interp")

DEFAULT_DT = 0.02
DEFAULT_T_MAX = 5.0
DEFAULT_THRESHOLD = 0.03


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0, dt, 2dt, ... up to (and including) t_max."""

    t_max: float = DEFAULT_T_MAX
    dt: float = DEFAULT_DT

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise InvalidInput(f"t_max must be positive and finite, got {self.t_max!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidInput(f"dt must be positive and finite, got {self.dt!r}")
        if self.dt > self.t_max:
            raise InvalidInput(f"dt={self.dt} exceeds t_max={self.t_max}")

    @cached_property
    def times(self) -> np.ndarray:
        steps = int(math.floor(self.t_max / self.dt + 1e-9))
        times = self.dt * np.arange(steps + 1)
        times.setflags(write=False)
        return times


@dataclass(frozen=True)
class ScanConfig:
    """Everything needed to reproduce a series or a distance scan."""

    model: ChainModel
    initial: str = "ground"
    protocol: str = "measure-at-t"
    grid: TimeGrid = field(default_factory=TimeGrid)
    threshold: float = DEFAULT_THRESHOLD
    crossing: str = "first-sample"
    site_a: int | None = None
    site_b: int | None = None
    d_min: int | None = None
    d_max: int | None = None
    allow_empty_c: bool = False

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise InvalidInput(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.crossing not in CROSSINGS:
            raise InvalidInput(f"crossing must be one of {CROSSINGS}, got {self.crossing!r}")
        if not (math.isfinite(self.threshold) and self.threshold > 0):
            raise InvalidInput(f"threshold must be positive, got {self.threshold!r}")


@dataclass(frozen=True)
class QcmiSeries:
    config: ScanConfig
    instrument_label: str
    times: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class ArrivalTable:
    """Per-distance arrival times; None marks a threshold never crossed."""

    rows: tuple[tuple[int, float | None], ...]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    v_eff: float | None
    residual_sum_squares: float
    n_points: int
    note: str | None = None


def initial_ket(hamiltonian: Hamiltonian, spec: str) -> Ket:
    """Resolve an initial-state spec: 'ground' or 'basis:<bits>'."""
    if spec == "ground":
        return ground_state(hamiltonian).state
    if spec.startswith("basis:"):
        text = spec[len("basis:"):]
        if not text or any(ch not in "01" for ch in text):
            raise InvalidInput(f"basis spec must be a 0/1 string, got {spec!r}")
        if len(text) != hamiltonian.n_sites:
            raise InvalidInput(
                f"basis spec has {len(text)} bits for a {hamiltonian.n_sites}-site chain"
            )
        return basis_ket([int(ch) for ch in text])
    raise InvalidInput(f"initial state must be 'ground' or 'basis:<bits>', got {spec!r}")


def _series_partition(config: ScanConfig, n_sites: int) -> Partition:
    a, b = config.site_a, config.site_b
    if a is None or b is None:
        raise InvalidInput("time series needs both site_a and site_b")
    if a == b:
        raise InvalidInput("site_a and site_b must differ")
    if not (0 <= a < n_sites and 0 <= b < n_sites):
        raise InvalidInput(f"sites ({a}, {b}) out of range for {n_sites} sites")
    between = tuple(range(min(a, b) + 1, max(a, b)))
    if not between and not config.allow_empty_c:
        raise EmptyConditioner(
            f"no intermediate sites between {a} and {b}; distances start at 2"
        )
    return Partition((a,), (b,), between)


def qcmi_time_series(config: ScanConfig, hamiltonian: Hamiltonian | None = None) -> QcmiSeries:
    """Directional QCMI over the configured time grid for one partition."""
    h = hamiltonian if hamiltonian is not None else build_model(config.model)
    if hamiltonian is not None and hamiltonian.model != config.model:
        raise InvalidInput("supplied Hamiltonian does not match the configured model")
    partition = _series_partition(config, h.n_sites)
    instrument = projective_z_instrument(partition.a[0], h.n_sites)
    psi0 = initial_ket(h, config.initial)
    times = config.grid.times

    values = np.empty(times.size)
    if config.protocol == "measure-at-t":
        for i, t in enumerate(times):
            rho_t = evolve_ket(h, psi0, t).density_matrix()
            values[i] = asymmetric_qcmi(
                rho_t, partition, instrument, allow_empty_c=config.allow_empty_c
            )
    else:  # quench-at-zero
        ensemble = apply_instrument(psi0.density_matrix(), instrument, keep_target=True)
        for i, t in enumerate(times):
            if not partition.c:
                values[i] = 0.0
                continue
            u = propagator(h, t)
            total = 0.0
            for branch in ensemble:
                evolved = evolve(branch.state, u)
                total += branch.probability * mutual_information_sites(
                    evolved, partition.b, partition.c
                )
            values[i] = total

    values.setflags(write=False)
    return QcmiSeries(
        config=config, instrument_label=instrument.describe, times=times, values=values
    )


def arrival_time(
    times: np.ndarray,
    values: np.ndarray,
    threshold: float,
    crossing: str = "first-sample",
) -> float | None:
    """First time the series reaches the threshold; None if it never does."""
    if threshold <= 0:
        raise InvalidInput(f"threshold must be positive, got {threshold!r}")
    if crossing not in CROSSINGS:
        raise InvalidInput(f"crossing must be one of {CROSSINGS}, got {crossing!r}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise InvalidInput("times and values must have matching shapes")
    hits = np.nonzero(values >= threshold)[0]
    if hits.size == 0:
        return None
    i = int(hits[0])
    if crossing == "first-sample" or i == 0:
        return float(times[i])
    t0, t1 = times[i - 1], times[i]
    v0, v1 = values[i - 1], values[i]
    return float(t0 + (threshold - v0) * (t1 - t0) / (v1 - v0))


def arrival_scan(config: ScanConfig, hamiltonian: Hamiltonian | None = None) -> ArrivalTable:
    """Arrival times for sender site 0 against receivers at d = d_min..d_max."""
    if config.d_min is None or config.d_max is None:
        raise InvalidInput("arrival scan needs d_min and d_max")
    n = config.model.n_sites
    lo, hi = config.d_min, config.d_max
    min_distance = 1 if config.allow_empty_c else 2
    if lo < min_distance:
        if lo == 1:
            raise EmptyConditioner("d=1 leaves C empty; pass allow_empty_c to include it")
        raise InvalidInput(f"distances must start at {min_distance}, got {lo}")
    if lo > hi or hi > n - 1:
        raise InvalidInput(f"distance range {lo}:{hi} invalid for {n} sites")

    h = hamiltonian if hamiltonian is not None else build_model(config.model)
    rows = []
    for d in range(lo, hi + 1):
        series_config = replace(config, site_a=0, site_b=d, d_min=None, d_max=None)
        series = qcmi_time_series(series_config, h)
        rows.append(
            (d, arrival_time(series.times, series.values, config.threshold, config.crossing))
        )
    return ArrivalTable(tuple(rows))


def fit_velocity(table: ArrivalTable) -> FitResult:
    """Ordinary least squares of arrival time on distance; v_eff = 1/slope."""
    usable = [(d, t) for d, t in table.rows if t is not None]
    if len(usable) < 2:
        raise InsufficientData(
            f"velocity fit needs at least 2 arrival times, got {len(usable)}"
        )
    d = np.array([row[0] for row in usable], dtype=float)
    t = np.array([row[1] for row in usable], dtype=float)
    d_mean = d.mean()
    t_mean = t.mean()
    slope = float(np.sum((d - d_mean) * (t - t_mean)) / np.sum((d - d_mean) ** 2))
    intercept = float(t_mean - slope * d_mean)
    residuals = t - (slope * d + intercept)
    rss = float(np.sum(residuals**2))
    if slope > 0:
        return FitResult(slope, intercept, 1.0 / slope, rss, len(usable))
    return FitResult(
        slope, intercept, None, rss, len(usable),
        note=f"non-positive slope {slope:.6g}; effective velocity undefined",
    )
