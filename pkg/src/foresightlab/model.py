"""Price-path models on finite time grids.

Three model families, all sampled exactly at grid times (no Euler error):

* ``BrownianMotion`` -- arithmetic Brownian motion with exact Gaussian
  increments and an optional absorbing or reflecting boundary that keeps
  the path positive.
* ``GeometricBM`` -- driftless geometric Brownian motion via the exact
  log-normal step, positive by construction.
* ``FiniteVariation`` -- deterministic or monotone random paths whose
  quadratic variation vanishes under grid refinement.

Paths are immutable; every simulated value is strictly positive or the
simulation raises ``PathValidityError``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import PathValidityError, StructuralError
from .rng import gaussians, uniforms


@dataclass(frozen=True)
class SeedSpec:
    """Addresses one independent random stream.

    ``seed`` identifies the scenario (one per Monte Carlo path); ``stream``
    separates independent draws within a scenario.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream must be non-negative")


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times starting at 0.

    ``points`` has ``steps + 1`` entries; ``points[0] == 0`` and
    ``points[-1]`` is the horizon.
    """

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise StructuralError("grid needs at least two points")
        if pts[0] != 0.0:
            raise StructuralError("grid must start at t = 0")
        if not np.all(np.diff(pts) > 0):
            raise StructuralError("grid points must be strictly increasing")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, horizon: float, steps: int) -> "TimeGrid":
        """Uniform grid: points[i] = i * horizon / steps, last point exact."""
        if horizon <= 0:
            raise StructuralError("horizon must be positive")
        if steps < 1:
            raise StructuralError("steps must be >= 1")
        pts = np.arange(steps + 1, dtype=np.float64) * (horizon / steps)
        pts[-1] = horizon  # guard the endpoint against accumulation error
        return cls(pts)

    @property
    def horizon(self) -> float:
        return float(self.points[-1])

    @property
    def steps(self) -> int:
        return self.points.size - 1

    def same_as(self, other: "TimeGrid") -> bool:
        return self.points is other.points or np.array_equal(self.points, other.points)

    def index_of(self, t: float) -> int:
        """Exact grid index of time t; StructuralError if t is off-grid."""
        i = int(np.searchsorted(self.points, t))
        if i >= self.points.size or self.points[i] != t:
            raise StructuralError(f"time {t!r} is not a grid point")
        return i


@dataclass(frozen=True)
class BrownianMotion:
    """Arithmetic Brownian motion started at ``s0`` with volatility ``sigma``.

    ``boundary`` keeps the path positive: ``"absorb"`` freezes the path at
    ``level`` on the first grid crossing, ``"reflect"`` folds each increment
    about ``level``, ``"none"`` leaves the path free (simulation fails if it
    reaches zero).
    """

    s0: float = 1.0
    sigma: float = 1.0
    boundary: str = "none"
    level: float = 0.01

    def __post_init__(self) -> None:
        if self.s0 <= 0 or self.sigma <= 0:
            raise ValueError("s0 and sigma must be positive")
        if self.boundary not in ("none", "absorb", "reflect"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.boundary != "none" and not (0 < self.level < self.s0):
            raise ValueError("boundary level must lie strictly between 0 and s0")


@dataclass(frozen=True)
class GeometricBM:
    """Driftless geometric Brownian motion, exact log-normal steps."""

    s0: float = 1.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.s0 <= 0 or self.sigma <= 0:
            raise ValueError("s0 and sigma must be positive")


@dataclass(frozen=True)
class FiniteVariation:
    """Finite-variation path families with vanishing quadratic variation.

    Kinds: ``"linear"`` (s0 + slope * t), ``"sinusoid"``
    (s0 + amplitude * sin(2 pi frequency t)), ``"monotone_random"``
    (cumulative positive random steps scaled to climb exactly ``band``
    above s0 over the horizon).  Only the kind's own parameters are read.
    """

    kind: str = "linear"
    s0: float = 1.0
    slope: float = 1.0
    amplitude: float = 0.25
    frequency: float = 1.0
    step_scale: float = 1.0
    band: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "sinusoid", "monotone_random"):
            raise ValueError(f"unknown finite-variation kind {self.kind!r}")
        for name in ("s0", "slope", "amplitude", "frequency", "step_scale", "band"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


ModelSpec = Union[BrownianMotion, GeometricBM, FiniteVariation]


@dataclass(frozen=True)
class Path:
    """One simulated trajectory sampled on a grid; strictly positive."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.points.shape:
            raise StructuralError("values and grid have different lengths")
        if not np.all(np.isfinite(vals)):
            raise PathValidityError("path contains non-finite values")
        if vals.min() <= 0:
            raise PathValidityError("path values must be strictly positive")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def sup(self) -> float:
        return float(self.values.max())


def simulate(spec: ModelSpec, grid: TimeGrid, seed: SeedSpec) -> Path:
    """Simulate one path of ``spec`` on ``grid`` from the ``seed`` stream."""
    if isinstance(spec, BrownianMotion):
        values = _simulate_brownian(spec, grid, seed)
    elif isinstance(spec, GeometricBM):
        values = _simulate_gbm(spec, grid, seed)
    elif isinstance(spec, FiniteVariation):
        values = _simulate_fv(spec, grid, seed)
    else:
        raise TypeError(f"unknown model spec {type(spec).__name__}")
    if values.min() <= 0:
        raise PathValidityError(
            f"{type(spec).__name__} path reached a non-positive value; "
            "use an absorbing or reflecting boundary or smaller amplitude"
        )
    return Path(grid, values)


def rescale(path: Path, factor: float) -> Path:
    """Multiply a path by a positive constant."""
    if factor <= 0:
        raise ValueError("rescale factor must be positive")
    return Path(path.grid, factor * path.values)


def _simulate_brownian(spec: BrownianMotion, grid: TimeGrid, seed: SeedSpec) -> np.ndarray:
    dt = np.diff(grid.points)
    noise = gaussians(seed.seed, seed.stream, dt.size)
    inc = spec.sigma * np.sqrt(dt) * noise
    if spec.boundary == "reflect":
        return spec.level + _fold_nonnegative(spec.s0 - spec.level, inc)
    values = np.empty(grid.points.size)
    values[0] = spec.s0
    values[1:] = spec.s0 + np.cumsum(inc)
    if spec.boundary == "absorb":
        hit = values <= spec.level
        if hit.any():
            values[np.argmax(hit):] = spec.level
    return values


def _fold_nonnegative(start: float, inc: np.ndarray) -> np.ndarray:
    """Recursion d[k] = |d[k-1] + inc[k]|, vectorized between fold events."""
    n = inc.size
    out = np.empty(n + 1)
    out[0] = start
    pos = 0
    base = start
    while pos < n:
        tail = base + np.cumsum(inc[pos:])
        neg = tail < 0
        if not neg.any():
            out[pos + 1 :] = tail
            break
        j = int(np.argmax(neg))  # first entry that would cross below zero
        out[pos + 1 : pos + j + 1] = tail[:j]
        out[pos + j + 1] = -tail[j]
        base = -tail[j]
        pos += j + 1
    return out


def _simulate_gbm(spec: GeometricBM, grid: TimeGrid, seed: SeedSpec) -> np.ndarray:
    dt = np.diff(grid.points)
    noise = gaussians(seed.seed, seed.stream, dt.size)
    bm = np.cumsum(np.sqrt(dt) * noise)
    t = grid.points[1:]
    values = np.empty(grid.points.size)
    values[0] = spec.s0
    # exact driftless step: E[S_t] = s0 at every grid time
    values[1:] = spec.s0 * np.exp(spec.sigma * bm - 0.5 * spec.sigma**2 * t)
    return values


def _simulate_fv(spec: FiniteVariation, grid: TimeGrid, seed: SeedSpec) -> np.ndarray:
    t = grid.points
    if spec.kind == "linear":
        return spec.s0 + spec.slope * t
    if spec.kind == "sinusoid":
        return spec.s0 + spec.amplitude * np.sin(2.0 * np.pi * spec.frequency * t)
    steps = spec.step_scale * uniforms(seed.seed, seed.stream, t.size - 1)
    climb = np.cumsum(steps)
    values = np.empty(t.size)
    values[0] = spec.s0
    values[1:] = spec.s0 + spec.band * (climb / climb[-1])
    return values
