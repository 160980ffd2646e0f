"""Quadratic variation curves and the stopping-time ladder.

The realized curve is the running sum of squared path increments; analytic
curves are closed forms available for the models that have one.  The ladder
maps a decreasing family of variation budgets c * n^-gamma to grid times:
rung n is the first grid time at which the curve reaches its budget, so the
rungs decrease toward the time the curve first becomes positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, StructuralError
from .model import (
    BrownianMotion,
    FiniteVariation,
    GeometricBM,
    ModelSpec,
    Path,
    TimeGrid,
)


@dataclass(frozen=True)
class QVCurve:
    """Non-decreasing variation curve sampled on a grid, qv[0] == 0."""

    grid: TimeGrid
    qv: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.qv, dtype=np.float64)
        if vals.shape != self.grid.points.shape:
            raise StructuralError("qv and grid have different lengths")
        if vals[0] != 0.0:
            raise StructuralError("qv must start at zero")
        if np.any(np.diff(vals) < 0):
            raise StructuralError("qv must be non-decreasing")
        vals.flags.writeable = False
        object.__setattr__(self, "qv", vals)

    @property
    def total(self) -> float:
        return float(self.qv[-1])

    def scaled(self, factor: float) -> "QVCurve":
        """Curve of the path multiplied by sqrt(factor): qv scales linearly."""
        if factor < 0:
            raise ValueError("scale factor must be non-negative")
        return QVCurve(self.grid, factor * self.qv)


def realized_qv(path: Path) -> QVCurve:
    """Running sum of squared increments along the grid."""
    qv = np.empty(path.values.size)
    qv[0] = 0.0
    np.cumsum(np.diff(path.values) ** 2, out=qv[1:])
    return QVCurve(path.grid, qv)


def analytic_qv(spec: ModelSpec, path: Path) -> QVCurve:
    """Closed-form variation curve for models that admit one.

    BrownianMotion: sigma^2 * t, frozen at the absorption time when the
    path was absorbed (reflection does not change it).  GeometricBM:
    left-endpoint quadrature of sigma^2 * S^2 dt.  FiniteVariation: zero.
    Raises CapabilityError for anything else.
    """
    t = path.grid.points
    if isinstance(spec, BrownianMotion):
        qv = spec.sigma**2 * t
        if spec.boundary == "absorb":
            frozen = path.values == spec.level  # absorbed values sit exactly at level
            if frozen.any():
                qv = np.minimum(qv, qv[np.argmax(frozen)])
        return QVCurve(path.grid, qv)
    if isinstance(spec, GeometricBM):
        qv = np.empty(t.size)
        qv[0] = 0.0
        np.cumsum(spec.sigma**2 * path.values[:-1] ** 2 * np.diff(t), out=qv[1:])
        return QVCurve(path.grid, qv)
    if isinstance(spec, FiniteVariation):
        return QVCurve(path.grid, np.zeros(t.size))
    raise CapabilityError(f"no analytic variation curve for {type(spec).__name__}")


@dataclass(frozen=True)
class StoppingLadder:
    """Grid times at which the variation curve reaches budgets c * n^-gamma.

    ``times[i]`` is the rung for n = i + 1, so ``times`` runs from the
    shallowest budget (n = 1) to the deepest (n = depth + 1) and is
    non-increasing.  ``indices`` are the matching grid indices.  ``rho`` is
    the grid point preceding the first positive curve value (the horizon
    when the curve is identically zero); it never exceeds the deepest rung.
    """

    c: float
    gamma: float
    depth: int
    times: np.ndarray
    indices: np.ndarray
    rho: float
    grid: TimeGrid

    def __post_init__(self) -> None:
        if self.times.size != self.depth + 1 or self.indices.size != self.depth + 1:
            raise StructuralError("ladder needs depth + 1 rungs")
        if np.any(np.diff(self.indices) > 0):
            raise StructuralError("ladder rungs must be non-increasing in time")
        self.times.flags.writeable = False
        self.indices.flags.writeable = False


def stopping_ladder(curve: QVCurve, c: float, gamma: float, depth: int) -> StoppingLadder:
    """Locate the rungs of the budget ladder on the grid.

    Rung n (n = 1 .. depth + 1) is the first grid time with
    qv >= c * n^-gamma, or the horizon if the curve never gets there.
    """
    if c <= 0:
        raise StructuralError("budget c must be positive")
    if not (0 < gamma < 1):
        raise StructuralError("gamma must lie in (0, 1)")
    if depth < 1:
        raise StructuralError("depth must be >= 1")
    n = np.arange(1, depth + 2, dtype=np.float64)
    budgets = c * n**-gamma
    # qv is non-decreasing: side="left" finds the first index with qv >= budget
    idx = np.searchsorted(curve.qv, budgets, side="left")
    last = curve.grid.points.size - 1
    idx = np.minimum(idx, last).astype(np.int64)
    times = curve.grid.points[idx]

    positive = np.nonzero(curve.qv > 0)[0]
    if positive.size == 0:
        rho = curve.grid.horizon
    else:
        rho = float(curve.grid.points[positive[0] - 1])
    return StoppingLadder(
        c=c,
        gamma=gamma,
        depth=depth,
        times=times,
        indices=idx,
        rho=rho,
        grid=curve.grid,
    )
