"""Pathwise Riemann-Stieltjes integration for step integrands.

The integral of a left-continuous step function phi against a price path S
over [0, t] is the finite bracket sum

    sum_j phi(tau_j) * (S(t ^ tau_j) - S(t ^ tau_{j-1}))

over the jump times tau_j of phi, which is exact: refining a partition
that already contains every jump time changes nothing.  The module also
evaluates Riemann sums over nested uniform partitions (to exhibit the
convergence), the companion integral of S against dphi, and the
integration-by-parts residual, which is identically zero for step
integrands up to float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import StructuralError
from .model import Path
from .strategy import StrategyPath


@dataclass(frozen=True)
class StepFunction:
    """Left-continuous step function on [0, horizon].

    Value is 0 up to and including the first jump time, then ``values[j]``
    on ``(jump_times[j], jump_times[j+1]]`` (the last value holds to the
    horizon).  Jump size at ``jump_times[j]`` is ``values[j] - values[j-1]``.
    """

    jump_times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.jump_times, dtype=np.float64)
        vals = np.asarray(self.values, dtype=np.float64)
        if times.ndim != 1 or times.shape != vals.shape:
            raise StructuralError("jump times and values must match in length")
        if times.size and (not np.all(np.isfinite(times)) or times[0] < 0):
            raise StructuralError("jump times must be finite and non-negative")
        if np.any(np.diff(times) <= 0):
            raise StructuralError("jump times must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise StructuralError("step values must be finite")
        times.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "jump_times", times)
        object.__setattr__(self, "values", vals)

    @property
    def jump_sizes(self) -> np.ndarray:
        if self.values.size == 0:
            return self.values
        return np.diff(np.concatenate(([0.0], self.values)))

    def evaluate(self, t: float) -> float:
        """phi(t): the value of the piece whose right end is at or past t."""
        return float(self.evaluate_many(np.asarray([t]))[0])

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        # number of jumps strictly before t selects the piece; at a jump
        # time the pre-jump value applies (left continuity)
        piece = np.searchsorted(self.jump_times, ts, side="left")
        padded = np.concatenate(([0.0], self.values))
        return padded[piece]

    def variation_with_exit(self) -> float:
        """Sum of absolute jumps plus the final liquidation to zero."""
        if self.values.size == 0:
            return 0.0
        return float(np.abs(self.jump_sizes).sum() + abs(self.values[-1]))


Integrand = Union[StepFunction, StrategyPath]


def as_step_function(phi: Integrand) -> StepFunction:
    if isinstance(phi, StepFunction):
        return phi
    times, values = phi.jump_representation()
    return StepFunction(times, values)


def _jump_indices(step: StepFunction, path: Path) -> np.ndarray:
    # every jump must sit exactly on the path's grid; no interpolation
    return np.asarray([path.grid.index_of(t) for t in step.jump_times], dtype=np.int64)


def rs_integral_curve(phi: Integrand, path: Path) -> np.ndarray:
    """Integral of phi dS from 0 to every grid time, as one array."""
    step = as_step_function(phi)
    s = path.values
    jidx = _jump_indices(step, path)
    m = jidx.size
    prefix = np.zeros(m + 1)
    if m >= 2:
        # contribution of completed piece j: values[j] * (S at next jump - S at this jump)
        np.cumsum(step.values[:-1] * (s[jidx[1:]] - s[jidx[:-1]]), out=prefix[2:])
    padded_vals = np.concatenate(([0.0], step.values))
    padded_ref = np.concatenate(([s[0]], s[jidx]))
    piece = np.searchsorted(jidx, np.arange(s.size), side="left")
    return prefix[piece] + padded_vals[piece] * (s - padded_ref[piece])


def rs_integral(phi: Integrand, path: Path, t: float | None = None) -> float:
    """Integral of phi dS over [0, t] (t a grid point; horizon if omitted)."""
    curve = rs_integral_curve(phi, path)
    i = path.values.size - 1 if t is None else path.grid.index_of(t)
    return float(curve[i])


def path_wrt_step_curve(path: Path, phi: Integrand) -> np.ndarray:
    """Integral of S dphi from 0 to every grid time.

    The jump of phi at tau carries mass just after tau, so the sum runs
    over jumps strictly before t; this is what makes integration by parts
    exact for left-continuous step integrands.
    """
    step = as_step_function(phi)
    jidx = _jump_indices(step, path)
    weighted = np.concatenate(([0.0], np.cumsum(path.values[jidx] * step.jump_sizes)))
    piece = np.searchsorted(jidx, np.arange(path.values.size), side="left")
    return weighted[piece]


def path_wrt_step(path: Path, phi: Integrand, t: float | None = None) -> float:
    curve = path_wrt_step_curve(path, phi)
    i = path.values.size - 1 if t is None else path.grid.index_of(t)
    return float(curve[i])


def ibp_residual_curve(phi: Integrand, path: Path) -> np.ndarray:
    """Pointwise defect of integration by parts; rounding-level for steps.

    residual(t) = int_0^t phi dS - (phi_t S_t - phi_0 S_0 - int_0^t S dphi),
    with phi_0 = 0 by the step-function convention.
    """
    step = as_step_function(phi)
    phi_grid = step.evaluate_many(path.grid.points)
    lhs = rs_integral_curve(step, path)
    rhs = phi_grid * path.values - path_wrt_step_curve(path, step)
    return lhs - rhs


def ibp_residual(phi: Integrand, path: Path) -> float:
    """Largest absolute integration-by-parts defect over the grid."""
    return float(np.abs(ibp_residual_curve(phi, path)).max())


@dataclass(frozen=True)
class RefinementReport:
    """Riemann estimates over nested partitions against the bracket sum."""

    partition_sizes: tuple[int, ...]
    estimates: tuple[float, ...]
    closed_form: float
    max_deviation: float

    @property
    def deviations(self) -> tuple[float, ...]:
        return tuple(abs(e - self.closed_form) for e in self.estimates)

    @property
    def finest_deviation(self) -> float:
        return self.deviations[-1]


def riemann_refinement(
    phi: Integrand,
    path: Path,
    partition_sizes: Sequence[int],
    include_jumps: bool = False,
) -> RefinementReport:
    """Right-endpoint Riemann sums of phi dS over nested uniform partitions.

    Each size must divide the grid and the next size, so partitions nest.
    With ``include_jumps`` the jump times are added to every partition,
    which makes each estimate equal to the bracket sum.
    """
    step = as_step_function(phi)
    sizes = [int(k) for k in partition_sizes]
    if not sizes or any(k < 1 for k in sizes):
        raise StructuralError("partition sizes must be positive")
    steps_total = path.grid.steps
    for a, b in zip(sizes, sizes[1:]):
        if b % a != 0:
            raise StructuralError("partition sizes must nest (each divides the next)")
    if steps_total % sizes[-1] != 0:
        raise StructuralError("partition sizes must divide the grid")

    jidx = _jump_indices(step, path)
    s = path.values
    estimates = []
    for size in sizes:
        pidx = np.arange(0, steps_total + 1, steps_total // size, dtype=np.int64)
        if include_jumps:
            pidx = np.unique(np.concatenate((pidx, jidx)))
        at_right = step.evaluate_many(path.grid.points[pidx[1:]])
        estimates.append(float(np.sum(at_right * (s[pidx[1:]] - s[pidx[:-1]]))))

    closed = rs_integral(step, path)
    devs = [abs(e - closed) for e in estimates]
    return RefinementReport(
        partition_sizes=tuple(sizes),
        estimates=tuple(estimates),
        closed_form=closed,
        max_deviation=max(devs),
    )
