"""The finite-variation position built on the stopping ladder.

On the target event (path never above 1, terminal variation above budget c)
the position holds, on each ladder piece (rung n+1, rung n], the product
weight H_n = prod_{k<=n} 1 / (1 + beta * Z_k), where Z_k is the positive
part of the price gain across piece k.  Pieces whose gain is zero are
skipped.  Off the event the position is identically zero.  The position is
left-continuous with right limits: at a shared boundary the deeper piece's
holding applies, and the value at t = 0 is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .model import Path, TimeGrid
from .quadvar import QVCurve, StoppingLadder


@dataclass(frozen=True)
class EventFlags:
    """Outcome of the event test for one path."""

    in_event: bool
    sup_s: float
    qv_total: float
    c: float


def detect_event(path: Path, curve: QVCurve, c: float) -> EventFlags:
    """Check sup S <= 1 and terminal variation > c on matching grids."""
    if not path.grid.same_as(curve.grid):
        raise StructuralError("path and variation curve live on different grids")
    if c <= 0:
        raise StructuralError("budget c must be positive")
    sup_s = path.sup
    qv_total = curve.total
    return EventFlags(
        in_event=bool(sup_s <= 1.0 and qv_total > c),
        sup_s=sup_s,
        qv_total=qv_total,
        c=c,
    )


def ladder_gains(path: Path, ladder: StoppingLadder) -> np.ndarray:
    """Positive part of the price gain over each piece.

    gains[n-1] = (S(rung n) - S(rung n+1))^+ for n = 1 .. depth.  Collided
    rungs give empty pieces and a zero gain.
    """
    if not path.grid.same_as(ladder.grid):
        raise StructuralError("path and ladder live on different grids")
    at_rungs = path.values[ladder.indices]
    return np.maximum(at_rungs[:-1] - at_rungs[1:], 0.0)


def product_weights(gains: np.ndarray, beta: float) -> np.ndarray:
    """Cumulative discount products: weights[n-1] = prod_{k<=n} 1/(1 + beta*gains[k])."""
    if not (0 < beta < 1):
        raise StructuralError("beta must lie in (0, 1)")
    if np.any(gains < 0):
        raise StructuralError("gains must be non-negative")
    return np.cumprod(1.0 / (1.0 + beta * gains))


def truncation_bound(weights: np.ndarray, flags: EventFlags) -> float:
    """Provable floor on the cash account: psi >= -bound everywhere.

    The deepest active piece can owe at most (final weight) * sup S; off
    the event the position is zero and the bound collapses to 0.
    """
    if not flags.in_event:
        return 0.0
    return float(weights[-1] * flags.sup_s)


@dataclass(frozen=True)
class StrategyPath:
    """Piecewise-constant position: holdings[n-1] on piece (rung n+1, rung n]."""

    grid: TimeGrid
    ladder: StoppingLadder
    holdings: np.ndarray
    in_event: bool

    def __post_init__(self) -> None:
        h = np.asarray(self.holdings, dtype=np.float64)
        if h.size != self.ladder.depth:
            raise StructuralError("need one holding per ladder piece")
        if np.any(h < 0):
            raise StructuralError("holdings must be non-negative")
        h.flags.writeable = False
        object.__setattr__(self, "holdings", h)

    def piece_on_grid(self) -> np.ndarray:
        """Piece number (1..depth) containing each grid point, 0 outside.

        Grid index i lies in piece n when rung n+1 < i <= rung n; shared
        boundaries resolve to the deeper piece, and rung depth+1 itself is
        outside.
        """
        rev = self.ladder.indices[::-1]  # non-decreasing
        j = np.searchsorted(rev, np.arange(self.grid.points.size), side="left")
        piece = self.ladder.depth + 1 - j
        piece[(piece < 1) | (piece > self.ladder.depth)] = 0
        return piece

    def values_on_grid(self) -> np.ndarray:
        padded = np.concatenate(([0.0], self.holdings))
        return padded[self.piece_on_grid()]

    def value_at(self, t: float) -> float:
        """Position at an arbitrary time in [0, horizon]; left-continuous."""
        if not (0.0 <= t <= self.grid.horizon):
            raise StructuralError("time outside the grid horizon")
        rev = self.ladder.times[::-1]
        j = int(np.searchsorted(rev, t, side="left"))
        piece = self.ladder.depth + 1 - j
        if piece < 1 or piece > self.ladder.depth or t == 0.0:
            return 0.0
        return float(self.holdings[piece - 1])

    def jump_representation(self) -> tuple[np.ndarray, np.ndarray]:
        """Strictly increasing jump times and the value after each jump.

        Empty pieces are dropped, runs of equal value merged, and the exit
        to zero at the shallowest rung included; value before the first
        jump is 0.
        """
        idx = self.ladder.indices
        times: list[float] = []
        values: list[float] = []
        current = 0.0
        for n in range(self.ladder.depth, 0, -1):  # pieces in time order
            if idx[n] == idx[n - 1]:
                continue  # collided rungs: zero-length piece
            h = float(self.holdings[n - 1])
            if h != current:
                times.append(float(self.grid.points[idx[n]]))
                values.append(h)
                current = h
        if current != 0.0:
            times.append(float(self.grid.points[idx[0]]))
            values.append(0.0)
        return np.asarray(times), np.asarray(values)


def build_position(
    flags: EventFlags,
    ladder: StoppingLadder,
    gains: np.ndarray,
    weights: np.ndarray,
) -> StrategyPath:
    """Assemble the position: weight on gaining pieces, zero otherwise."""
    if gains.size != ladder.depth or weights.size != ladder.depth:
        raise StructuralError("gains and weights must cover every ladder piece")
    if flags.in_event:
        holdings = np.where(gains > 0, weights, 0.0)
    else:
        holdings = np.zeros(ladder.depth)
    return StrategyPath(
        grid=ladder.grid, ladder=ladder, holdings=holdings, in_event=flags.in_event
    )


def total_variation(strategy: StrategyPath) -> float:
    """Total variation on [0, horizon], entry and exit jumps included."""
    _, values = strategy.jump_representation()
    if values.size == 0:
        return 0.0
    steps = np.diff(np.concatenate(([0.0], values)))
    return float(np.abs(steps).sum())
