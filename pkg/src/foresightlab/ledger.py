"""Self-financing ledger, pathwise checks, and the Monte Carlo harness.

`build_ledger` evaluates the bracket-sum integral of the position against
the price path at every grid time and books the split V = psi + phi * S
(value = cash + position marked at the price).  `verify_theorem` runs the
per-path inequality and identity checks; `verify_prop_finite` searches a
ledger for the cash shortfall that must appear when the price path has
finite variation.  `run_scene` / `evaluate_scene` assemble the whole
pipeline for one seed, and `monte_carlo` sweeps a seed range with
deterministic, order-independent aggregation.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import sqrt
from typing import Optional

import numpy as np

from .errors import ConfigError, StructuralError
from .model import ModelSpec, Path, SeedSpec, TimeGrid, rescale, simulate
from .quadvar import QVCurve, StoppingLadder, analytic_qv, realized_qv, stopping_ladder
from .stieltjes import StepFunction, ibp_residual, rs_integral_curve
from .strategy import (
    EventFlags,
    StrategyPath,
    build_position,
    detect_event,
    ladder_gains,
    product_weights,
    truncation_bound,
)

THREADS_ENV = "FORESIGHTLAB_THREADS"


@dataclass(frozen=True)
class Ledger:
    """Accounting curves on the grid; value == cash + position * price."""

    grid: TimeGrid
    prices: np.ndarray
    position: np.ndarray
    value: np.ndarray
    cash: np.ndarray

    def position_value(self) -> np.ndarray:
        return self.position * self.prices


def build_ledger(path: Path, strategy: StrategyPath) -> Ledger:
    """Book the bracket-sum value curve and its cash split."""
    if not path.grid.same_as(strategy.grid):
        raise StructuralError("path and strategy live on different grids")
    position = strategy.values_on_grid()
    value = rs_integral_curve(strategy, path)
    cash = value - position * path.values
    return Ledger(
        grid=path.grid, prices=path.values, position=position, value=value, cash=cash
    )


@dataclass(frozen=True)
class VerificationReport:
    """Per-path outcome of the inequality and identity checks.

    ``strict_after_rho`` is the strict dominance V > phi * S on every grid
    time after the shallowest rung; it is vacuously true off the event,
    where the position is identically zero.  ``min_cash_guaranteed`` is
    the worst cash value over the region where cash must be non-negative
    (outside the ladder, and on pieces whose weight clears the final
    weight by the 1/(1-beta) factor).
    """

    in_event: bool
    eq_as_holds: bool
    strict_after_rho: bool
    min_cash_guaranteed: float
    truncation_epsilon: float
    terminal_residual: float
    terminal_value: float
    rho: float
    first_rung: float
    c: float
    sup_s: float
    qv_total: float
    final_weight: float
    active_pieces: int

    @property
    def passed(self) -> bool:
        tol = 1e-10 * max(1.0, abs(self.terminal_value))
        return (
            self.eq_as_holds
            and self.strict_after_rho
            and abs(self.terminal_residual) <= tol
        )


def verify_theorem(
    ledger: Ledger,
    strategy: StrategyPath,
    ladder: StoppingLadder,
    flags: EventFlags,
    weights: np.ndarray,
    beta: float,
    tol_identity: float = 1e-10,
) -> VerificationReport:
    """Run every per-path check of the arbitrage construction."""
    cash = ledger.cash
    final_weight = float(weights[-1])
    epsilon = truncation_bound(weights, flags)

    if flags.in_event:
        terminal_expected = (1.0 - final_weight) / beta
        terminal_residual = float(ledger.value[-1]) - terminal_expected
    else:
        terminal_residual = 0.0
    terminal_value = float(ledger.value[-1])
    tol_abs = tol_identity * max(1.0, abs(terminal_value))

    # guaranteed region: outside the ladder, plus pieces whose weight has
    # 1/(1-beta) headroom over the final weight
    piece = strategy.piece_on_grid()
    clears = np.concatenate(([False], weights >= final_weight / (1.0 - beta)))
    guaranteed = (piece == 0) | clears[piece]
    min_cash_guaranteed = float(cash[guaranteed].min())

    eq_as = bool(
        min_cash_guaranteed >= -tol_abs and float(cash.min()) >= -epsilon - tol_abs
    )
    if not flags.in_event:
        # off the event the whole book must be exactly flat
        eq_as = eq_as and ledger.position.max() == 0.0 and np.abs(ledger.value).max() == 0.0

    first_rung_idx = int(ladder.indices[0])
    after = ledger.value[first_rung_idx + 1 :]
    marked = ledger.position_value()[first_rung_idx + 1 :]
    if not flags.in_event:
        strict = True  # the dominance claim conditions on the event
    else:
        strict = bool(after.size == 0 or np.all(after > marked))

    return VerificationReport(
        in_event=flags.in_event,
        eq_as_holds=eq_as,
        strict_after_rho=strict,
        min_cash_guaranteed=min_cash_guaranteed,
        truncation_epsilon=epsilon,
        terminal_residual=terminal_residual,
        terminal_value=terminal_value,
        rho=ladder.rho,
        first_rung=float(ladder.times[0]),
        c=flags.c,
        sup_s=flags.sup_s,
        qv_total=flags.qv_total,
        final_weight=final_weight,
        active_pieces=int(np.count_nonzero(strategy.holdings)),
    )


@dataclass(frozen=True)
class PropFiniteReport:
    """Counterexample search result for a non-negative step position."""

    witness_found: bool
    witness_time: Optional[float]
    min_cash: float
    ibp_defect: float


def verify_prop_finite(path: Path, phi: StepFunction) -> PropFiniteReport:
    """Find a grid time with strictly negative cash, if one exists.

    For a non-negative position that starts flat and buys at some jump,
    the cash account dips below zero right after the first buy whenever
    the price path has finite variation (there is no variation budget to
    pay for the position).  Raises StructuralError on negative positions.
    """
    if np.any(phi.values < 0):
        raise StructuralError("position must be non-negative")
    value = rs_integral_curve(phi, path)
    position = phi.evaluate_many(path.grid.points)
    cash = value - position * path.values
    negative = np.nonzero(cash < 0)[0]
    if negative.size == 0:
        return PropFiniteReport(
            witness_found=False,
            witness_time=None,
            min_cash=float(cash.min()),
            ibp_defect=ibp_residual(phi, path),
        )
    return PropFiniteReport(
        witness_found=True,
        witness_time=float(path.grid.points[negative[0]]),
        min_cash=float(cash.min()),
        ibp_defect=ibp_residual(phi, path),
    )


def random_nonneg_step(grid: TimeGrid, seed: SeedSpec, max_jumps: int = 8) -> StepFunction:
    """Random non-negative step position with jumps strictly inside (0, horizon)."""
    if max_jumps < 1 or max_jumps > grid.steps - 1:
        raise StructuralError("max_jumps must fit strictly inside the grid")
    from .rng import generator

    gen = generator(seed.seed, seed.stream)
    k = int(gen.integers(1, max_jumps + 1))
    idx = np.sort(gen.choice(grid.steps - 1, size=k, replace=False)) + 1
    values = gen.integers(1, 1 << 53, size=k).astype(np.float64) * 2.0**-53
    return StepFunction(grid.points[idx], values)


@dataclass(frozen=True)
class ConstructionParams:
    """Knobs of the pre-scaled ladder construction."""

    prescale: float = 0.4
    c_policy: str = "half_qv"
    c_value: float = 0.05
    gamma: float = 0.5
    depth: int = 64
    beta: float = 2.0 / 3.0
    qv_source: str = "analytic"

    def __post_init__(self) -> None:
        if self.prescale <= 0:
            raise ValueError("prescale must be positive")
        if self.c_policy not in ("half_qv", "fixed"):
            raise ValueError(f"unknown c policy {self.c_policy!r}")
        if self.c_value <= 0:
            raise ValueError("c_value must be positive")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not (0 < self.beta < 1):
            raise ValueError("beta must lie in (0, 1)")
        if self.qv_source not in ("analytic", "realized"):
            raise ValueError(f"unknown qv source {self.qv_source!r}")

    def at_depth(self, depth: int) -> "ConstructionParams":
        return ConstructionParams(
            prescale=self.prescale,
            c_policy=self.c_policy,
            c_value=self.c_value,
            gamma=self.gamma,
            depth=depth,
            beta=self.beta,
            qv_source=self.qv_source,
        )


@dataclass(frozen=True)
class Scene:
    """One seed's simulated market: pre-scaled path, variation curve, budget."""

    seed: SeedSpec
    path: Path
    curve: QVCurve
    c: float


@dataclass(frozen=True)
class SinglePathRun:
    """Everything the construction produced for one seed at one depth."""

    scene: Scene
    params: ConstructionParams
    ladder: StoppingLadder
    flags: EventFlags
    gains: np.ndarray
    weights: np.ndarray
    strategy: StrategyPath
    ledger: Ledger
    report: VerificationReport


def run_scene(spec: ModelSpec, grid: TimeGrid, seed: SeedSpec, params: ConstructionParams) -> Scene:
    """Simulate, pre-scale, and attach the variation curve and budget."""
    base = simulate(spec, grid, seed)
    path = rescale(base, params.prescale)
    if params.qv_source == "analytic":
        curve = analytic_qv(spec, base).scaled(params.prescale**2)
    else:
        curve = realized_qv(path)
    if params.c_policy == "half_qv":
        # a zero curve (finite-variation models) cannot clear any budget;
        # fall back to the fixed value so the ladder stays well-formed
        c = curve.total / 2.0 if curve.total > 0 else params.c_value
    else:
        c = params.c_value
    return Scene(seed=seed, path=path, curve=curve, c=c)


def evaluate_scene(scene: Scene, params: ConstructionParams, tol_identity: float = 1e-10) -> SinglePathRun:
    """Build ladder, position, ledger, and checks on a prepared scene."""
    ladder = stopping_ladder(scene.curve, scene.c, params.gamma, params.depth)
    flags = detect_event(scene.path, scene.curve, scene.c)
    gains = ladder_gains(scene.path, ladder)
    weights = product_weights(gains, params.beta)
    strategy = build_position(flags, ladder, gains, weights)
    ledger = build_ledger(scene.path, strategy)
    report = verify_theorem(
        ledger, strategy, ladder, flags, weights, params.beta, tol_identity
    )
    return SinglePathRun(
        scene=scene,
        params=params,
        ladder=ladder,
        flags=flags,
        gains=gains,
        weights=weights,
        strategy=strategy,
        ledger=ledger,
        report=report,
    )


def run_single(
    spec: ModelSpec,
    grid: TimeGrid,
    seed: SeedSpec,
    params: ConstructionParams,
    tol_identity: float = 1e-10,
) -> SinglePathRun:
    """Full pipeline for one seed."""
    return evaluate_scene(run_scene(spec, grid, seed, params), params, tol_identity)


@dataclass(frozen=True)
class PathStats:
    """Scalar footprint of one seed inside a sweep."""

    seed: int
    in_event: bool
    passed: bool
    eq_as_holds: bool
    strict_after_rho: bool
    terminal_value: float
    terminal_residual: float
    epsilon: float
    epsilon_deeper: float


@dataclass(frozen=True)
class MCSummary:
    """Aggregate of a seed sweep; event statistics are None when no path qualifies."""

    paths_total: int
    paths_in_event: int
    event_fraction: float
    event_fraction_low: float
    event_fraction_high: float
    fraction_strict: Optional[float]
    mean_terminal_value: Optional[float]
    min_terminal_value: Optional[float]
    max_terminal_residual: Optional[float]
    max_epsilon: Optional[float]
    epsilon_shrink_fraction: Optional[float]
    all_passed: bool
    seed_start: int
    seed_count: int


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% score interval for a binomial fraction; (0, 1) on zero trials."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))


def worker_threads() -> int:
    """Worker cap from the environment; 0 or unset means one per CPU."""
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(THREADS_ENV, f"not an integer: {raw!r}") from exc
    if n < 0:
        raise ConfigError(THREADS_ENV, "must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _sweep_one(
    spec: ModelSpec, grid: TimeGrid, seed: int, params: ConstructionParams, tol: float
) -> PathStats:
    scene = run_scene(spec, grid, SeedSpec(seed=seed, stream=0), params)
    run = evaluate_scene(scene, params, tol)
    deeper = evaluate_scene(scene, params.at_depth(2 * params.depth), tol)
    return PathStats(
        seed=seed,
        in_event=run.report.in_event,
        passed=run.report.passed,
        eq_as_holds=run.report.eq_as_holds,
        strict_after_rho=run.report.strict_after_rho,
        terminal_value=run.report.terminal_value,
        terminal_residual=run.report.terminal_residual,
        epsilon=run.report.truncation_epsilon,
        epsilon_deeper=deeper.report.truncation_epsilon,
    )


def monte_carlo(
    spec: ModelSpec,
    grid: TimeGrid,
    seed_start: int,
    seed_count: int,
    params: ConstructionParams,
    tol_identity: float = 1e-10,
) -> MCSummary:
    """Sweep a seed range; deterministic regardless of worker scheduling."""
    seeds = list(range(seed_start, seed_start + seed_count))
    threads = worker_threads()
    if threads <= 1 or len(seeds) < 2:
        stats = [_sweep_one(spec, grid, s, params, tol_identity) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                s: pool.submit(_sweep_one, spec, grid, s, params, tol_identity)
                for s in seeds
            }
            stats = [futures[s].result() for s in seeds]  # merge in seed order

    return summarize(stats, seed_start, seed_count)


def summarize(stats: list[PathStats], seed_start: int, seed_count: int) -> MCSummary:
    """Aggregate per-seed stats; survives an empty sweep."""
    total = len(stats)
    on_event = [s for s in stats if s.in_event]
    k = len(on_event)
    low, high = wilson_interval(k, total)
    if k:
        fraction_strict = sum(s.strict_after_rho for s in on_event) / k
        mean_terminal = sum(s.terminal_value for s in on_event) / k
        min_terminal = min(s.terminal_value for s in on_event)
        max_residual = max(abs(s.terminal_residual) for s in on_event)
        max_epsilon = max(s.epsilon for s in on_event)
        shrink = sum(s.epsilon_deeper < s.epsilon for s in on_event) / k
    else:
        fraction_strict = None
        mean_terminal = None
        min_terminal = None
        max_residual = None
        max_epsilon = None
        shrink = None
    return MCSummary(
        paths_total=total,
        paths_in_event=k,
        event_fraction=(k / total) if total else 0.0,
        event_fraction_low=low,
        event_fraction_high=high,
        fraction_strict=fraction_strict,
        mean_terminal_value=mean_terminal,
        min_terminal_value=min_terminal,
        max_terminal_residual=max_residual,
        max_epsilon=max_epsilon,
        epsilon_shrink_fraction=shrink,
        all_passed=all(s.passed and s.eq_as_holds for s in stats),
        seed_start=seed_start,
        seed_count=seed_count,
    )
