"""Accounting ledger, per-path verification, counterexample search, sweeps."""

import numpy as np
import pytest

from foresightlab.errors import ConfigError, StructuralError
from foresightlab.ledger import (
    ConstructionParams,
    build_ledger,
    monte_carlo,
    random_nonneg_step,
    run_scene,
    run_single,
    summarize,
    verify_prop_finite,
    verify_theorem,
    wilson_interval,
    worker_threads,
)
from foresightlab.model import (
    BrownianMotion,
    FiniteVariation,
    Path,
    SeedSpec,
    TimeGrid,
)
from foresightlab.quadvar import StoppingLadder
from foresightlab.stieltjes import StepFunction
from foresightlab.strategy import StrategyPath


def hand_setup():
    grid = TimeGrid.uniform(1.0, 4)
    idx = np.array([3, 2, 1], dtype=np.int64)
    ladder = StoppingLadder(
        c=0.1, gamma=0.5, depth=2, times=grid.points[idx], indices=idx, rho=0.0, grid=grid
    )
    path = Path(grid, np.array([1.0, 0.8, 1.0, 0.9, 0.95]))
    strat = StrategyPath(grid=grid, ladder=ladder, holdings=np.array([0.5, 0.8]), in_event=True)
    return path, strat


def test_build_ledger_hand_case():
    path, strat = hand_setup()
    ledger = build_ledger(path, strat)
    assert np.array_equal(ledger.position, np.array([0.0, 0.0, 0.8, 0.5, 0.0]))
    expected_value = [0.0, 0.0, 0.8 * (1.0 - 0.8), 0.8 * 0.2 + 0.5 * (0.9 - 1.0), 0.11]
    assert np.max(np.abs(ledger.value - expected_value)) < 1e-15
    # cash is defined as value minus marked stock; reconstruction only rounds
    assert np.max(np.abs(ledger.value - (ledger.cash + ledger.position * ledger.prices))) < 1e-15


def test_build_ledger_zero_strategy():
    grid = TimeGrid.uniform(1.0, 4)
    idx = np.array([3, 2, 1], dtype=np.int64)
    ladder = StoppingLadder(
        c=0.1, gamma=0.5, depth=2, times=grid.points[idx], indices=idx, rho=0.0, grid=grid
    )
    path = Path(grid, np.array([1.0, 0.8, 1.0, 0.9, 0.95]))
    strat = StrategyPath(grid=grid, ladder=ladder, holdings=np.zeros(2), in_event=False)
    ledger = build_ledger(path, strat)
    assert np.all(ledger.value == 0.0)
    assert np.all(ledger.cash == 0.0)


def test_build_ledger_grid_mismatch():
    path, strat = hand_setup()
    other = Path(TimeGrid.uniform(1.0, 8), np.full(9, 0.5))
    with pytest.raises(StructuralError):
        build_ledger(other, strat)


def test_cash_constant_within_pieces(event_run):
    """Self-financing in discrete form: cash only moves at rebalancing times."""
    piece = event_run.strategy.piece_on_grid()
    cash = event_run.ledger.cash
    same = piece[1:] == piece[:-1]
    spread = float(np.abs(np.diff(cash))[same].max())
    assert spread < 1e-12


def test_verify_theorem_event_seed(event_run):
    rep = event_run.report
    assert rep.in_event
    assert rep.passed
    assert rep.eq_as_holds
    assert rep.strict_after_rho
    assert abs(rep.terminal_residual) < 1e-12
    assert rep.terminal_value > 0.0
    assert rep.rho == 0.0
    assert rep.active_pieces > 0
    assert rep.truncation_epsilon == rep.final_weight * rep.sup_s
    assert rep.min_cash_guaranteed >= -1e-12


def test_verify_theorem_off_event(off_event_run):
    rep = off_event_run.report
    assert not rep.in_event
    assert rep.passed
    assert rep.terminal_value == 0.0
    assert rep.truncation_epsilon == 0.0
    assert rep.active_pieces == 0
    assert np.all(off_event_run.ledger.position == 0.0)


def test_verify_theorem_detects_wrong_closed_form(event_run):
    # negative control: booking against the wrong discount factor must fail
    bad = verify_theorem(
        event_run.ledger,
        event_run.strategy,
        event_run.ladder,
        event_run.flags,
        event_run.weights,
        beta=0.5,
    )
    assert not bad.passed


def test_prop_finite_linear_path():
    grid = TimeGrid.uniform(1.0, 2**10)
    path = Path(grid, 1.0 + grid.points)
    phi = StepFunction(np.array([grid.points[1]]), np.array([1.0]))
    rep = verify_prop_finite(path, phi)
    assert rep.witness_found
    # the buy settles at the next grid time, where cash turns negative
    assert rep.witness_time == grid.points[2]
    assert rep.min_cash < 0.0
    assert rep.ibp_defect < 1e-12


def test_prop_finite_no_position():
    grid = TimeGrid.uniform(1.0, 2**6)
    path = Path(grid, 1.0 + grid.points)
    rep = verify_prop_finite(path, StepFunction(np.array([]), np.array([])))
    assert not rep.witness_found
    assert rep.witness_time is None
    assert rep.min_cash == 0.0


def test_prop_finite_rejects_short_sales():
    grid = TimeGrid.uniform(1.0, 2**6)
    path = Path(grid, 1.0 + grid.points)
    with pytest.raises(StructuralError):
        verify_prop_finite(path, StepFunction(np.array([0.25]), np.array([-1.0])))


def test_random_nonneg_step_properties():
    grid = TimeGrid.uniform(1.0, 2**8)
    for seed in range(30):
        phi = random_nonneg_step(grid, SeedSpec(seed, 0), max_jumps=6)
        assert 1 <= phi.jump_times.size <= 6
        assert phi.jump_times[0] > 0.0
        assert phi.jump_times[-1] < 1.0
        assert np.all(phi.values > 0.0)
        again = random_nonneg_step(grid, SeedSpec(seed, 0), max_jumps=6)
        assert np.array_equal(phi.jump_times, again.jump_times)
        assert np.array_equal(phi.values, again.values)
    with pytest.raises(StructuralError):
        random_nonneg_step(grid, SeedSpec(0, 0), max_jumps=0)
    with pytest.raises(StructuralError):
        random_nonneg_step(grid, SeedSpec(0, 0), max_jumps=2**8)


def test_construction_params_validation():
    with pytest.raises(ValueError):
        ConstructionParams(prescale=0.0)
    with pytest.raises(ValueError):
        ConstructionParams(c_policy="other")
    with pytest.raises(ValueError):
        ConstructionParams(gamma=1.0)
    with pytest.raises(ValueError):
        ConstructionParams(depth=0)
    with pytest.raises(ValueError):
        ConstructionParams(beta=1.0)
    with pytest.raises(ValueError):
        ConstructionParams(qv_source="guessed")
    deeper = ConstructionParams().at_depth(128)
    assert deeper.depth == 128
    assert deeper.prescale == 0.4


def test_run_scene_budget_policies(bm_spec, grid14):
    scene = run_scene(bm_spec, grid14, SeedSpec(0, 0), ConstructionParams())
    # seed 0 never absorbs, so the scaled clock ends at prescale^2 exactly
    assert scene.c == 0.4**2 / 2.0
    fixed = run_scene(bm_spec, grid14, SeedSpec(0, 0), ConstructionParams(c_policy="fixed"))
    assert fixed.c == 0.05


def test_run_scene_flat_clock_fallback(grid14):
    spec = FiniteVariation(kind="linear", s0=1.0, slope=0.5)
    scene = run_scene(spec, grid14, SeedSpec(0, 0), ConstructionParams())
    assert scene.c == 0.05
    run = run_single(spec, grid14, SeedSpec(0, 0), ConstructionParams())
    assert not run.report.in_event
    assert run.report.passed


def test_run_single_realized_clock(bm_spec, grid14):
    params = ConstructionParams(qv_source="realized")
    run = run_single(bm_spec, grid14, SeedSpec(0, 0), params)
    assert run.report.in_event
    assert run.report.passed


def test_wilson_interval():
    assert wilson_interval(0, 0) == (0.0, 1.0)
    low, high = wilson_interval(10, 10)
    assert high > 0.999
    assert low < 1.0
    low, high = wilson_interval(0, 10)
    assert low == 0.0
    low, high = wilson_interval(5, 10)
    assert 0.0 < low < 0.5 < high < 1.0


def test_worker_threads_env(monkeypatch):
    monkeypatch.setenv("FORESIGHTLAB_THREADS", "3")
    assert worker_threads() == 3
    monkeypatch.setenv("FORESIGHTLAB_THREADS", "0")
    assert worker_threads() >= 1
    monkeypatch.delenv("FORESIGHTLAB_THREADS")
    assert worker_threads() >= 1
    monkeypatch.setenv("FORESIGHTLAB_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_threads()
    monkeypatch.setenv("FORESIGHTLAB_THREADS", "-1")
    with pytest.raises(ConfigError):
        worker_threads()


def test_monte_carlo_empty():
    summary = summarize([], seed_start=0, seed_count=0)
    assert summary.paths_total == 0
    assert summary.paths_in_event == 0
    assert summary.event_fraction == 0.0
    assert summary.fraction_strict is None
    assert summary.all_passed


def test_monte_carlo_thread_invariance(bm_spec, monkeypatch):
    """The merge order is fixed by seed, so worker count cannot change a byte."""
    grid = TimeGrid.uniform(1.0, 2**12)
    params = ConstructionParams(depth=16)
    monkeypatch.setenv("FORESIGHTLAB_THREADS", "1")
    serial = monte_carlo(bm_spec, grid, 0, 30, params)
    monkeypatch.setenv("FORESIGHTLAB_THREADS", "4")
    threaded = monte_carlo(bm_spec, grid, 0, 30, params)
    assert serial == threaded
    assert serial.paths_total == 30
    assert serial.paths_in_event > 0
    assert serial.all_passed
