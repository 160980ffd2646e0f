"""Shared fixtures: the default desk-scale setup and two frozen scenes."""

import pytest

from foresightlab.ledger import ConstructionParams, evaluate_scene, run_scene
from foresightlab.model import BrownianMotion, SeedSpec, TimeGrid


@pytest.fixture(scope="session")
def grid14():
    return TimeGrid.uniform(1.0, 2**14)


@pytest.fixture(scope="session")
def small_grid():
    return TimeGrid.uniform(1.0, 2**10)


@pytest.fixture(scope="session")
def bm_spec():
    return BrownianMotion(boundary="absorb", level=0.01)


@pytest.fixture(scope="session")
def default_params():
    return ConstructionParams()


@pytest.fixture(scope="session")
def event_run(bm_spec, grid14, default_params):
    # seed 0 lands in the event under the default construction
    scene = run_scene(bm_spec, grid14, SeedSpec(0, 0), default_params)
    run = evaluate_scene(scene, default_params)
    assert run.report.in_event
    return run


@pytest.fixture(scope="session")
def off_event_run(bm_spec, grid14, default_params):
    # seed 6 exceeds the unit cap after prescaling
    scene = run_scene(bm_spec, grid14, SeedSpec(6, 0), default_params)
    run = evaluate_scene(scene, default_params)
    assert not run.report.in_event
    return run
