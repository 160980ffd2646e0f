"""Pathwise ladder-strategy laboratory.

Simulates continuous price paths on a fine grid, runs a variation-timed
ladder strategy against them through an exact Riemann-Stieltjes ledger,
and verifies the resulting inequalities and identities numerically.
"""

from .errors import (
    CapabilityError,
    ConfigError,
    ForesightError,
    NoEventError,
    PathValidityError,
    StructuralError,
)
from .ledger import (
    ConstructionParams,
    Ledger,
    MCSummary,
    SinglePathRun,
    VerificationReport,
    build_ledger,
    monte_carlo,
    run_single,
    verify_prop_finite,
    verify_theorem,
)
from .model import (
    BrownianMotion,
    FiniteVariation,
    GeometricBM,
    Path,
    SeedSpec,
    TimeGrid,
    rescale,
    simulate,
)
from .quadvar import QVCurve, StoppingLadder, analytic_qv, realized_qv, stopping_ladder
from .stieltjes import StepFunction, ibp_residual, rs_integral, rs_integral_curve
from .strategy import StrategyPath, build_position, detect_event, ladder_gains, product_weights

__version__ = "0.1.0"

__all__ = [
    "BrownianMotion",
    "CapabilityError",
    "ConfigError",
    "ConstructionParams",
    "FiniteVariation",
    "ForesightError",
    "GeometricBM",
    "Ledger",
    "MCSummary",
    "NoEventError",
    "Path",
    "PathValidityError",
    "QVCurve",
    "SeedSpec",
    "SinglePathRun",
    "StepFunction",
    "StoppingLadder",
    "StrategyPath",
    "StructuralError",
    "TimeGrid",
    "VerificationReport",
    "analytic_qv",
    "build_ledger",
    "build_position",
    "detect_event",
    "ibp_residual",
    "ladder_gains",
    "monte_carlo",
    "product_weights",
    "realized_qv",
    "rescale",
    "rs_integral",
    "rs_integral_curve",
    "run_single",
    "simulate",
    "stopping_ladder",
    "verify_prop_finite",
    "verify_theorem",
]
