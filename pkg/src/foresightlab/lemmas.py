"""Standalone numerical checks of the two sequence lemmas.

Sequence side: for non-negative y_n -> 0 with sum e^{-alpha * sum y} finite
and beta = 2 alpha / (1 + alpha), the products x_n = prod 1/(1 + beta y_k)
are summable, telescope exactly through beta * sum_{n+1}^{N} x_k y_k =
x_n - x_N, and satisfy the truncated tail inequality
x_n < sum_{k=n+1}^{N} x_k y_k on every index whose tail is resolved at
depth N (x_N < (1 - beta) x_n).

Brownian side: for increments of one Brownian path sampled at the times
n^-gamma, the standard deviations u_n obey the mean-value-theorem bracket
sqrt(gamma) sigma (n+1)^-p <= u_n <= sqrt(gamma) sigma n^-p with
p = (gamma + 1)/2, and the partial sums of e^{-alpha * sum xi} plateau:
a Monte Carlo ladder of estimates exhibits decreasing increments.  The
ladder is a convergence diagnostic, explicitly not a finiteness proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Optional

import numpy as np

from .errors import StructuralError
from .model import SeedSpec
from .rng import gaussians, generator


@dataclass(frozen=True)
class SequenceSpec:
    """Damping sequence y plus the exponent alpha driving the products.

    Default y is the power family y_n = scale * n^-exponent; ``custom_y``
    overrides it with an explicit non-negative array.
    """

    alpha: float
    depth: int
    scale: float = 1.0
    exponent: float = 0.5
    custom_y: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if not (0 < self.alpha < 1):
            raise ValueError("alpha must lie in (0, 1)")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.custom_y is None:
            if self.scale <= 0 or self.exponent <= 0:
                raise ValueError("power family needs positive scale and exponent")
        else:
            y = np.asarray(self.custom_y, dtype=np.float64)
            if y.shape != (self.depth,):
                raise ValueError("custom_y must have exactly depth entries")
            if np.any(y < 0) or not np.all(np.isfinite(y)):
                raise ValueError("custom_y must be non-negative and finite")
            y.flags.writeable = False
            object.__setattr__(self, "custom_y", y)

    @property
    def beta(self) -> float:
        # beta = 2 alpha / (1 + alpha) puts beta strictly between alpha and 1
        return 2.0 * self.alpha / (1.0 + self.alpha)

    def y_values(self) -> np.ndarray:
        if self.custom_y is not None:
            return self.custom_y
        n = np.arange(1, self.depth + 1, dtype=np.float64)
        return self.scale * n**-self.exponent


@dataclass(frozen=True)
class AssumptionReport:
    """Plateau diagnostic for the summability assumption."""

    partial_sums: np.ndarray
    total: float
    last_decade_ratio: float
    passes: bool


def check_assumption(spec: SequenceSpec, decade_threshold: float = 0.5) -> AssumptionReport:
    """Partial sums of sum e^{-alpha sum y} and their last-decade share.

    The ratio of the contribution from indices above depth/10 to the total
    is small when the series plateaus; a large ratio flags divergence.
    Heuristic, not a proof.
    """
    y = spec.y_values()
    partial = np.cumsum(np.exp(-spec.alpha * np.cumsum(y)))
    total = float(partial[-1])
    cut = spec.depth // 10
    if cut < 1:
        ratio = 1.0
    else:
        ratio = float((total - partial[cut - 1]) / total)
    partial.flags.writeable = False
    return AssumptionReport(
        partial_sums=partial,
        total=total,
        last_decade_ratio=ratio,
        passes=bool(ratio < decade_threshold),
    )


@dataclass(frozen=True)
class XSeq:
    """Products x_n with their partial sums and the assumption's partial sums."""

    x: np.ndarray
    partial_x: np.ndarray
    partial_exp: np.ndarray

    def __post_init__(self) -> None:
        if np.any(self.x <= 0) or np.any(self.x > 1):
            raise StructuralError("x must lie in (0, 1]")
        if np.any(np.diff(self.x) > 0):
            raise StructuralError("x must be non-increasing")
        for name in ("x", "partial_x", "partial_exp"):
            arr = getattr(self, name)
            arr.flags.writeable = False


def build_x(spec: SequenceSpec) -> XSeq:
    """x_n = prod_{k<=n} 1/(1 + beta y_k) plus running sums."""
    y = spec.y_values()
    x = np.cumprod(1.0 / (1.0 + spec.beta * y))
    return XSeq(
        x=x,
        partial_x=np.cumsum(x),
        partial_exp=np.cumsum(np.exp(-spec.alpha * np.cumsum(y))),
    )


@dataclass(frozen=True)
class XnInequalityReport:
    """Truncated tail-inequality check over all resolvable indices."""

    eligible: int
    depth: int
    violations: tuple[int, ...]
    vacuous: bool


def verify_xn_inequality(xseq: XSeq, spec: SequenceSpec) -> XnInequalityReport:
    """Check x_n < sum_{k=n+1}^{N} x_k y_k wherever the truncation resolves it.

    Eligibility x_N < (1 - beta) x_n is the sufficient condition under
    which the exact telescoped tail (x_n - x_N)/beta already exceeds x_n,
    so a violation at any eligible index refutes the identity chain.
    Indices are 1-based in the report.
    """
    y = spec.y_values()
    x = xseq.x
    n_total = x.size
    xy = x * y
    tail = np.zeros(n_total)
    # tail[i] = sum of xy over indices > i (0-based); reversed cumsum
    tail[:-1] = np.cumsum(xy[::-1])[::-1][1:]
    eligible = x[-1] < (1.0 - spec.beta) * x
    violations = np.nonzero(eligible & ~(x < tail))[0]
    return XnInequalityReport(
        eligible=int(eligible.sum()),
        depth=n_total,
        violations=tuple(int(i) + 1 for i in violations),
        vacuous=bool(not eligible.any()),
    )


def telescoping_residual(xseq: XSeq, spec: SequenceSpec, n: int, upto: int) -> float:
    """beta * sum_{k=n+1}^{upto} x_k y_k - (x_n - x_upto); rounding-level.

    Indices are 1-based with 1 <= n < upto <= spec.depth.
    """
    if not (1 <= n < upto <= spec.depth):
        raise StructuralError("need 1 <= n < upto <= depth")
    y = spec.y_values()
    x = xseq.x
    mid = fsum(x[k] * y[k] for k in range(n, upto))
    return spec.beta * mid - (float(x[n - 1]) - float(x[upto - 1]))


@dataclass(frozen=True)
class SweepReport:
    """Aggregate of a randomized spec sweep."""

    cases: int
    max_abs_residual: float
    total_eligible: int
    total_violations: int


def _random_spec(gen: np.random.Generator, depth: int) -> SequenceSpec:
    # power family with q in (0.2, 0.8): assumption provably holds
    return SequenceSpec(
        alpha=float(gen.uniform(0.1, 0.9)),
        depth=depth,
        scale=float(gen.uniform(0.1, 2.0)),
        exponent=float(gen.uniform(0.2, 0.8)),
    )


def sweep_telescoping(triples: int, seed: SeedSpec, max_depth: int = 2000) -> SweepReport:
    """Max |telescoping residual| over random (spec, n, upto) triples."""
    gen = generator(seed.seed, seed.stream)
    worst = 0.0
    for _ in range(triples):
        depth = int(gen.integers(10, max_depth + 1))
        spec = _random_spec(gen, depth)
        xseq = build_x(spec)
        upto = int(gen.integers(2, depth + 1))
        n = int(gen.integers(1, upto))
        worst = max(worst, abs(telescoping_residual(xseq, spec, n, upto)))
    return SweepReport(
        cases=triples, max_abs_residual=worst, total_eligible=0, total_violations=0
    )


def sweep_xn_inequality(specs: int, depth: int, seed: SeedSpec) -> SweepReport:
    """Tail-inequality violations across random power-family specs."""
    gen = generator(seed.seed, seed.stream)
    eligible = 0
    violations = 0
    for _ in range(specs):
        spec = _random_spec(gen, depth)
        report = verify_xn_inequality(build_x(spec), spec)
        eligible += report.eligible
        violations += len(report.violations)
    return SweepReport(
        cases=specs,
        max_abs_residual=0.0,
        total_eligible=eligible,
        total_violations=violations,
    )


@dataclass(frozen=True)
class BMIncrementSpec:
    """Brownian increment family sampled at the times n^-gamma."""

    sigma: float = 1.0
    gamma: float = 0.5
    alpha: float = 1.5
    depth: int = 10_000
    samples: int = 10_000

    def __post_init__(self) -> None:
        if self.sigma <= 0 or self.alpha <= 0:
            raise ValueError("sigma and alpha must be positive")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.depth < 1 or self.samples < 1:
            raise ValueError("depth and samples must be >= 1")

    @property
    def p(self) -> float:
        return (self.gamma + 1.0) / 2.0


def mvt_bounds(sigma: float, gamma: float, depth: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(u, lower, upper) for n = 1..depth, computed cancellation-free.

    u_n = sigma * sqrt(n^-gamma - (n+1)^-gamma) and the mean value theorem
    brackets it by sqrt(gamma) * sigma * m^-p at m = n+1 and m = n.
    """
    n = np.arange(1, depth + 1, dtype=np.float64)
    # n^-g - (n+1)^-g = n^-g * (1 - (1 + 1/n)^-g), kept accurate via expm1/log1p
    diff = n**-gamma * -np.expm1(-gamma * np.log1p(1.0 / n))
    u = sigma * np.sqrt(diff)
    p = (gamma + 1.0) / 2.0
    root = np.sqrt(gamma) * sigma
    return u, root * (n + 1.0) ** -p, root * n**-p


@dataclass(frozen=True)
class BMIncrementReport:
    """One path's increment samples plus the deterministic bound check."""

    xi: np.ndarray
    u: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    bounds_ok: bool


def bm_increments(spec: BMIncrementSpec, seed: SeedSpec) -> BMIncrementReport:
    """Sample xi_n = (sigma B(n^-gamma) - sigma B((n+1)^-gamma))^+ for n <= depth.

    Consecutive sample times give disjoint Brownian increments, so the
    xi_n from one path are independent with standard deviations u_n; only
    increments between sampled times enter, never the segment below the
    deepest time.
    """
    u, lower, upper = mvt_bounds(spec.sigma, spec.gamma, spec.depth)
    noise = gaussians(seed.seed, seed.stream, spec.depth)
    xi = np.maximum(u * noise, 0.0)
    ok = bool(np.all((lower <= u) & (u <= upper)))
    for arr in (xi, u, lower, upper):
        arr.flags.writeable = False
    return BMIncrementReport(xi=xi, u=u, lower=lower, upper=upper, bounds_ok=ok)


@dataclass(frozen=True)
class Lemma32Report:
    """Monte Carlo ladder for the partial sums of e^{-alpha sum xi}.

    ``increments[i]`` estimates the partial-sum growth between consecutive
    rungs (from zero to the first rung for i = 0); ``pair_z[i]`` is the
    paired z-score of increments[i] > increments[i+1].  ``passes`` needs
    every pair resolved at ``sigma_level`` and the final increment below
    ``tail_threshold`` as a share of the total.
    """

    rungs: tuple[int, ...]
    estimates: tuple[float, ...]
    standard_errors: tuple[float, ...]
    increments: tuple[float, ...]
    increment_ses: tuple[float, ...]
    pair_z: tuple[float, ...]
    tail_fraction: float
    sigma_level: float
    tail_threshold: float
    passes: bool


_CHUNK = 250  # fixed so results do not depend on scheduling


def mc_lemma32(
    spec: BMIncrementSpec,
    seed: SeedSpec = SeedSpec(seed=0, stream=0),
    rungs: Optional[tuple[int, ...]] = None,
    sigma_level: float = 3.0,
    tail_threshold: float = 0.10,
) -> Lemma32Report:
    """Estimate E sum_{n<=rung} e^{-alpha sum_{k<=n} xi_k} along a ladder.

    Samples are drawn in fixed-size chunks, chunk c from stream
    ``seed.stream + c``, so the estimate is independent of execution
    order.  A convergence diagnostic only: decreasing increments are
    consistent with a finite limit, never a proof.
    """
    if rungs is None:
        decade = (spec.depth // 100, spec.depth // 10, spec.depth)
        rungs = tuple(sorted({r for r in decade if r >= 1}))
    if any(r < 1 or r > spec.depth for r in rungs) or list(rungs) != sorted(set(rungs)):
        raise StructuralError("rungs must be distinct, increasing, and within depth")

    u, _, _ = mvt_bounds(spec.sigma, spec.gamma, spec.depth)
    rung_idx = [r - 1 for r in rungs]
    blocks = []
    done = 0
    chunk_no = 0
    while done < spec.samples:
        take = min(_CHUNK, spec.samples - done)
        noise = gaussians(seed.seed, seed.stream + chunk_no, take * spec.depth)
        xi = np.maximum(u * noise.reshape(take, spec.depth), 0.0)
        partial = np.cumsum(np.exp(-spec.alpha * np.cumsum(xi, axis=1)), axis=1)
        blocks.append(partial[:, rung_idx])
        done += take
        chunk_no += 1
    at_rungs = np.concatenate(blocks)  # (samples, len(rungs))

    m = spec.samples
    est = at_rungs.mean(axis=0)
    ses = at_rungs.std(axis=0, ddof=1) / np.sqrt(m)
    inc = np.diff(np.concatenate((np.zeros((m, 1)), at_rungs), axis=1), axis=1)
    inc_mean = inc.mean(axis=0)
    inc_se = inc.std(axis=0, ddof=1) / np.sqrt(m)
    pair_z = []
    for i in range(len(rungs) - 1):
        d = inc[:, i] - inc[:, i + 1]
        sd = d.std(ddof=1)
        pair_z.append(float(d.mean() / (sd / np.sqrt(m))) if sd > 0 else np.inf)
    tail_fraction = float(inc_mean[-1] / est[-1]) if est[-1] > 0 else 0.0
    passes = bool(
        all(z >= sigma_level for z in pair_z) and tail_fraction < tail_threshold
    )
    return Lemma32Report(
        rungs=tuple(rungs),
        estimates=tuple(float(v) for v in est),
        standard_errors=tuple(float(v) for v in ses),
        increments=tuple(float(v) for v in inc_mean),
        increment_ses=tuple(float(v) for v in inc_se),
        pair_z=tuple(pair_z),
        tail_fraction=tail_fraction,
        sigma_level=sigma_level,
        tail_threshold=tail_threshold,
        passes=passes,
    )
