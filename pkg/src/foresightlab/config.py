"""Flat key-value configuration with dotted section names.

Files look like::

    # market
    model.variant = brownian
    construction.N = 64
    seeds.count = 1000

Unknown keys are errors (naming the key), every key has a default, and
the raw file text is echoed verbatim into JSON artifacts so a run can be
reproduced bit-for-bit from any of its outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError
from .ledger import ConstructionParams
from .model import BrownianMotion, FiniteVariation, GeometricBM, ModelSpec, TimeGrid

_DEFAULTS: dict[str, str] = {
    "model.variant": "brownian",
    "model.s0": "1.0",
    "model.sigma": "1.0",
    "model.boundary": "absorb",
    "model.level": "0.01",
    "model.fv_kind": "linear",
    "model.slope": "1.0",
    "model.amplitude": "0.25",
    "model.frequency": "1.0",
    "model.step_scale": "1.0",
    "model.band": "1.0",
    "grid.horizon": "1.0",
    "grid.steps": "16384",
    "construction.c_policy": "half_qv",
    "construction.c_value": "0.05",
    "construction.gamma": "0.5",
    "construction.N": "64",
    "construction.beta": "0.6666666666666666",
    "construction.prescale": "0.4",
    "construction.qv_source": "analytic",
    "verify.tol_identity": "1e-10",
    "verify.sigma_level": "3.0",
    "seeds.start": "0",
    "seeds.count": "1000",
    "output.dir": "out",
    "propfv.paths": "10",
    "propfv.strategies": "100",
    "propfv.max_jumps": "8",
    "lemma_seq.triples": "1000",
    "lemma_seq.specs": "100",
    "lemma_seq.depth": "10000",
    "lemma_seq.seed": "0",
    "lemma_seq.tolerance": "1e-12",
    "lemma_bm.sigma": "1.0",
    "lemma_bm.gamma": "0.5",
    "lemma_bm.alpha": "1.5",
    "lemma_bm.depth": "10000",
    "lemma_bm.samples": "10000",
    "lemma_bm.grid_depth": "1000000",
    "lemma_bm.seed": "0",
    "lemma_bm.tail_threshold": "0.1",
}

_CHOICES: dict[str, tuple[str, ...]] = {
    "model.variant": ("brownian", "gbm", "finite_variation"),
    "model.boundary": ("none", "absorb", "reflect"),
    "model.fv_kind": ("linear", "sinusoid", "monotone_random"),
    "construction.c_policy": ("half_qv", "fixed"),
    "construction.qv_source": ("analytic", "realized"),
}


def parse_config_text(text: str) -> dict[str, str]:
    """key = value lines; '#' comments; unknown keys rejected by name."""
    values = dict(_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _DEFAULTS:
            raise ConfigError(key, "unknown configuration key")
        if not value:
            raise ConfigError(key, "empty value")
        values[key] = value
    return values


def _as_float(values: dict[str, str], key: str) -> float:
    try:
        return float(values[key])
    except ValueError as exc:
        raise ConfigError(key, f"not a number: {values[key]!r}") from exc


def _as_int(values: dict[str, str], key: str) -> int:
    try:
        return int(values[key])
    except ValueError as exc:
        raise ConfigError(key, f"not an integer: {values[key]!r}") from exc


def _as_choice(values: dict[str, str], key: str) -> str:
    v = values[key]
    allowed = _CHOICES[key]
    if v not in allowed:
        raise ConfigError(key, f"must be one of {', '.join(allowed)}; got {v!r}")
    return v


def _require(ok: bool, key: str, message: str) -> None:
    if not ok:
        raise ConfigError(key, message)


@dataclass(frozen=True)
class RunConfig:
    """Typed view of a configuration plus its verbatim echo text."""

    values: dict[str, str]
    echo: str

    # -- market ---------------------------------------------------------
    def model_spec(self) -> ModelSpec:
        v = self.values
        variant = _as_choice(v, "model.variant")
        s0 = _as_float(v, "model.s0")
        sigma = _as_float(v, "model.sigma")
        _require(s0 > 0, "model.s0", "must be positive")
        _require(sigma > 0, "model.sigma", "must be positive")
        if variant == "brownian":
            boundary = _as_choice(v, "model.boundary")
            level = _as_float(v, "model.level")
            if boundary != "none":
                _require(0 < level < s0, "model.level", "must lie strictly between 0 and model.s0")
            return BrownianMotion(s0=s0, sigma=sigma, boundary=boundary, level=level)
        if variant == "gbm":
            return GeometricBM(s0=s0, sigma=sigma)
        kind = _as_choice(v, "model.fv_kind")
        slope = _as_float(v, "model.slope")
        amplitude = _as_float(v, "model.amplitude")
        frequency = _as_float(v, "model.frequency")
        step_scale = _as_float(v, "model.step_scale")
        band = _as_float(v, "model.band")
        for key, val in (
            ("model.slope", slope),
            ("model.amplitude", amplitude),
            ("model.frequency", frequency),
            ("model.step_scale", step_scale),
            ("model.band", band),
        ):
            _require(val > 0, key, "must be positive")
        return FiniteVariation(
            kind=kind,
            s0=s0,
            slope=slope,
            amplitude=amplitude,
            frequency=frequency,
            step_scale=step_scale,
            band=band,
        )

    def grid(self) -> TimeGrid:
        horizon = _as_float(self.values, "grid.horizon")
        steps = _as_int(self.values, "grid.steps")
        _require(horizon > 0, "grid.horizon", "must be positive")
        _require(steps >= 2, "grid.steps", "must be >= 2")
        return TimeGrid.uniform(horizon, steps)

    def construction(self) -> ConstructionParams:
        v = self.values
        prescale = _as_float(v, "construction.prescale")
        c_value = _as_float(v, "construction.c_value")
        gamma = _as_float(v, "construction.gamma")
        depth = _as_int(v, "construction.N")
        beta = _as_float(v, "construction.beta")
        _require(prescale > 0, "construction.prescale", "must be positive")
        _require(c_value > 0, "construction.c_value", "must be positive")
        _require(0 < gamma < 1, "construction.gamma", "must lie strictly in (0, 1)")
        _require(depth >= 1, "construction.N", "must be >= 1")
        _require(0 < beta < 1, "construction.beta", "must lie strictly in (0, 1)")
        return ConstructionParams(
            prescale=prescale,
            c_policy=_as_choice(v, "construction.c_policy"),
            c_value=c_value,
            gamma=gamma,
            depth=depth,
            beta=beta,
            qv_source=_as_choice(v, "construction.qv_source"),
        )

    # -- verification and sweep -----------------------------------------
    @property
    def tol_identity(self) -> float:
        tol = _as_float(self.values, "verify.tol_identity")
        _require(tol > 0, "verify.tol_identity", "must be positive")
        return tol

    @property
    def sigma_level(self) -> float:
        level = _as_float(self.values, "verify.sigma_level")
        _require(level > 0, "verify.sigma_level", "must be positive")
        return level

    @property
    def seed_start(self) -> int:
        start = _as_int(self.values, "seeds.start")
        _require(start >= 0, "seeds.start", "must be >= 0")
        return start

    @property
    def seed_count(self) -> int:
        count = _as_int(self.values, "seeds.count")
        _require(count >= 0, "seeds.count", "must be >= 0")
        return count

    @property
    def out_dir(self) -> str:
        return self.values["output.dir"]

    # -- auxiliary commands ---------------------------------------------
    @property
    def propfv_paths(self) -> int:
        n = _as_int(self.values, "propfv.paths")
        _require(n >= 1, "propfv.paths", "must be >= 1")
        return n

    @property
    def propfv_strategies(self) -> int:
        n = _as_int(self.values, "propfv.strategies")
        _require(n >= 1, "propfv.strategies", "must be >= 1")
        return n

    @property
    def propfv_max_jumps(self) -> int:
        n = _as_int(self.values, "propfv.max_jumps")
        _require(n >= 1, "propfv.max_jumps", "must be >= 1")
        return n

    def lemma_seq_params(self) -> dict[str, float | int]:
        v = self.values
        out: dict[str, float | int] = {
            "triples": _as_int(v, "lemma_seq.triples"),
            "specs": _as_int(v, "lemma_seq.specs"),
            "depth": _as_int(v, "lemma_seq.depth"),
            "seed": _as_int(v, "lemma_seq.seed"),
            "tolerance": _as_float(v, "lemma_seq.tolerance"),
        }
        _require(out["triples"] >= 1, "lemma_seq.triples", "must be >= 1")
        _require(out["specs"] >= 1, "lemma_seq.specs", "must be >= 1")
        _require(out["depth"] >= 20, "lemma_seq.depth", "must be >= 20")
        _require(out["seed"] >= 0, "lemma_seq.seed", "must be >= 0")
        _require(out["tolerance"] > 0, "lemma_seq.tolerance", "must be positive")
        return out

    def lemma_bm_params(self) -> dict[str, float | int]:
        v = self.values
        out: dict[str, float | int] = {
            "sigma": _as_float(v, "lemma_bm.sigma"),
            "gamma": _as_float(v, "lemma_bm.gamma"),
            "alpha": _as_float(v, "lemma_bm.alpha"),
            "depth": _as_int(v, "lemma_bm.depth"),
            "samples": _as_int(v, "lemma_bm.samples"),
            "grid_depth": _as_int(v, "lemma_bm.grid_depth"),
            "seed": _as_int(v, "lemma_bm.seed"),
            "tail_threshold": _as_float(v, "lemma_bm.tail_threshold"),
        }
        _require(out["sigma"] > 0, "lemma_bm.sigma", "must be positive")
        _require(0 < out["gamma"] < 1, "lemma_bm.gamma", "must lie strictly in (0, 1)")
        _require(out["alpha"] > 0, "lemma_bm.alpha", "must be positive")
        _require(out["depth"] >= 100, "lemma_bm.depth", "must be >= 100")
        _require(out["samples"] >= 100, "lemma_bm.samples", "must be >= 100")
        _require(out["grid_depth"] >= 100, "lemma_bm.grid_depth", "must be >= 100")
        _require(out["seed"] >= 0, "lemma_bm.seed", "must be >= 0")
        _require(
            0 < out["tail_threshold"] < 1, "lemma_bm.tail_threshold", "must lie strictly in (0, 1)"
        )
        return out

    def with_overrides(self, seed: Optional[int] = None, out: Optional[str] = None) -> "RunConfig":
        values = dict(self.values)
        if seed is not None:
            _require(seed >= 0, "seeds.start", "must be >= 0")
            values["seeds.start"] = str(seed)
        if out is not None:
            values["output.dir"] = out
        return replace(self, values=values)


def canonical_text(values: dict[str, str]) -> str:
    """Render a full config in the defaults' key order."""
    return "\n".join(f"{k} = {values[k]}" for k in _DEFAULTS) + "\n"


def load_config(text: Optional[str]) -> RunConfig:
    """Build a RunConfig from file text, or pure defaults when absent."""
    if text is None:
        values = dict(_DEFAULTS)
        return RunConfig(values=values, echo=canonical_text(values))
    return RunConfig(values=parse_config_text(text), echo=text)
