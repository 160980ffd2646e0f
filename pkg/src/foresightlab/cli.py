"""Command-line front door: configuration, orchestration, artifact emission.

Subcommands:

    run       single-seed pipeline; path.csv, qv.csv, ledger.csv,
              construction.json, report.json
    mc        seed sweep; mc_summary.json
    figure1   first in-event seed; fig1_{S,V,psi,phi}.csv + fig1_meta.json
    prop-fv   witness search on finite-variation paths; propfv_report.json
    lemma     seq | bm sequence diagnostics; lemma_{seq,bm}.json

Exit codes: 0 pass, 1 verification failure, 2 config or IO error,
3 no in-event seed in range.  Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path as FsPath
from typing import Optional

import numpy as np

from .config import RunConfig, load_config
from .errors import (
    CapabilityError,
    ConfigError,
    ForesightError,
    NoEventError,
    PathValidityError,
    StructuralError,
)
from .io import SCHEMA_VERSION, jsonable, write_csv, write_json
from .ledger import (
    evaluate_scene,
    monte_carlo,
    random_nonneg_step,
    run_scene,
    verify_prop_finite,
)
from .lemmas import (
    BMIncrementSpec,
    SequenceSpec,
    build_x,
    mc_lemma32,
    mvt_bounds,
    sweep_telescoping,
    sweep_xn_inequality,
)
from .model import BrownianMotion, FiniteVariation, SeedSpec, simulate

_ERROR_TYPES = {
    ConfigError: "config",
    PathValidityError: "path_validity",
    StructuralError: "structural",
    CapabilityError: "capability",
    NoEventError: "no_event",
}

# gamma and sigma values for the deterministic bound grid
_BOUND_GAMMAS = (0.25, 0.5, 0.75)
_BOUND_SIGMAS = (0.5, 1.0, 2.0)


def _emit_error(exc: Exception) -> None:
    payload: dict = {
        "type": _ERROR_TYPES.get(type(exc), "io"),
        "message": str(exc),
    }
    field = getattr(exc, "field", None)
    if field is not None:
        payload = {"type": payload["type"], "field": field, "message": payload["message"]}
    sys.stderr.write(json.dumps({"error": payload}) + "\n")


def _out_dir(cfg: RunConfig) -> FsPath:
    out = FsPath(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _meta(cfg: RunConfig, command: str, overrides: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "overrides": overrides,
        "config_echo": cfg.echo,
    }


def _flag(ok: bool) -> str:
    return "ok" if ok else "FAIL"


def cmd_run(cfg: RunConfig, overrides: dict) -> int:
    spec = cfg.model_spec()
    grid = cfg.grid()
    params = cfg.construction()
    seed = SeedSpec(seed=cfg.seed_start, stream=0)

    scene = run_scene(spec, grid, seed, params)
    run = evaluate_scene(scene, params, cfg.tol_identity)
    report = run.report
    out = _out_dir(cfg)

    write_csv(out / "path.csv", ("t", "S"), (grid.points, scene.path.values))
    write_csv(out / "qv.csv", ("t", "qv"), (scene.curve.grid.points, scene.curve.qv))
    ledger = run.ledger
    write_csv(
        out / "ledger.csv",
        ("t", "S", "phi", "psi", "V"),
        (grid.points, ledger.prices, ledger.position, ledger.cash, ledger.value),
    )

    jump_times, jump_values = run.strategy.jump_representation()
    construction = _meta(cfg, "run", overrides)
    construction.update(
        {
            "seed": seed.seed,
            "in_event": report.in_event,
            "c": report.c,
            "gamma": params.gamma,
            "depth": params.depth,
            "beta": params.beta,
            "prescale": params.prescale,
            "qv_source": params.qv_source,
            "rho": report.rho,
            "rung_times": run.ladder.times,
            "rung_indices": run.ladder.indices,
            "gains": run.gains,
            "weights": run.weights,
            "final_weight": report.final_weight,
            "epsilon": report.truncation_epsilon,
            "jump_times": jump_times,
            "jump_values": jump_values,
        }
    )
    write_json(out / "construction.json", construction)

    report_doc = _meta(cfg, "run", overrides)
    report_doc.update({"seed": seed.seed, **asdict(report), "passed": report.passed})
    write_json(out / "report.json", report_doc)

    print(
        f"seed {seed.seed}: in_event={report.in_event} c={report.c:.6g} "
        f"rho={report.rho:.6g} active_pieces={report.active_pieces}"
    )
    print(f"  cash floor, guaranteed region  {report.min_cash_guaranteed: .3e}  "
          f"[{_flag(report.eq_as_holds)}]")
    print(f"  truncation bound eps(N)        {report.truncation_epsilon: .3e}")
    print(f"  strict dominance after rho_1   [{_flag(report.strict_after_rho)}]")
    print(f"  terminal identity residual     {report.terminal_residual: .3e}  "
          f"[{_flag(report.passed)}]")
    print(f"result: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def cmd_mc(cfg: RunConfig, overrides: dict) -> int:
    spec = cfg.model_spec()
    grid = cfg.grid()
    params = cfg.construction()
    summary = monte_carlo(
        spec, grid, cfg.seed_start, cfg.seed_count, params, cfg.tol_identity
    )

    doc = _meta(cfg, "mc", overrides)
    doc.update(asdict(summary))
    write_json(_out_dir(cfg) / "mc_summary.json", doc)

    print(
        f"seeds {summary.seed_start}..{summary.seed_start + summary.seed_count - 1}: "
        f"in_event {summary.paths_in_event}/{summary.paths_total} "
        f"(fraction {summary.event_fraction:.4f}, "
        f"95% [{summary.event_fraction_low:.4f}, {summary.event_fraction_high:.4f}])"
    )
    if summary.paths_in_event:
        print(f"  strict dominance fraction    {summary.fraction_strict:.4f}")
        print(f"  mean terminal value          {summary.mean_terminal_value:.6f}")
        print(f"  max |terminal residual|      {summary.max_terminal_residual:.3e}")
        print(f"  max eps(N)                   {summary.max_epsilon:.3e}")
        print(f"  eps shrink at 2N             {summary.epsilon_shrink_fraction:.4f}")
    print(f"result: {'PASS' if summary.all_passed else 'FAIL'}")
    return 0 if summary.all_passed else 1


def cmd_figure1(cfg: RunConfig, overrides: dict) -> int:
    spec = cfg.model_spec()
    if not isinstance(spec, BrownianMotion):
        raise ConfigError("model.variant", "figure1 requires the Brownian model")
    if spec.s0 != 1.0:
        raise ConfigError("model.s0", "figure1 requires the price started at 1")
    grid = cfg.grid()
    if grid.horizon != 1.0:
        raise ConfigError("grid.horizon", "figure1 requires horizon 1")
    params = cfg.construction()

    count = max(cfg.seed_count, 1)
    chosen = None
    for s in range(cfg.seed_start, cfg.seed_start + count):
        scene = run_scene(spec, grid, SeedSpec(seed=s, stream=0), params)
        run = evaluate_scene(scene, params, cfg.tol_identity)
        if run.report.in_event:
            chosen = run
            break
    if chosen is None:
        raise NoEventError(
            f"no seed in [{cfg.seed_start}, {cfg.seed_start + count}) landed in the "
            "event; widen seeds.count or lower construction.prescale"
        )

    report = chosen.report
    out = _out_dir(cfg)
    t = grid.points
    ledger = chosen.ledger
    write_csv(out / "fig1_S.csv", ("t", "S"), (t, chosen.scene.path.values))
    write_csv(out / "fig1_V.csv", ("t", "V"), (t, ledger.value))
    write_csv(out / "fig1_psi.csv", ("t", "psi"), (t, ledger.cash))
    write_csv(out / "fig1_phi.csv", ("t", "phi"), (t, ledger.position))

    meta = _meta(cfg, "figure1", overrides)
    meta.update(
        {
            "seed": chosen.scene.seed.seed,
            "in_event": report.in_event,
            "c": report.c,
            "gamma": params.gamma,
            "depth": params.depth,
            "beta": params.beta,
            "prescale": params.prescale,
            "epsilon": report.truncation_epsilon,
            "rho": report.rho,
            "terminal_value": report.terminal_value,
            "series": {
                "S": "fig1_S.csv",
                "V": "fig1_V.csv",
                "psi": "fig1_psi.csv",
                "phi": "fig1_phi.csv",
            },
        }
    )
    write_json(out / "fig1_meta.json", meta)

    print(f"seed {chosen.scene.seed.seed} landed in the event "
          f"(c={report.c:.6g}, rho={report.rho:.6g}, eps={report.truncation_epsilon:.3e})")
    print("wrote fig1_S.csv fig1_V.csv fig1_psi.csv fig1_phi.csv fig1_meta.json")
    print(f"result: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _fv_variant(spec: FiniteVariation, index: int) -> FiniteVariation:
    # one deterministic family per kind so repeated paths differ
    if spec.kind == "linear":
        return FiniteVariation(
            kind="linear", s0=spec.s0, slope=spec.slope * (1.0 + 0.25 * index)
        )
    if spec.kind == "sinusoid":
        return FiniteVariation(
            kind="sinusoid",
            s0=spec.s0,
            amplitude=spec.amplitude * (1.0 + 0.1 * index),
            frequency=spec.frequency * (1.0 + 0.5 * index),
        )
    return spec  # monotone_random varies through the seed


def cmd_prop_fv(cfg: RunConfig, overrides: dict) -> int:
    spec = cfg.model_spec()
    if not isinstance(spec, FiniteVariation):
        raise ConfigError("model.variant", "prop-fv requires a finite_variation model")
    grid = cfg.grid()

    paths = cfg.propfv_paths
    strategies = cfg.propfv_strategies
    found = 0
    total = 0
    max_defect = 0.0
    worst_cash = 0.0
    for i in range(paths):
        path = simulate(_fv_variant(spec, i), grid, SeedSpec(seed=cfg.seed_start + i, stream=0))
        for j in range(strategies):
            phi = random_nonneg_step(
                grid, SeedSpec(seed=cfg.seed_start + i, stream=1000 + j), cfg.propfv_max_jumps
            )
            rep = verify_prop_finite(path, phi)
            total += 1
            found += rep.witness_found
            max_defect = max(max_defect, rep.ibp_defect)
            worst_cash = min(worst_cash, rep.min_cash)

    all_found = found == total
    doc = _meta(cfg, "prop-fv", overrides)
    doc.update(
        {
            "kind": spec.kind,
            "paths": paths,
            "strategies_per_path": strategies,
            "cases": total,
            "witnesses_found": found,
            "all_found": all_found,
            "max_ibp_defect": max_defect,
            "min_cash": worst_cash,
        }
    )
    write_json(_out_dir(cfg) / "propfv_report.json", doc)

    print(f"kind={spec.kind}: witnesses {found}/{total}  [{_flag(all_found)}]")
    print(f"  max integration-by-parts defect  {max_defect:.3e}")
    print(f"result: {'PASS' if all_found else 'FAIL'}")
    return 0 if all_found else 1


def cmd_lemma_seq(cfg: RunConfig, overrides: dict) -> int:
    p = cfg.lemma_seq_params()
    tele = sweep_telescoping(int(p["triples"]), SeedSpec(seed=int(p["seed"]), stream=0))
    ineq = sweep_xn_inequality(
        int(p["specs"]), int(p["depth"]), SeedSpec(seed=int(p["seed"]), stream=1)
    )
    anchor_spec = SequenceSpec(alpha=0.5, depth=1, custom_y=np.array([1.0]))
    anchor_x1 = float(build_x(anchor_spec).x[0])
    anchor_ok = abs(anchor_x1 - 0.6) <= 1e-15

    tol = float(p["tolerance"])
    residual_ok = tele.max_abs_residual <= tol
    ineq_ok = ineq.total_violations == 0
    passed = residual_ok and ineq_ok and anchor_ok

    doc = _meta(cfg, "lemma seq", overrides)
    doc.update(
        {
            "telescoping_cases": tele.cases,
            "max_abs_residual": tele.max_abs_residual,
            "residual_tolerance": tol,
            "inequality_specs": ineq.cases,
            "eligible_indices": ineq.total_eligible,
            "violations": ineq.total_violations,
            "anchor_x1": anchor_x1,
            "anchor_ok": anchor_ok,
            "passed": passed,
        }
    )
    write_json(_out_dir(cfg) / "lemma_seq.json", doc)

    print(f"telescoping residual  max {tele.max_abs_residual:.3e} over {tele.cases} "
          f"triples  [{_flag(residual_ok)}]")
    print(f"tail inequality       {ineq.total_violations} violations over "
          f"{ineq.total_eligible} eligible indices  [{_flag(ineq_ok)}]")
    print(f"unit-damping anchor   x_1 = {anchor_x1!r}  [{_flag(anchor_ok)}]")
    print(f"result: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def cmd_lemma_bm(cfg: RunConfig, overrides: dict) -> int:
    p = cfg.lemma_bm_params()
    grid_depth = int(p["grid_depth"])
    bound_rows = []
    bound_failures = 0
    for gamma in _BOUND_GAMMAS:
        for sigma in _BOUND_SIGMAS:
            u, lower, upper = mvt_bounds(sigma, gamma, grid_depth)
            bad = int(np.count_nonzero(~((lower <= u) & (u <= upper))))
            bound_failures += bad
            bound_rows.append(
                {"gamma": gamma, "sigma": sigma, "depth": grid_depth, "failures": bad}
            )

    mc = mc_lemma32(
        BMIncrementSpec(
            sigma=float(p["sigma"]),
            gamma=float(p["gamma"]),
            alpha=float(p["alpha"]),
            depth=int(p["depth"]),
            samples=int(p["samples"]),
        ),
        SeedSpec(seed=int(p["seed"]), stream=0),
        sigma_level=cfg.sigma_level,
        tail_threshold=float(p["tail_threshold"]),
    )

    passed = bound_failures == 0 and mc.passes
    doc = _meta(cfg, "lemma bm", overrides)
    doc.update(
        {
            "bound_grid": bound_rows,
            "bound_failures": bound_failures,
            "ladder": asdict(mc),
            "passed": passed,
        }
    )
    write_json(_out_dir(cfg) / "lemma_bm.json", doc)

    print(f"deviation bracket     {bound_failures} failures over "
          f"{len(bound_rows)} x {grid_depth} indices  [{_flag(bound_failures == 0)}]")
    print(f"ladder increments     {tuple(round(v, 4) for v in mc.increments)} "
          f"z={tuple(round(z, 1) for z in mc.pair_z)}  [{_flag(mc.passes)}]")
    print(f"  tail fraction       {mc.tail_fraction:.4f} < {mc.tail_threshold}")
    print(f"result: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foresightlab",
        description="Pathwise ladder-strategy laboratory: simulate, account, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=int, help="override the starting seed")
        p.add_argument("--out", help="override the output directory")

    common(sub.add_parser("run", help="single-seed pipeline with full artifacts"))
    common(sub.add_parser("mc", help="seed sweep with aggregate summary"))
    common(sub.add_parser("figure1", help="emit plot series for the first in-event seed"))
    common(sub.add_parser("prop-fv", help="witness search on finite-variation paths"))
    lemma = sub.add_parser("lemma", help="sequence lemma diagnostics")
    lemma.add_argument("which", choices=("seq", "bm"))
    common(lemma)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            text = FsPath(args.config).read_text()
        else:
            text = None
        cfg = load_config(text)
        cfg = cfg.with_overrides(seed=args.seed, out=args.out)
        if args.seed is not None and args.command == "lemma":
            values = dict(cfg.values)
            values["lemma_seq.seed"] = str(args.seed)
            values["lemma_bm.seed"] = str(args.seed)
            cfg = RunConfig(values=values, echo=cfg.echo)
        # the output directory is environment, not configuration: leaving it
        # out keeps artifact bytes independent of where they are written
        overrides = {"seed": args.seed}

        if args.command == "run":
            return cmd_run(cfg, overrides)
        if args.command == "mc":
            return cmd_mc(cfg, overrides)
        if args.command == "figure1":
            return cmd_figure1(cfg, overrides)
        if args.command == "prop-fv":
            return cmd_prop_fv(cfg, overrides)
        return cmd_lemma_seq(cfg, overrides) if args.which == "seq" else cmd_lemma_bm(cfg, overrides)
    except NoEventError as exc:
        _emit_error(exc)
        return 3
    except (ForesightError, OSError, ValueError) as exc:
        _emit_error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
