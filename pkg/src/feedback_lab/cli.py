"""Experiment runner.

Each subcommand binds a config (YAML file and/or flags, flags win) to
one experiment and emits plot-ready CSV/JSON.  Runs are pure functions
of (config, master seed); re-running reproduces byte-identical output
apart from the timestamp header, which ``--no-timestamp`` drops.

Exit codes: 0 success, 2 config/validation error, 3 indeterminate
solver verdict under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np
import yaml

from . import analysis, riccati, sim
from .models import (ConfigurationError, GaussianIID, MarkovChain,
                     MartingaleDiffVector, MjlsSpec, PowerGrowthFn,
                     SampledSpec)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INDETERMINATE = 3

SEED_ENV_VAR = "FEEDBACK_LAB_SEED"

EXPERIMENTS = ("parametric-sweep", "poly-check", "nonparam-duel",
               "highorder-check", "sampled-sweep", "mjls-solve", "mjls-run")


class CliError(Exception):
    """Configuration or validation failure; maps to exit code 2."""


@dataclass
class EmitOptions:
    out_dir: str | None
    fmt: str
    force: bool
    timestamp: bool
    every: int


# ---------------------------------------------------------------------------
# config handling


_SCHEMAS = {
    "parametric-sweep": {"b": str, "seeds": int, "T": int, "M": float,
                         "theta_mean": float, "noise_var": float,
                         "unstable_T": int, "unstable_seeds": int,
                         "seed": int},
    "poly-check": {"exponents": str, "seed": int},
    "highorder-check": {"L": float, "p": int, "seed": int},
    "nonparam-duel": {"L": str, "seeds": int, "T": int, "w_bar": float,
                      "eps": float, "mode": str, "escape": float,
                      "n_anchors": int, "seed": int},
    "sampled-sweep": {"L": str, "h": float, "c": float, "samples": int,
                      "substeps": int, "seeds": int, "mode": str,
                      "seed": int},
    "mjls-solve": {"spec": str, "tol": float, "max_iter": int, "seed": int},
    "mjls-run": {"spec": str, "T": int, "seeds": int, "seed": int},
}


def load_config(path: str | None, experiment: str, overrides: dict) -> dict:
    """Merge file config and flag overrides; unknown keys are rejected."""
    schema = _SCHEMAS[experiment]
    merged: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = yaml.safe_load(fh)
        except OSError as exc:
            raise CliError(f"cannot read config file: {exc}")
        except yaml.YAMLError as exc:
            raise CliError(f"malformed config file: {exc}")
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise CliError("config file must hold a mapping")
        exp = raw.pop("experiment", experiment)
        if exp != experiment:
            raise CliError(
                f"config file is for experiment {exp!r}, not {experiment!r}")
        for key, value in raw.items():
            if key not in schema:
                raise CliError(f"unknown config key {key!r} for {experiment}")
            merged[key] = value
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in schema:
            raise CliError(f"unknown config key {key!r} for {experiment}")
        merged[key] = value
    for key, value in merged.items():
        want = schema[key]
        try:
            merged[key] = want(value)
        except (TypeError, ValueError):
            raise CliError(f"config key {key!r} must be {want.__name__}")
    return merged


def serialize_config(experiment: str, cfg: dict) -> str:
    doc = {"experiment": experiment}
    doc.update({k: cfg[k] for k in sorted(cfg)})
    return yaml.safe_dump(doc, sort_keys=False)


def parse_config_text(text: str, experiment: str) -> dict:
    raw = yaml.safe_load(text) or {}
    raw.pop("experiment", None)
    return load_config(None, experiment, raw)


def parse_value_list(spec: str) -> list[float]:
    """Parse 'lo:hi:step' (inclusive within 1e-9) or 'a,b,c' floats."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise CliError(f"range must be lo:hi:step, got {spec!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0:
            raise CliError("range step must be positive")
        vals = []
        k = 0
        while True:
            v = lo + k * step
            if v > hi + 1e-9:
                break
            vals.append(round(v, 12))
            k += 1
        return vals
    return [float(p) for p in spec.split(",") if p.strip()]


def resolve_seed(flag_seed: int | None, cfg: dict) -> int:
    """Precedence: flag, then FEEDBACK_LAB_SEED, then config, then 0."""
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    return int(cfg.get("seed", 0))


# ---------------------------------------------------------------------------
# emission


def _open_out(opts: EmitOptions, name: str):
    if opts.out_dir is None:
        return None
    os.makedirs(opts.out_dir, exist_ok=True)
    path = os.path.join(opts.out_dir, name)
    if os.path.exists(path) and not opts.force:
        raise CliError(f"refusing to overwrite {path} without --force")
    return path


def emit_csv(path: str, columns: list[str], rows: list[list],
             timestamp: bool) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if timestamp:
            fh.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def emit_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit(results: dict, opts: EmitOptions) -> list[str]:
    """Write one table to <name>.csv or <name>.json; returns paths.

    ``--every`` down-samples only tables flagged as time-indexed
    (trajectories and curves), never sweep summaries.
    """
    written = []
    name = results["name"]
    columns = results["columns"]
    rows = results["rows"]
    if opts.every > 1 and results.get("downsample", False):
        rows = rows[:: opts.every]
    if opts.fmt in ("csv", "both"):
        path = _open_out(opts, f"{name}.csv")
        if path:
            emit_csv(path, columns, rows, opts.timestamp)
            written.append(path)
    if opts.fmt in ("json", "both"):
        path = _open_out(opts, f"{name}.json")
        if path:
            payload = {"name": name,
                       "rows": [dict(zip(columns, row)) for row in rows]}
            emit_json(path, payload)
            written.append(path)
    return written


def _print_table(columns, rows, limit=25):
    print(",".join(columns))
    for row in rows[:limit]:
        print(",".join(str(v) for v in row))
    if len(rows) > limit:
        print(f"... ({len(rows) - limit} more rows)")


# ---------------------------------------------------------------------------
# experiments


def run_parametric_sweep(cfg: dict, seed: int) -> dict:
    bs = parse_value_list(cfg.get("b", "1.5:6.0:0.5"))
    T = cfg.get("T", 5000)
    seeds = cfg.get("seeds", 100)
    unstable_T = cfg.get("unstable_T", 200)
    unstable_seeds = cfg.get("unstable_seeds", seeds)
    M = cfg.get("M", 1.0)
    theta_mean = cfg.get("theta_mean", 1.0)
    noise_var = cfg.get("noise_var", 1.0)
    rows = []
    for b in bs:
        verdict = analysis.parametric_regime(b)
        horizon = T if verdict.stabilizable else unstable_T
        n = seeds if verdict.stabilizable else unstable_seeds
        system = sim.ParametricSystem(f=PowerGrowthFn(M=M, b=b),
                                      noise=GaussianIID(noise_var),
                                      theta_mean=theta_mean)
        mc = sim.McConfig(system=system, controller=sim.MvRlsControl(),
                          T=horizon, master_seed=seed,
                          checkpoints=sim.default_checkpoints(horizon))
        report = sim.monte_carlo(mc, n)
        try:
            slope, r2 = sim.regret_logfit(report)
        except ValueError:
            slope, r2 = float("nan"), float("nan")
        rows.append([b, report.blowup_fraction, slope, r2, verdict.regime.value,
                     horizon, n])
    return {"name": "parametric_sweep",
            "columns": ["b", "blowup_fraction", "mean_regret_slope",
                        "regret_fit_r2", "regime", "T", "seeds"],
            "rows": rows}


def run_poly_check(cfg: dict) -> dict:
    exps = parse_value_list(cfg.get("exponents", "5"))
    poly = analysis.characteristic_poly(exps)
    verdict = analysis.poly_impossible(poly, exps[0])
    if verdict.regime is analysis.Regime.IMPOSSIBLE:
        pz = float(poly(verdict.witness))
        print(f"IMPOSSIBLE, witness z~{verdict.witness:.6g}, P(z)={pz:.6g}")
        rows = [[",".join(f"{e:g}" for e in exps), "impossible",
                 verdict.witness, pz]]
    else:
        print("criterion not triggered")
        rows = [[",".join(f"{e:g}" for e in exps), "not-triggered", "", ""]]
    return {"name": "poly_check",
            "columns": ["exponents", "verdict", "witness_z", "P_at_witness"],
            "rows": rows}


def run_highorder_check(cfg: dict) -> dict:
    L = cfg.get("L", 1.0)
    p = cfg.get("p", 1)
    verdict = analysis.highorder_impossible(L, p)
    label = ("impossible" if verdict.regime is analysis.Regime.IMPOSSIBLE
             else "not-triggered")
    flag = " (boundary)" if verdict.boundary else ""
    print(f"L={L} p={p}: {label}{flag}, margin={verdict.witness:.6g}")
    return {"name": "highorder_check",
            "columns": ["L", "p", "verdict", "boundary", "margin"],
            "rows": [[L, p, label, verdict.boundary, verdict.witness]]}


def _anchor_table(name: str, label: float, traj) -> dict:
    f = traj.realized_f
    rows = [[label, traj.seed, float(x), float(v)]
            for x, v in zip(f.xs, f.vs)]
    return {"name": f"{name}_anchors",
            "columns": ["L", "seed", "x", "v"],
            "rows": rows}


def _trajectory_table(name: str, label: float, traj) -> dict:
    rows = []
    committed = traj.committed
    for t in range(traj.states.shape[0]):
        u = float(traj.inputs[t]) if t < traj.inputs.shape[0] else ""
        w = float(traj.noises[t])
        v = (float(committed[t]) if committed is not None
             and t < committed.shape[0] else "")
        rows.append([label, traj.seed, t, float(traj.states[t]), u, w, v])
    return {"name": f"{name}_trajectory",
            "columns": ["L", "seed", "t", "state", "input", "noise",
                        "committed_value"],
            "rows": rows, "downsample": True}


def run_nonparam_duel(cfg: dict, seed: int) -> list[dict]:
    Ls = parse_value_list(cfg.get("L", "6"))
    T = cfg.get("T", 500)
    seeds = cfg.get("seeds", 100)
    w_bar = cfg.get("w_bar", 1.0)
    mode = cfg.get("mode", "adversary")
    escape = cfg.get("escape", 1e6)
    if mode not in ("adversary", "random"):
        raise CliError("mode must be 'adversary' or 'random'")
    rows = []
    extras = []
    for L in Ls:
        if mode == "adversary":
            system = sim.NonparametricSystem(L=L, w_bar=w_bar, y0_std=1.0)
            adversary = sim.GreedyAdversary()
        else:
            system = sim.NonparametricSystem(
                L=L, w_bar=w_bar, y0_std=1.0,
                member=sim.RandomMember(n_anchors=cfg.get("n_anchors", 16)))
            adversary = None
        controller = sim.SwitchingControl(eps=cfg.get("eps"))
        mc = sim.McConfig(system=system, controller=controller,
                          adversary=adversary, T=T, master_seed=seed)
        report = sim.monte_carlo(mc, seeds)
        n_escaped = sum(1 for e in report.episodes
                        if e.sup_abs_state > escape or e.blow_step is not None)
        sups = [e.sup_abs_state for e in report.episodes]
        rows.append([L, mode, seeds, T, n_escaped / seeds,
                     report.blowup_fraction, float(np.median(sups)),
                     float(np.max(sups))])
        if mode == "adversary" and not extras:
            # representative committed function and trajectory, first episode
            traj, _ = sim.run_episode(system, controller, adversary, T,
                                      sim.episode_seed(seed, 0))
            extras = [_anchor_table("nonparam_duel", L, traj),
                      _trajectory_table("nonparam_duel", L, traj)]
    return [{"name": "nonparam_duel",
             "columns": ["L", "mode", "seeds", "T", "escape_fraction",
                         "blowup_fraction", "median_sup", "max_sup"],
             "rows": rows}] + extras


def run_sampled_sweep(cfg: dict, seed: int) -> list[dict]:
    Ls = parse_value_list(cfg.get("L", "0.5,1.0,2.0"))
    h = cfg.get("h", 1.0)
    c = cfg.get("c", 1.0)
    samples = cfg.get("samples", 1000)
    substeps = cfg.get("substeps", 64)
    seeds = cfg.get("seeds", 50)
    mode = cfg.get("mode", "random")
    if mode not in ("adversary", "random"):
        raise CliError("mode must be 'adversary' or 'random'")
    rows = []
    extras = []
    for L in Ls:
        spec = SampledSpec(L=L, c=c, h=h, substeps=substeps)
        verdict = analysis.sampled_regime(L, h)
        if mode == "adversary":
            system = sim.SampledSystem(spec=spec)
            traj, ep = sim.run_episode(system, sim.SampledCeControl(),
                                       sim.SampledGreedyAdversary(),
                                       T=samples, seed=seed)
            audit = sim.growth_rate_audit(traj)
            min_mult = (float(np.min(audit.multipliers[:12]))
                        if audit.multipliers.shape[0] else float("nan"))
            rows.append([L, h, L * h, verdict.regime.value, mode, 1,
                         1.0 if ep.outcome is sim.Outcome.BLOWUP else 0.0,
                         ep.sup_abs_state, min_mult])
            if not extras:
                extras = [_anchor_table("sampled_sweep", L, traj),
                          _trajectory_table("sampled_sweep", L, traj)]
        else:
            system = sim.SampledSystem(spec=spec,
                                       member=sim.RandomEnvelopeMember(),
                                       x0_std=1.0)
            mc = sim.McConfig(system=system, controller=sim.SampledCeControl(),
                              T=samples, master_seed=seed)
            report = sim.monte_carlo(mc, seeds)
            sups = [e.sup_abs_state for e in report.episodes]
            rows.append([L, h, L * h, verdict.regime.value, mode, seeds,
                         report.blowup_fraction, float(np.max(sups)),
                         float("nan")])
    return [{"name": "sampled_sweep",
             "columns": ["L", "h", "Lh", "regime", "mode", "seeds",
                         "blowup_fraction", "max_sup", "min_audit_multiplier"],
             "rows": rows}] + extras


def load_mjls_spec(path: str) -> MjlsSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise CliError(f"cannot read spec file: {exc}")
    except yaml.YAMLError as exc:
        raise CliError(f"malformed spec file: {exc}")
    if not isinstance(raw, dict):
        raise CliError("spec file must hold a mapping")
    unknown = set(raw) - {"P", "A", "B", "sigma_lo", "sigma_hi"}
    if unknown:
        raise CliError(f"unknown spec keys: {sorted(unknown)}")
    try:
        P = np.asarray(raw["P"], dtype=float)
        A = np.asarray(raw["A"], dtype=float)
        B = np.asarray(raw["B"], dtype=float)
    except KeyError as exc:
        raise CliError(f"spec file missing key {exc}")
    n = A.shape[1] if A.ndim == 3 else 0
    noise = MartingaleDiffVector(sigma_lo=float(raw.get("sigma_lo", 1.0)),
                                 sigma_hi=float(raw.get("sigma_hi", n * 1.0)),
                                 dim=n)
    try:
        return MjlsSpec(chain=MarkovChain(P), A=A, B=B, noise=noise)
    except (ValueError, ConfigurationError) as exc:
        raise CliError(f"invalid jump-linear spec: {exc}")


def run_mjls_solve(cfg: dict) -> tuple[dict, bool]:
    path = cfg.get("spec")
    if not path:
        raise CliError("mjls-solve needs --spec FILE")
    spec = load_mjls_spec(path)
    result = riccati.solve_coupled_riccati(
        spec, tol=cfg.get("tol", 1e-10), max_iter=cfg.get("max_iter", 10000))
    print(f"verdict: {result.status.value} after {result.iterations} iterations")
    rows = []
    if result.solution is not None:
        sol = result.solution
        print(f"residual: {sol.residual:.3e}")
        for i in range(spec.n_modes):
            print(f"M_{i + 1} =\n{sol.Ms[i]}")
            print(f"K_{i + 1} =\n{sol.Ks[i]}")
            rows.append([i + 1, json.dumps(sol.Ms[i].tolist()),
                         json.dumps(sol.Ks[i].tolist()), sol.residual])
    table = {"name": "mjls_solve",
             "columns": ["mode", "M", "K", "residual"],
             "rows": rows}
    return table, result.status is riccati.SolveStatus.INDETERMINATE


def run_mjls_run(cfg: dict, seed: int) -> tuple[dict, bool]:
    path = cfg.get("spec")
    if not path:
        raise CliError("mjls-run needs --spec FILE")
    spec = load_mjls_spec(path)
    result = riccati.solve_coupled_riccati(spec)
    indeterminate = result.status is riccati.SolveStatus.INDETERMINATE
    T = cfg.get("T", 2000)
    seeds = cfg.get("seeds", 50)
    if result.solution is None:
        print(f"no gain schedule: solver verdict {result.status.value}")
        controller = sim.ZeroControl()
    else:
        controller = sim.MjlsGainControl(result.solution)
    system = sim.MjlsSystem(spec=spec, x0=tuple([0.0] * spec.n_states))
    mc = sim.McConfig(system=system, controller=controller, T=T,
                      master_seed=seed, collect_curve=True)
    report = sim.monte_carlo(mc, seeds)
    rows = []
    if report.mean_sq_curve is not None:
        for t, v in enumerate(report.mean_sq_curve):
            rows.append([t, float(v)])
    print(f"blowup_fraction: {report.blowup_fraction}")
    if report.mean_sq_curve is not None:
        print(f"final mean square: {report.mean_sq_curve[-1]:.6g}")
    table = {"name": "mjls_run",
             "columns": ["t", "mean_sq_state"],
             "rows": rows, "downsample": True}
    return table, indeterminate


# ---------------------------------------------------------------------------
# argument parsing


def _add_global_options(parser: argparse.ArgumentParser,
                        suppress: bool) -> None:
    # registered on the top-level parser and again on every subparser so
    # the flags work in either position; the subparser copies default to
    # SUPPRESS so they cannot clobber values parsed before the subcommand
    def dflt(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--config", default=dflt(None),
                        help="YAML config file; flags override it")
    parser.add_argument("--out", default=dflt(None),
                        help="output directory for result files")
    parser.add_argument("--format", choices=("csv", "json", "both"),
                        default=dflt("csv"))
    parser.add_argument("--seed", type=int, default=dflt(None),
                        help=f"master seed (overrides ${SEED_ENV_VAR})")
    parser.add_argument("--force", action="store_true", default=dflt(False),
                        help="overwrite existing output files")
    parser.add_argument("--no-timestamp", action="store_true",
                        default=dflt(False),
                        help="omit the timestamp header from CSV output")
    parser.add_argument("--every", type=int, default=dflt(1),
                        help="down-sample emitted rows to every N-th")
    parser.add_argument("--strict", action="store_true", default=dflt(False),
                        help="exit 3 on indeterminate solver verdicts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feedback-lab",
        description="Simulation laboratory for the capability and limits "
                    "of feedback under structural uncertainty.")
    _add_global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="experiment", required=True)

    p = sub.add_parser("parametric-sweep",
                       help="blowup fraction and regret growth of the "
                            "adaptive minimum-variance loop across growth "
                            "exponents; the stabilizable/impossible switch "
                            "sits at b=4")
    p.add_argument("--b", help="exponents, 'lo:hi:step' or comma list")
    p.add_argument("--seeds", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--unstable-T", dest="unstable_T", type=int,
                   help="horizon used on the impossible side")
    p.add_argument("--unstable-seeds", dest="unstable_seeds", type=int)
    p.add_argument("--M", type=float)
    p.add_argument("--theta-mean", dest="theta_mean", type=float)
    p.add_argument("--noise-var", dest="noise_var", type=float)

    p = sub.add_parser("poly-check",
                       help="negativity test of the characteristic "
                            "polynomial attached to decreasing regression "
                            "exponents; a negative value inside (1, b_1) "
                            "certifies impossibility")
    p.add_argument("--exponents", help="comma list, decreasing")

    p = sub.add_parser("highorder-check",
                       help="closed-form impossibility inequality for "
                            "higher-order Lipschitz uncertainty; at p=1 the "
                            "threshold is 3/2+sqrt(2)")
    p.add_argument("--L", type=float)
    p.add_argument("--p", type=int)

    p = sub.add_parser("nonparam-duel",
                       help="switching nearest-neighbor controller against "
                            "random Lipschitz members or the greedy "
                            "anchor-committing opponent")
    p.add_argument("--L", help="slope budgets, range or comma list")
    p.add_argument("--seeds", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--w-bar", dest="w_bar", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--mode", choices=("adversary", "random"))
    p.add_argument("--escape", type=float)
    p.add_argument("--n-anchors", dest="n_anchors", type=int)

    p = sub.add_parser("sampled-sweep",
                       help="sampled-data loop across slope budgets: "
                            "certainty-equivalence control against random "
                            "members, or the escape audit against the "
                            "greedy opponent")
    p.add_argument("--L", help="slope bounds, range or comma list")
    p.add_argument("--h", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--substeps", type=int)
    p.add_argument("--seeds", type=int)
    p.add_argument("--mode", choices=("adversary", "random"))

    p = sub.add_parser("mjls-solve",
                       help="solve the coupled fixed-point equations whose "
                            "positive-definite solvability decides "
                            "jump-linear stabilizability; prints M_i, K_i, "
                            "residual and verdict")
    p.add_argument("--spec", help="YAML file with P, A, B")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)

    p = sub.add_parser("mjls-run",
                       help="Monte Carlo of the jump-linear loop under the "
                            "solved gain schedule; emits the mean-square "
                            "state curve")
    p.add_argument("--spec", help="YAML file with P, A, B")
    p.add_argument("--T", type=int)
    p.add_argument("--seeds", type=int)

    for sp in sub.choices.values():
        _add_global_options(sp, suppress=True)
    return parser


_FLAG_KEYS = {
    "parametric-sweep": ("b", "seeds", "T", "unstable_T", "unstable_seeds",
                         "M", "theta_mean", "noise_var"),
    "poly-check": ("exponents",),
    "highorder-check": ("L", "p"),
    "nonparam-duel": ("L", "seeds", "T", "w_bar", "eps", "mode", "escape",
                      "n_anchors"),
    "sampled-sweep": ("L", "h", "c", "samples", "substeps", "seeds", "mode"),
    "mjls-solve": ("spec", "tol", "max_iter"),
    "mjls-run": ("spec", "T", "seeds"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    experiment = args.experiment
    try:
        overrides = {k: getattr(args, k, None) for k in _FLAG_KEYS[experiment]}
        cfg = load_config(args.config, experiment, overrides)
        seed = resolve_seed(args.seed, cfg)
        opts = EmitOptions(out_dir=args.out, fmt=args.format, force=args.force,
                           timestamp=not args.no_timestamp,
                           every=max(1, args.every))
        indeterminate = False
        if experiment == "parametric-sweep":
            tables = [run_parametric_sweep(cfg, seed)]
        elif experiment == "poly-check":
            tables = [run_poly_check(cfg)]
        elif experiment == "highorder-check":
            tables = [run_highorder_check(cfg)]
        elif experiment == "nonparam-duel":
            tables = run_nonparam_duel(cfg, seed)
        elif experiment == "sampled-sweep":
            tables = run_sampled_sweep(cfg, seed)
        elif experiment == "mjls-solve":
            table, indeterminate = run_mjls_solve(cfg)
            tables = [table]
        else:
            table, indeterminate = run_mjls_run(cfg, seed)
            tables = [table]
        if experiment not in ("poly-check", "highorder-check", "mjls-solve"):
            _print_table(tables[0]["columns"], tables[0]["rows"])
        for table in tables:
            for path in emit(table, opts):
                print(f"wrote {path}")
        if indeterminate and args.strict:
            return EXIT_INDETERMINATE
        return EXIT_OK
    except (CliError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
