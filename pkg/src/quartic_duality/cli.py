"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 invalid parameters,
3 regime mismatch.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import counterexamples as cx
from .dual import critical_points, solve_dual_equation, verify_duality
from .errors import BranchUnavailable, DualityError, NotDoubleWell, WrongRegime
from .oracle import brute_min_p
from .quadrature import Rule
from .radial import (
    MaterialParams,
    RadialRegime,
    available_branches,
    p_dual,
    p_hat,
    regime_check,
    sample_dual_gaps,
    sample_primal_gaps,
    solve_pointwise,
    write_field_csv,
)
from .scalar import Regime, ScalarParams, eval_f, regime_info

EXIT_OK, EXIT_VERIFY, EXIT_PARAMS, EXIT_REGIME = 0, 1, 2, 3

SCALAR_KEYS = ("alpha", "mu", "nu", "tau")
RADIAL_KEYS = ("alpha", "mu", "nu", "tau_theta", "a", "b")
DEFAULT_EPS = tuple(0.5 ** k for k in range(6))  # fractions of (b - a)/2


def fmt(x) -> str:
    return f"{x:.17g}"


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if hasattr(obj, "value") and isinstance(obj.value, str):  # str enums
        return obj.value
    return obj


def dump(obj) -> str:
    return json.dumps(jsonable(obj), indent=2)


def read_config(path) -> dict[str, str]:
    """Flatten a key=value file with optional ``[section]`` headers."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser()
    parser.read_string("[__root__]\n" + text)
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            out[key.replace("-", "_")] = value
    return out


def resolve(args, keys) -> dict[str, float]:
    """Merge config-file values with command-line overrides."""
    merged = read_config(args.config) if args.config else {}
    values = {}
    for key in keys:
        flag = getattr(args, key, None)
        raw = flag if flag is not None else merged.get(key)
        if raw is None:
            raise ValueError(f"missing parameter {key!r}")
        values[key] = float(raw)
    for key in ("grid_nodes", "seed"):
        if getattr(args, key, None) is None and key in merged:
            setattr(args, key, int(merged[key]))
    return values


def warnings_for(alpha, mu, nu) -> list[str]:
    if nu * alpha**2 >= 8 * mu:
        return ["nu*alpha**2 >= 8*mu: outside the range 2*mu < nu*alpha**2 < 8*mu "
                "usually assumed for this material (informational only)"]
    return []


def emit(args, report: dict, csv_files: dict[str, list[list]] | None = None) -> None:
    text = dump(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n")
        for name, rows in (csv_files or {}).items():
            write_rows(out / name, rows)
    print(text)


def write_rows(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


# -- commands ---------------------------------------------------------------------

def cmd_solve(args) -> int:
    params = ScalarParams(**resolve(args, SCALAR_KEYS))
    info = regime_info(params)
    points = []
    ok = True
    for cp in critical_points(params):
        rep = verify_duality(params, cp)
        ok &= rep.ok
        points.append(cp.as_dict() | {"verification": rep.as_dict()})
    report = {
        "params": vars_of(params),
        "rho": info.rho,
        "eta": info.eta,
        "regime": info.regime,
        "roots": [{"branch": r.branch, "sigma": r.sigma, "double": r.double}
                  for r in solve_dual_equation(params)],
        "critical_points": points,
        "verified": ok,
        "warnings": warnings_for(params.alpha, params.mu, params.nu),
    }
    if args.brute:
        y, p = brute_min_p(params)
        report["brute_force_min"] = {"y": y, "p": p}
    rows = [["branch", "sigma", "double"]] + [[r.branch.value, r.sigma, r.double]
                                             for r in solve_dual_equation(params)]
    emit(args, report, {"roots.csv": rows})
    return EXIT_OK if ok else EXIT_VERIFY


def vars_of(obj) -> dict:
    return {k: getattr(obj, k) for k in obj.__dataclass_fields__}


SWEEP_HEADER = ["tau", "tau_sq", "regime", "root_count",
                "sigma_1", "sigma_2", "sigma_3", "u_1", "u_2", "u_3",
                "p_1", "p_2", "p_3", "h_1", "h_2", "h_3", "labels", "ordering"]


def sweep_rows(base: ScalarParams, taus) -> list[list]:
    rows = [SWEEP_HEADER]
    for tau in taus:
        params = base.with_tau(tau)
        info = regime_info(params)
        roots = solve_dual_equation(params)
        points = critical_points(params)
        pad = lambda xs: (list(xs) + [""] * 3)[:3]  # noqa: E731
        ordering = ""
        if info.regime is Regime.SUBCRITICAL:
            p1, p2, p3 = (cp.p_value for cp in points)
            ordering = "p3>p2>p1" if p3 > p2 > p1 else "violated"
        rows.append([
            float(tau), float(tau) ** 2, info.regime.value, len({r.sigma for r in roots}),
            *pad(r.sigma for r in roots),
            *pad(cp.u_bar for cp in points),
            *pad(cp.p_value for cp in points),
            *pad(cp.h_value for cp in points),
            ";".join(cp.label.value for cp in points),
            ordering,
        ])
    return rows


def tau_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("tau step must be positive")
    if hi < lo:
        return np.empty(0)
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def cmd_sweep(args) -> int:
    values = resolve(args, ("alpha", "mu", "nu"))
    base = ScalarParams(**values)
    regime_info(base)
    rows = sweep_rows(base, tau_grid(args.tau_min, args.tau_max, args.tau_step))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_rows(out / "roots.csv", rows)
    if args.format == "json":
        header, body = rows[0], rows[1:]
        print(dump([dict(zip(header, row)) for row in body]))
    else:
        write_rows_stream(sys.stdout, rows)
    return EXIT_OK


def write_rows_stream(stream, rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def cmd_fgraph(args) -> int:
    """Plot data for the dual cubic: the graph of f with its landmarks."""
    params = ScalarParams(**resolve(args, ("alpha", "mu", "nu")))
    info = regime_info(params)
    lo = args.sigma_min if args.sigma_min is not None else -0.5 * params.nu * params.alpha**2 - 1.0
    hi = args.sigma_max if args.sigma_max is not None else -params.mu + 1.0
    sig = np.linspace(lo, hi, args.points)
    rows = [["sigma", "f"]] + [[float(s), float(v)] for s, v in zip(sig, eval_f(params, sig))]
    marks = [["landmark", "sigma", "f"],
             ["lower_zero", -0.5 * params.nu * params.alpha**2, 0.0],
             ["rho", info.rho, info.eta],
             ["minus_mu", -params.mu, 0.0]]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_rows(out / "f_graph.csv", rows)
        write_rows(out / "f_landmarks.csv", marks)
    write_rows_stream(sys.stdout, rows)
    return EXIT_OK


def cmd_radial(args) -> int:
    mp = MaterialParams(**resolve(args, RADIAL_KEYS))
    regime = regime_check(mp)
    base = {"params": vars_of(mp), "rho": mp.rho, "eta": mp.eta, "regime": regime,
            "warnings": warnings_for(mp.alpha, mp.mu, mp.nu)}
    if regime is RadialRegime.MIXED:
        print(dump(base | {"error": "no closed-form case applies (Mixed regime)"}))
        return EXIT_REGIME
    grid = mp.grid(args.grid_nodes or 2049, Rule(args.rule))
    rng = np.random.default_rng(args.seed or 0)
    solutions, fields, ok = [], {}, True
    zetas = {}
    for branch in available_branches(regime):
        zeta, v = solve_pointwise(mp, grid, branch)
        zetas[branch] = zeta
        ph, pd = p_hat(mp, grid, v), p_dual(mp, grid, zeta)
        tol = 10.0 * ph.error
        entry = {"branch": branch, "p_hat": ph.value, "p_hat_error": ph.error,
                 "p_dual": pd.value, "p_dual_error": pd.error,
                 "duality_gap": abs(ph.value - pd.value), "tolerance": tol,
                 "duality_ok": abs(ph.value - pd.value) <= tol}
        ok &= entry["duality_ok"]
        if args.samples and branch.value == "Upper":
            pg, pe = sample_primal_gaps(mp, grid, v, args.samples, rng)
            dg, de = sample_dual_gaps(mp, grid, zeta, args.samples, rng)
            entry["sampling"] = {"count": args.samples,
                                 "min_primal_gap": float(pg.min()), "min_dual_gap": float(dg.min()),
                                 "ok": bool(np.all(pg >= -pe) and np.all(dg >= -de))}
            ok &= entry["sampling"]["ok"]
        solutions.append(entry)
        key = branch.value.lower()
        fields[f"fields_zeta_{key}.csv"] = (grid, zeta)
        fields[f"fields_v_{key}.csv"] = (grid, v)
    if regime is RadialRegime.CASE_B:
        z1, z2, z3 = (zetas[b].values for b in available_branches(regime))
        order = bool(np.all((z1 > -mp.mu) & (-mp.mu > z2) & (z2 > mp.rho) & (mp.rho > z3)
                            & (z3 > -0.5 * mp.nu * mp.alpha**2)))
        base["ordering_ok"] = order
        ok &= order
    report = base | {"grid_nodes": len(grid), "rule": grid.rule, "seed": args.seed or 0,
                     "solutions": solutions, "verified": ok}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, (g, f) in fields.items():
            write_field_csv(out / name, g, f)
    emit(args, report)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_counterexample(args) -> int:
    mp = MaterialParams(**resolve(args, RADIAL_KEYS))
    which = args.which
    if which == "blowup":
        rep = cx.blowup_report(mp, args.gamma, args.n_list or cx.DEFAULT_N_LIST)
        ok = rep.increasing and rep.slope > 0 and rep.in_band
        ladder = [["parameter", "value", "error"], *rep.ladder_rows()]
    elif which == "domgresit":
        rep = cx.domgresit_witness(mp)
        ok = (not rep.witness.converges) and rep.control.converges
        ladder = [["level", "witness", "control"],
                  *([i, w, c] for i, (w, c) in enumerate(zip(rep.witness.estimates, rep.control.estimates)))]
    else:
        eps = args.eps or [0.5 * (mp.b - mp.a) * f for f in DEFAULT_EPS]
        fn = cx.mix_perturbation_report if which == "mix" else cx.spike_perturbation_report
        rep = fn(mp, eps)
        ok = rep.signs_ok and rep.resolved and rep.norms_bounded
        ladder = [["parameter", "gap", "norm"], *rep.ladder_rows()]
    report = {"which": which, "params": vars_of(mp), "report": rep.as_dict(), "verified": ok}
    emit(args, report, {f"ladder_{which}.csv": ladder})
    return EXIT_OK if ok else EXIT_VERIFY


# -- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quartic-duality",
                                     description="Duality checks and counterexamples "
                                                 "for the double-well shear energy.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value parameter file (sections allowed)")
    common.add_argument("--alpha", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--nu", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="directory for report.json and CSV files")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    radial = argparse.ArgumentParser(add_help=False)
    radial.add_argument("--tau-theta", dest="tau_theta", type=float)
    radial.add_argument("--a", type=float)
    radial.add_argument("--b", type=float)
    radial.add_argument("--grid-nodes", dest="grid_nodes", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="critical points of the scalar problem")
    p.add_argument("--tau", type=float)
    p.add_argument("--brute", action="store_true", help="also run the brute-force minimiser")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="roots and labels over a tau range")
    p.add_argument("--tau-min", type=float, default=0.0)
    p.add_argument("--tau-max", type=float, default=1.0)
    p.add_argument("--tau-step", type=float, default=0.01)
    p.set_defaults(func=cmd_sweep, format="csv")

    p = sub.add_parser("fgraph", parents=[common], help="plot data for the dual cubic")
    p.add_argument("--sigma-min", type=float)
    p.add_argument("--sigma-max", type=float)
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_fgraph)

    p = sub.add_parser("radial", parents=[common, radial], help="solve the radial problem")
    p.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.COMPOSITE_SIMPSON.value)
    p.add_argument("--samples", type=int, default=0, help="random optimality draws")
    p.set_defaults(func=cmd_radial)

    p = sub.add_parser("counterexample", parents=[common, radial], help="run a counterexample")
    p.add_argument("which", choices=("blowup", "domgresit", "mix", "spike"))
    p.add_argument("--gamma", type=float)
    p.add_argument("--n-list", dest="n_list", type=int, nargs="+")
    p.add_argument("--eps", type=float, nargs="+")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotDoubleWell as exc:
        print(f"NotDoubleWell: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (WrongRegime, BranchUnavailable) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ValueError, DualityError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
