"""Command-line front end: ``msglass critical|solve|sweep|bipartite|verify``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed
statistical verification.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import bipartite as bp
from . import mcverify as mc
from .critical import CriticalPoint, critical_residuals, solve_critical
from .errors import DomainError, ModelError, NumericalError, UnsupportedModelError
from .model import ModelSpec, xi_eval, xi_q_at_one
from .supercritical import NEAR_CRITICAL_RTOL, free_energy_at, solve_supercritical

log = logging.getLogger("msglass")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_STATISTICAL = 0, 2, 3, 4


class InputError(Exception):
    """Bad user input; reported on one line with exit code 2."""


# ---------------------------------------------------------------------------
# model ingestion


def parse_model(source: str) -> ModelSpec:
    """Build a :class:`ModelSpec` from a JSON file path or an inline JSON object.

    Schema: ``{"species": [{"label": str, "lambda": float, "p": int}, ...],
    "metadata": {...}}``. Proportions off by at most 1e-6 are renormalized
    (with a warning above 1e-9); larger mismatches are rejected.
    """
    text = source
    if not source.lstrip().startswith("{"):
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"model: cannot read {source!r}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("species"), list):
        raise InputError("species: expected a list of {label, lambda, p} objects")
    labels, lam, p = [], [], []
    for i, entry in enumerate(doc["species"]):
        if not isinstance(entry, dict):
            raise InputError(f"species[{i}]: expected an object")
        for key in ("label", "lambda", "p"):
            if key not in entry:
                raise InputError(f"species[{i}].{key}: missing")
        label, lv, pv = entry["label"], entry["lambda"], entry["p"]
        if not isinstance(label, str) or not label:
            raise InputError(f"species[{i}].label: expected a non-empty string")
        if label in labels:
            raise InputError(f"species[{i}].label: duplicate label {label!r}")
        if isinstance(lv, bool) or not isinstance(lv, (int, float)) or not 0.0 < lv < 1.0:
            raise InputError(f"species[{i}].lambda: expected a number in (0, 1), got {lv!r}")
        if isinstance(pv, bool) or not isinstance(pv, int) or pv < 1:
            raise InputError(f"species[{i}].p: expected an integer >= 1, got {pv!r}")
        labels.append(label)
        lam.append(float(lv))
        p.append(pv)
    if len(labels) < 2:
        raise InputError("species: at least two species are required")
    total = math.fsum(lam)
    if abs(total - 1.0) > 1e-6:
        raise InputError(f"lambda: lambda sums to {total:.12g}, expected 1")
    if abs(total - 1.0) > 1e-9:
        log.warning("lambda sums to %.17g; renormalizing", total)
    lam = [v / total for v in lam]
    # last entry absorbs rounding so the sum is 1 to machine precision
    lam[-1] = 1.0 - math.fsum(lam[:-1])
    try:
        model = ModelSpec(tuple(lam), tuple(p), tuple(labels))
    except ModelError as exc:
        raise InputError(f"model: {exc}") from None
    if model.is_bipartite:
        log.info("|p| = 2: routing to the bipartite closed forms")
    return model


def resolve_critical(model: ModelSpec) -> CriticalPoint:
    """Critical point, routing ``|p| = 2`` to the closed forms."""
    if model.is_bipartite:
        return bp.critical_point(bp.BipartiteModel.from_model(model))
    return solve_critical(model)


def _max_residual(model: ModelSpec, cp: CriticalPoint):
    if model.is_bipartite:
        return None
    return critical_residuals(model, cp.beta_c, cp.q_c, cp.e_star)["max"]


# ---------------------------------------------------------------------------
# output helpers


def _emit(obj: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        json.dump(obj, out, indent=2)
        out.write("\n")
        return
    for key, value in obj.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                out.write(f"{key}[{sub}]".ljust(22) + f"{_fmt(v)}\n")
        else:
            out.write(key.ljust(22) + f"{_fmt(value)}\n")


def _fmt(v):
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _g17(v: float) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# commands


def cmd_critical(args) -> int:
    model = parse_model(args.model)
    cp = resolve_critical(model)
    out = cp.as_dict(model)
    out["residual"] = _max_residual(model, cp)
    out["route"] = "bipartite" if model.is_bipartite else "general"
    _emit(out, args.json)
    return EXIT_OK


def solve_point(model: ModelSpec, cp: CriticalPoint, beta: float) -> dict:
    xi_one = xi_eval(model, np.ones(model.n_species))
    if beta < 0.0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    if beta <= cp.beta_c or beta - cp.beta_c < NEAR_CRITICAL_RTOL * cp.beta_c:
        at_critical = abs(beta - cp.beta_c) < NEAR_CRITICAL_RTOL * cp.beta_c
        q = cp.q_c if at_critical else np.zeros(model.n_species)
        return {
            "beta": beta,
            "regime": "critical" if at_critical else "subcritical",
            "y_star": beta * math.sqrt(xi_eval(model, q)) if at_critical else None,
            "free_energy": 0.5 * beta * beta * xi_one,
            "xi_q_one": xi_q_at_one(model, q),
            "q": {lab: float(v) for lab, v in zip(model.species, q)},
        }
    sol = solve_supercritical(model, cp, beta)
    return {
        "beta": beta,
        "regime": "supercritical",
        "y_star": sol.y_star,
        "free_energy": sol.free_energy,
        "xi_q_one": sol.xi_q_one,
        "q": {lab: float(v) for lab, v in zip(model.species, sol.q)},
        "gamma": {lab: float(v) for lab, v in zip(model.species, sol.gamma)},
        "a_star": sol.a_star,
    }


def cmd_solve(args) -> int:
    model = parse_model(args.model)
    cp = resolve_critical(model)
    out = {"beta_c": cp.beta_c, "e_star": cp.e_star}
    out.update(solve_point(model, cp, args.beta))
    _emit(out, args.json)
    return EXIT_OK


def sweep_rows(model: ModelSpec, beta_min: float, beta_max: float, steps: int):
    """Header and rows (as strings) of a uniform beta sweep."""
    cp = resolve_critical(model)
    header = ["beta", "y_star", "F", "xi_q_one"] + [f"q_{lab}" for lab in model.species]
    rows = []
    for beta in np.linspace(beta_min, beta_max, steps):
        pt = solve_point(model, cp, float(beta))
        y = "" if pt["y_star"] is None else _g17(pt["y_star"])
        row = [_g17(pt["beta"]), y, _g17(pt["free_energy"]), _g17(pt["xi_q_one"])]
        row += [_g17(v) for v in pt["q"].values()]
        rows.append(row)
    return header, rows


def cmd_sweep(args) -> int:
    if not 0.0 <= args.beta_min < args.beta_max:
        raise InputError("beta-min/beta-max: need 0 <= beta-min < beta-max")
    if args.steps < 2:
        raise InputError("steps: need at least 2 grid points")
    model = parse_model(args.model)
    header, rows = sweep_rows(model, args.beta_min, args.beta_max, args.steps)
    try:
        fh = open(args.out, "w", newline="") if args.out != "-" else sys.stdout
    except OSError as exc:
        raise InputError(f"out: cannot write {args.out!r}: {exc.strerror}") from None
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_bipartite(args) -> int:
    if args.model:
        model = parse_model(args.model)
        try:
            m = bp.BipartiteModel.from_model(model)
        except ModelError as exc:
            raise InputError(f"model: {exc}") from None
    else:
        if not 0.0 < args.lambda_s < 1.0:
            raise InputError("lambda-s: expected a number in (0, 1)")
        m = bp.BipartiteModel.from_lambda_s(args.lambda_s)
    beta_c, e_star, _ = bp.bipartite_critical(m)
    out = {"lambda_s": m.lambda_s, "lambda_t": m.lambda_t, "beta_c": beta_c, "e_star": e_star}
    if args.beta is not None:
        q_s, q_t, sub = bp.bipartite_overlap(m, args.beta)
        out.update(
            beta=args.beta,
            regime="subcritical" if sub else "supercritical",
            q_s=q_s,
            q_t=q_t,
            free_energy=bp.bipartite_free_energy(m, args.beta),
            kappa=bp.kappa(m, args.beta)[0],
        )
    _emit(out, args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification drivers


def _check_line(name, observed, expected, tolerance, ok):
    status = "PASS" if ok else "FAIL"
    return f"{status} {name}: observed={observed:.6g} expected={expected} tolerance={tolerance}"


def _verify_covariance(args):
    model = parse_model(args.model)
    sizes = mc.split_sizes(model, args.n)
    rep = mc.covariance_check(model, sizes, args.trials, args.pairs, args.seed, workers=args.workers)
    lines = []
    for k, pair in enumerate(rep.pairs):
        lines.append(
            f"     pair {k}: R={np.array2string(pair.overlap, precision=4)} "
            f"target={pair.target:.6g} mean={pair.mean:.6g} se={pair.stderr:.3g} z={pair.z:+.2f}"
        )
    lines.append(_check_line("covariance max|z|", rep.max_abs_z, "0", "5 sigma", rep.passed))
    return rep.passed, lines, {"max_abs_z": rep.max_abs_z, "sizes": sizes}


def _verify_wishart(args):
    limit = math.sqrt(args.lambda_s) + math.sqrt(1.0 - args.lambda_s)
    est = float(np.mean([
        mc.wishart_ground_state(args.n, args.lambda_s, mc.replica_seed(args.seed, r))
        for r in range(args.replicas)
    ]))
    ok = limit * 0.98 <= est <= limit * 1.005
    line = _check_line("wishart ground state", est, f"{limit:.6g}", "[-2%, +0.5%]", ok)
    return ok, [line], {"estimate": est, "limit": limit}


def _verify_groundstate(args):
    model = parse_model(args.model)
    cp = resolve_critical(model)
    sizes = mc.split_sizes(model, args.n)
    est = mc.gradient_ascent_ground_state(model, sizes, args.restarts, args.seed, workers=args.workers)
    ok = cp.e_star - 0.2 <= est <= cp.e_star + 0.05
    line = _check_line("ascent ground state", est, f"{cp.e_star:.6g}", "[-0.2, +0.05]", ok)
    return ok, [line], {"estimate": est, "e_star": cp.e_star}


def _verify_smallbeta(args):
    model = parse_model(args.model)
    cp = resolve_critical(model)
    beta = args.beta if args.beta is not None else 0.25 * cp.beta_c
    sizes = mc.split_sizes(model, args.n)
    est, se = mc.small_beta_free_energy(model, sizes, beta, args.samples, args.seed, return_stderr=True)
    target = 0.5 * beta * beta * xi_eval(model, np.ones(model.n_species))
    ok = abs(est - target) <= 0.02
    line = _check_line("small-beta free energy", est, f"{target:.6g}", "0.02 abs", ok)
    return ok, [line], {"estimate": est, "stderr": se, "target": target, "beta": beta}


VERIFIERS = {
    "covariance": _verify_covariance,
    "wishart": _verify_wishart,
    "groundstate": _verify_groundstate,
    "smallbeta": _verify_smallbeta,
}


def cmd_verify(args) -> int:
    if args.check in ("covariance", "groundstate", "smallbeta") and not args.model:
        raise InputError(f"model: verify {args.check} needs --model")
    if args.check == "covariance" and args.trials < 100:
        raise InputError("trials: need at least 100 draws")
    ok, lines, data = VERIFIERS[args.check](args)
    if args.json:
        data.update(check=args.check, passed=bool(ok))
        _emit(data, True)
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_STATISTICAL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msglass",
        description="Limiting thermodynamics of pure multi-species spherical p-spin glasses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def model_arg(p, required=True):
        p.add_argument("--model", required=required, help="model JSON file or inline JSON object")

    def json_arg(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("critical", help="critical overlap, beta_c and ground-state energy")
    model_arg(p)
    json_arg(p)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("solve", help="overlap and free energy at one beta")
    model_arg(p)
    p.add_argument("--beta", type=float, required=True)
    json_arg(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="CSV table over a uniform beta grid")
    model_arg(p)
    p.add_argument("--beta-min", type=float, required=True)
    p.add_argument("--beta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bipartite", help="closed forms for p = (1, 1)")
    model_arg(p, required=False)
    p.add_argument("--lambda-s", type=float, default=0.5)
    p.add_argument("--beta", type=float)
    json_arg(p)
    p.set_defaults(func=cmd_bipartite)

    p = sub.add_parser("verify", help="finite-N Monte Carlo checks")
    p.add_argument("check", choices=sorted(VERIFIERS))
    model_arg(p, required=False)
    p.add_argument("--n", type=int, default=None, help="total number of coordinates")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--replicas", type=int, default=10, help="wishart: number of seeds averaged")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--lambda-s", type=float, default=0.5)
    p.add_argument("--beta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    json_arg(p)
    p.set_defaults(func=cmd_verify)
    return parser


_DEFAULT_N = {"covariance": 60, "wishart": 1000, "groundstate": 150, "smallbeta": 200}


def main(argv=None) -> int:
    level = os.environ.get("MSGLASS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "check", None) and args.n is None:
        args.n = _DEFAULT_N[args.check]
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        print("msglass: error: seed: expected an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ModelError, DomainError) as exc:
        print(f"msglass: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, UnsupportedModelError) as exc:
        print(f"msglass: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
