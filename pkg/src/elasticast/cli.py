"""Command-line interface.

Every run produces a manifest (resolved parameters, seed, version, timestamp)
written to ``--manifest PATH`` or, if omitted, as one JSON line on stderr.
``elasticast replay PATH`` re-executes a manifest and reproduces stdout
bit for bit.

Exit codes: 0 success, 1 validation or verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import sys
from typing import Callable

import numpy as np

from . import __version__, _backend
from .core import (BundleSystem, ElasticityError, ElasticityInputs, cross_price_elasticity,
                   full_matrix, own_price_elasticity)
from .dataio import coverage, dump_document, emit_curve, parse_records
from .montecarlo import (DEFAULT_DRAWS, DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_MIN,
                         DEFAULT_RHO_MEAN, DEFAULT_RHO_SD, DEFAULT_SEED, CredibleBand,
                         ParamDistributions, SimulationConfig, parse_grid, sensitivity_sweep,
                         simulate_cross_band, simulate_own_band)
from .oracle import AdditiveUtility, MarketPoint, UtilityTerm, verify_theorem

DEFAULT_GRID = "0:2:0.05"
DEFAULT_OMEGA_GRID = "0.0001:0.1:0.0001"
# not part of the reproducible parameter set
_RUNTIME_KEYS = {"manifest", "workers", "handler"}


class UsageError(Exception):
    pass


def _point(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _dist(args) -> ParamDistributions:
    return ParamDistributions(args.rho_mean, args.rho_sd, args.omega_min, args.omega_max)


def _config(args) -> SimulationConfig:
    return SimulationConfig(draws=args.draws, seed=args.seed, lower_pct=args.lower_pct,
                            upper_pct=args.upper_pct, workers=args.workers)


def _band_output(band: CredibleBand, fmt: str) -> str:
    if fmt == "json":
        return dump_document("credible_band", {
            "epsilon": band.grid.tolist(), "lower": band.lower.tolist(),
            "median": band.median.tolist(), "upper": band.upper.tolist()})
    return emit_curve(band)


def cmd_own(args):
    eta = own_price_elasticity(ElasticityInputs(args.rho, args.omega, args.epsilon))
    if args.format == "json":
        return dump_document("own_price_elasticity", {"eta": eta}), 0
    return _point(eta) + "\n", 0


def cmd_cross(args):
    psi = cross_price_elasticity(args.epsilon_a, args.epsilon_b, args.omega_b, args.rho)
    if args.format == "json":
        return dump_document("cross_price_elasticity", {"psi": psi + 0.0}), 0
    return _point(psi) + "\n", 0


def cmd_matrix(args):
    shares = _floats(args.shares, "shares")
    eps = _floats(args.epsilons, "epsilons")
    labels = tuple(x.strip() for x in args.labels.split(",")) if args.labels else ()
    system = BundleSystem(np.array(shares), np.array(eps), args.rho, labels)
    m = full_matrix(system)
    rows = m.row_residuals(system.epsilons)
    cols = m.column_residuals(system.shares)
    if args.format == "csv":
        lines = [",".join(("bundle",) + m.labels)]
        for label, row in zip(m.labels, m.values):
            lines.append(",".join([label] + [format(v, ".17g") for v in row]))
        lines.append("# homogeneity residuals: " + ",".join(format(v, ".3e") for v in rows))
        lines.append("# cournot residuals: " + ",".join(format(v, ".3e") for v in cols))
        return "\n".join(lines) + "\n", 0
    return dump_document("elasticity_matrix", {
        "labels": list(m.labels), "rho": system.rho, "shares": system.shares.tolist(),
        "epsilons": system.epsilons.tolist(), "matrix": m.values.tolist(),
        "homogeneity_residuals": rows.tolist(), "cournot_residuals": cols.tolist()}), 0


def cmd_simulate_own(args):
    band = simulate_own_band(parse_grid(args.grid), _dist(args), _config(args))
    return _band_output(band, args.format), 0


def cmd_simulate_cross(args):
    band = simulate_cross_band(parse_grid(args.grid), args.epsilon_b, _dist(args), _config(args))
    return _band_output(band, args.format), 0


def cmd_sensitivity(args):
    omegas = parse_grid(args.omega_grid)
    etas, change = sensitivity_sweep(args.epsilon, args.rho, omegas)
    if args.format == "json":
        return dump_document("sensitivity", {
            "epsilon": args.epsilon, "rho": args.rho, "omega": omegas.tolist(),
            "eta": etas.tolist(), "max_relative_change": change}), 0
    lines = ["omega,eta"] + [f"{format(w, '.17g')},{format(e + 0.0, '.17g')}"
                             for w, e in zip(omegas, etas)]
    lines.append(f"# max_relative_change: {_point(change)}")
    return "\n".join(lines) + "\n", 0


def cmd_validate(args):
    records = parse_records(args.data_text)
    report = coverage(records, _dist(args), _config(args))
    frac = report.coverage_fraction
    code = 0 if frac >= args.threshold else 1
    if args.format == "csv":
        lines = ["group,bundle,epsilon,eta,lower,median,upper,inside_band"]
        for e in report.entries:
            r = e.record
            lines.append(",".join([r.group, r.bundle] + [format(v + 0.0, ".17g") for v in
                                  (r.epsilon, r.eta_observed, e.lower, e.median, e.upper)]
                                  + [str(e.inside).lower()]))
        lines.append(f"# coverage_fraction: {_point(frac)}")
        return "\n".join(lines) + "\n", code
    payload = report.to_dict()
    payload["threshold"] = args.threshold
    payload["passed"] = code == 0
    return dump_document("coverage_report", payload), code


def _parse_terms(kind: str, text: str) -> AdditiveUtility:
    terms = []
    try:
        for item in (x.strip() for x in text.split(",") if x.strip()):
            parts = item.split(":")
            if kind == "mixed":
                tkind, parts = parts[0], parts[1:]
            else:
                tkind = kind
            if tkind == "log" and len(parts) == 1:
                terms.append(UtilityTerm("log", float(parts[0])))
            elif tkind == "power" and len(parts) == 2:
                terms.append(UtilityTerm("power", float(parts[0]), float(parts[1])))
            else:
                raise UsageError(f"--params: cannot read term {item!r} for utility {kind!r}")
    except ValueError as exc:
        if isinstance(exc, ElasticityError):
            raise
        raise UsageError(f"--params: malformed number in {text!r}") from None
    return AdditiveUtility(tuple(terms))


def cmd_oracle(args):
    utility = _parse_terms(args.utility, args.params)
    point = MarketPoint(tuple(_floats(args.prices, "prices")), args.expenditure)
    ok, report = verify_theorem(utility, point, args.tolerance, args.step)
    payload = report.to_dict()
    payload.update(tolerance=args.tolerance, step=args.step, verified=ok)
    return dump_document("oracle_report", payload), 0 if ok else 1


def _fmt_flag(p, default):
    p.add_argument("--format", choices=("csv", "json"), default=default,
                   help="output format")


def _dist_flags(p):
    p.add_argument("--rho-mean", type=float, default=DEFAULT_RHO_MEAN,
                   help="mean of the normal law for rho")
    p.add_argument("--rho-sd", type=float, default=DEFAULT_RHO_SD,
                   help="standard deviation of the normal law for rho")
    p.add_argument("--omega-min", type=float, default=DEFAULT_OMEGA_MIN,
                   help="lower end of the uniform law for the budget share")
    p.add_argument("--omega-max", type=float, default=DEFAULT_OMEGA_MAX,
                   help="upper end of the uniform law for the budget share")
    p.add_argument("--draws", type=int, default=DEFAULT_DRAWS, help="Monte-Carlo draws")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit stream seed")
    p.add_argument("--lower-pct", type=float, default=2.5, help="lower band percentile")
    p.add_argument("--upper-pct", type=float, default=97.5, help="upper band percentile")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", metavar="PATH",
                        help="write the run manifest here instead of stderr")
    common.add_argument("--workers", type=int, default=1,
                        help="threads for Monte-Carlo draws (results do not depend on it)")

    parser = argparse.ArgumentParser(
        prog="elasticast",
        description="Price elasticities from income elasticities under additive preferences.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def add(name, handler: Callable, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_,
                           formatter_class=fmt)
        p.set_defaults(handler=handler)
        return p

    p = add("own", cmd_own, "own-price elasticity of one bundle")
    p.add_argument("--epsilon", type=float, required=True, help="income elasticity")
    p.add_argument("--omega", type=float, required=True, help="budget share, in (0, 1]")
    p.add_argument("--rho", type=float, default=DEFAULT_RHO_MEAN,
                   help="elasticity of the marginal utility of income (< 0)")
    _fmt_flag(p, "csv")

    p = add("cross", cmd_cross, "cross-price elasticity of A with respect to the price of B")
    p.add_argument("--epsilon-a", type=float, required=True, help="income elasticity of A")
    p.add_argument("--epsilon-b", type=float, required=True, help="income elasticity of B")
    p.add_argument("--omega-b", type=float, required=True, help="budget share of B")
    p.add_argument("--rho", type=float, default=DEFAULT_RHO_MEAN,
                   help="elasticity of the marginal utility of income (< 0)")
    _fmt_flag(p, "csv")

    p = add("matrix", cmd_matrix, "full own/cross elasticity matrix for a budget partition")
    p.add_argument("--shares", required=True, help="comma-separated budget shares")
    p.add_argument("--epsilons", required=True, help="comma-separated income elasticities")
    p.add_argument("--rho", type=float, default=DEFAULT_RHO_MEAN,
                   help="elasticity of the marginal utility of income (< 0)")
    p.add_argument("--labels", default="", help="comma-separated bundle labels")
    _fmt_flag(p, "json")

    p = add("simulate-own", cmd_simulate_own, "credible band of the own-price elasticity")
    p.add_argument("--grid", default=DEFAULT_GRID, help="income elasticity grid start:stop:step")
    _dist_flags(p)
    _fmt_flag(p, "csv")

    p = add("simulate-cross", cmd_simulate_cross,
            "credible band of the cross-price elasticity over the income elasticity of A")
    p.add_argument("--epsilon-b", type=float, required=True, help="income elasticity of B")
    p.add_argument("--grid", default=DEFAULT_GRID, help="grid for A, start:stop:step")
    _dist_flags(p)
    _fmt_flag(p, "csv")

    p = add("sensitivity", cmd_sensitivity, "own-price elasticity across budget shares")
    p.add_argument("--epsilon", type=float, required=True, help="income elasticity")
    p.add_argument("--rho", type=float, default=DEFAULT_RHO_MEAN,
                   help="elasticity of the marginal utility of income (< 0)")
    p.add_argument("--omega-grid", default=DEFAULT_OMEGA_GRID, help="start:stop:step")
    _fmt_flag(p, "csv")

    p = add("validate", cmd_validate, "coverage of observed elasticities by the simulated band")
    p.add_argument("--data", required=True, help="record CSV file, or - for stdin")
    p.add_argument("--threshold", type=float, default=0.9,
                   help="minimum coverage fraction for exit code 0")
    _dist_flags(p)
    _fmt_flag(p, "json")

    p = add("oracle", cmd_oracle, "check the closed forms against numerical utility maximization")
    p.add_argument("--utility", choices=("log", "power", "mixed"), required=True,
                   help="utility family")
    p.add_argument("--params", required=True,
                   help="terms: log 'a1,a2'; power 'a1:b1,a2:b2'; mixed 'log:a,power:a:b'")
    p.add_argument("--prices", required=True, help="comma-separated prices")
    p.add_argument("--expenditure", type=float, required=True, help="total expenditure")
    p.add_argument("--step", type=float, default=1e-5, help="log finite-difference step")
    p.add_argument("--tolerance", type=float, default=1e-3, help="verification tolerance")

    p = sub.add_parser("replay", help="re-run a saved manifest", description="re-run a saved manifest")
    p.add_argument("path", help="manifest JSON file")
    p.add_argument("--workers", type=int, default=None, help="override the worker count")
    p.set_defaults(handler=None)
    return parser


HANDLERS = {
    "own": cmd_own, "cross": cmd_cross, "matrix": cmd_matrix,
    "simulate-own": cmd_simulate_own, "simulate-cross": cmd_simulate_cross,
    "sensitivity": cmd_sensitivity, "validate": cmd_validate, "oracle": cmd_oracle,
}


def _resolve_inputs(args) -> None:
    if args.subcommand == "validate" and not hasattr(args, "data_text"):
        try:
            if args.data == "-":
                text = sys.stdin.read()
            else:
                with open(args.data, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as exc:
            raise UsageError(f"--data: {exc}") from None
        args.data_text = text
        args.data_sha256 = hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_manifest(args) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in _RUNTIME_KEYS and k != "subcommand"}
    return {
        "subcommand": args.subcommand,
        "params": params,
        "seed": params.get("seed"),
        "version": __version__,
        "backend": _backend.name(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def _load_manifest(path: str, workers: int | None) -> argparse.Namespace:
    try:
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        sub = manifest["subcommand"]
        params = dict(manifest["params"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read manifest {path}: {exc}") from None
    if sub not in HANDLERS:
        raise UsageError(f"manifest names unknown subcommand {sub!r}")
    return argparse.Namespace(subcommand=sub, handler=HANDLERS[sub], manifest=None,
                              workers=workers or 1, **params)


def execute(args) -> tuple[str, int, dict]:
    """Run a parsed command; returns (stdout text, exit code, manifest)."""
    _resolve_inputs(args)
    manifest = make_manifest(args)
    text, code = args.handler(args)
    return text, code, manifest


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "replay":
            args = _load_manifest(args.path, args.workers)
        text, code, manifest = execute(args)
    except (ElasticityError, UsageError) as exc:
        print(f"elasticast {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    sys.stdout.flush()
    dumped = json.dumps(manifest, sort_keys=True)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(dumped + "\n")
    else:
        print(f"# manifest {dumped}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
