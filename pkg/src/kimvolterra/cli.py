"""Benchmark CLI: boundary curves, prices, and convergence studies as CSV/JSON.

Commands
--------
table3          five-spot put values against a fresh binomial reference
boundary        solved boundary curves sampled on 200 points per dividend yield
price           premium-representation prices at given spots
convergence     interpolation-error orders for the rational basis on exp(t)
lebesgue        sampled Lebesgue constants against the logarithmic bound
workprecision   wall time and error per (method, grid size) cell

Exit codes: 0 all embedded tolerances pass, 1 a tolerance failed,
2 usage/configuration error, 3 solver failure.  Output is CSV (comma,
header row, LF, UTF-8) or JSON with ``spec``, ``rows`` and ``passed``
fields.  All outputs are deterministic except the measured wall-time
column of ``workprecision``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .barycentric import basis_matrix, fh_basis, lebesgue_constant
from .boundary import (
    BFH,
    FH,
    SolverConfig,
    SolverError,
    clear_weight_cache,
    eval_boundary,
    initial_boundary,
    solve_boundary,
    solve_boundary_hybrid,
)
from .market import ConfigurationError, MarketParams, binomial_american_put
from .pricing import american_put_price

__all__ = ["main", "build_parser"]

TABLE3_SPOTS = (80.0, 90.0, 100.0, 110.0, 120.0)
TABLE3_PARAMS = MarketParams(strike=100.0, expiry=3.0, rate=0.08,
                             dividend=0.08, volatility=0.2)
TABLE3_TOLERANCE = 1e-3
FIGURE1_DIVIDENDS = (0.0, 0.04, 0.08, 0.12)
BINOMIAL_STEPS = 10_000

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _fmt_price(v: float) -> str:
    return f"{v:.4f}"


def _fmt_err(v: float) -> str:
    return f"{v:.1e}"


def _parse_spots(text: str) -> list[float]:
    try:
        spots = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad spot list {text!r}") from exc
    if not spots or any(s <= 0.0 for s in spots):
        raise argparse.ArgumentTypeError(f"spots must be positive, got {text!r}")
    return spots


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    if not values or values != sorted(values):
        raise argparse.ArgumentTypeError("grid sizes must be an ascending list")
    return values


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--strike", type=float, default=100.0)
    shared.add_argument("--expiry", type=float, default=3.0)
    shared.add_argument("--rate", type=float, default=0.08)
    shared.add_argument("--dividend", type=float, default=None,
                        help="continuous dividend yield (boundary sweeps "
                             "four yields when omitted; other commands default to 0.08)")
    shared.add_argument("--vol", type=float, default=0.2)
    shared.add_argument("--n", type=int, default=None, help="grid subintervals")
    shared.add_argument("--d", type=int, default=None, help="rational blending order")
    shared.add_argument("--family", choices=(FH, BFH), default=FH)
    shared.add_argument("--m", type=int, default=None,
                        help="hybrid fill count (m - 2 interior points per interval)")
    shared.add_argument("--spots", type=_parse_spots, default=None,
                        help="comma-separated spot prices")
    shared.add_argument("--out", default=None, help="output path (stdout if omitted)")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(
        prog="kimvolterra",
        description="Early exercise boundaries and American option prices "
                    "by product integration on a barycentric rational basis.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("table3", parents=[shared],
                   help="five-spot benchmark against a binomial reference")
    sub.add_parser("boundary", parents=[shared], help="solved boundary curves")
    sub.add_parser("price", parents=[shared], help="price given spots")
    sub.add_parser("convergence", parents=[shared],
                   help="interpolation convergence orders on exp(t)")
    sub.add_parser("lebesgue", parents=[shared],
                   help="Lebesgue constants against the logarithmic bound")
    wp = sub.add_parser("workprecision", parents=[shared],
                        help="wall time and error per (method, n) cell")
    wp.add_argument("--n-list", type=_parse_int_list, default=[8, 16, 32, 64],
                    help="ascending comma-separated grid sizes")
    return parser


def _market_from_args(args, default_dividend: float = 0.08) -> MarketParams:
    dividend = args.dividend if args.dividend is not None else default_dividend
    return MarketParams(strike=args.strike, expiry=args.expiry, rate=args.rate,
                        dividend=dividend, volatility=args.vol)


def _config_from_args(args, default_n: int, default_d: int) -> SolverConfig:
    return SolverConfig(n=args.n if args.n is not None else default_n,
                        d=args.d if args.d is not None else default_d,
                        family=args.family,
                        hybrid_m=args.m)


def _solve(cfg: SolverConfig, params: MarketParams):
    if cfg.hybrid_m is not None:
        return solve_boundary_hybrid(cfg, params)
    return solve_boundary(cfg, params)


def cmd_table3(args) -> tuple[list[str], list[list[str]], bool, dict]:
    """Fixed five-spot benchmark: binomial reference vs the n=32, d=2 scheme."""
    params = TABLE3_PARAMS
    cfg = SolverConfig(n=32, d=2, family=args.family)
    curve = _solve(cfg, params)
    header = ["S", "bin", "price", "abs_error"]
    rows = []
    passed = True
    for spot in TABLE3_SPOTS:
        reference = binomial_american_put(BINOMIAL_STEPS, spot, params)
        result = american_put_price(params.expiry, spot, curve)
        err = abs(result.value - reference)
        passed = passed and err <= TABLE3_TOLERANCE
        rows.append([f"{spot:.0f}", _fmt_price(reference),
                     _fmt_price(result.value), _fmt_err(err)])
    spec = {"command": "table3", "family": args.family, "n": 32, "d": 2,
            "spots": list(TABLE3_SPOTS), "binomial_steps": BINOMIAL_STEPS,
            "tolerance": TABLE3_TOLERANCE}
    return header, rows, passed, spec


def cmd_boundary(args) -> tuple[list[str], list[list[str]], bool, dict]:
    """Boundary curves on 200 evaluation points per dividend yield."""
    dividends = (args.dividend,) if args.dividend is not None else FIGURE1_DIVIDENDS
    header = ["dividend", "t", "boundary"]
    rows = []
    passed = True
    for dividend in dividends:
        params = MarketParams(strike=args.strike, expiry=args.expiry,
                              rate=args.rate, dividend=dividend,
                              volatility=args.vol)
        cfg = _config_from_args(args, default_n=64, default_d=3)
        curve = _solve(cfg, params)
        limit = initial_boundary(params)
        node_monotone = bool(np.all(np.diff(curve.values)
                                    <= 1e-9 * params.strike))
        passed = passed and node_monotone \
            and abs(curve.values[0] - limit) <= 1e-2
        ts = np.linspace(0.0, params.expiry, 200)
        values = eval_boundary(curve, ts)
        for t, b in zip(ts, values):
            rows.append([f"{dividend:.4f}", f"{t:.6f}", f"{b:.6f}"])
    spec = {"command": "boundary", "dividends": [float(d) for d in dividends],
            "strike": args.strike, "expiry": args.expiry, "rate": args.rate,
            "vol": args.vol, "family": args.family,
            "n": args.n if args.n is not None else 64,
            "d": args.d if args.d is not None else 3, "m": args.m,
            "eval_points": 200}
    return header, rows, passed, spec


def cmd_price(args) -> tuple[list[str], list[list[str]], bool, dict]:
    """Premium-representation prices at the requested spots."""
    params = _market_from_args(args)
    cfg = _config_from_args(args, default_n=32, default_d=2)
    spots = args.spots if args.spots is not None else [100.0]
    curve = _solve(cfg, params)
    header = ["S", "value", "european", "premium", "bound_factor"]
    rows = []
    for spot in spots:
        result = american_put_price(params.expiry, spot, curve)
        rows.append([_fmt_price(spot), _fmt_price(result.value),
                     _fmt_price(result.european_part),
                     _fmt_price(result.premium_part),
                     f"{result.bound_factor:.6f}"])
    spec = {"command": "price", "strike": params.strike, "expiry": params.expiry,
            "rate": params.rate, "dividend": params.dividend, "vol": params.volatility,
            "family": cfg.family, "n": cfg.n, "d": cfg.d, "m": args.m,
            "spots": [float(s) for s in spots]}
    return header, rows, True, spec


def cmd_convergence(args) -> tuple[list[str], list[list[str]], bool, dict]:
    """Max-norm interpolation errors and observed orders for f = exp(t)."""
    sizes = (32, 64, 128, 256)
    samples = np.linspace(0.0, 1.0, 4001)[1:-1]
    header = ["d", "n", "error", "order"]
    rows = []
    passed = True
    for d in (1, 2, 3):
        errors = {}
        for n in sizes:
            basis = fh_basis(np.linspace(0.0, 1.0, n + 1), d)
            approx = basis_matrix(basis, samples) @ np.exp(basis.nodes)
            errors[n] = float(np.max(np.abs(approx - np.exp(samples))))
        for prev, n in zip((None,) + sizes[:-1], sizes):
            order = "" if prev is None else f"{math.log2(errors[prev] / errors[n]):.3f}"
            rows.append([str(d), str(n), _fmt_err(errors[n]), order])
        overall = math.log(errors[32] / errors[256]) / math.log(256 / 32)
        passed = passed and overall >= d + 0.5
    spec = {"command": "convergence", "sizes": list(sizes),
            "orders_required": {str(d): d + 0.5 for d in (1, 2, 3)}}
    return header, rows, passed, spec


def cmd_lebesgue(args) -> tuple[list[str], list[list[str]], bool, dict]:
    """Sampled Lebesgue constants against 2^(d-1) (2 + ln n)."""
    header = ["d", "n", "lebesgue", "bound", "within_bound"]
    rows = []
    passed = True
    for d in (1, 2, 3):
        for n in (8, 16, 32, 64, 128, 256):
            basis = fh_basis(np.linspace(0.0, 1.0, n + 1), d)
            lam = lebesgue_constant(basis, oversample=30)
            bound = 2.0 ** (d - 1) * (2.0 + math.log(n))
            ok = lam <= bound
            passed = passed and ok
            rows.append([str(d), str(n), f"{lam:.6f}", f"{bound:.6f}",
                         "true" if ok else "false"])
    spec = {"command": "lebesgue", "oversample": 30}
    return header, rows, passed, spec


def cmd_workprecision(args) -> tuple[list[str], list[list[str]], bool, dict]:
    """Wall time and absolute error per (method, n); spot fixed at 120."""
    params = _market_from_args(args)
    d = args.d if args.d is not None else 2
    spot = 120.0
    reference = binomial_american_put(BINOMIAL_STEPS, spot, params)
    header = ["method", "n", "total_nodes", "wall_time", "abs_error", "status"]
    rows = []
    passed = True
    methods: list[tuple[str, str, int | None]] = [("fh", FH, None), ("bfh", BFH, None)]
    if args.m is not None:
        methods += [(f"fh_m{args.m}", FH, args.m), (f"bfh_m{args.m}", BFH, args.m)]
    for n in args.n_list:
        for label, family, m in methods:
            try:
                if m is None:
                    cfg = SolverConfig(n=n, d=d, family=family)
                    clear_weight_cache()
                    curve = solve_boundary(cfg, params)
                else:
                    # coarse node count giving roughly the same stored total
                    coarse = max(d + 2, round((n + m - 1) / (m - 1)))
                    cfg = SolverConfig(n=coarse, d=d, family=family, hybrid_m=m)
                    clear_weight_cache()
                    curve = solve_boundary_hybrid(cfg, params)
                result = american_put_price(params.expiry, spot, curve)
                wall = curve.diagnostics.wall_time + result.wall_time
                err = abs(result.value - reference)
                rows.append([label, str(n), str(curve.grid.size),
                             f"{wall:.6f}", _fmt_err(err), "ok"])
            except (SolverError, ValueError) as exc:
                rows.append([label, str(n), "", "", "", f"failed: {exc}"])
                passed = False
    spec = {"command": "workprecision", "n_list": list(args.n_list), "d": d,
            "m": args.m, "spot": spot, "strike": params.strike,
            "expiry": params.expiry, "rate": params.rate,
            "dividend": params.dividend, "vol": params.volatility,
            "binomial_steps": BINOMIAL_STEPS}
    return header, rows, passed, spec


_COMMANDS = {
    "table3": cmd_table3,
    "boundary": cmd_boundary,
    "price": cmd_price,
    "convergence": cmd_convergence,
    "lebesgue": cmd_lebesgue,
    "workprecision": cmd_workprecision,
}


def _emit(args, header: list[str], rows: list[list[str]], passed: bool,
          spec: dict) -> None:
    if args.format == "csv":
        lines = [",".join(header)]
        lines += [",".join(row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = {"spec": spec,
                   "rows": [dict(zip(header, row)) for row in rows],
                   "passed": passed}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        header, rows, passed, spec = _COMMANDS[args.command](args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(args, header, rows, passed, spec)
    return EXIT_OK if passed else EXIT_TOLERANCE
