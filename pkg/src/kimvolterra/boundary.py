"""Early-exercise boundary of an American put by sequential Newton time-stepping.

The boundary solves a weakly singular Volterra integral equation in the
time-to-expiry variable t (t = 0 is expiry).  Collocating on the
equidistant grid t_i = i T / n and interpolating the smooth kernel factor
with a barycentric rational basis turns the equation into a
lower-triangular nonlinear system: row i involves only B_0..B_i, so each
B_i is found by a safeguarded scalar Newton iteration given its
predecessors.  The i = 0 row is singular and B_0 is assigned its known
expiry limit instead.

Two equation forms are discretized: a single exponential-kernel form used
when the dividend yield is zero, and the general form whose singular part
carries both exponential kernels and whose smooth part (a normal-CDF
kernel) is handled by direct interpolatory quadrature.  A trapezoid
discretization of the underlying two-dimensional value-matching equation
is included as an independent cross-check, and a hybrid mode solves Newton
steps on a coarse grid only, filling interior nodes by linear
interpolation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .barycentric import BaryBasis, berrut_basis, eval_interpolant, fh_basis
from .market import MarketParams, d1d2, norm_cdf
from .quadrature import brq_weights, product_weights

__all__ = [
    "FH",
    "BFH",
    "SolverError",
    "SolverConfig",
    "SolveDiagnostics",
    "BoundaryCurve",
    "initial_boundary",
    "perpetual_lower_bound",
    "kernel_nodiv",
    "solve_boundary",
    "solve_boundary_hybrid",
    "solve_boundary_kim2d",
    "eval_boundary",
    "collocation_residuals",
    "clear_weight_cache",
]

FH = "fh"
BFH = "bfh"

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class SolverError(RuntimeError):
    """Newton failed to reach the residual tolerance at some collocation row."""

    def __init__(self, message: str, step: int | None = None,
                 residual: float | None = None) -> None:
        super().__init__(message)
        self.step = step
        self.residual = residual


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and iteration controls for a boundary solve.

    ``n`` counts grid subintervals for the plain schemes (nodes t_i = i T / n,
    i = 0..n).  In hybrid mode ``n`` counts the coarse Newton nodes
    including both endpoints, so the stored node total is
    N = n + (n - 1)(hybrid_m - 2); ``hybrid_m = 2`` adds no interior points.

    ``family`` selects the kernel-interpolation basis: "fh" uses the
    Floater-Hormann weights of order ``d`` throughout, "bfh" uses Berrut
    weights inside the singular product weights while keeping
    Floater-Hormann weights for the smooth-term quadrature and the final
    curve (``bfh_swap`` reverses that composition).
    """

    n: int
    d: int
    family: str = FH
    hybrid_m: int | None = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    fd_rel_step: float = 1e-6
    weight_points: int = 64
    weight_panels: int | None = None
    quad_points: int = 32
    bfh_swap: bool = False

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError(f"d must be >= 0, got {self.d}")
        if self.n < self.d + 1:
            raise ValueError(f"need n >= d + 1, got n={self.n}, d={self.d}")
        if self.family not in (FH, BFH):
            raise ValueError(f"family must be '{FH}' or '{BFH}', got {self.family!r}")
        if self.hybrid_m is not None and self.hybrid_m < 2:
            raise ValueError(f"hybrid_m must be >= 2, got {self.hybrid_m}")
        if self.newton_tol <= 0.0 or self.fd_rel_step <= 0.0:
            raise ValueError("newton_tol and fd_rel_step must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be >= 1")


@dataclass(frozen=True)
class SolveDiagnostics:
    """Per-row Newton iteration counts and final residuals, plus wall time."""

    iterations: np.ndarray
    residuals: np.ndarray
    warnings: tuple[str, ...]
    wall_time: float


@dataclass(frozen=True)
class BoundaryCurve:
    """Solved boundary values on a grid, evaluable anywhere on [0, T].

    ``method`` records which discretization produced the values:
    "product" for the product-integration schemes, "trapezoid" for the
    two-dimensional cross-check solver.
    """

    grid: np.ndarray
    values: np.ndarray
    basis: BaryBasis
    params: MarketParams
    config: SolverConfig
    diagnostics: SolveDiagnostics
    method: str = "product"

    @property
    def horizon(self) -> float:
        """Time horizon T of the solve."""
        return float(self.grid[-1])


def initial_boundary(p: MarketParams) -> float:
    """Boundary limit at expiry: K when delta <= r, else (r/delta) K."""
    if p.dividend <= p.rate:
        return p.strike
    return (p.rate / p.dividend) * p.strike


def perpetual_lower_bound(p: MarketParams) -> float:
    """Time-independent lower bound theta K / (theta - 1) from the perpetual put.

    theta is the negative root of the quadratic exponent equation; r = 0
    degenerates to a zero bound.
    """
    if p.rate == 0.0:
        return 0.0
    theta = _perpetual_exponent(p)
    return theta * p.strike / (theta - 1.0)


def _perpetual_exponent(p: MarketParams) -> float:
    mu = p.rate - p.dividend - 0.5 * p.volatility**2
    return (-mu - math.sqrt(mu * mu + 2.0 * p.volatility**2 * p.rate)) / p.volatility**2


def kernel_nodiv(i: int, j: int, b_i: float, b_j: float, grid: np.ndarray,
                 p: MarketParams) -> float:
    """Smooth kernel factor of the zero-dividend equation at nodes (i, j).

    Returns exp(-(r (t_i - t_j) + d2(b_i, t_i - t_j, b_j)^2 / 2)) * r K / (sigma sqrt(2 pi));
    the coincident case j = i is the analytic limit r K / (sigma sqrt(2 pi)).
    """
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got i={i}, j={j}")
    if b_i <= 0.0 or b_j <= 0.0:
        raise ValueError("boundary values must be positive")
    prefactor = p.rate * p.strike / (p.volatility * _SQRT_2PI)
    if j == i:
        return prefactor
    d = d1d2(b_i, float(grid[i] - grid[j]), b_j, p)
    return prefactor * math.exp(-(p.rate * (grid[i] - grid[j]) + 0.5 * d.d2 * d.d2))


def _d12_arrays(x: float, tau: np.ndarray, y: np.ndarray,
                p: MarketParams) -> tuple[np.ndarray, np.ndarray]:
    sig_sqrt = p.volatility * np.sqrt(tau)
    d1 = (np.log(x / y) + (p.rate - p.dividend + 0.5 * p.volatility**2) * tau) / sig_sqrt
    return d1, d1 - sig_sqrt


def _product_row_basis(sub: np.ndarray, i: int, cfg: SolverConfig) -> BaryBasis:
    if cfg.family == FH or (cfg.family == BFH and cfg.bfh_swap):
        return fh_basis(sub, min(cfg.d, i))
    return berrut_basis(sub)


def _quad_row_basis(sub: np.ndarray, i: int, cfg: SolverConfig) -> BaryBasis:
    if cfg.family == FH or (cfg.family == BFH and not cfg.bfh_swap):
        return fh_basis(sub, min(cfg.d, i))
    return berrut_basis(sub)


@lru_cache(maxsize=32)
def _weight_tables(n: int, horizon: float, d: int, family: str, bfh_swap: bool,
                   points: int, panels: int | None, quad_points: int,
                   with_quad: bool):
    """Per-row singular product weights (and smooth quadrature weights).

    Rows w_{i, .} are an O(n^2) table, each entry a fixed-order quadrature;
    the table is computed once per (n, d, family, T) and reused across
    solves.  Tables are written once here and treated as read-only.
    """
    cfg = SolverConfig(n=n, d=d, family=family, bfh_swap=bfh_swap,
                       weight_points=points, weight_panels=panels,
                       quad_points=quad_points)
    grid = np.linspace(0.0, horizon, n + 1)
    product_rows: list[np.ndarray | None] = [None]
    quad_rows: list[np.ndarray | None] = [None]
    for i in range(1, n + 1):
        sub = grid[: i + 1]
        basis = _product_row_basis(sub, i, cfg)
        product_rows.append(product_weights(i, basis, points=points,
                                            panels=panels).weights)
        if with_quad:
            qbasis = _quad_row_basis(sub, i, cfg)
            quad_rows.append(brq_weights(qbasis, (sub[0], sub[-1]),
                                         points_per_panel=quad_points).weights)
    return grid, tuple(product_rows), tuple(quad_rows) if with_quad else None


def clear_weight_cache() -> None:
    """Drop cached product/quadrature weight tables (used by timing studies)."""
    _weight_tables.cache_clear()


def _residual_nodiv(b: float, i: int, grid: np.ndarray, prior: np.ndarray,
                    w: np.ndarray, p: MarketParams) -> float:
    """Row residual for the zero-dividend boundary equation."""
    t_i = grid[i]
    pref = 1.0 / (p.volatility * _SQRT_2PI)
    d = d1d2(b, t_i, p.strike, p)
    lhs = b * norm_cdf(d.d1) + b * math.exp(-0.5 * d.d1 * d.d1) * pref / math.sqrt(t_i)
    rhs = p.strike * math.exp(-(p.rate * t_i + 0.5 * d.d2 * d.d2)) * pref / math.sqrt(t_i)
    tau = t_i - grid[:i]
    d1j, d2j = _d12_arrays(b, tau, prior, p)
    kern = p.rate * p.strike * pref * np.exp(-(p.rate * tau + 0.5 * d2j * d2j))
    rhs += w[:i] @ kern + w[i] * (p.rate * p.strike * pref)
    return lhs - rhs


def _residual_div(b: float, i: int, grid: np.ndarray, prior: np.ndarray,
                  w: np.ndarray, om: np.ndarray, p: MarketParams) -> float:
    """Row residual for the dividend-paying boundary equation."""
    t_i = grid[i]
    r, delta, k = p.rate, p.dividend, p.strike
    pref = 1.0 / (p.volatility * _SQRT_2PI)
    d = d1d2(b, t_i, k, p)
    f = -b * math.exp(-delta * t_i) * norm_cdf(d.d1)
    f += k * math.exp(-(r * t_i + 0.5 * d.d2 * d.d2)) * pref / math.sqrt(t_i)
    f -= b * math.exp(-(delta * t_i + 0.5 * d.d1 * d.d1)) * pref / math.sqrt(t_i)
    tau = t_i - grid[:i]
    d1j, d2j = _d12_arrays(b, tau, prior, p)
    kern = pref * (r * k * np.exp(-(r * tau + 0.5 * d2j * d2j))
                   - delta * b * np.exp(-(delta * tau + 0.5 * d1j * d1j)))
    f += w[:i] @ kern + w[i] * pref * (r * k - delta * b)
    smooth = np.exp(-delta * tau) * ndtr(d1j)
    # coincident node: d1 -> 0 as the time gap vanishes with equal arguments
    f -= delta * b * (om[:i] @ smooth + om[i] * 0.5)
    return f


def _residual_kim2d(b: float, i: int, grid: np.ndarray, prior: np.ndarray,
                    h: float, p: MarketParams) -> float:
    """Row residual of the trapezoid-discretized value-matching equation."""
    r, delta, k = p.rate, p.dividend, p.strike
    t_i = grid[i]
    tau = t_i - grid[:i]
    d1j, d2j = _d12_arrays(b, tau, prior, p)
    f = r * k * np.exp(-r * tau) * ndtr(-d2j) \
        - delta * b * np.exp(-delta * tau) * ndtr(-d1j)
    # s = t_i endpoint: equal arguments push both CDF factors to 1/2
    end = 0.5 * (r * k - delta * b)
    premium = h * (0.5 * f[0] + f[1:].sum() + 0.5 * end)
    d = d1d2(b, t_i, k, p)
    euro = (k * math.exp(-r * t_i) * norm_cdf(-d.d2)
            - b * math.exp(-delta * t_i) * norm_cdf(-d.d1))
    return (k - b) - euro - premium


def _bisect(f, lo: float, hi: float, tol_abs: float, step: int) -> tuple[float, int, float]:
    f_lo, f_hi = f(lo), f(hi)
    if abs(f_lo) <= tol_abs:
        return lo, 1, abs(f_lo)
    if abs(f_hi) <= tol_abs:
        return hi, 1, abs(f_hi)
    if f_lo * f_hi > 0.0:
        raise SolverError(
            f"no sign change on [{lo:.6g}, {hi:.6g}] at collocation row {step}",
            step=step, residual=min(abs(f_lo), abs(f_hi)))
    for it in range(1, 201):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= tol_abs or hi - lo <= 1e-16 * max(1.0, hi):
            if abs(f_mid) > tol_abs:
                raise SolverError(
                    f"bisection stalled at row {step} with residual {abs(f_mid):.3e}",
                    step=step, residual=abs(f_mid))
            return mid, it, abs(f_mid)
        if f_lo * f_mid <= 0.0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    raise SolverError(f"bisection did not converge at row {step}", step=step)


def _newton_scalar(f, x0: float, lo: float, hi: float, cfg: SolverConfig,
                   scale: float, step: int) -> tuple[float, int, float]:
    """Safeguarded scalar Newton: finite-difference slope, bisection fallback."""
    tol_abs = cfg.newton_tol * scale
    margin = 0.5 * (hi - lo)
    b = min(max(x0, lo), hi)
    for it in range(1, cfg.newton_max_iter + 1):
        fb = f(b)
        if abs(fb) <= tol_abs:
            return b, it, abs(fb)
        h = cfg.fd_rel_step * max(1.0, abs(b))
        slope = (f(b + h) - f(b - h)) / (2.0 * h)
        nxt = b - fb / slope if slope != 0.0 else float("nan")
        if not math.isfinite(nxt) or nxt < lo - margin or nxt > hi + margin:
            return _bisect(f, lo, hi, tol_abs, step)
        b = nxt
    return _bisect(f, lo, hi, tol_abs, step)


def solve_boundary(cfg: SolverConfig, p: MarketParams) -> BoundaryCurve:
    """Solve the collocated boundary equations row by row on t_i = i T / n.

    B_0 takes its analytic expiry limit and each later B_i solves its
    scalar collocation equation given B_0..B_{i-1} (the Volterra structure
    is lower triangular), with the initial guess B_{i-1}.  The returned
    curve carries a Floater-Hormann basis of order d for evaluation
    between nodes.  ``hybrid_m`` is ignored here; see
    :func:`solve_boundary_hybrid`.
    """
    if p.rate == 0.0:
        raise ValueError("rate = 0 makes early exercise worthless; "
                         "the boundary equation degenerates")
    start = time.perf_counter()
    grid, w_rows, q_rows = _weight_tables(
        cfg.n, p.expiry, cfg.d, cfg.family, cfg.bfh_swap, cfg.weight_points,
        cfg.weight_panels, cfg.quad_points, with_quad=p.dividend > 0.0)
    b0 = initial_boundary(p)
    lower = perpetual_lower_bound(p)
    values = np.empty(cfg.n + 1)
    values[0] = b0
    iterations = np.zeros(cfg.n + 1, dtype=int)
    residuals = np.zeros(cfg.n + 1)
    warnings: list[str] = []
    for i in range(1, cfg.n + 1):
        prior = values[:i]
        if p.dividend > 0.0:
            def resid(b, i=i, prior=prior):
                return _residual_div(b, i, grid, prior, w_rows[i], q_rows[i], p)
        else:
            def resid(b, i=i, prior=prior):
                return _residual_nodiv(b, i, grid, prior, w_rows[i], p)
        b, its, res = _newton_scalar(resid, values[i - 1], lower, b0, cfg,
                                     p.strike, i)
        values[i] = b
        iterations[i] = its
        residuals[i] = res
        if not 0.9 * lower <= b <= 1.1 * b0:
            warnings.append(
                f"row {i}: boundary {b:.6g} outside [{0.9 * lower:.6g}, {1.1 * b0:.6g}]")
    diag = SolveDiagnostics(iterations=iterations, residuals=residuals,
                            warnings=tuple(warnings),
                            wall_time=time.perf_counter() - start)
    return BoundaryCurve(grid=grid, values=values, basis=fh_basis(grid, cfg.d),
                         params=p, config=cfg, diagnostics=diag)


def solve_boundary_hybrid(cfg: SolverConfig, p: MarketParams) -> BoundaryCurve:
    """Newton solves on a coarse grid, linear interpolation in between.

    ``cfg.n`` counts the coarse grid nodes (both endpoints included), so
    Newton runs on n nodes and the stored fine grid has
    N = n + (n - 1)(m - 2) equidistant nodes for m = ``cfg.hybrid_m``.
    The fine values feed every subsequent quadrature exactly like a plain
    solve of the same size; m = 2 reproduces the coarse solve unchanged.
    """
    if cfg.hybrid_m is None:
        raise ValueError("hybrid_m must be set for a hybrid solve")
    start = time.perf_counter()
    coarse = solve_boundary(replace(cfg, n=cfg.n - 1, hybrid_m=None), p)
    if cfg.hybrid_m == 2:
        return coarse
    total = cfg.n + (cfg.n - 1) * (cfg.hybrid_m - 2)
    fine_grid = np.linspace(0.0, p.expiry, total)
    fine_values = np.interp(fine_grid, coarse.grid, coarse.values)
    diag = SolveDiagnostics(iterations=coarse.diagnostics.iterations,
                            residuals=coarse.diagnostics.residuals,
                            warnings=coarse.diagnostics.warnings,
                            wall_time=time.perf_counter() - start)
    return BoundaryCurve(grid=fine_grid, values=fine_values,
                         basis=fh_basis(fine_grid, cfg.d), params=p, config=cfg,
                         diagnostics=diag)


def solve_boundary_kim2d(n: int, p: MarketParams) -> BoundaryCurve:
    """Trapezoid discretization of the two-dimensional value-matching equation.

    Independent cross-check: K - B(t_i) is matched against the European
    value plus trapezoid sums of the two normal-CDF kernels, Newton per
    row.  Slower-converging than the product-integration schemes; used
    only for agreement tests.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if p.rate == 0.0:
        raise ValueError("rate = 0 makes early exercise worthless; "
                         "the boundary equation degenerates")
    cfg = SolverConfig(n=n, d=min(2, n - 1))
    start = time.perf_counter()
    grid = np.linspace(0.0, p.expiry, n + 1)
    h = p.expiry / n
    b0 = initial_boundary(p)
    lower = perpetual_lower_bound(p)
    values = np.empty(n + 1)
    values[0] = b0
    iterations = np.zeros(n + 1, dtype=int)
    residuals = np.zeros(n + 1)
    for i in range(1, n + 1):
        prior = values[:i]

        def resid(b, i=i, prior=prior):
            return _residual_kim2d(b, i, grid, prior, h, p)

        b, its, res = _newton_scalar(resid, values[i - 1], lower, b0, cfg,
                                     p.strike, i)
        values[i] = b
        iterations[i] = its
        residuals[i] = res
    diag = SolveDiagnostics(iterations=iterations, residuals=residuals,
                            warnings=(), wall_time=time.perf_counter() - start)
    return BoundaryCurve(grid=grid, values=values, basis=fh_basis(grid, cfg.d),
                         params=p, config=cfg, diagnostics=diag,
                         method="trapezoid")


def eval_boundary(curve: BoundaryCurve, t):
    """Evaluate the solved boundary at time-to-expiry t in [0, T].

    Barycentric evaluation with the curve's basis; exact at the nodes.
    ``t`` may be a scalar or an array.
    """
    horizon = curve.grid[-1]
    tol = 1e-12 * horizon
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < -tol) or np.any(t_arr > horizon + tol):
        raise ValueError(f"t must lie in [0, {horizon}], got {t!r}")
    clipped = np.clip(t_arr, 0.0, horizon)
    if t_arr.ndim == 0:
        return eval_interpolant(curve.basis, curve.values, float(clipped))
    return eval_interpolant(curve.basis, curve.values, clipped)


def collocation_residuals(curve: BoundaryCurve) -> np.ndarray:
    """Re-evaluate every collocation equation at the solved values.

    Returns |F_i(B_i)| for i = 1..n (index 0 is the assigned expiry limit);
    this is the residual certificate for an accepted solve.
    """
    p, cfg = curve.params, curve.config
    if cfg.hybrid_m is not None and cfg.hybrid_m > 2:
        raise ValueError("residual certificate applies to plain solves only; "
                         "hybrid interior nodes are interpolated, not collocated")
    n = curve.grid.size - 1
    out = np.empty(n)
    if curve.method == "trapezoid":
        h = curve.horizon / n
        for i in range(1, n + 1):
            out[i - 1] = abs(_residual_kim2d(curve.values[i], i, curve.grid,
                                             curve.values[:i], h, p))
        return out
    grid, w_rows, q_rows = _weight_tables(
        n, p.expiry, cfg.d, cfg.family, cfg.bfh_swap, cfg.weight_points,
        cfg.weight_panels, cfg.quad_points, with_quad=p.dividend > 0.0)
    for i in range(1, n + 1):
        prior = curve.values[:i]
        if p.dividend > 0.0:
            out[i - 1] = abs(_residual_div(curve.values[i], i, grid, prior,
                                           w_rows[i], q_rows[i], p))
        else:
            out[i - 1] = abs(_residual_nodiv(curve.values[i], i, grid, prior,
                                             w_rows[i], p))
    return out
