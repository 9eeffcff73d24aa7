"""American option prices from a solved exercise boundary.

The put value splits into its European part plus the early-exercise
premium, an integral of discounted exercise benefits against the boundary
over [0, t].  The premium integral is evaluated with the interpolatory
quadrature weights of the curve's rational basis; the integrand's
endpoint limit vanishes in the continuation region.  Calls are priced
through put-call symmetry (strike and spot swap roles, as do rate and
dividend yield).

Pricing is pure given an immutable curve; concurrent pricing across
spots and times is safe.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .boundary import BoundaryCurve, SolverConfig, eval_boundary, solve_boundary
from .market import MarketParams, d1d2, european_put, norm_cdf
from .quadrature import brq_weights
from .barycentric import fh_basis

__all__ = [
    "PriceResult",
    "error_bound_factor",
    "american_put_price",
    "american_call_price",
]


@dataclass(frozen=True)
class PriceResult:
    """Option value with its decomposition and runtime diagnostics.

    ``value`` always equals ``european_part + premium_part``;
    ``bound_factor`` is the multiplier that converts a boundary error into
    a price error bound, attached as a diagnostic.
    """

    value: float
    european_part: float
    premium_part: float
    bound_factor: float
    wall_time: float


def error_bound_factor(spot: float, p: MarketParams) -> float:
    """Price-error amplification factor (theta-1)/(sigma theta sqrt(2)) (sqrt(delta) S/K + sqrt(r)).

    theta is the negative perpetual-put exponent, so the factor is positive
    for every valid parameter set with r > 0.
    """
    if p.rate <= 0.0:
        raise ValueError("error_bound_factor requires rate > 0")
    mu = p.rate - p.dividend - 0.5 * p.volatility**2
    theta = (-mu - math.sqrt(mu * mu + 2.0 * p.volatility**2 * p.rate)) / p.volatility**2
    scale = (theta - 1.0) / (p.volatility * theta * math.sqrt(2.0))
    return scale * (math.sqrt(p.dividend) * spot / p.strike + math.sqrt(p.rate))


def _premium_grid(curve: BoundaryCurve, t: float, quad_d: int) -> np.ndarray:
    """Equidistant quadrature nodes on [0, t], matching curve nodes when t is one."""
    horizon = curve.horizon
    if abs(t - horizon) <= 1e-12 * horizon:
        return np.asarray(curve.grid)
    spacing = horizon / (curve.grid.size - 1)
    segments = max(quad_d + 1, int(math.ceil(t / spacing - 1e-12)))
    return np.linspace(0.0, t, segments + 1)


def _endpoint_indicator(spot: float, boundary_value: float, strike: float) -> float:
    """Limit of the CDF factors as the time gap closes: 1 below the boundary,
    1/2 on it, 0 above."""
    if abs(spot - boundary_value) <= 1e-9 * strike:
        return 0.5
    return 1.0 if spot < boundary_value else 0.0


def american_put_price(t: float, spot: float, curve: BoundaryCurve,
                       quad_d: int | None = None) -> PriceResult:
    """American put value at time-to-expiry t via the premium representation.

    In the exercise region (spot at or below the boundary) the value is
    exactly the payoff K - spot.  Otherwise the premium integral over
    [0, t] is evaluated with rational-interpolatory quadrature weights of
    order ``quad_d`` (defaulting to the curve's own order) on a grid that
    coincides with the curve nodes when t is the full horizon.
    """
    start = time.perf_counter()
    p = curve.params
    if spot <= 0.0:
        raise ValueError(f"spot must be > 0, got {spot}")
    horizon = curve.horizon
    if not 0.0 < t <= horizon * (1.0 + 1e-12):
        raise ValueError(f"t must lie in (0, {horizon}], got {t}")
    t = min(t, horizon)
    if quad_d is None:
        quad_d = curve.basis.degree if curve.basis.degree is not None else curve.config.d

    boundary_at_t = float(eval_boundary(curve, t))
    euro = european_put(t, spot, p)
    if spot <= boundary_at_t:
        value = p.strike - spot
        return PriceResult(value=value, european_part=euro,
                           premium_part=value - euro,
                           bound_factor=error_bound_factor(spot, p),
                           wall_time=time.perf_counter() - start)

    nodes = _premium_grid(curve, t, quad_d)
    rule = brq_weights(fh_basis(nodes, quad_d), (0.0, t),
                       points_per_panel=curve.config.quad_points)
    boundary_vals = np.asarray(eval_boundary(curve, nodes[:-1]))
    tau = t - nodes[:-1]
    sig_sqrt = p.volatility * np.sqrt(tau)
    d1 = (np.log(spot / boundary_vals)
          + (p.rate - p.dividend + 0.5 * p.volatility**2) * tau) / sig_sqrt
    d2 = d1 - sig_sqrt
    integrand = (p.rate * p.strike * np.exp(-p.rate * tau) * ndtr(-d2)
                 - p.dividend * spot * np.exp(-p.dividend * tau) * ndtr(-d1))
    endpoint = (_endpoint_indicator(spot, boundary_at_t, p.strike)
                * (p.rate * p.strike - p.dividend * spot))
    premium = float(rule.weights[:-1] @ integrand + rule.weights[-1] * endpoint)
    return PriceResult(value=euro + premium, european_part=euro,
                       premium_part=premium,
                       bound_factor=error_bound_factor(spot, p),
                       wall_time=time.perf_counter() - start)


def american_call_price(t: float, spot: float, p: MarketParams,
                        cfg: SolverConfig) -> PriceResult:
    """American call value via put-call symmetry.

    call(spot, strike; r, delta) equals put(strike, spot; delta, r): the
    symmetric put boundary is solved internally with ``cfg`` and priced at
    the original strike.  Without dividends the call is never exercised
    early, so the European value is returned directly.
    """
    if spot <= 0.0:
        raise ValueError(f"spot must be > 0, got {spot}")
    if p.dividend == 0.0:
        start = time.perf_counter()
        euro = _european_call(t, spot, p)
        return PriceResult(value=euro, european_part=euro, premium_part=0.0,
                           bound_factor=0.0,
                           wall_time=time.perf_counter() - start)
    start = time.perf_counter()
    symmetric = MarketParams(strike=spot, expiry=p.expiry, rate=p.dividend,
                             dividend=p.rate, volatility=p.volatility)
    curve = solve_boundary(cfg, symmetric)
    result = american_put_price(t, p.strike, curve)
    return PriceResult(value=result.value, european_part=result.european_part,
                       premium_part=result.premium_part,
                       bound_factor=result.bound_factor,
                       wall_time=time.perf_counter() - start)


def _european_call(t: float, spot: float, p: MarketParams) -> float:
    if t <= 0.0:
        return max(spot - p.strike, 0.0)
    d = d1d2(spot, t, p.strike, p)
    return (spot * math.exp(-p.dividend * t) * norm_cdf(d.d1)
            - p.strike * math.exp(-p.rate * t) * norm_cdf(d.d2))
