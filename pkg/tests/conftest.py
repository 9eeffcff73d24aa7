import time

import pytest

from kimvolterra import MarketParams, SolverConfig, binomial_american_put, solve_boundary

# Benchmark fixture set: 3-year put, r = delta = 8%, sigma = 20%, K = 100.
TABLE3_PARAMS = MarketParams(strike=100.0, expiry=3.0, rate=0.08,
                             dividend=0.08, volatility=0.2)
TABLE3_SPOTS = (80.0, 90.0, 100.0, 110.0, 120.0)
# Published reference digits for the benchmark set (4-decimal rounding).
TABLE3_BIN_COLUMN = {80.0: 22.2050, 90.0: 16.2071, 100.0: 11.7037,
                     110.0: 8.3671, 120.0: 5.9299}
TABLE3_METHOD_COLUMN = {80.0: 22.2048, 90.0: 16.2068, 100.0: 11.7037,
                        110.0: 8.3669, 120.0: 5.9298}


@pytest.fixture(scope="session")
def table3_params():
    return TABLE3_PARAMS


@pytest.fixture(scope="session")
def bin_references():
    """10000-step binomial values per benchmark spot, plus total wall time."""
    start = time.perf_counter()
    values = {s: binomial_american_put(10_000, s, TABLE3_PARAMS)
              for s in TABLE3_SPOTS}
    return values, time.perf_counter() - start


@pytest.fixture(scope="session")
def curve_n32_d2():
    return solve_boundary(SolverConfig(n=32, d=2), TABLE3_PARAMS)


@pytest.fixture(scope="session")
def curve_n64_d3():
    return solve_boundary(SolverConfig(n=64, d=3), TABLE3_PARAMS)


@pytest.fixture(scope="session")
def figure1_curves():
    """n=64, d=3 curves for the four benchmark dividend yields."""
    curves = {}
    for dividend in (0.0, 0.04, 0.08, 0.12):
        params = MarketParams(strike=100.0, expiry=3.0, rate=0.08,
                              dividend=dividend, volatility=0.2)
        curves[dividend] = solve_boundary(SolverConfig(n=64, d=3), params)
    return curves
