import math

import numpy as np
import pytest

from kimvolterra import (
    BaryBasis,
    berrut_basis,
    berrut_weights,
    basis_matrix,
    eval_interpolant,
    fh_basis,
    fh_weights,
    lagrange_basis,
    lagrange_weights,
    lebesgue_constant,
)


def normalized(beta):
    """Scale so the first weight is +1; removes the free common factor."""
    beta = np.asarray(beta, dtype=float)
    return beta / beta[0]


def fh_weights_partial_fraction(nodes, d):
    """Independent oracle: collect the 1/(t - t_i) residues of the local
    polynomial blend sum_k (-1)^k / prod_{j=k..k+d} (t - t_j)."""
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size - 1
    beta = np.zeros(n + 1)
    for i in range(n + 1):
        for k in range(max(0, i - d), min(i, n - d) + 1):
            prod = 1.0
            for j in range(k, k + d + 1):
                if j != i:
                    prod *= nodes[i] - nodes[j]
            beta[i] += (-1.0) ** k / prod
    return beta


class TestLagrangeWeights:
    def test_two_nodes(self):
        assert normalized(lagrange_weights([0.0, 1.0])) == pytest.approx([1.0, -1.0])

    def test_three_nodes(self):
        beta = lagrange_weights([0.0, 1.0, 2.0])
        assert normalized(beta) == pytest.approx([1.0, -2.0, 1.0])

    def test_reproduces_quadratic(self):
        basis = lagrange_basis(np.array([0.0, 0.5, 1.0]))
        values = basis.nodes**2
        ts = np.linspace(0.0, 1.0, 100)
        approx = eval_interpolant(basis, values, ts)
        assert np.max(np.abs(approx - ts**2)) <= 1e-13

    def test_duplicate_nodes_rejected(self):
        with pytest.raises(ValueError):
            lagrange_weights([0.0, 0.0, 1.0])

    def test_large_grid_stays_finite(self):
        beta = lagrange_weights(np.linspace(0.0, 1.0, 257))
        assert np.all(np.isfinite(beta)) and np.max(np.abs(beta)) == 1.0


class TestBerrutWeights:
    def test_n3(self):
        assert berrut_weights(3).tolist() == [1.0, -1.0, 1.0, -1.0]

    def test_n1(self):
        assert berrut_weights(1).tolist() == [1.0, -1.0]

    def test_reproduces_constants(self):
        basis = berrut_basis(np.linspace(0.0, 2.0, 8))
        ts = np.linspace(0.0, 2.0, 333)
        approx = eval_interpolant(basis, np.full(8, 3.25), ts)
        assert np.max(np.abs(approx - 3.25)) <= 1e-14

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            berrut_weights(0)


class TestFloaterHormannWeights:
    def test_d0_equals_berrut(self):
        for n in (1, 4, 9):
            assert np.array_equal(fh_weights(n, 0), berrut_weights(n))

    def test_n4_d1_magnitudes(self):
        beta = fh_weights(4, 1)
        assert np.abs(beta).tolist() == [1.0, 2.0, 2.0, 2.0, 1.0]
        assert np.all(beta[:-1] * beta[1:] < 0)

    def test_n5_d2_magnitudes(self):
        beta = fh_weights(5, 2)
        assert np.abs(beta).tolist() == [1.0, 3.0, 4.0, 4.0, 3.0, 1.0]
        assert np.all(beta[:-1] * beta[1:] < 0)

    @pytest.mark.parametrize("n,d", [(4, 1), (5, 2), (8, 3), (12, 4), (7, 0)])
    def test_partial_fraction_oracle(self, n, d):
        nodes = np.linspace(0.0, 1.0, n + 1)
        expected = fh_weights_partial_fraction(nodes, d)
        assert normalized(fh_weights(n, d)) == pytest.approx(
            normalized(expected), rel=1e-10)

    def test_d_beyond_n_rejected(self):
        with pytest.raises(ValueError):
            fh_weights(3, 4)


class TestBaryBasis:
    def test_rejects_non_equidistant(self):
        with pytest.raises(ValueError):
            fh_basis(np.array([0.0, 0.1, 0.3, 0.6]), 1)

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            berrut_basis(np.array([1.0, 0.5, 0.0]))

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            berrut_basis(np.array([1.0]))

    def test_immutable_arrays(self):
        basis = fh_basis(np.linspace(0.0, 1.0, 5), 1)
        with pytest.raises(ValueError):
            basis.nodes[0] = 3.0

    def test_rejects_non_alternating_rational_weights(self):
        with pytest.raises(ValueError):
            BaryBasis(np.array([0.0, 0.5, 1.0]), np.array([1.0, 1.0, -1.0]),
                      "berrut")


class TestEvalInterpolant:
    def test_exact_at_nodes(self):
        basis = fh_basis(np.linspace(0.0, 1.0, 11), 2)
        values = np.sin(basis.nodes)
        for k in (0, 3, 10):
            assert eval_interpolant(basis, values, basis.nodes[k]) == values[k]

    def test_constant_data(self):
        basis = fh_basis(np.linspace(0.0, 3.0, 17), 3)
        ts = np.linspace(0.0, 3.0, 500)
        approx = eval_interpolant(basis, np.full(17, 2.5), ts)
        assert np.max(np.abs(approx - 2.5)) <= 1e-14 * 2.5

    def test_exp_error_within_order_bound(self):
        n, d = 20, 3
        basis = fh_basis(np.linspace(0.0, 1.0, n + 1), d)
        h = 1.0 / n
        t = 0.5 - h / 2.0
        approx = eval_interpolant(basis, np.exp(basis.nodes), t)
        bound = h**4 * (math.e / 5.0 + math.e / 4.0)
        assert abs(approx - math.exp(t)) <= bound

    def test_length_mismatch(self):
        basis = fh_basis(np.linspace(0.0, 1.0, 5), 1)
        with pytest.raises(ValueError):
            eval_interpolant(basis, np.ones(4), 0.5)

    def test_scale_invariance(self):
        basis = fh_basis(np.linspace(0.0, 1.0, 21), 3)
        scaled = BaryBasis(basis.nodes, basis.weights * 7.3, basis.family,
                           basis.degree)
        values = np.exp(basis.nodes)
        ts = np.linspace(0.001, 0.999, 400)
        a = eval_interpolant(basis, values, ts)
        b = eval_interpolant(scaled, values, ts)
        assert np.max(np.abs(a - b)) <= 1e-14 * np.max(np.abs(a))


class TestInvariants:
    @pytest.mark.parametrize("make,n", [
        # polynomial weights on equidistant nodes lose digits like the
        # Lebesgue constant (~2^n), so the polynomial family is checked at a
        # size where it is still well conditioned
        (lambda nodes: lagrange_basis(nodes), 16),
        (lambda nodes: berrut_basis(nodes), 32),
        (lambda nodes: fh_basis(nodes, 2), 32),
        (lambda nodes: fh_basis(nodes, 3), 32),
    ])
    def test_partition_of_unity(self, make, n):
        basis = make(np.linspace(0.0, 3.0, n + 1))
        rng = np.random.default_rng(11)
        ts = rng.uniform(0.0, 3.0, 1000)
        sums = basis_matrix(basis, ts).sum(axis=1)
        assert np.max(np.abs(sums - 1.0)) <= 1e-13

    @pytest.mark.parametrize("d", [0, 1, 2, 3])
    def test_no_poles_off_nodes(self, d):
        basis = fh_basis(np.linspace(0.0, 1.0, 41), d)
        rng = np.random.default_rng(3)
        ts = rng.uniform(0.0, 1.0, 10_000)
        c = basis.weights[None, :] / (ts[:, None] - basis.nodes[None, :])
        assert np.min(np.abs(c.sum(axis=1))) > 0.0

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_polynomial_reproduction(self, d):
        basis = fh_basis(np.linspace(0.0, 1.0, 21), d)
        ts = np.linspace(0.0, 1.0, 701)
        for deg in range(d + 1):
            values = basis.nodes**deg
            approx = eval_interpolant(basis, values, ts)
            scale = max(1.0, np.max(np.abs(ts**deg)))
            assert np.max(np.abs(approx - ts**deg)) <= 1e-12 * scale

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_convergence_order_on_exp(self, d):
        errors = {}
        samples = np.linspace(0.0, 1.0, 3137)[1:-1]
        for n in (32, 256):
            basis = fh_basis(np.linspace(0.0, 1.0, n + 1), d)
            approx = basis_matrix(basis, samples) @ np.exp(basis.nodes)
            errors[n] = np.max(np.abs(approx - np.exp(samples)))
        order = math.log(errors[32] / errors[256]) / math.log(256 / 32)
        assert order >= d + 0.5


class TestLebesgueConstant:
    def test_two_nodes_is_one(self):
        for make in (lambda n: lagrange_basis(n), lambda n: berrut_basis(n),
                     lambda n: fh_basis(n, 1)):
            lam = lebesgue_constant(make(np.array([0.0, 1.0])), 50)
            assert lam == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("n", [8, 16, 32, 64, 128, 256])
    def test_logarithmic_bound(self, n, d):
        basis = fh_basis(np.linspace(0.0, 1.0, n + 1), d)
        lam = lebesgue_constant(basis, 30)
        assert lam <= 2.0 ** (d - 1) * (2.0 + math.log(n))

    def test_polynomial_weights_blow_up(self):
        basis = lagrange_basis(np.linspace(0.0, 1.0, 21))
        assert lebesgue_constant(basis, 40) > 100.0

    def test_grows_from_below_with_sampling(self):
        basis = fh_basis(np.linspace(0.0, 1.0, 17), 2)
        coarse = lebesgue_constant(basis, 10)
        fine = lebesgue_constant(basis, 200)
        assert coarse <= fine + 1e-12

    def test_oversample_floor(self):
        with pytest.raises(ValueError):
            lebesgue_constant(berrut_basis(np.array([0.0, 1.0])), 9)
