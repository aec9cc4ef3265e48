import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qubit_uncertainty.moments import (
    cms_variance,
    commutator_measure,
    covariance,
    dense_moments,
    expectation,
    mixedness,
    moment_set,
    variance,
    variance_compact,
    variance_eq9,
    zeta,
)
from qubit_uncertainty.pauli import ID, SX, SY, SZ, make_observable, make_state, random_sample

import oracle

FIELDS = ("mean", "variance", "stddev", "cms_variance", "covariance",
          "commutator_measure", "zeta", "mixedness")

coeff = st.floats(-2, 2, allow_nan=False)


@st.composite
def bloch_vectors(draw):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    n = np.linalg.norm(v)
    return v / n if n > 1 else v


def assert_close(x, y, tol=1e-12):
    x, y = np.asarray(x), np.asarray(y)
    assert np.all(np.abs(x - y) <= tol * np.maximum(1.0, np.abs(y)))


class TestExpectation:
    def test_eigenstate(self):
        assert expectation(SZ, make_state(0, 0, 1)) == 1

    def test_identity_part(self, rng):
        assert expectation(make_observable(0, 0, 0, 2), random_sample(rng, "ball")) == 2

    def test_against_trace(self):
        assert expectation(SX, make_state(0.6, 0, 0)) == pytest.approx(0.6, abs=1e-15)
        assert oracle.ev(oracle.rho(0.6, 0, 0), oracle.X).real == pytest.approx(0.6, abs=1e-15)


class TestVariance:
    def test_eigenstate(self):
        assert variance(SZ, make_state(0, 0, 1)) == 0

    def test_completely_mixed(self):
        assert variance(SX, make_state(0, 0, 0)) == 1

    def test_partial_x(self):
        assert variance(SX, make_state(0.6, 0, 0)) == pytest.approx(0.64, abs=1e-15)

    def test_rounding_noise_clamped(self):
        # eigenstate along a skew axis: raw expansion may land a few ulps below 0
        a = np.array([0.3, -0.7, 0.648074069840786, 0.0])
        p = a[:3] / np.linalg.norm(a[:3])
        v = variance(a, p)
        assert v >= 0 and v < 1e-14

    def test_eq9_matches_compact_form(self, rng):
        a = random_sample(rng, "observable", 50_000, coeff_range=(-2, 2))
        p = random_sample(rng, "ball", 50_000)
        assert_close(variance_eq9(a, p), variance_compact(a, p))

    @given(coeff, coeff, coeff, coeff, bloch_vectors())
    def test_nonnegative_and_matches_trace(self, a1, a2, a3, a4, p):
        v = variance((a1, a2, a3, a4), p)
        assert v >= 0
        expected = oracle.var(oracle.rho(*p), oracle.op(a1, a2, a3, a4))
        assert abs(v - expected) <= 1e-12 * max(1, abs(expected))


class TestCovariance:
    def test_xy_at_center(self):
        assert covariance(SX, SY, make_state(0, 0, 0)) == 0
        assert oracle.cov(oracle.rho(0, 0, 0), oracle.X, oracle.Y) == 0

    def test_xy_at_north_pole(self):
        assert covariance(SX, SY, make_state(0, 0, 1)) == 1j
        assert oracle.cov(oracle.rho(0, 0, 1), oracle.X, oracle.Y) == 1j

    def test_self_covariance_is_variance(self, rng):
        a = random_sample(rng, "observable", 1000)
        p = random_sample(rng, "ball", 1000)
        g = covariance(a, a, p)
        assert_close(g.real, variance(a, p))
        assert np.all(g.imag == 0)

    def test_imaginary_part_is_triple_product(self, rng):
        a = random_sample(rng, "observable", 1000)
        b = random_sample(rng, "observable", 1000)
        p = random_sample(rng, "ball", 1000)
        expected = np.einsum("ki,ki->k", p, np.cross(a[:, :3], b[:, :3]))
        np.testing.assert_allclose(covariance(a, b, p).imag, expected, rtol=0, atol=1e-15)


class TestCommutatorMeasure:
    def test_xy(self):
        assert commutator_measure(SX, SY) == 2
        assert oracle.fmeasure(oracle.X, oracle.Y) == 2

    def test_self(self, rng):
        a = random_sample(rng, "observable")
        assert commutator_measure(a, a) == 0

    def test_scaled(self):
        assert commutator_measure(make_observable(2, 0, 0), make_observable(0, 3, 0)) == 72

    def test_parallel_vectors_commute(self):
        assert commutator_measure(make_observable(1, 2, 3, 4), make_observable(-2, -4, -6, 1)) == 0

    @given(coeff, coeff, coeff, coeff, coeff, coeff)
    def test_symmetric_nonnegative(self, a1, a2, a3, b1, b2, b3):
        a, b = (a1, a2, a3, 0), (b1, b2, b3, 0)
        f = commutator_measure(a, b)
        assert f >= 0 and f == commutator_measure(b, a)


class TestMixednessAndCms:
    def test_center(self):
        assert mixedness(make_state(0, 0, 0)) == 0.5

    def test_pure(self, rng):
        assert abs(mixedness(random_sample(rng, "pure"))) < 1e-15

    def test_fig1_radius(self):
        assert mixedness(make_state(0, 0, math.sqrt(0.8))) == pytest.approx(0.1, abs=1e-15)

    def test_cms_variance(self):
        assert cms_variance(SX) == 1
        assert cms_variance(ID) == 0
        assert cms_variance(make_observable(0, 0, 3, 5)) == 9
        assert oracle.var(oracle.I2 / 2, oracle.op(0, 0, 3, 5)) == pytest.approx(9)


class TestZeta:
    def test_center(self, rng):
        a, b = random_sample(rng, "observable", 2)
        assert zeta(a, b, make_state(0, 0, 0)) == 0

    def test_xy_partial(self):
        assert zeta(SX, SY, make_state(0.6, 0, 0)) == pytest.approx(0.36, abs=1e-15)
        assert oracle.zeta(oracle.rho(0.6, 0, 0), oracle.X, oracle.Y) == pytest.approx(0.36)

    def test_zz_pole(self):
        assert zeta(SZ, SZ, make_state(0, 0, 1)) == 2


class TestDenseOracle:
    def test_center(self):
        dm = dense_moments([SX], make_state(0, 0, 0))
        assert dm.mean[0] == 0 and dm.variance[0] == 1

    def test_xy_pole(self):
        dm = dense_moments([SX, SY], make_state(0, 0, 1))
        assert dm.covariance[0, 1] == 1j
        assert dm.commutator_measure[0, 1] == 2
        assert dm.mixedness == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_agrees_with_closed_forms(self, rng, n):
        k = 20_000
        a = rng.uniform(-2, 2, size=(k, n, 4))
        p = np.concatenate([random_sample(rng, "ball", k // 2), random_sample(rng, "pure", k - k // 2)])
        ms, dm = moment_set(a, p), dense_moments(a, p)
        for name in FIELDS:
            assert_close(getattr(ms, name), getattr(dm, name))

    def test_moment_set_invariants(self, rng):
        a = rng.uniform(-2, 2, size=(5000, 3, 4))
        p = random_sample(rng, "ball", 5000)
        ms = moment_set(a, p)
        assert np.all(ms.variance >= 0)
        np.testing.assert_array_equal(ms.stddev, np.sqrt(ms.variance))
        assert np.all((ms.mixedness >= 0) & (ms.mixedness <= 0.5))
        np.testing.assert_array_equal(ms.commutator_measure, np.swapaxes(ms.commutator_measure, 1, 2))
        diag = np.diagonal(ms.covariance, axis1=1, axis2=2)
        assert_close(diag.real, ms.variance)


class TestIdentities:
    def test_product_decomposes(self, rng):
        """dA^2 dB^2 = M F + |G|^2 on random pairs and states."""
        k = 50_000
        a = rng.uniform(-2, 2, size=(k, 4))
        b = rng.uniform(-2, 2, size=(k, 4))
        p = np.concatenate([random_sample(rng, "ball", k // 2), random_sample(rng, "pure", k - k // 2)])
        lhs = variance(a, p) * variance(b, p)
        rhs = mixedness(p) * commutator_measure(a, b) + np.abs(covariance(a, b, p)) ** 2
        assert_close(rhs, lhs)

    def test_shift_invariance(self, rng):
        a = rng.uniform(-2, 2, size=(1000, 4))
        b = rng.uniform(-2, 2, size=(1000, 4))
        p = random_sample(rng, "ball", 1000)
        shift = np.zeros(4)
        shift[3] = 1.7
        assert_close(variance(a + shift, p), variance(a, p))
        assert_close(covariance(a + shift, b - shift, p), covariance(a, b, p))
        assert_close(commutator_measure(a + shift, b), commutator_measure(a, b))
        assert_close(zeta(a + shift, b - shift, p), zeta(a, b, p))
