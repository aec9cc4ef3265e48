import math

import numpy as np
import pytest

from qubit_uncertainty import sweeps
from qubit_uncertainty.pauli import SX, SY, SZ, make_observable, make_state

import oracle

XYZ = [SX, SY, SZ]
S08 = math.sqrt(0.8)


class TestTightness:
    def test_tilted_pole_values(self):
        # frozen from the dense oracle at p = (0, 0, sqrt 0.8)
        r = sweeps.tightness(XYZ, make_state(0, 0, S08))
        np.testing.assert_allclose(
            r.as_tuple(),
            [1.0649947801086959, 1.2456621991544456, 2.1301408404140796, 1.9117025244708659],
            rtol=1e-12,
        )

    def test_matches_oracle(self, rng):
        for _ in range(20):
            a = rng.uniform(-2, 2, size=(3, 4))
            p = rng.normal(size=3)
            p *= rng.uniform() ** (1 / 3) / np.linalg.norm(p)
            r = oracle.rho(*p)
            ops = [oracle.op(*row) for row in a]
            sv = sum(oracle.var(r, o) for o in ops)
            ss = sum(oracle.std(r, o) for o in ops)
            got = sweeps.tightness(a, p)
            assert got.t1 == pytest.approx(ss / oracle.sum_std_rhs(r, ops, False), rel=1e-10)
            assert got.t2 == pytest.approx(sv / oracle.eq3(r, *ops), rel=1e-10)
            e4 = oracle.eq4(r, *ops)
            if e4 > 1e-9:
                assert got.t3 == pytest.approx(sv / e4, rel=1e-9)
            assert got.t4 == pytest.approx(sv / oracle.eq5(r, ops), rel=1e-10)

    def test_center_t3_undefined(self):
        r = sweeps.tightness(XYZ, make_state(0, 0, 0))
        assert r.t3 is None
        assert r.t1 == pytest.approx(1.0)
        assert r.t2 == pytest.approx(3.0)
        assert r.t4 == pytest.approx(2.0)

    def test_pair_only_t1(self):
        r = sweeps.tightness([SX, SY], make_state(0.3, 0, 0))
        assert r.t1 is not None
        assert r.t2 is None and r.t3 is None and r.t4 is None

    def test_four_observables(self):
        r = sweeps.tightness(XYZ + [make_observable(1, 1, 1)], make_state(0, 0.5, 0))
        assert r.t2 is None and r.t3 is None
        assert r.t1 >= 1 - 1e-12 and r.t4 >= 1 - 1e-10

    def test_ratios_at_least_one(self, rng):
        for _ in range(200):
            a = rng.uniform(-2, 2, size=(3, 4))
            p = rng.normal(size=3)
            p *= rng.uniform() / np.linalg.norm(p)
            for t in sweeps.tightness(a, p).as_tuple():
                assert t is None or t >= 1 - 1e-9


class TestFig1:
    def test_grid_size_and_mixedness(self):
        g = sweeps.sweep_fig1(theta_steps=8, phi_steps=5)
        assert len(g.points) == 40
        np.testing.assert_allclose(g.column("mixedness"), 0.1, atol=1e-12)

    def test_axes_cover_zero_to_pi(self):
        g = sweeps.sweep_fig1(theta_steps=3, phi_steps=3)
        assert sorted(set(g.column("theta"))) == pytest.approx([0, math.pi / 2, math.pi])

    def test_custom_gamma(self):
        g = sweeps.sweep_fig1(gamma=0.894427, theta_steps=2, phi_steps=2)
        np.testing.assert_allclose(g.column("mixedness"), 0.1, atol=1e-6)

    def test_pole_row(self):
        g = sweeps.sweep_fig1(theta_steps=2, phi_steps=2)
        pt = g.points[0]  # theta = 0: p = (0, 0, sqrt 0.8)
        assert pt.ratios.t1 == pytest.approx(1.0649947801086959, rel=1e-12)

    @pytest.mark.parametrize("gamma", [-0.1, 1.2])
    def test_bad_gamma(self, gamma):
        with pytest.raises(ValueError):
            sweeps.sweep_fig1(gamma=gamma)

    def test_too_few_steps(self):
        with pytest.raises(ValueError):
            sweeps.sweep_fig1(theta_steps=1)


class TestFig2:
    def test_endpoints(self):
        g = sweeps.sweep_fig2(m_steps=64)
        m = g.column("mixedness")
        assert len(m) == 64 and m[0] == 0 and m[-1] == 0.5
        assert g.points[-1].gamma == 0.0
        assert g.points[-1].ratios.t1 == pytest.approx(1, abs=1e-12)

    def test_requested_levels_reported(self):
        g = sweeps.sweep_fig2(m_values=[0.05, 0.45])
        assert list(g.column("mixedness")) == [0.05, 0.45]
        np.testing.assert_allclose([pt.gamma for pt in g.points], [math.sqrt(0.9), math.sqrt(0.1)])

    def test_out_of_range_levels(self):
        with pytest.raises(ValueError):
            sweeps.sweep_fig2(m_values=[0.6])

    def test_fig2_gamma(self):
        assert sweeps.fig2_gamma(0.1) == pytest.approx(S08)


class TestFig3:
    def test_two_steps(self):
        g = sweeps.sweep_fig3(2)
        assert len(g.points) == 2
        np.testing.assert_allclose(g.column("L_SUR"), 1, atol=1e-12)
        np.testing.assert_allclose(g.column("L_new"), math.sqrt(2), atol=1e-12)

    def test_general_path_matches_closed_form(self):
        g = sweeps.sweep_fig3(1025)
        np.testing.assert_allclose(g.column("L_new"), g.column("L_new_closed"), rtol=0, atol=1e-12)
        np.testing.assert_allclose(g.column("L_SUR"), g.column("L_SUR_closed"), rtol=0, atol=1e-12)

    def test_pure_and_pair(self):
        g = sweeps.sweep_fig3(5)
        assert all(pt.mixedness == 0 and pt.gamma == 1 for pt in g.points)
        assert all(pt.rhs_eq3 is None and pt.ratios.t2 is None for pt in g.points)

    def test_too_few_steps(self):
        with pytest.raises(ValueError):
            sweeps.sweep_fig3(1)


def test_spherical_state_broadcasts():
    p = sweeps.spherical_state(1.0, np.zeros(4), np.linspace(0, 1, 4))
    assert p.shape == (4, 3)
    np.testing.assert_allclose(p, [[0, 0, 1]] * 4, atol=1e-15)


def test_ratio_sentinel():
    out = sweeps._ratio([1.0, 1.0], [0.5, 1e-13])
    assert out[0] == 2 and math.isnan(out[1])
