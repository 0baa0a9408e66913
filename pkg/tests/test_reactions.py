import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from antforage.grid import laplacian, make_grid, total_mass
from antforage.model import ModelParams
from antforage.reactions import conversion, deplete_food, nest_exchange, pheromone_rhs

from conftest import make_state

nonneg = st.floats(0, 1e3, allow_nan=False)


class TestConversion:
    def test_no_food(self, rng):
        g = make_grid(4, 4, 1.0)
        assert not conversion(rng.random(g.shape), g.zeros()).any()

    def test_product(self):
        assert conversion(np.array([[2.0]]), np.array([[3.0]]))[0, 0] == 6.0

    def test_mass_matches_cell_sum(self, rng):
        g = make_grid(9, 7, 0.2)
        u, c = rng.random(g.shape), rng.random(g.shape)
        oracle = math.fsum(u[j, i] * c[j, i] for j in range(7) for i in range(9)) * g.cell_area
        assert total_mass(conversion(u, c), g) == pytest.approx(oracle, rel=1e-13)


class TestNestExchange:
    g = make_grid(11, 11, 0.5)
    p = ModelParams(alpha5=3.0, m0=2.0, t_inflow=5.0)

    def test_inflow_only(self):
        s = make_state(self.g, self.p)
        du, dw = nest_exchange(s.u, s.w, s, self.p, 1.0)
        np.testing.assert_array_equal(du, 2.0 * s.nest_weight)
        assert not dw.any()
        assert total_mass(du, self.g) == pytest.approx(2.0, rel=1e-14)

    def test_balance(self, rng):
        s = make_state(self.g, self.p, w=rng.random(self.g.shape))
        for t in (0.0, 4.9, 5.0, 7.0):
            du, dw = nest_exchange(s.u, s.w, s, self.p, t)
            expected = self.p.m0 if t < 5.0 else 0.0
            assert total_mass(du, self.g) + total_mass(dw, self.g) == pytest.approx(expected, abs=1e-13)

    def test_unloading_after_cutoff(self, rng):
        w = rng.random(self.g.shape)
        s = make_state(self.g, self.p, w=w)
        du, dw = nest_exchange(s.u, s.w, s, self.p, 6.0)
        inside = s.nest_mask > 0
        np.testing.assert_array_equal(du[inside], 3.0 * w[inside])
        assert not du[~inside].any() and not dw[~inside].any()
        np.testing.assert_array_equal(du + dw, 0.0)


class TestPheromone:
    g = make_grid(6, 6, 0.5)

    def test_zero(self):
        assert not pheromone_rhs(self.g.zeros(), self.g.zeros(), self.g).any()

    def test_evaporation(self):
        np.testing.assert_array_equal(pheromone_rhs(self.g.full(0.8), self.g.zeros(), self.g), -0.8)

    def test_deposition(self):
        np.testing.assert_array_equal(pheromone_rhs(self.g.zeros(), self.g.full(1.3), self.g), 1.3)

    def test_includes_laplacian(self, rng):
        v, w = rng.random(self.g.shape), rng.random(self.g.shape)
        np.testing.assert_allclose(pheromone_rhs(v, w, self.g), w - v + laplacian(v, self.g), rtol=1e-15)

    def test_mass_balance(self, rng):
        for _ in range(10):
            v, w = rng.random(self.g.shape), rng.random(self.g.shape)
            lhs = total_mass(pheromone_rhs(v, w, self.g), self.g)
            rhs = total_mass(w, self.g) - total_mass(v, self.g)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12 * total_mass(v + w, self.g))


class TestDepleteFood:
    def test_no_ants(self, rng):
        c = rng.random((4, 4))
        np.testing.assert_array_equal(deplete_food(c, np.zeros((4, 4)), ModelParams(alpha4=2.0), 0.1), c)

    def test_halving(self):
        p = ModelParams(alpha4=2.0)
        dt = 0.01
        u = np.full((3, 3), math.log(2.0) / (p.alpha4 * dt))
        np.testing.assert_allclose(deplete_food(np.full((3, 3), 6.0), u, p, dt), 3.0, rtol=1e-14)

    @given(arrays(float, (3, 4), elements=nonneg), arrays(float, (3, 4), elements=nonneg),
           st.floats(0, 10), st.floats(1e-6, 1.0))
    def test_monotone_and_nonnegative(self, c, u, a4, dt):
        out = deplete_food(c, u, ModelParams(alpha4=a4), dt)
        assert np.all(out >= 0.0) and np.all(out <= c)
