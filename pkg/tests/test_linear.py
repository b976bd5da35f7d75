import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_real_field
from psdecay.errors import OracleSizeError
from psdecay.linear import DispersionSpec, propagate, propagate_oracle, symbol
from psdecay.spectral import Field, GridSpec, l2_norm, to_physical, to_spectral

FULL, X_ONLY, Y_ONLY = DispersionSpec.FULL, DispersionSpec.X_ONLY, DispersionSpec.Y_ONLY


class TestSymbol:
    @pytest.mark.parametrize("spec, xi, eta, expected", [
        (FULL, 2.0, 3, 13.0),
        (FULL, -2.0, 3, -13.0),
        (FULL, 0.0, 5, 0.0),
        (Y_ONLY, 1.5, 2, 4.0),
        (X_ONLY, -1.5, 2, -2.25),
    ])
    def test_values(self, spec, xi, eta, expected):
        assert symbol(spec, xi, eta) == expected

    @given(st.sampled_from(list(DispersionSpec)), st.floats(-50, 50), st.integers(-20, 20))
    def test_odd_in_xi(self, spec, xi, eta):
        assert symbol(spec, -xi, eta) == -symbol(spec, xi, eta)

    def test_parse(self):
        assert DispersionSpec.parse(" Y-Only ") is Y_ONLY
        with pytest.raises(ValueError, match="unknown dispersion"):
            DispersionSpec.parse("diagonal")


@pytest.fixture
def grid():
    return GridSpec(20.0, 256, 16)


@pytest.fixture
def datum(grid, rng):
    return random_real_field(grid, rng)


class TestPropagate:
    def test_time_zero(self, datum):
        assert np.abs(propagate(datum, 0.0).values - datum.values).max() < 1e-14

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("spec", list(DispersionSpec))
    def test_unitary(self, datum, t, spec):
        assert l2_norm(propagate(datum, t, spec)) == pytest.approx(l2_norm(datum), rel=1e-13)

    def test_group_law(self, datum):
        a = propagate(propagate(datum, 0.3), 0.7)
        b = propagate(datum, 1.0)
        assert np.abs(a.values - b.values).max() < 1e-12

    def test_backward_inverts_forward(self, datum):
        back = propagate(propagate(datum, 2.5), -2.5)
        assert np.abs(back.values - datum.values).max() < 1e-12

    @pytest.mark.parametrize("spec", list(DispersionSpec))
    def test_real_data_stay_real(self, datum, spec):
        assert np.abs(propagate(datum, 3.0, spec).values.imag).max() < 1e-11

    def test_single_mode_phase(self, grid):
        F = np.zeros(grid.shape, dtype=complex)
        k, j = grid.index_of_xi_zero() + 5, grid.index_of_eta(-3)
        F[k, j] = 1.0
        out = propagate(Field.spectral(grid, F, real=False), 0.4)
        omega = symbol(FULL, grid.xi[k], grid.eta[j])
        assert out.values[k, j] == pytest.approx(np.exp(0.4j * omega), abs=1e-15)
        assert out.space == "spectral"

    @pytest.mark.parametrize("t", [math.nan, math.inf])
    def test_non_finite_time(self, datum, t):
        with pytest.raises(ValueError):
            propagate(datum, t)


class TestOracle:
    def test_time_zero_is_identity(self, rng):
        g = GridSpec(4.0, 16, 4)
        f = random_real_field(g, rng)
        assert np.abs(propagate_oracle(f, 0.0).values - f.values).max() < 1e-12

    @pytest.mark.parametrize("spec", list(DispersionSpec))
    def test_agrees_with_propagate_on_random_data(self, rng, spec):
        g = GridSpec(4.0, 16, 4)
        f = Field.physical(g, rng.standard_normal(g.shape))
        diff = propagate_oracle(f, 0.9, spec).values - propagate(f, 0.9, spec).values
        assert np.abs(diff).max() < 1e-10

    def test_agrees_on_gaussian(self):
        g = GridSpec(6.0, 32, 8)
        f = Field.from_function(g, lambda X, Y: np.exp(-X**2) * (1 + np.cos(Y)))
        assert np.abs(propagate_oracle(f, 0.7).values - propagate(f, 0.7).values).max() < 1e-10

    def test_single_mode(self):
        g = GridSpec(3.0, 8, 4)
        F = np.zeros(g.shape, dtype=complex)
        F[6, 3] = g.volume
        f = to_physical(Field.spectral(g, F, real=False))
        out = to_spectral(propagate_oracle(f, 1.3)).values
        assert out[6, 3] / g.volume == pytest.approx(np.exp(1.3j * symbol(FULL, g.xi[6], g.eta[3])),
                                                       abs=1e-12)

    def test_size_guard(self):
        g = GridSpec(1.0, 512, 256)
        with pytest.raises(OracleSizeError):
            propagate_oracle(Field.zeros(g), 1.0)

    def test_rejects_spectral_input(self):
        g = GridSpec(1.0, 8, 4)
        with pytest.raises(ValueError):
            propagate_oracle(Field.zeros(g, "spectral"), 1.0)
