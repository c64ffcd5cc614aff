import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nozzleshock.forcing import BoundaryForcing, Waveform


def test_waveforms():
    t = np.linspace(0, 1, 9)
    assert np.allclose(Waveform.sine().value(t, 1.0), np.sin(2 * np.pi * t), atol=1e-15)
    assert np.allclose(Waveform.cosine(2.0, 3).deriv(t, 1.0), -12 * np.pi * np.sin(6 * np.pi * t))
    assert Waveform.zero().is_zero and not Waveform.sine().is_zero


def test_c1_norms():
    f = BoundaryForcing(1.0, 1e-3, rho_r=Waveform.sine())
    n = f.c1_norms()
    assert n["rho_l"] == 0.0 and n["u_l"] == 0.0
    assert n["rho_r"] == pytest.approx(2 * math.pi * 1e-3, rel=1e-6)
    assert f.scaled(0.5).eps == 5e-4
    assert BoundaryForcing(1.0, 0.0, rho_r=Waveform.sine()).is_zero


def test_validation():
    with pytest.raises(ValueError):
        BoundaryForcing(0.0, 1e-3)
    with pytest.raises(ValueError):
        BoundaryForcing(1.0, -1e-3)


harmonic = st.tuples(st.integers(1, 6), st.floats(-1, 1), st.floats(-1, 1))


@settings(max_examples=100, deadline=None)
@given(st.lists(harmonic, min_size=1, max_size=4), st.floats(0.2, 5.0))
def test_periodicity_property(terms, period):
    w = Waveform(tuple(terms))
    f = BoundaryForcing(period, 1e-3, w, w, w)
    assert f.periodicity_defect() < 1e-12
