import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nozzleshock.errors import InvalidState, NonPositiveVelocity
from nozzleshock.gas import GasState, Regime, RiemannPair, classify, eigenvalues, from_riemann, to_riemann


def test_to_riemann_examples():
    r = to_riemann(GasState(1.0, 0.0))
    assert (r.y1, r.y2) == (0.0, 0.0)
    r = to_riemann(GasState(math.e, 2.0))
    assert r.y1 == pytest.approx(1.0, abs=1e-15)
    assert r.y2 == pytest.approx(3.0, abs=1e-15)


@pytest.mark.parametrize("pair,rho,u", [((0.0, 0.0), 1.0, 0.0), ((1.0, 3.0), math.e, 2.0),
                                        ((-1.0, 1.0), math.e, 0.0)])
def test_from_riemann_examples(pair, rho, u):
    s = from_riemann(RiemannPair(*pair))
    assert s.rho == pytest.approx(rho, rel=1e-15)
    assert s.u == pytest.approx(u, abs=1e-15)


@pytest.mark.parametrize("u,lam", [(0.5, (-0.5, 1.5)), (2.0, (1.0, 3.0)), (1.0, (0.0, 2.0))])
def test_eigenvalues(u, lam):
    assert eigenvalues(GasState(1.0, u)) == lam


def test_classify_examples():
    assert classify(GasState(1.0, 2.0), 1e-6) is Regime.SUPERSONIC
    assert classify(GasState(1.0, 0.5)) is Regime.SUBSONIC
    assert classify(GasState(1.0, 1.0 + 1e-9), 1e-6) is Regime.SONIC
    with pytest.raises(NonPositiveVelocity):
        classify(GasState(1.0, 0.0))
    with pytest.raises(ValueError):
        classify(GasState(1.0, 2.0), 0.0)


@pytest.mark.parametrize("rho,u", [(0.0, 1.0), (-1.0, 1.0), (math.nan, 1.0), (1.0, math.inf)])
def test_invalid_states(rho, u):
    with pytest.raises(InvalidState):
        GasState(rho, u)


def test_round_trip_bulk():
    rng = np.random.default_rng(7)
    rho = rng.uniform(0.1, 10.0, 10_000)
    u = rng.uniform(-5.0, 5.0, 10_000)
    err = 0.0
    for r, v in zip(rho, u):
        s = from_riemann(to_riemann(GasState(r, v)))
        err = max(err, abs(s.rho - r) / r, abs(s.u - v))
    assert err < 1e-12


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_round_trip_property(rho, u):
    s = from_riemann(to_riemann(GasState(rho, u)))
    assert s.rho == pytest.approx(rho, rel=1e-12)
    assert s.u == pytest.approx(u, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
def test_reverse_round_trip_property(y1, y2):
    r = to_riemann(from_riemann(RiemannPair(y1, y2)))
    assert r.y1 == pytest.approx(y1, abs=1e-12)
    assert r.y2 == pytest.approx(y2, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(1e-3, 5.0))
def test_speed_gap_and_regime_signs(rho, u):
    s = GasState(rho, u)
    l1, l2 = eigenvalues(s)
    assert l2 - l1 == pytest.approx(2.0, abs=1e-15)
    reg = classify(s, 1e-6)
    if reg is Regime.SUBSONIC:
        assert l1 < 0.0 < l2
    elif reg is Regime.SUPERSONIC:
        assert l1 > 0.0
