import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exthl import minkowski as mk
from exthl.errors import DomainError

beta_st = st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3)
vec_st = st.lists(st.floats(-2, 2), min_size=3, max_size=3)


def test_metric_signature():
    assert mk.minkowski_dot([1, 0, 0, 0], [1, 0, 0, 0]) == -1.0
    assert mk.minkowski_dot([0, 1, 0, 0], [0, 1, 0, 0]) == 1.0


def test_beta_bound():
    with pytest.raises(DomainError):
        mk.BoostParams([0.6, 0.9, 0.0])
    with pytest.raises(DomainError):
        mk.BoostParams([1.0, 0.0, 0.0])


def test_boost_along_x_matches_textbook():
    b = mk.BoostParams([0.6, 0, 0])
    Q, T = mk.boost_coordinates([1.0, 2.0, 3.0], 2.0, b)
    assert b.gamma == pytest.approx(1.25)
    np.testing.assert_allclose(Q, [1.25 * (1.0 - 0.6 * 2.0), 2.0, 3.0], atol=1e-15)
    assert T == pytest.approx(1.25 * (2.0 - 0.6 * 1.0))


def test_rest_particle_momentum_in_moving_frame():
    # a particle at rest seen from a frame moving with +0.6 c moves with -0.6 c
    P, E = mk.boost_momentum_energy([0, 0, 0], 1.0, mk.BoostParams([0.6, 0, 0]), inverse=True)
    np.testing.assert_allclose(P, [-0.75, 0, 0], atol=1e-15)
    assert E == pytest.approx(1.25)


@settings(max_examples=60, deadline=None)
@given(beta_st, vec_st, st.floats(-2, 2), st.floats(0.5, 3.0))
def test_interval_and_roundtrip(beta, q, t, c):
    b = mk.BoostParams(beta)
    Q, T = mk.boost_coordinates(q, t, b, c)
    s1 = mk.minkowski_dot(np.append(c * t, q), np.append(c * t, q))
    s2 = mk.minkowski_dot(np.append(c * T, Q), np.append(c * T, Q))
    assert abs(s1 - s2) < 1e-11 * (1 + abs(s1) + c * c * t * t)
    q2, t2 = mk.unboost_coordinates(Q, T, b, c)
    np.testing.assert_allclose(q2, q, atol=1e-12)
    assert abs(t2 - t) < 1e-12


@settings(max_examples=40, deadline=None)
@given(beta_st, vec_st)
def test_momentum_rules_are_inverse(beta, p):
    b = mk.BoostParams(beta)
    e = math.sqrt(1 + float(np.dot(p, p)))
    P, E = mk.boost_momentum_energy(p, e, b, inverse=True)
    p2, e2 = mk.boost_momentum_energy(P, E, b)
    np.testing.assert_allclose(p2, p, atol=1e-12)
    assert abs(e2 - e) < 1e-12
    # mass shell preserved
    assert abs(float(P @ P) - E * E + 1.0) < 1e-11


def test_potentials_transform_like_momentum():
    b = mk.BoostParams([0.1, -0.3, 0.5])
    A, phi = np.array([0.2, 0.1, -0.4]), 0.7
    A2, phi2 = mk.boost_potentials(A, phi, b, inverse=True)
    P, E = mk.boost_momentum_energy(A, phi, b, inverse=True)
    np.testing.assert_allclose(A2, P)
    assert phi2 == pytest.approx(E)


def test_parallel_composition():
    b1, b2 = 0.5, 0.3
    x = np.array([0.4, 0.0, 0.0])
    Q1, T1 = mk.boost_coordinates(x, 1.0, mk.BoostParams([b1, 0, 0]))
    Q2, T2 = mk.boost_coordinates(Q1, T1, mk.BoostParams([b2, 0, 0]))
    Q, T = mk.boost_coordinates(x, 1.0, mk.BoostParams([mk.compose_parallel_rapidity(b1, b2), 0, 0]))
    np.testing.assert_allclose(Q2, Q, atol=1e-14)
    assert T2 == pytest.approx(T, abs=1e-14)


def test_generating_gradients_match_rules():
    b = mk.BoostParams([0.2, -0.4, 0.3])
    q, P, t = np.array([0.3, -0.2, 0.5]), np.array([0.4, 0.1, -0.6]), 0.7
    E = math.sqrt(1 + P @ P)
    g = mk.boost_generating_gradients(q, P, t, E, b)
    p_rule, e_rule = mk.boost_momentum_energy(P, E, b)
    Q_rule, T_rule = mk.boost_coordinates(q, t, b)
    np.testing.assert_allclose(g["p_k"], p_rule, atol=1e-8)
    np.testing.assert_allclose(g["Q"], Q_rule, atol=1e-8)
    assert g["e_k"] == pytest.approx(e_rule, abs=1e-8)
    assert g["T"] == pytest.approx(T_rule, abs=1e-8)


def test_hamiltonian_boost_rule_energy_only():
    b = mk.BoostParams([0.3, 0.2, 0.0])
    P = np.array([0.5, -0.1, 0.2])
    E = math.sqrt(1 + P @ P)
    _, e = mk.boost_momentum_energy(P, E, b)
    assert mk.hamiltonian_boost_rule(E, P, b) == pytest.approx(e)


def test_canonical_verifier():
    probe = np.array([0.3, 0.1, -0.2, 0.4, -1.2, 0.2, 0.1, -0.3])
    assert mk.verify_extended_canonical(mk.identity_map(), probe).passed()
    assert mk.verify_extended_canonical(mk.boost_canonical_map(mk.BoostParams([0.5, 0.2, -0.1])), probe).passed()
    assert mk.verify_extended_canonical(mk.trivial_generating_map(), probe).passed()
    rep = mk.verify_extended_canonical(mk.scaling_map(2.0), probe)
    assert not rep.passed()
    assert rep.max_violation > 0.1
