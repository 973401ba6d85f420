import numpy as np
import pytest

from exthl.errors import DomainError
from exthl.fields import FieldConfig, covariant_potential, eval_potentials, eval_potentials_many, potential_kernel

FIELDS = [
    FieldConfig.zero(),
    FieldConfig.uniform_electric((0.3, -0.1, 0.2)),
    FieldConfig.uniform_magnetic((0.2, 0.5, -0.4)),
    FieldConfig.plane_wave((0.0, 0.3, 0.0), (0.7, 0.0, 0.0), phase=0.4),
    FieldConfig.coulomb(0.5, 0.1),
]
Q = np.array([0.3, -0.7, 0.45])
T = 0.35


def _potentials(f, q, t):
    s = eval_potentials(f, q, t)
    return s.phi, s.A


@pytest.mark.parametrize("f", FIELDS, ids=lambda f: f.kind)
def test_derivatives_against_finite_differences(f):
    s = eval_potentials(f, Q, T)
    h = 1e-5
    for j in range(3):
        dq = np.zeros(3)
        dq[j] = h
        pp, Ap = _potentials(f, Q + dq, T)
        pm, Am = _potentials(f, Q - dq, T)
        assert abs((pp - pm) / (2 * h) - s.grad_phi[j]) < 1e-8
        np.testing.assert_allclose((Ap - Am) / (2 * h), s.dA_dq[:, j], atol=1e-8)
    pp, Ap = _potentials(f, Q, T + h)
    pm, Am = _potentials(f, Q, T - h)
    assert abs((pp - pm) / (2 * h) - s.dphi_dt) < 1e-8
    np.testing.assert_allclose((Ap - Am) / (2 * h), s.dA_dt, atol=1e-8)


@pytest.mark.parametrize("f", FIELDS, ids=lambda f: f.kind)
def test_kernel_and_vectorized_agree(f):
    s = eval_potentials(f, Q, T)
    phi, A, grad, dphi, dA, dAt = potential_kernel(f)(Q, T)
    assert phi == pytest.approx(s.phi)
    np.testing.assert_allclose(A, s.A)
    np.testing.assert_allclose(grad, s.grad_phi)
    np.testing.assert_allclose(dA, s.dA_dq)
    np.testing.assert_allclose(dAt, s.dA_dt)
    arr = eval_potentials_many(f, np.vstack([Q, Q]), np.array([T, T]))
    np.testing.assert_allclose(arr.A[1], s.A)


def test_physical_fields():
    s = eval_potentials(FieldConfig.uniform_electric((0.3, -0.1, 0.2)), Q, T)
    np.testing.assert_allclose(-s.grad_phi - s.dA_dt, [0.3, -0.1, 0.2])
    s = eval_potentials(FieldConfig.uniform_magnetic((0.2, 0.5, -0.4)), Q, T)
    J = s.dA_dq
    curl = np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])
    np.testing.assert_allclose(curl, [0.2, 0.5, -0.4], atol=1e-15)


def test_covariant_sign():
    f = FieldConfig.coulomb(0.5, 0.1)
    A = covariant_potential(f, Q, T).as_array()
    assert A[0] == pytest.approx(-eval_potentials(f, Q, T).phi)


def test_validation():
    with pytest.raises(DomainError):
        FieldConfig("dipole")
    with pytest.raises(DomainError):
        FieldConfig.plane_wave((1.0, 0, 0), (1.0, 0, 0))
    with pytest.raises(DomainError):
        eval_potentials(FieldConfig.coulomb(1.0), (0, 0, 0), 0.0)
    with pytest.raises(DomainError):
        eval_potentials(FieldConfig.zero(), (np.nan, 0, 0), 0.0)
    for f in FIELDS:
        assert FieldConfig.from_dict(f.to_dict()) == f
    assert FIELDS[1] != FIELDS[2]
