import numpy as np
import pytest

from phase_space.operator_cf import GaussianOperatorCF
from phase_space.sqrt_map import (
    det_phi,
    fixed_point_residual,
    phi_closed_form,
    phi_of,
    phi_scalar,
    sqrt_cf,
    trace_sqrt,
)
from phase_space.states import one_mode_matrix
from phase_space.symplectic import random_symplectic
from utils.exceptions import InvalidStateError


@pytest.mark.parametrize("d,expected", [(1.0, 1.0), (3.0, 3 + np.sqrt(8)), (5.0, 5 + np.sqrt(24))])
def test_phi_scalar(d, expected):
    assert np.isclose(phi_scalar(d), expected, rtol=1e-14)


def test_phi_of_thermal():
    assert np.allclose(phi_of(3 * np.eye(2)), (3 + np.sqrt(8)) * np.eye(2), atol=1e-12)


def test_phi_of_pure_state_is_identity_map():
    A = one_mode_matrix(1.0, 2.3, 0.8)
    assert np.allclose(phi_of(A), A, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phi_fixed_point(random_state, n):
    for _ in range(10):
        A = random_state(n)
        phi = phi_of(A)
        assert fixed_point_residual(A, phi) <= 1e-9 * max(1.0, np.max(np.abs(A)))
        assert np.linalg.eigvalsh(phi)[0] > 0


@pytest.mark.parametrize("n", [1, 2])
def test_phi_closed_form_agrees(random_state, n):
    A = random_state(n)
    assert np.allclose(phi_closed_form(A), phi_of(A), rtol=1e-7, atol=1e-8)


@pytest.mark.parametrize("n", [1, 2])
def test_phi_covariant_under_symplectic_maps(random_state, rng, n):
    A = random_state(n)
    S = random_symplectic(n, rng)
    assert np.allclose(phi_of(S.T @ A @ S), S.T @ phi_of(A) @ S, rtol=1e-8, atol=1e-8)


def test_det_phi_matches_matrix_determinant(random_state):
    A = random_state(2)
    assert np.isclose(det_phi(A), np.linalg.det(phi_of(A)), rtol=1e-9)


@pytest.mark.parametrize(
    "A,expected",
    [
        (np.eye(2), 1.0),
        (3 * np.eye(2), 1 + np.sqrt(2)),
        (np.diag([4.0, 0.25]), 1.0),
    ],
)
def test_trace_sqrt_examples(A, expected):
    assert np.isclose(trace_sqrt(A), expected, rtol=1e-12)


def test_sqrt_cf_squares_to_state(random_state):
    for n in (1, 2):
        A = random_state(n)
        root = sqrt_cf(A)
        square = root.compose(root)
        assert np.isclose(square.real_scale(), 1.0, rtol=1e-9)
        assert np.allclose(square.real_form(), A, atol=1e-9)


def test_sqrt_cf_trace():
    root = sqrt_cf(3 * np.eye(2))
    assert np.isclose(root.trace(), 1 + np.sqrt(2), rtol=1e-12)


def test_density_cf_has_unit_trace(random_state):
    assert np.isclose(GaussianOperatorCF.density(random_state(2)).trace(), 1.0)


def test_invalid_state_has_no_root():
    with pytest.raises(InvalidStateError):
        phi_of(np.diag([2.0, 0.4]))
    with pytest.raises(InvalidStateError):
        trace_sqrt(np.diag([2.0, 0.4]))
