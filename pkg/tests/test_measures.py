import numpy as np
import pytest

from distances.measures import (
    BoundKind,
    chi_one_mode,
    chi_pure_multimode,
    delta_bounds,
    fidelity,
    fidelity_analytic_family,
    fidelity_one_mode,
    fidelity_one_mode_params,
    holevo_overlap,
    measure_report,
    ordering_gap,
    overlap_analytic_family,
    overlap_one_mode,
    phi_measure_one_mode,
    squeeze_mismatch,
)
from phase_space.states import OneModeParams, direct_sum, one_mode_matrix, params_to_cov
from phase_space.symplectic import random_symplectic
from utils.exceptions import InvalidStateError, MalformedInputError


def test_fidelity_vacuum_thermal():
    assert np.isclose(fidelity(np.eye(2), 3 * np.eye(2)), 0.5, rtol=1e-10)
    assert np.isclose(fidelity_one_mode(np.eye(2), 3 * np.eye(2)), 0.5, rtol=1e-12)


def test_holevo_vacuum_thermal():
    assert np.isclose(holevo_overlap(np.eye(2), 3 * np.eye(2)), 1 / np.sqrt(2), rtol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fidelity_with_itself(random_state, n):
    A = random_state(n)
    assert np.isclose(fidelity(A, A), 1.0, atol=1e-9)
    assert np.isclose(holevo_overlap(A, A), 1.0, atol=1e-9)


def test_fidelity_general_matches_one_mode(random_state):
    for _ in range(20):
        A1, A2 = random_state(1), random_state(1)
        assert np.isclose(fidelity(A1, A2), fidelity_one_mode(A1, A2), rtol=1e-8)


def test_fidelity_symmetric(random_state):
    A1, A2 = random_state(2), random_state(2)
    assert np.isclose(fidelity(A1, A2), fidelity(A2, A1), rtol=1e-8)
    assert np.isclose(holevo_overlap(A1, A2), holevo_overlap(A2, A1), rtol=1e-10)


def test_fidelity_multiplicative_on_products(random_state):
    A1, A2, B1, B2 = (random_state(1) for _ in range(4))
    joint = fidelity(direct_sum(A1, B1), direct_sum(A2, B2))
    assert np.isclose(joint, fidelity(A1, A2) * fidelity(B1, B2), rtol=1e-8)


@pytest.mark.parametrize("n", [1, 2])
def test_fidelity_invariant_under_symplectic_maps(random_state, rng, n):
    A1, A2 = random_state(n), random_state(n)
    S = random_symplectic(n, rng)
    moved = fidelity(S.T @ A1 @ S, S.T @ A2 @ S)
    assert np.isclose(moved, fidelity(A1, A2), rtol=0, atol=1e-9)
    assert np.isclose(holevo_overlap(S.T @ A1 @ S, S.T @ A2 @ S), holevo_overlap(A1, A2), rtol=0, atol=1e-9)


def test_fidelity_params_form(random_params):
    for _ in range(20):
        p1, p2 = random_params(), random_params()
        expected = fidelity_one_mode(params_to_cov(p1), params_to_cov(p2))
        assert np.isclose(fidelity_one_mode_params(p1, p2), expected, rtol=1e-9)


def test_overlap_one_mode_matches_general(random_params):
    for _ in range(20):
        p1, p2 = random_params(), random_params()
        expected = holevo_overlap(params_to_cov(p1), params_to_cov(p2))
        assert np.isclose(overlap_one_mode(p1, p2), expected, rtol=1e-8)


def test_ordering_gap_non_negative(random_state):
    for n in (1, 2):
        for _ in range(10):
            assert ordering_gap(random_state(n), random_state(n)) >= -1e-10


def test_fidelity_dimension_mismatch():
    with pytest.raises(MalformedInputError):
        fidelity(np.eye(2), np.eye(4))


def test_fidelity_rejects_invalid_state():
    with pytest.raises(InvalidStateError):
        fidelity(np.eye(2), np.diag([2.0, 0.4]))


def test_squeeze_mismatch_equal_squeezes():
    assert np.isclose(squeeze_mismatch(0.0, 1.7, 1.7), 4.0)


@pytest.mark.parametrize(
    "params,expected",
    [
        (OneModeParams(1.0, 2.0), 0.8),
        (OneModeParams(1.0, 1.0), 1.0),
        (OneModeParams(4.0, 2.0), 1.0),
        (OneModeParams(2.0, 1.0), 1.0),
    ],
)
def test_chi_one_mode_examples(params, expected):
    assert np.isclose(chi_one_mode(params), expected, rtol=1e-12)


def test_chi_pure_multimode():
    assert np.isclose(chi_pure_multimode([2.0]), 0.8)
    assert np.isclose(chi_pure_multimode([2.0, 2.0]), 0.64)
    with pytest.raises(MalformedInputError):
        chi_pure_multimode([])


def test_phi_measure_squeezed_vacuum():
    assert np.isclose(phi_measure_one_mode(OneModeParams(1.0, 2.0)), 0.8, rtol=1e-12)


def test_phi_measure_is_fidelity_to_candidate(random_params):
    for _ in range(20):
        params = random_params(max_thermal=2.0, max_squeeze=3.0)
        if params.d >= params.m ** 2:
            continue
        assert np.isclose(phi_measure_one_mode(params), fidelity_analytic_family(params), rtol=1e-9)


def test_overlap_analytic_family_squeezed_vacuum():
    # кандидат для d = 1 - вакуум
    assert np.isclose(overlap_analytic_family(OneModeParams(1.0, 2.0)), 0.8, rtol=1e-12)


@pytest.mark.parametrize(
    "value,kind,expected",
    [
        (1.0, BoundKind.FIDELITY, (0.0, 0.0)),
        (0.64, "fidelity", (0.4, 1.2)),
        (0.8, BoundKind.OVERLAP, (0.4, 1.2)),
    ],
)
def test_delta_bounds(value, kind, expected):
    assert np.allclose(delta_bounds(value, kind), expected, atol=1e-12)


@pytest.mark.parametrize("value,kind", [(0.0, "fidelity"), (1.5, "overlap"), (0.5, "trace")])
def test_delta_bounds_rejects(value, kind):
    with pytest.raises(MalformedInputError):
        delta_bounds(value, kind)


def test_measure_report_single_state(squeezed_vacuum):
    report = measure_report(squeezed_vacuum).to_dict()
    assert list(report) == ["chi", "phi", "delta_bounds_fidelity", "delta_bounds_overlap"]
    assert np.isclose(report["chi"], 0.8)
    assert np.isclose(report["phi"], 0.8)


def test_measure_report_vacuum_has_zero_bounds():
    report = measure_report(np.eye(2)).to_dict()
    assert report["chi"] == 1.0 and report["phi"] == 1.0
    assert report["delta_bounds_overlap"] == [0.0, 0.0]


def test_measure_report_pair():
    report = measure_report(np.eye(2), 3 * np.eye(2)).to_dict()
    assert np.isclose(report["fidelity"], 0.5)
    assert np.isclose(report["holevo"], 1 / np.sqrt(2))
    assert "chi" not in report


def test_measure_report_which_selects():
    report = measure_report(np.eye(2), 3 * np.eye(2), which="holevo").to_dict()
    assert list(report) == ["holevo", "delta_bounds_overlap"]


@pytest.mark.parametrize(
    "second,which",
    [
        (None, "fidelity"),
        (None, "bogus"),
        (3 * np.eye(2), "chi"),
    ],
)
def test_measure_report_rejects(second, which):
    with pytest.raises(MalformedInputError):
        measure_report(np.eye(2), second, which)


def test_measure_report_multimode_single_state():
    with pytest.raises(MalformedInputError):
        measure_report(np.eye(4))


def test_measure_report_invalid_state():
    with pytest.raises(InvalidStateError):
        measure_report(one_mode_matrix(1.0, 2.0, 0.0) * 0.5)
