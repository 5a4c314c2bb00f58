import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakrecon.errors import DimensionMismatch, NotOrthogonal, NullOutcome
from weakrecon.luders import (
    PhaseRotation,
    nonselective_update,
    phase_rotate,
    rotation_action_check,
    selective_update,
)
from weakrecon.qcore import DensityOperator, Projector, density_from_state_vector, projector_onto
from weakrecon.randgen import random_density, random_projector


def _triple(seed, d):
    g = np.random.default_rng(seed)
    rho = random_density(d, g, pure=bool(g.integers(2)))
    return rho, random_projector(d, int(g.integers(1, d)), g)


def test_selective_identity_projector(rng):
    rho = random_density(3, rng)
    post, prob = selective_update(rho, Projector(np.eye(3)))
    np.testing.assert_allclose(post.mat, rho.mat, atol=1e-14)
    assert prob == pytest.approx(1.0, abs=1e-14)


def test_selective_maximally_mixed():
    post, prob = selective_update(DensityOperator(np.eye(2) / 2), Projector(np.diag([1.0, 0.0])))
    np.testing.assert_allclose(post.mat, np.diag([1, 0]))
    assert prob == 0.5


def test_selective_rank_one_forgets_preparation(rng):
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    P = projector_onto(a)
    for _ in range(3):
        post, _ = selective_update(random_density(3, rng), P)
        np.testing.assert_allclose(post.mat, P.mat, atol=1e-14)


def test_selective_null_outcome():
    with pytest.raises(NullOutcome):
        selective_update(DensityOperator(np.diag([1.0, 0.0])), Projector(np.diag([0.0, 1.0])))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        nonselective_update(DensityOperator(np.eye(2) / 2), Projector(np.eye(3)))


def test_nonselective_examples(rng):
    rho = random_density(3, rng)
    np.testing.assert_allclose(nonselective_update(rho, Projector(np.eye(3))).mat, rho.mat, atol=1e-15)
    plus = density_from_state_vector([1, 1])
    out = nonselective_update(plus, Projector(np.diag([1.0, 0.0])))
    np.testing.assert_allclose(out.mat, np.eye(2) / 2, atol=1e-15)
    diag = DensityOperator(np.diag([0.2, 0.5, 0.3]))
    out = nonselective_update(diag, Projector(np.diag([0.0, 1.0, 1.0])))
    np.testing.assert_allclose(out.mat, diag.mat, atol=1e-12)


def test_phase_rotate_examples(rng):
    rho = random_density(3, rng)
    P = random_projector(3, 1, rng)
    np.testing.assert_allclose(phase_rotate(rho, P, 0.0).mat, rho.mat, atol=1e-15)

    psi = np.array([0.6, 0.8j])
    flipped = phase_rotate(density_from_state_vector(psi), projector_onto([1, 0]), math.pi)
    expected = density_from_state_vector([-0.6, 0.8j])
    np.testing.assert_allclose(flipped.mat, expected.mat, atol=1e-15)

    # R = diag(i, 1): (R rho R^dagger)_01 = i * 1/2 * 1
    out = phase_rotate(density_from_state_vector([1, 1]), Projector(np.diag([1.0, 0.0])), math.pi / 2)
    np.testing.assert_allclose(out.mat, [[0.5, 0.5j], [-0.5j, 0.5]], atol=1e-15)


def test_phase_rotation_type():
    P = projector_onto([1, 0])
    rot = PhaseRotation(P, 3 * math.pi)
    assert rot.phi == pytest.approx(math.pi)
    assert PhaseRotation(P, -math.pi).phi == math.pi
    np.testing.assert_allclose(rot.unitary, np.diag([-1, 1]), atol=1e-15)


def test_rotation_action_examples(rng):
    assert rotation_action_check(Projector(np.diag([1.0, 0, 0])), Projector(np.diag([0, 1.0, 0])), 0.7)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    assert rotation_action_check(projector_onto(q[:, 0]), projector_onto(q[:, 2]), 1.234)
    P = projector_onto([1, 1])
    with pytest.raises(NotOrthogonal):
        rotation_action_check(P, P, 1.0)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 8))
def test_mixture_identity(seed, d):
    rho, P = _triple(seed, d)
    lhs = nonselective_update(rho, P).mat
    rhs = (rho.mat + phase_rotate(rho, P, math.pi).mat) / 2
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 8))
def test_decomposition_into_branches(seed, d):
    rho, P = _triple(seed, d)
    yes, p = selective_update(rho, P)
    no, q = selective_update(rho, P.complement())
    mix = p * yes.mat + q * no.mat
    assert np.max(np.abs(nonselective_update(rho, P).mat - mix)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 8))
def test_nonselective_idempotent_and_trace_preserving(seed, d):
    rho, P = _triple(seed, d)
    once = nonselective_update(rho, P)
    twice = nonselective_update(once, P)
    assert np.max(np.abs(once.mat - twice.mat)) <= 1e-12
    assert abs(np.trace(once.mat) - 1) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    d=st.integers(2, 8),
    phi1=st.floats(-10, 10),
    phi2=st.floats(-10, 10),
)
def test_rotations_compose(seed, d, phi1, phi2):
    rho, P = _triple(seed, d)
    two_step = phase_rotate(phase_rotate(rho, P, phi1), P, phi2)
    one_step = phase_rotate(rho, P, phi1 + phi2)
    assert np.max(np.abs(two_step.mat - one_step.mat)) <= 1e-12
    lam0 = np.linalg.eigvalsh(rho.mat)
    assert np.max(np.abs(np.linalg.eigvalsh(one_step.mat) - lam0)) <= 1e-12
