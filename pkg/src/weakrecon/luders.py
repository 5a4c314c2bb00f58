"""Lüders state updates and the selective phase rotation.

All maps return freshly validated :class:`DensityOperator` values. Results are
re-symmetrized and renormalized to unit trace before validation so rounding
cannot trip the invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .errors import NotOrthogonal, NullOutcome
from .qcore import DensityOperator, Projector, check_dims, dagger


def _settle(m: np.ndarray) -> DensityOperator:
    m = (m + dagger(m)) / 2
    return DensityOperator(m / np.trace(m).real)


def wrap_phase(phi: float) -> float:
    """Map ``phi`` into ``(-pi, pi]``."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True, eq=False)
class PhaseRotation:
    """``U = I + (exp(i phi) - 1) P``: a phase ``phi`` on the range of ``P`` only."""

    projector: Projector
    phi: float
    unitary: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        phi = wrap_phase(float(self.phi))
        p = self.projector.mat
        u = np.eye(p.shape[0], dtype=np.complex128) + (np.exp(1j * phi) - 1) * p
        err = float(np.max(np.abs(u @ dagger(u) - np.eye(p.shape[0]))))
        if err > TOL.unitary:
            raise ValueError(f"rotation is not unitary (error {err:.3g})")
        u.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "unitary", u)


def selection_probability(rho: DensityOperator, P: Projector) -> float:
    check_dims(rho, P)
    return float(np.trace(rho.mat @ P.mat).real)


def selective_update(rho: DensityOperator, P: Projector) -> tuple[DensityOperator, float]:
    """Condition ``rho`` on the 'yes' outcome of ``P``.

    Returns the post-measurement state ``P rho P / Tr(rho P)`` and the
    outcome probability ``Tr(rho P)``.

    Raises
    ------
    NullOutcome
        If ``Tr(rho P) <= 1e-12``.
    """
    prob = selection_probability(rho, P)
    if not prob > TOL.null_outcome:
        raise NullOutcome(f"Tr(rho P) = {prob:.3g} <= {TOL.null_outcome:g}")
    post = P.mat @ rho.mat @ P.mat
    return _settle(post), min(prob, 1.0)


def nonselective_update(rho: DensityOperator, P: Projector) -> DensityOperator:
    """``P rho P + (I - P) rho (I - P)``: the outcome is measured, then forgotten."""
    check_dims(rho, P)
    q = np.eye(P.dim) - P.mat
    return _settle(P.mat @ rho.mat @ P.mat + q @ rho.mat @ q)


def phase_rotate(rho: DensityOperator, P: Projector, phi: float) -> DensityOperator:
    check_dims(rho, P)
    u = PhaseRotation(P, phi).unitary
    return _settle(u @ rho.mat @ dagger(u))


def rotation_action_check(P_a: Projector, P_b: Projector, phi: float) -> bool:
    """Check ``R P_a = exp(i phi) P_a`` and ``R P_b = P_b`` for orthogonal ``P_b``."""
    check_dims(P_a, P_b)
    overlap = float(np.max(np.abs(P_a.mat @ P_b.mat)))
    if overlap > TOL.orthogonal:
        raise NotOrthogonal(f"max|P_a P_b| = {overlap:.3g} > {TOL.orthogonal:g}")
    rot = PhaseRotation(P_a, phi)
    u = rot.unitary
    on_a = np.max(np.abs(u @ P_a.mat - np.exp(1j * rot.phi) * P_a.mat))
    on_b = np.max(np.abs(u @ P_b.mat - P_b.mat))
    return bool(on_a <= TOL.rotation_identity and on_b <= TOL.rotation_identity)
