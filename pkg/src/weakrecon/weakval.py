"""Weak values: the direct ratio and its reconstruction from projector-first data.

``weak_value_direct`` evaluates ``Tr(rho P B) / Tr(rho P)`` and serves as the
oracle. The ``reconstruct_*`` functions never form that numerator; they only
combine expectation values taken on the Lüders-updated and phase-rotated
states, which is what an experiment would actually measure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .errors import DegeneratePhase, IncompleteBasis, NotOrthogonal, NullOutcome
from .luders import nonselective_update, phase_rotate, selective_update
from .qcore import (
    DensityOperator,
    Observable,
    Projector,
    check_dims,
    expectation,
    trace_product,
)


@dataclass(frozen=True)
class WeakValue:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"weak value must be finite, got {self.re} + {self.im}i")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class ReconstructionReport:
    direct: WeakValue
    re_reconstructed: float
    im_reconstructed: float
    disturbance: float
    selection_probability: float
    eigen_range: tuple[float, float]
    nonclassical_re: bool
    nonclassical_im: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eigen_range"] = list(self.eigen_range)
        return d


def weak_value_direct(rho: DensityOperator, P: Projector, B: Observable) -> WeakValue:
    check_dims(rho, P, B)
    denom = trace_product(rho.mat, P.mat).real
    if not denom > TOL.null_outcome:
        raise NullOutcome(f"Tr(rho P) = {denom:.3g} <= {TOL.null_outcome:g}")
    w = trace_product(rho.mat, P.mat, B.mat) / denom
    return WeakValue(w.real, w.imag)


def disturbance(rho: DensityOperator, P: Projector, B: Observable) -> float:
    """Shift of ``<B>`` caused by a nonselective measurement of ``P``."""
    check_dims(rho, P, B)
    return expectation(rho, B) - expectation(nonselective_update(rho, P), B)


def reconstruct_re(rho: DensityOperator, P: Projector, B: Observable) -> float:
    check_dims(rho, P, B)
    selected, prob = selective_update(rho, P)
    return expectation(selected, B) + disturbance(rho, P, B) / (2 * prob)


def reconstruct_im(rho: DensityOperator, P: Projector, B: Observable) -> float:
    check_dims(rho, P, B)
    _, prob = selective_update(rho, P)
    rotated = expectation(phase_rotate(rho, P, math.pi / 2), B)
    forgotten = expectation(nonselective_update(rho, P), B)
    return (rotated - forgotten) / (2 * prob)


def check_phase(phi: float) -> None:
    gap = min(abs(phi), abs(phi - math.pi), abs(phi + math.pi))
    if not gap > TOL.degenerate_phase:
        raise DegeneratePhase(
            f"phi = {phi!r} is within {TOL.degenerate_phase:g} of 0 or +-pi; "
            "the rotated arm carries no imaginary-part information there"
        )


def reconstruct_im_general(
    rho: DensityOperator, P: Projector, B: Observable, phi: float
) -> float:
    """Imaginary part from a rotation by an arbitrary phase ``phi``.

    With ``D(phi) = <B>_rotated(phi) - <B>_nonselective`` and
    ``D0 = <B> - <B>_nonselective`` (the disturbance),

        Im B_w = (D(phi) - cos(phi) D0) / (2 sin(phi) Tr(rho P)).

    Expanding ``Tr(R rho R^dagger B)`` over the blocks of ``P`` and ``I - P``
    gives ``D(phi) = 2 Re(exp(i phi) X)`` and ``D0 = 2 Re X`` with
    ``X = Tr(P rho (I - P) B)``, while ``Im Tr(rho P B) = -Im X``; eliminating
    ``Re X`` yields the expression above. At ``phi = pi/2`` it is the
    standard quarter-turn formula.

    Raises
    ------
    DegeneratePhase
        If ``phi`` is within 1e-6 of 0 or +-pi.
    """
    check_phase(phi)
    check_dims(rho, P, B)
    _, prob = selective_update(rho, P)
    forgotten = expectation(nonselective_update(rho, P), B)
    d_phi = expectation(phase_rotate(rho, P, phi), B) - forgotten
    d_0 = expectation(rho, B) - forgotten
    return (d_phi - math.cos(phi) * d_0) / (2 * math.sin(phi) * prob)


def weak_probabilities(
    rho: DensityOperator, P_a: Projector, basis: Sequence[Projector]
) -> list[WeakValue]:
    """Weak values of each projector in a complete orthogonal family."""
    if not basis:
        raise IncompleteBasis("empty basis")
    d = check_dims(rho, P_a, *basis)
    total = sum(p.mat for p in basis)
    err = float(np.max(np.abs(total - np.eye(d))))
    if err > TOL.basis:
        raise IncompleteBasis(f"basis projectors sum to identity only within {err:.3g}")
    for i, p in enumerate(basis):
        for q in basis[i + 1 :]:
            overlap = float(np.max(np.abs(p.mat @ q.mat)))
            if overlap > TOL.basis:
                raise NotOrthogonal(f"basis projectors overlap: {overlap:.3g}")
    return [weak_value_direct(rho, P_a, Observable(p.mat)) for p in basis]


def analyze(rho: DensityOperator, P: Projector, B: Observable) -> ReconstructionReport:
    direct = weak_value_direct(rho, P, B)
    re = reconstruct_re(rho, P, B)
    im = reconstruct_im(rho, P, B)
    _, prob = selective_update(rho, P)
    lo, hi = B.eigen_range
    tol = TOL.nonclassical
    return ReconstructionReport(
        direct=direct,
        re_reconstructed=re,
        im_reconstructed=im,
        disturbance=disturbance(rho, P, B),
        selection_probability=prob,
        eigen_range=(lo, hi),
        nonclassical_re=not (lo - tol <= re <= hi + tol),
        nonclassical_im=abs(im) > tol,
    )
