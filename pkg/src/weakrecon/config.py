"""Numerical tolerances shared by every layer.

Tests may construct a tighter :class:`Tolerances`, but the defaults below are
what the validators use.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_DIM = 64


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-10
    idempotent: float = 1e-10
    rank: float = 1e-8
    spectral: float = 1e-9  # eigenprojector completeness / reconstruction
    degeneracy: float = 1e-9  # relative, scaled by 1 + max|eigenvalue|
    zero_vector: float = 1e-12
    null_outcome: float = 1e-12
    unitary: float = 1e-10
    orthogonal: float = 1e-10
    rotation_identity: float = 1e-12
    imag_expectation: float = 1e-10
    basis: float = 1e-9
    nonclassical: float = 1e-9
    degenerate_phase: float = 1e-6
    spectrum_sum: float = 1e-9


TOL = Tolerances()
