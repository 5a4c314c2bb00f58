"""Dense complex matrices at small dimension and the validated operator types.

Matrices are plain ``numpy`` ``complex128`` arrays marked read-only. The three
operator wrappers (:class:`DensityOperator`, :class:`Projector`,
:class:`Observable`) validate eagerly, so an invalid matrix never reaches the
measurement layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import MAX_DIM, TOL
from .errors import DimensionMismatch, NotHermitian, ValidationError, ZeroVector

# (invariant name, human-readable detail)
Violation = tuple[str, str]


def as_cmatrix(m) -> np.ndarray:
    """Return a read-only square ``complex128`` copy of ``m``."""
    a = np.array(m, dtype=np.complex128, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    if not 1 <= d <= MAX_DIM:
        raise DimensionMismatch(f"dimension {d} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries", ["finite"])
    a.setflags(write=False)
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def hermitian_violations(m: np.ndarray) -> list[Violation]:
    err = float(np.max(np.abs(m - dagger(m))))
    if err > TOL.hermitian:
        return [("hermitian", f"max|M - M^dagger| = {err:.3g} > {TOL.hermitian:g}")]
    return []


def density_violations(m: np.ndarray) -> list[Violation]:
    """Every DensityOperator invariant that ``m`` breaks (empty list if valid)."""
    out = hermitian_violations(m)
    tr = np.trace(m)
    if abs(tr - 1.0) > TOL.trace:
        out.append(("unit trace", f"|Tr(rho) - 1| = {abs(tr - 1.0):.3g} > {TOL.trace:g}"))
    herm = (m + dagger(m)) / 2
    lam_min = float(np.linalg.eigvalsh(herm)[0])
    if lam_min < -TOL.psd:
        out.append(("positive semidefinite", f"smallest eigenvalue {lam_min:.3g} < -{TOL.psd:g}"))
    return out


def projector_violations(m: np.ndarray) -> list[Violation]:
    out = hermitian_violations(m)
    err = float(np.max(np.abs(m @ m - m)))
    if err > TOL.idempotent:
        out.append(("idempotent", f"max|P P - P| = {err:.3g} > {TOL.idempotent:g}"))
    tr = np.trace(m).real
    if abs(tr - round(tr)) > TOL.rank or round(tr) < 1:
        out.append(("rank", f"Tr(P) = {tr:.12g} is not a positive integer"))
    return out


def _raise_first(violations: list[Violation], what: str) -> None:
    if not violations:
        return
    names = [v[0] for v in violations]
    msg = f"invalid {what}: " + "; ".join(f"{n}: {d}" for n, d in violations)
    if names == ["hermitian"]:
        raise NotHermitian(msg)
    raise ValidationError(msg, names)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    mat: np.ndarray

    def __post_init__(self):
        m = as_cmatrix(self.mat)
        _raise_first(density_violations(m), "density operator")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class Projector:
    mat: np.ndarray

    def __post_init__(self):
        m = as_cmatrix(self.mat)
        _raise_first(projector_violations(m), "projector")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.mat).real))

    def complement(self) -> Projector:
        """``I - P``; raises if ``P`` is the identity (rank-0 complement)."""
        return Projector(np.eye(self.dim) - self.mat)


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian matrix with its merged spectral decomposition.

    ``spectrum`` holds ``(eigenvalue, eigenprojector)`` pairs in ascending
    eigenvalue order, numerically degenerate levels merged.
    """

    mat: np.ndarray
    spectrum: tuple[tuple[float, Projector], ...] = field(init=False, repr=False)

    def __post_init__(self):
        m = as_cmatrix(self.mat)
        object.__setattr__(self, "mat", m)
        spectrum = tuple(eigh(m))
        total = sum(p.mat for _, p in spectrum)
        recon = sum(lam * p.mat for lam, p in spectrum)
        err = max(
            float(np.max(np.abs(total - np.eye(m.shape[0])))),
            float(np.max(np.abs(recon - m))),
        )
        if err > TOL.spectral:
            raise ValidationError(f"spectral decomposition error {err:.3g}", ["spectral"])
        object.__setattr__(self, "spectrum", spectrum)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.spectrum])

    @property
    def eigen_range(self) -> tuple[float, float]:
        return self.spectrum[0][0], self.spectrum[-1][0]


def eigh(m) -> list[tuple[float, Projector]]:
    """Hermitian eigendecomposition with degenerate levels merged.

    Eigenvalues closer than ``1e-9 * (1 + max|eigenvalue|)`` to their
    neighbour are grouped; each group gets its mean eigenvalue and a single
    eigenprojector onto the combined eigenspace.

    Raises
    ------
    NotHermitian
        If ``m`` is not Hermitian within tolerance.
    """
    m = as_cmatrix(m)
    v = hermitian_violations(m)
    if v:
        raise NotHermitian(f"cannot diagonalize: {v[0][1]}")
    herm = (m + dagger(m)) / 2
    lam, vecs = np.linalg.eigh(herm)
    gap = TOL.degeneracy * (1.0 + float(np.max(np.abs(lam))))

    groups: list[list[int]] = [[0]]
    for i in range(1, len(lam)):
        if lam[i] - lam[i - 1] < gap:
            groups[-1].append(i)
        else:
            groups.append([i])

    out = []
    for g in groups:
        vg = vecs[:, g]
        proj = vg @ dagger(vg)
        out.append((float(np.mean(lam[g])), Projector((proj + dagger(proj)) / 2)))
    return out


def _vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128).reshape(-1)
    if not 1 <= a.size <= MAX_DIM:
        raise DimensionMismatch(f"vector length {a.size} outside [1, {MAX_DIM}]")
    norm = np.linalg.norm(a)
    if not norm > TOL.zero_vector:
        raise ZeroVector(f"vector norm {norm:.3g} <= {TOL.zero_vector:g}")
    return a / norm


def density_from_state_vector(v: Sequence[complex] | np.ndarray) -> DensityOperator:
    """Pure state ``v v^dagger / |v|^2``."""
    a = _vector(v)
    return DensityOperator(np.outer(a, a.conj()))


def projector_onto(v: Sequence[complex] | np.ndarray) -> Projector:
    """Rank-one projector onto ``span{v}``."""
    a = _vector(v)
    return Projector(np.outer(a, a.conj()))


def projector_onto_span(vectors: np.ndarray) -> Projector:
    """Projector onto the column span of ``vectors`` (columns assumed independent)."""
    q, _ = np.linalg.qr(np.asarray(vectors, dtype=np.complex128))
    p = q @ dagger(q)
    return Projector((p + dagger(p)) / 2)


def check_dims(*ops) -> int:
    dims = {op.dim for op in ops}
    if len(dims) != 1:
        raise DimensionMismatch(f"operator dimensions differ: {sorted(dims)}")
    return dims.pop()


def trace_product(*mats: np.ndarray) -> complex:
    """``Tr(M1 M2 ... Mk)`` as a complex number."""
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    return complex(np.trace(prod))


def expectation(rho: DensityOperator, B: Observable) -> float:
    """``Re Tr(rho B)``; the imaginary part must vanish to 1e-10."""
    check_dims(rho, B)
    val = trace_product(rho.mat, B.mat)
    if abs(val.imag) > TOL.imag_expectation:
        raise ValidationError(
            f"Tr(rho B) has imaginary part {val.imag:.3g}", ["hermitian"]
        )
    return val.real
