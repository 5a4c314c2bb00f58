"""Random valid inputs for property tests and the ``random`` builtin scenario."""

from __future__ import annotations

import numpy as np

from .qcore import DensityOperator, Observable, Projector, projector_onto_span


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_density(d: int, rng: np.random.Generator, pure: bool = False) -> DensityOperator:
    """Wishart-style ``G G^dagger / Tr``; ``pure`` uses a single column."""
    g = _ginibre(rng, d, 1 if pure else d)
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)


def random_projector(d: int, rank: int, rng: np.random.Generator) -> Projector:
    return projector_onto_span(_ginibre(rng, d, rank))


def random_observable(d: int, rng: np.random.Generator) -> Observable:
    h = _ginibre(rng, d, d)
    return Observable((h + h.conj().T) / 2)


def random_triple(
    d: int, rng: np.random.Generator, pure: bool | None = None, rank: int | None = None
) -> tuple[DensityOperator, Projector, Observable]:
    """One ``(rho, P, B)`` with ``1 <= rank(P) <= d - 1`` (``rank=1`` when ``d == 1``)."""
    if pure is None:
        pure = bool(rng.integers(2))
    if rank is None:
        rank = int(rng.integers(1, d)) if d > 1 else 1
    return random_density(d, rng, pure), random_projector(d, rank, rng), random_observable(d, rng)
