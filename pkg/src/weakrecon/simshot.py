"""Shot-based simulation of the three-arm experiment.

Each arm is a sub-ensemble of identically prepared systems:

* ``BASELINE`` measures ``B`` directly;
* ``PROJECT_THEN_MEASURE`` measures ``P`` (recording yes/no), then ``B``;
* ``ROTATE_THEN_MEASURE`` applies the selective phase rotation, then ``B``.

``B`` is measured projectively on its merged spectrum, so every shot yields an
eigenvalue. Shots are tallied as outcome counts per eigenvalue, which makes
pooling across partitions an exact integer sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import TOL
from .errors import BadParameter, BadSpectrum, DimensionMismatch, EmptySelection, NullOutcome
from .luders import phase_rotate, selection_probability, selective_update
from .qcore import DensityOperator, Observable, Projector, check_dims
from .weakval import ReconstructionReport, analyze, check_phase

_MASK64 = (1 << 64) - 1


class Arm(str, Enum):
    BASELINE = "BASELINE"
    PROJECT_THEN_MEASURE = "PROJECT_THEN_MEASURE"
    ROTATE_THEN_MEASURE = "ROTATE_THEN_MEASURE"

    @property
    def index(self) -> int:
        return list(Arm).index(self)


@dataclass(frozen=True, eq=False)
class Scenario:
    rho: DensityOperator
    projector: Projector
    observable: Observable
    phi: float = math.pi / 2
    label: str = ""

    def __post_init__(self):
        try:
            check_dims(self.rho, self.projector, self.observable)
        except DimensionMismatch as exc:
            raise DimensionMismatch(f"scenario '{self.label}': {exc}") from None
        prob = selection_probability(self.rho, self.projector)
        if not prob > TOL.null_outcome:
            raise NullOutcome(
                f"scenario '{self.label}': Tr(rho P) = {prob:.3g} <= {TOL.null_outcome:g}"
            )

    @property
    def dim(self) -> int:
        return self.rho.dim

    def with_phi(self, phi: float) -> Scenario:
        return Scenario(self.rho, self.projector, self.observable, phi, self.label)


@dataclass(frozen=True)
class SubsetEstimate:
    mean: float
    std_error: float
    shots: int


@dataclass(frozen=True)
class ArmEstimate:
    """Sample mean of ``B`` outcomes in one arm.

    For ``PROJECT_THEN_MEASURE`` the shots are also split by the ``P``
    outcome: ``yes`` estimates the selected-state mean, ``no`` the rejected
    one, and ``yes_fraction`` the selection probability.
    """

    arm: Arm
    mean: float
    std_error: float
    shots: int
    yes: SubsetEstimate | None = None
    no: SubsetEstimate | None = None

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not self.std_error >= 0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")

    @property
    def yes_fraction(self) -> float | None:
        return None if self.yes is None else self.yes.shots / self.shots

    def to_dict(self) -> dict:
        d = {
            "arm": self.arm.value,
            "shots": self.shots,
            "mean": self.mean,
            "std_error": self.std_error,
        }
        if self.yes is not None:
            d["yes_fraction"] = self.yes_fraction
            d["yes"] = vars(self.yes).copy()
            d["no"] = vars(self.no).copy()
        return d


@dataclass(frozen=True)
class SampledReconstruction:
    re_hat: float
    re_se: float
    im_hat: float
    im_se: float
    selection_prob_hat: float
    selection_prob_se: float
    per_arm: list[ArmEstimate]
    exact: ReconstructionReport
    phi: float
    shots_per_arm: int
    seed: int
    partitions: int = 1

    def to_dict(self) -> dict:
        return {
            "re_hat": self.re_hat,
            "re_se": self.re_se,
            "im_hat": self.im_hat,
            "im_se": self.im_se,
            "selection_prob_hat": self.selection_prob_hat,
            "selection_prob_se": self.selection_prob_se,
            "phi": self.phi,
            "shots_per_arm": self.shots_per_arm,
            "seed": self.seed,
            "partitions": self.partitions,
            "per_arm": [a.to_dict() for a in self.per_arm],
        }


def derive_substream_seed(master_seed: int, arm_index: int, partition_index: int) -> int:
    """64-bit seed for one (arm, partition) substream of a master seed."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed) & _MASK64,
        spawn_key=(int(arm_index), int(partition_index)),
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def born_probabilities(rho: DensityOperator, B: Observable) -> np.ndarray:
    """Outcome probabilities ``Tr(rho Pi_i)`` over ``B``'s merged spectrum."""
    check_dims(rho, B)
    p = np.array([np.trace(rho.mat @ proj.mat).real for _, proj in B.spectrum])
    total = p.sum()
    if abs(total - 1.0) > TOL.spectrum_sum:
        raise BadSpectrum(f"Born probabilities sum to {total!r}")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _clamp_prob(p: float) -> float:
    if p <= TOL.null_outcome:
        return 0.0
    if p >= 1.0 - TOL.null_outcome:
        return 1.0
    return p


def _draw_indices(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1)


def sample_projector(
    rho: DensityOperator, P: Projector, rng: np.random.Generator
) -> tuple[bool, DensityOperator]:
    """One shot of the yes/no measurement of ``P``, with the Lüders post-state."""
    p = _clamp_prob(selection_probability(rho, P))
    yes = bool(rng.random() < p)
    if yes:
        return True, selective_update(rho, P)[0]
    if p == 1.0:
        raise NullOutcome("'no' outcome drawn with zero probability")
    return False, selective_update(rho, P.complement())[0]


def sample_observable(rho: DensityOperator, B: Observable, rng: np.random.Generator) -> float:
    """One projective measurement of ``B``; returns the observed eigenvalue."""
    probs = born_probabilities(rho, B)
    idx = int(_draw_indices(probs, np.array([rng.random()]))[0])
    return B.spectrum[idx][0]


def _counts_for(rho: DensityOperator, B: Observable, u: np.ndarray) -> np.ndarray:
    probs = born_probabilities(rho, B)
    return np.bincount(_draw_indices(probs, u), minlength=len(probs)).astype(np.int64)


def _moments(counts: np.ndarray, values: np.ndarray) -> SubsetEstimate:
    n = int(counts.sum())
    if n == 0:
        return SubsetEstimate(0.0, 0.0, 0)
    weights = counts / n
    mean = float(np.dot(weights, values))
    if n < 2:
        return SubsetEstimate(mean, 0.0, n)
    m2 = float(np.dot(counts, (values - mean) ** 2))
    return SubsetEstimate(mean, math.sqrt(m2 / (n - 1) / n), n)


def _partition_sizes(shots: int, partitions: int) -> list[int]:
    base, extra = divmod(shots, partitions)
    return [base + (1 if k < extra else 0) for k in range(partitions)]


def _tally_arm(
    scenario: Scenario, arm: Arm, shots: int, seed: int, partitions: int
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-index counts ``(yes, no)``; non-projecting arms put all in ``yes``."""
    B = scenario.observable
    k = len(B.spectrum)
    yes_counts = np.zeros(k, dtype=np.int64)
    no_counts = np.zeros(k, dtype=np.int64)

    if arm is Arm.PROJECT_THEN_MEASURE:
        p_yes = _clamp_prob(selection_probability(scenario.rho, scenario.projector))
        yes_state = selective_update(scenario.rho, scenario.projector)[0] if p_yes > 0 else None
        no_state = (
            selective_update(scenario.rho, scenario.projector.complement())[0]
            if p_yes < 1
            else None
        )
    elif arm is Arm.ROTATE_THEN_MEASURE:
        state = phase_rotate(scenario.rho, scenario.projector, scenario.phi)
    else:
        state = scenario.rho

    for part, n in enumerate(_partition_sizes(shots, partitions)):
        rng = make_rng(derive_substream_seed(seed, arm.index, part))
        if arm is Arm.PROJECT_THEN_MEASURE:
            u_p = rng.random(n)
            u_b = rng.random(n)
            yes = u_p < p_yes
            if yes.any():
                yes_counts += _counts_for(yes_state, B, u_b[yes])
            if (~yes).any():
                no_counts += _counts_for(no_state, B, u_b[~yes])
        else:
            yes_counts += _counts_for(state, B, rng.random(n))
    return yes_counts, no_counts


def run_arm(
    scenario: Scenario, arm: Arm | str, shots: int, seed: int, partitions: int = 1
) -> ArmEstimate:
    """Simulate ``shots`` repetitions of one arm.

    Raises
    ------
    EmptySelection
        For ``PROJECT_THEN_MEASURE`` when fewer than two shots answered 'yes'.
    """
    arm = Arm(arm)
    if shots < 2:
        raise BadParameter(f"shots must be >= 2, got {shots}")
    if partitions < 1 or partitions > shots:
        raise BadParameter(f"partitions must be in [1, shots], got {partitions}")
    values = scenario.observable.eigenvalues
    yes_counts, no_counts = _tally_arm(scenario, arm, shots, seed, partitions)
    total = _moments(yes_counts + no_counts, values)

    lo, hi = scenario.observable.eigen_range
    slack = TOL.spectral * (1.0 + max(abs(lo), abs(hi)))
    if not lo - slack <= total.mean <= hi + slack:
        raise AssertionError(f"arm mean {total.mean} outside eigenvalue range [{lo}, {hi}]")

    if arm is not Arm.PROJECT_THEN_MEASURE:
        return ArmEstimate(arm, total.mean, total.std_error, shots)
    yes = _moments(yes_counts, values)
    if yes.shots < 2:
        raise EmptySelection(
            f"only {yes.shots} of {shots} shots selected by the projector; need >= 2"
        )
    return ArmEstimate(arm, total.mean, total.std_error, shots, yes, _moments(no_counts, values))


def _delta_se(grad: list[float], variances: list[float]) -> float:
    return math.sqrt(sum(g * g * v for g, v in zip(grad, variances)))


# Plug-in estimators over the arm statistics x = (m0, q, ms, mn, mr):
# baseline mean, yes-fraction, yes mean, no mean, rotated mean. The projecting
# arm's all-shots mean is q*ms + (1 - q)*mn.


def re_estimate(x: tuple[float, ...]) -> float:
    m0, q, ms, mn, _ = x
    m_all = q * ms + (1 - q) * mn
    return ms + (m0 - m_all) / (2 * q)


def re_gradient(x: tuple[float, ...]) -> list[float]:
    m0, q, _, mn, _ = x
    return [1 / (2 * q), -(m0 - mn) / (2 * q * q), 0.5, -(1 - q) / (2 * q), 0.0]


def im_estimate(x: tuple[float, ...], phi: float) -> float:
    m0, q, ms, mn, mr = x
    c, s = math.cos(phi), math.sin(phi)
    m_all = q * ms + (1 - q) * mn
    return (mr - c * m0 - (1 - c) * m_all) / (2 * s * q)


def im_gradient(x: tuple[float, ...], phi: float) -> list[float]:
    m0, q, ms, mn, mr = x
    c, s = math.cos(phi), math.sin(phi)
    k = 1 - c
    num = mr - c * m0 - k * (q * ms + (1 - q) * mn)
    return [
        -c / (2 * s * q),
        -k * (ms - mn) / (2 * s * q) - num / (2 * s * q * q),
        -k / (2 * s),
        -k * (1 - q) / (2 * s * q),
        1 / (2 * s * q),
    ]


def reconstruct_sampled(
    scenario: Scenario, shots_per_arm: int, seed: int, partitions: int = 1
) -> SampledReconstruction:
    """Estimate the weak value from simulated arm data, with standard errors.

    The projecting arm is split into its 'yes' mean, 'no' mean and
    yes-fraction; together with the baseline and rotated means these are
    asymptotically independent, so the first-order (delta-method) variance is
    a gradient-weighted sum of their variances. The rotated arm has no yes/no
    record, so the selection probability comes from the projecting arm.
    """
    if shots_per_arm < 100:
        raise BadParameter(f"shots_per_arm must be >= 100, got {shots_per_arm}")
    check_phase(scenario.phi)
    exact = analyze(scenario.rho, scenario.projector, scenario.observable)

    base = run_arm(scenario, Arm.BASELINE, shots_per_arm, seed, partitions)
    proj = run_arm(scenario, Arm.PROJECT_THEN_MEASURE, shots_per_arm, seed, partitions)
    rot = run_arm(scenario, Arm.ROTATE_THEN_MEASURE, shots_per_arm, seed, partitions)

    n = proj.shots
    q = proj.yes_fraction
    x = (base.mean, q, proj.yes.mean, proj.no.mean, rot.mean)
    variances = [
        base.std_error**2,
        q * (1 - q) / n,
        proj.yes.std_error**2,
        proj.no.std_error**2,
        rot.std_error**2,
    ]
    return SampledReconstruction(
        re_hat=re_estimate(x),
        re_se=_delta_se(re_gradient(x), variances),
        im_hat=im_estimate(x, scenario.phi),
        im_se=_delta_se(im_gradient(x, scenario.phi), variances),
        selection_prob_hat=q,
        selection_prob_se=math.sqrt(q * (1 - q) / n),
        per_arm=[base, proj, rot],
        exact=exact,
        phi=scenario.phi,
        shots_per_arm=shots_per_arm,
        seed=seed,
        partitions=partitions,
    )
