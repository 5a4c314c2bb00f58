"""Weak values reconstructed from a projector measurement followed by a measurement of the observable."""

__version__ = "0.1.0"

from .errors import (
    BadParameter,
    BadSpectrum,
    DegeneratePhase,
    DimensionMismatch,
    EmptySelection,
    IncompleteBasis,
    NotHermitian,
    NotOrthogonal,
    NullOutcome,
    ParseError,
    UnknownScenario,
    ValidationError,
    WeakValueError,
    ZeroVector,
)
from .luders import (
    PhaseRotation,
    nonselective_update,
    phase_rotate,
    rotation_action_check,
    selective_update,
)
from .qcore import (
    DensityOperator,
    Observable,
    Projector,
    density_from_state_vector,
    eigh,
    expectation,
    projector_onto,
)
from .simshot import (
    Arm,
    ArmEstimate,
    SampledReconstruction,
    Scenario,
    derive_substream_seed,
    reconstruct_sampled,
    run_arm,
    sample_observable,
    sample_projector,
)
from .weakval import (
    ReconstructionReport,
    WeakValue,
    analyze,
    disturbance,
    reconstruct_im,
    reconstruct_im_general,
    reconstruct_re,
    weak_probabilities,
    weak_value_direct,
)
