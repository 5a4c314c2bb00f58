"""Builtin scenarios and the JSON scenario-file format.

A scenario document looks like::

    {
      "label": "three_box",
      "dim": 3,
      "rho": {"vector": [[0.577, 0.0], [0.577, 0.0], [0.577, 0.0]]},
      "projector": {"vector": [[0.577, 0.0], [0.577, 0.0], [-0.577, 0.0]]},
      "observable": {"matrix": [[[0, 0], [0, 0], [0, 0]], ...]},
      "phi": 1.5707963267948966,
      "shots": 100000,
      "seed": 7
    }

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists. ``rho`` and ``projector`` each take exactly one of ``vector`` or
``matrix``; ``observable`` takes ``matrix`` only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .config import MAX_DIM, TOL
from .errors import BadParameter, NullOutcome, ParseError, UnknownScenario, ValidationError
from .qcore import (
    DensityOperator,
    Observable,
    Projector,
    Violation,
    density_from_state_vector,
    density_violations,
    hermitian_violations,
    projector_onto,
    projector_violations,
)
from .randgen import random_triple
from .simshot import Scenario

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
DOC_FIELDS = ("label", "dim", "rho", "projector", "observable", "phi", "shots", "seed")


@dataclass(frozen=True)
class ScenarioFile:
    """A loaded document: the validated scenario plus optional run settings."""

    scenario: Scenario
    shots: int | None = None
    seed: int | None = None


# -- builtins ---------------------------------------------------------------


def three_box(b: int = 3) -> Scenario:
    if b not in (1, 2, 3):
        raise BadParameter(f"three_box: b must be 1, 2 or 3, got {b!r}")
    basis = np.eye(3)
    return Scenario(
        density_from_state_vector([1, 1, 1]),
        projector_onto([1, 1, -1]),
        Observable(np.outer(basis[b - 1], basis[b - 1])),
        label=f"three_box(b={b})",
    )


def amplified_spin(alpha: float = 1.4) -> Scenario:
    alpha = float(alpha)
    if not math.cos(alpha) ** 2 > 1e-10:
        raise BadParameter(f"amplified_spin: cos^2(alpha) must exceed 1e-10, alpha={alpha!r}")
    return Scenario(
        density_from_state_vector([1, 0]),
        projector_onto([math.cos(alpha), math.sin(alpha)]),
        Observable(PAULI_X),
        label=f"amplified_spin(alpha={alpha!r})",
    )


def imaginary_qubit() -> Scenario:
    return Scenario(
        density_from_state_vector([1, 0]),
        projector_onto([1, 1j]),
        Observable(PAULI_X),
        label="imaginary_qubit",
    )


def commuting_control() -> Scenario:
    return Scenario(
        DensityOperator(np.diag([0.5, 0.3, 0.2])),
        Projector(np.diag([1.0, 1.0, 0.0])),
        Observable(np.diag([-1.0, 0.5, 2.0])),
        label="commuting_control",
    )


def random_scenario(d: int = 4, seed: int = 0) -> Scenario:
    d, seed = int(d), int(seed)
    if not 2 <= d <= MAX_DIM:
        raise BadParameter(f"random: d must be in [2, {MAX_DIM}], got {d}")
    rng = np.random.default_rng(seed)
    rho, P, B = random_triple(d, rng, pure=False)
    return Scenario(rho, P, B, label=f"random(d={d},seed={seed})")


BUILTINS: dict[str, tuple[Callable[..., Scenario], str]] = {
    "three_box": (three_box, "quantum box problem; B = |b><b| (b=1..3, default 3), weak value -1 for b=3"),
    "amplified_spin": (amplified_spin, "spin-1/2 pre |0>, post (cos a, sin a), B = sigma_x; weak value tan(alpha)"),
    "imaginary_qubit": (imaginary_qubit, "pre |0>, post (1, i)/sqrt2, B = sigma_x; weak value -i"),
    "commuting_control": (commuting_control, "diagonal rho, P, B in d=3; all weak values classical"),
    "random": (random_scenario, "Wishart rho, random projector and Hermitian B (params d, seed)"),
}


def builtin(name: str, **params) -> Scenario:
    try:
        factory, _ = BUILTINS[name]
    except KeyError:
        raise UnknownScenario(
            f"unknown scenario '{name}'; choose from {', '.join(BUILTINS)}"
        ) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise BadParameter(f"{name}: {exc}") from None


def parse_ref(ref: str) -> tuple[str, dict[str, Any]]:
    """Split ``name:key=value,key=value`` into a name and numeric params."""
    name, _, rest = ref.partition(":")
    params: dict[str, Any] = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise BadParameter(f"expected key=value, got '{item}'")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise BadParameter(f"parameter {key} is not numeric: '{value}'") from None
    return name, params


# -- serialization ----------------------------------------------------------


def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def serialize(scenario: Scenario, shots: int | None = None, seed: int | None = None) -> str:
    return json.dumps(to_document(scenario, shots, seed), indent=2)


def to_document(scenario: Scenario, shots: int | None = None, seed: int | None = None) -> dict:
    doc: dict[str, Any] = {
        "label": scenario.label,
        "dim": scenario.dim,
        "rho": {"matrix": _encode_matrix(scenario.rho.mat)},
        "projector": {"matrix": _encode_matrix(scenario.projector.mat)},
        "observable": {"matrix": _encode_matrix(scenario.observable.mat)},
        "phi": scenario.phi,
    }
    if shots is not None:
        doc["shots"] = shots
    if seed is not None:
        doc["seed"] = seed
    return doc


# -- parsing ----------------------------------------------------------------


def _complex(value, where: str) -> complex:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ParseError(f"expected a [re, im] pair, got {value!r}", field=where)
    return complex(value[0], value[1])


def _decode_vector(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ParseError("expected a non-empty list of [re, im] pairs", field=where)
    return np.array([_complex(z, f"{where}[{i}]") for i, z in enumerate(value)])


def _decode_matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ParseError("expected a non-empty list of rows", field=where)
    rows = [_decode_vector(row, f"{where}[{i}]") for i, row in enumerate(value)]
    if any(len(r) != len(rows) for r in rows):
        raise ParseError(
            f"matrix must be square, got {len(rows)} rows of lengths {[len(r) for r in rows]}",
            field=where,
        )
    return np.array(rows)


def _representation(doc: dict, key: str, allowed: tuple[str, ...]) -> tuple[str, np.ndarray]:
    if key not in doc:
        raise ParseError("missing required field", field=key)
    value = doc[key]
    if not isinstance(value, dict):
        raise ParseError(f"expected an object with one of {list(allowed)}", field=key)
    given = [k for k in value if k in ("vector", "matrix")]
    unknown = [k for k in value if k not in ("vector", "matrix")]
    if unknown:
        raise ParseError(f"unknown keys {unknown}", field=key)
    if len(given) != 1:
        raise ParseError(f"exactly one of {list(allowed)} must be given, got {given}", field=key)
    kind = given[0]
    if kind not in allowed:
        raise ParseError(f"'{kind}' representation not allowed here", field=key)
    decode = _decode_vector if kind == "vector" else _decode_matrix
    return kind, decode(value[kind], f"{key}.{kind}")


@dataclass
class _Parsed:
    label: str
    dim: int
    rho: tuple[str, np.ndarray]
    projector: tuple[str, np.ndarray]
    observable: tuple[str, np.ndarray]
    phi: float
    shots: int | None
    seed: int | None


def _read_document(source: str | Path | dict) -> dict:
    if isinstance(source, dict):
        return source
    if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read scenario file '{path}': {exc.strerror}") from None
    else:
        text = str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    return doc


def _int_field(doc: dict, key: str, minimum: int | None = None) -> int | None:
    if key not in doc or doc[key] is None:
        return None
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ParseError(f"expected an integer, got {v!r}", field=key)
    if minimum is not None and v < minimum:
        raise ParseError(f"must be >= {minimum}, got {v}", field=key)
    return v


def _parse(source: str | Path | dict) -> _Parsed:
    doc = _read_document(source)
    unknown = sorted(set(doc) - set(DOC_FIELDS))
    if unknown:
        raise ParseError(f"unknown fields {unknown}", field=unknown[0])
    dim = _int_field(doc, "dim", minimum=1)
    if dim is None:
        raise ParseError("missing required field", field="dim")
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise ParseError("expected text", field="label")
    phi = doc.get("phi", math.pi / 2)
    if not isinstance(phi, (int, float)) or isinstance(phi, bool) or not math.isfinite(phi):
        raise ParseError(f"expected a finite number, got {phi!r}", field="phi")
    return _Parsed(
        label=label,
        dim=dim,
        rho=_representation(doc, "rho", ("vector", "matrix")),
        projector=_representation(doc, "projector", ("vector", "matrix")),
        observable=_representation(doc, "observable", ("matrix",)),
        phi=float(phi),
        shots=_int_field(doc, "shots", minimum=1),
        seed=_int_field(doc, "seed"),
    )


def _field_violations(name: str, kind: str, arr: np.ndarray, dim: int) -> list[Violation]:
    size = arr.shape[0]
    if size != dim:
        return [("dimension", f"{name} has dimension {size}, document declares dim={dim}")]
    if size > MAX_DIM:
        return [("dimension", f"{name} dimension {size} exceeds {MAX_DIM}")]
    if not np.all(np.isfinite(arr)):
        return [("finite", f"{name} has non-finite entries")]
    if kind == "vector":
        if not np.linalg.norm(arr) > TOL.zero_vector:
            return [("nonzero vector", f"{name} vector has zero norm")]
        return []
    if name == "rho":
        return density_violations(arr)
    if name == "projector":
        return projector_violations(arr)
    return hermitian_violations(arr)


def check(source: str | Path | dict) -> list[str]:
    """Every violated invariant of a scenario document, as ``"field: invariant: detail"``.

    Parse errors are reported as a single ``parse`` entry. An empty list
    means the document loads cleanly.
    """
    try:
        parsed = _parse(source)
    except ParseError as exc:
        return [f"parse: {exc}"]
    problems = []
    fields = {"rho": parsed.rho, "projector": parsed.projector, "observable": parsed.observable}
    for name, (kind, arr) in fields.items():
        for inv, detail in _field_violations(name, kind, arr, parsed.dim):
            problems.append(f"{name}: {inv}: {detail}")
    if problems:
        return problems
    try:
        _build(parsed)
    except (ValidationError, NullOutcome) as exc:
        names = getattr(exc, "invariants", None) or ["invalid"]
        problems.append(f"scenario: {names[0]}: {exc}")
    return problems


def _build(parsed: _Parsed) -> ScenarioFile:
    kind, arr = parsed.rho
    rho = density_from_state_vector(arr) if kind == "vector" else DensityOperator(arr)
    kind, arr = parsed.projector
    proj = projector_onto(arr) if kind == "vector" else Projector(arr)
    obs = Observable(parsed.observable[1])
    return ScenarioFile(Scenario(rho, proj, obs, parsed.phi, parsed.label), parsed.shots, parsed.seed)


def load_file(source: str | Path | dict) -> ScenarioFile:
    """Parse and validate a scenario document, keeping its shots/seed settings.

    ``source`` may be a path, JSON text, or an already-decoded dict.

    Raises
    ------
    ParseError
        Malformed document; the message names the field or line.
    ValidationError
        A matrix breaks an operator invariant; ``invariants`` names it.
    NullOutcome
        ``Tr(rho P) <= 1e-12``.
    """
    parsed = _parse(source)
    fields = {"rho": parsed.rho, "projector": parsed.projector, "observable": parsed.observable}
    for name, (kind, arr) in fields.items():
        violations = _field_violations(name, kind, arr, parsed.dim)
        if violations:
            raise ValidationError(
                f"{name}: " + "; ".join(f"{inv}: {detail}" for inv, detail in violations),
                [inv for inv, _ in violations],
            )
    return _build(parsed)


def load(source: str | Path | dict) -> Scenario:
    return load_file(source).scenario


def resolve(ref: str) -> ScenarioFile:
    """A builtin reference (``name`` or ``name:k=v,...``) or a scenario file path."""
    name = ref.partition(":")[0]
    if name in BUILTINS:
        _, params = parse_ref(ref)
        return ScenarioFile(builtin(name, **params))
    if Path(ref).exists() or any(c in ref for c in "./\\"):
        return load_file(Path(ref))
    raise UnknownScenario(f"unknown scenario '{ref}'; choose from {', '.join(BUILTINS)} or a file path")
