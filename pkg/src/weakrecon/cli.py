"""Command-line front end.

::

    weakrecon list
    weakrecon exact three_box
    weakrecon run three_box --shots 100000 --seed 7 [--phi 1.0] [--partitions 4] [--csv]
    weakrecon validate scenario.json

Reports are JSON on stdout (or ``--output``); a short human summary goes to
stderr. Exit codes: 0 ok, 2 invalid input, 3 null selection outcome,
4 empty selection in the sampled arm.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EmptySelection, NullOutcome, WeakValueError
from .scenarios import BUILTINS, ScenarioFile, check, resolve, to_document
from .simshot import SampledReconstruction, Scenario, reconstruct_sampled
from .weakval import ReconstructionReport, analyze, reconstruct_im_general

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NULL_OUTCOME = 3
EXIT_EMPTY_SELECTION = 4


@dataclass
class RunReport:
    scenario: Scenario
    ref: str
    exact: ReconstructionReport
    im_at_phi: float
    sampled: SampledReconstruction | None
    timing: float

    def to_dict(self, include_timing: bool = False) -> dict:
        s = self.scenario
        d = {
            "tool": "weakrecon",
            "version": __version__,
            "scenario": {
                "ref": self.ref,
                "label": s.label,
                "sha256": {
                    "rho": _digest(s.rho.mat),
                    "projector": _digest(s.projector.mat),
                    "observable": _digest(s.observable.mat),
                },
                "document": to_document(s),
            },
            "exact": {**self.exact.to_dict(), "phi": s.phi, "im_reconstructed_phi": self.im_at_phi},
        }
        if self.sampled is not None:
            d["sampled"] = self.sampled.to_dict()
        if include_timing:
            d["timing_seconds"] = self.timing
        return d


def _digest(m: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(m, dtype="<c16").tobytes()).hexdigest()


def _csv_rows(sampled: SampledReconstruction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["arm", "shots", "mean", "std_error"])
    for arm in sampled.per_arm:
        w.writerow([arm.arm.value, arm.shots, repr(arm.mean), repr(arm.std_error)])
    total = sum(arm.shots for arm in sampled.per_arm)
    w.writerow(["SUMMARY", total, repr(sampled.re_hat), repr(sampled.re_se)])
    return buf.getvalue()


def _summary(report: RunReport) -> str:
    e = report.exact
    lines = [
        f"scenario {report.scenario.label}: weak value {e.direct.re:.6g} {e.direct.im:+.6g}i",
        f"  reconstructed re={e.re_reconstructed:.6g} im={e.im_reconstructed:.6g} "
        f"disturbance={e.disturbance:.6g} P(select)={e.selection_probability:.6g}",
        f"  nonclassical re={e.nonclassical_re} im={e.nonclassical_im}",
    ]
    s = report.sampled
    if s is not None:
        lines.append(
            f"  sampled re={s.re_hat:.6g}+-{s.re_se:.2g} im={s.im_hat:.6g}+-{s.im_se:.2g} "
            f"({s.shots_per_arm} shots/arm, seed {s.seed})"
        )
    lines.append(f"  {report.timing:.3f} s")
    return "\n".join(lines)


def _build_report(loaded: ScenarioFile, ref: str, args) -> RunReport:
    start = time.perf_counter()
    scenario = loaded.scenario
    if args.phi is not None:
        scenario = scenario.with_phi(args.phi)
    exact = analyze(scenario.rho, scenario.projector, scenario.observable)
    im_phi = reconstruct_im_general(scenario.rho, scenario.projector, scenario.observable, scenario.phi)

    shots = getattr(args, "shots", None) or loaded.shots
    sampled = None
    if shots is not None:
        seed = args.seed if args.seed is not None else (loaded.seed or 0)
        sampled = reconstruct_sampled(scenario, shots, seed, args.partitions)
    return RunReport(scenario, ref, exact, im_phi, sampled, time.perf_counter() - start)


def _emit(report: RunReport, args) -> None:
    text = json.dumps(report.to_dict(include_timing=args.timing), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    if getattr(args, "csv", False):
        if report.sampled is None:
            print("--csv needs sampled data (--shots)", file=sys.stderr)
        else:
            sys.stdout.write(_csv_rows(report.sampled))
    elif not args.output:
        sys.stdout.write(text)
    print(_summary(report), file=sys.stderr)


def cmd_exact(args) -> int:
    args.shots = None
    loaded = resolve(args.scenario)
    loaded = ScenarioFile(loaded.scenario)  # exact never samples, even if the file asks
    _emit(_build_report(loaded, args.scenario, args), args)
    return EXIT_OK


def cmd_run(args) -> int:
    _emit(_build_report(resolve(args.scenario), args.scenario, args), args)
    return EXIT_OK


def cmd_validate(args) -> int:
    problems = check(Path(args.path))
    if not problems:
        print("ok")
        return EXIT_OK
    for p in problems:
        print(p)
    return EXIT_INVALID


def cmd_list(args) -> int:
    for name, (_, description) in BUILTINS.items():
        print(f"{name}\t{description}")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help="builtin name (optionally name:k=v,...) or scenario file path")
    p.add_argument("--phi", type=float, default=None, help="rotation angle in radians (default pi/2)")
    p.add_argument("--output", help="write the JSON report to this path")
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakrecon", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact weak value and reconstruction")
    _add_common(p)
    p.set_defaults(func=cmd_exact, seed=None, partitions=1)

    p = sub.add_parser("run", help="exact analysis plus shot-sampled reconstruction")
    _add_common(p)
    p.add_argument("--shots", type=int, default=None, help="shots per arm (>= 100); omit for exact only")
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--partitions", type=int, default=1, help="RNG substream partitions per arm")
    p.add_argument("--csv", action="store_true", help="print per-arm CSV on stdout instead of JSON")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check a scenario file against every invariant")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list", help="list builtin scenarios")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptySelection as exc:
        print(f"error: EmptySelection: {exc}", file=sys.stderr)
        return EXIT_EMPTY_SELECTION
    except NullOutcome as exc:
        print(f"error: NullOutcome: selection probability: {exc}", file=sys.stderr)
        return EXIT_NULL_OUTCOME
    except WeakValueError as exc:
        names = ", ".join(getattr(exc, "invariants", []) or [])
        tag = f" [{names}]" if names else ""
        print(f"error: {type(exc).__name__}{tag}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
