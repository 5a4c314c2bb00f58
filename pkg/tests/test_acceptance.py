"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from weakrecon.cli import main
from weakrecon.luders import nonselective_update, phase_rotate
from weakrecon.qcore import Projector
from weakrecon.randgen import random_density, random_observable, random_projector
from weakrecon.scenarios import amplified_spin, commuting_control, imaginary_qubit, three_box, to_document
from weakrecon.simshot import Arm, reconstruct_sampled, run_arm
from weakrecon.weakval import (
    analyze,
    disturbance,
    reconstruct_im,
    reconstruct_im_general,
    reconstruct_re,
    weak_probabilities,
    weak_value_direct,
)

DIMS = range(2, 9)
TRIPLES_PER_DIM = 1000
PHI_GRID = np.linspace(-math.pi, math.pi, 52)[1:-1]  # 50 points, none within 1e-6 of 0 or +-pi


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] AC{criterion}: {detail}")
    assert ok, detail


def _build_battery():
    triples = []
    for d in DIMS:
        g = np.random.default_rng(1000 + d)
        for i in range(TRIPLES_PER_DIM):
            rank = 1 + i % (d - 1)
            rho = random_density(d, g, pure=bool(i % 2))
            triples.append((rho, random_projector(d, rank, g), random_observable(d, g)))
    return triples


@pytest.fixture(scope="module")
def battery():
    start = time.perf_counter()
    triples = _build_battery()
    return triples, time.perf_counter() - start


@pytest.fixture(scope="module")
def direct(battery):
    return [weak_value_direct(*t) for t in battery[0]]


def test_ac1_real_part_oracle_equivalence(battery, direct):
    triples, build_time = battery
    start = time.perf_counter()
    err = max(abs(reconstruct_re(*t) - w.re) for t, w in zip(triples, direct))
    elapsed = build_time + time.perf_counter() - start
    record(
        1,
        err <= 1e-10 and len(triples) == 7000 and elapsed < 10,
        f"max|Re recon - Re direct| = {err:.2e} <= 1e-10 over {len(triples)} triples, {elapsed:.1f}s < 10s",
    )


def test_ac2_imaginary_part_oracle_equivalence(battery, direct):
    triples, _ = battery
    err = max(abs(reconstruct_im(*t) - w.im) for t, w in zip(triples, direct))
    record(2, err <= 1e-10, f"max|Im recon - Im direct| = {err:.2e} <= 1e-10")


def test_ac3_general_phase_equivalence(battery, direct):
    triples, _ = battery
    assert len(PHI_GRID) == 50
    assert min(min(abs(p), math.pi - abs(p)) for p in PHI_GRID) > 1e-6
    err = 0.0
    for t, w in zip(triples, direct):
        for phi in PHI_GRID:
            err = max(err, abs(reconstruct_im_general(*t, phi) - w.im))
    err_half = max(abs(reconstruct_im_general(*t, math.pi / 2) - reconstruct_im(*t)) for t in triples)
    record(
        3,
        err <= 1e-9 and err_half <= 1e-12,
        f"phi grid max error {err:.2e} <= 1e-9; at pi/2 vs quarter-turn formula {err_half:.2e} <= 1e-12",
    )


def test_ac4_mixture_identity(battery):
    triples, _ = battery
    err = 0.0
    for rho, P, _ in triples:
        lhs = nonselective_update(rho, P).mat
        rhs = (rho.mat + phase_rotate(rho, P, math.pi).mat) / 2
        err = max(err, float(np.max(np.abs(lhs - rhs))))
    record(4, err <= 1e-12, f"max entrywise |nonselective - (rho + rho_pi)/2| = {err:.2e} <= 1e-12")


def test_ac5_three_box_weak_probabilities():
    start = time.perf_counter()
    s = three_box()
    basis = [Projector(np.diag(row)) for row in np.eye(3)]
    probs = weak_probabilities(s.rho, s.projector, basis)
    got = np.array([(w.re, w.im) for w in probs])
    exact_ok = np.max(np.abs(got - [(1, 0), (1, 0), (-1, 0)])) <= 1e-12
    sum_err = max(abs(got[:, 0].sum() - 1), abs(got[:, 1].sum()))

    within = 0
    for seed in range(1, 101):
        r = reconstruct_sampled(s, 100_000, seed)
        z_re = (r.re_hat - r.exact.direct.re) / r.re_se
        z_im = (r.im_hat - r.exact.direct.im) / r.im_se
        within += abs(z_re) <= 5 and abs(z_im) <= 5
    elapsed = time.perf_counter() - start
    record(
        5,
        exact_ok and sum_err <= 1e-10 and within >= 99 and elapsed < 60,
        f"weak probabilities {got[:, 0].round(12).tolist()}, sum-rule error {sum_err:.1e}; "
        f"{within}/100 seeded runs with |z| <= 5; {elapsed:.1f}s < 60s",
    )


def test_ac6_amplified_spin():
    s = amplified_spin(1.4)
    r = analyze(s.rho, s.projector, s.observable)
    d = disturbance(s.rho, s.projector, s.observable)
    ok = (
        abs(r.re_reconstructed - math.tan(1.4)) <= 1e-10
        and abs(r.direct.re - 5.797883715482887) <= 1e-12
        and r.eigen_range[1] == pytest.approx(1.0, abs=1e-14)
        and r.nonclassical_re
        and abs(d) > 1e-9
    )
    record(
        6,
        ok,
        f"re = {r.re_reconstructed:.10f} (tan 1.4), lambda_max = {r.eigen_range[1]:.1f}, "
        f"nonclassical_re = {r.nonclassical_re}, disturbance = {d:.4f}",
    )


def test_ac7_imaginary_qubit():
    s = imaginary_qubit()
    r = analyze(s.rho, s.projector, s.observable)
    sampled = reconstruct_sampled(s, 100_000, seed=7)
    z = (sampled.im_hat + 1) / sampled.im_se
    ok = abs(r.im_reconstructed + 1) <= 1e-12 and abs(r.direct.im + 1) <= 1e-12 and abs(z) <= 5
    record(7, ok, f"exact im = {r.im_reconstructed:.12f}; sampled im = {sampled.im_hat:.4f} +- {sampled.im_se:.4f} (z = {z:.2f})")


def test_ac8_classical_control():
    s = commuting_control()
    r = analyze(s.rho, s.projector, s.observable)
    lo, hi = r.eigen_range
    ok = (
        abs(r.disturbance) <= 1e-10
        and lo - 1e-9 <= r.re_reconstructed <= hi + 1e-9
        and abs(r.im_reconstructed) <= 1e-10
        and not r.nonclassical_re
        and not r.nonclassical_im
    )
    record(8, ok, f"disturbance {r.disturbance:.1e}, re {r.re_reconstructed:.4f} in [{lo}, {hi}], im {r.im_reconstructed:.1e}")


def test_ac9_statistical_sanity(tmp_path):
    s = three_box()
    ratios = {arm: [] for arm in Arm}
    for seed in range(20):
        for arm in Arm:
            small = run_arm(s, arm, 10_000, seed)
            large = run_arm(s, arm, 40_000, seed)
            ratios[arm].append(small.std_error / large.std_error)
    means = {arm.value: float(np.mean(v)) for arm, v in ratios.items()}
    scaling_ok = all(abs(m - 2.0) <= 0.25 * 2.0 for m in means.values())

    identical = True
    for partitions in ("1", "4"):
        argv = ["run", "three_box", "--shots", "20000", "--seed", "11", "--partitions", partitions]
        blobs = []
        for i in range(2):
            path = tmp_path / f"p{partitions}_{i}.json"
            assert main(argv + ["--output", str(path)]) == 0
            blobs.append(path.read_bytes())
        identical &= blobs[0] == blobs[1]
    record(
        9,
        scaling_ok and identical,
        "se(N)/se(4N) per arm " + ", ".join(f"{k} {v:.3f}" for k, v in means.items())
        + f" (2 +- 25%); byte-identical reports: {identical}",
    )


def _mat(m):
    return [[[float(np.real(z)), float(np.imag(z))] for z in row] for row in np.asarray(m, dtype=complex)]


def test_ac10_validation_suite(tmp_path, capsys):
    base = to_document(three_box())
    cases = {
        "hermitian": ({"observable": {"matrix": _mat([[0, 1, 0], [0, 0, 0], [0, 0, 1]])}}, 2),
        "idempotent": ({"projector": {"matrix": _mat(np.diag([1.0, 0.5, 0.0]))}}, 2),
        "unit trace": ({"rho": {"matrix": _mat(np.diag([0.3, 0.3, 0.3]))}}, 2),
        "dimension": ({"rho": {"matrix": _mat(np.eye(2) / 2)}}, 2),
        "selection probability": (
            {"rho": {"vector": [[1, 0], [0, 0], [0, 0]]}, "projector": {"vector": [[0, 0], [1, 0], [0, 0]]}},
            3,
        ),
    }
    results = []
    for invariant, (overrides, exact_code) in cases.items():
        path = tmp_path / f"{invariant.replace(' ', '_')}.json"
        path.write_text(json.dumps({**base, **overrides}))
        v_code = main(["validate", str(path)])
        v_out = capsys.readouterr().out
        e_code = main(["exact", str(path)])
        e_err = capsys.readouterr().err
        ok = v_code == 2 and invariant in v_out and e_code == exact_code and invariant in e_err
        results.append((invariant, ok, e_code))
    record(
        10,
        all(ok for _, ok, _ in results),
        "; ".join(f"{name} -> exit {code} {'ok' if ok else 'WRONG'}" for name, ok, code in results),
    )
