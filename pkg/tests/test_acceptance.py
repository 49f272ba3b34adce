"""Acceptance criteria, one PASS/FAIL line each (also shown in the pytest summary)."""

import math
import time
from fractions import Fraction

import numpy as np

import conftest
from oracles import eof_two_qubit
from qcorr.cli import main
from qcorr.measures import MEASURES, mutual_information_result
from qcorr.optimize import default_config
from qcorr.qcore import bell_state, product_state, random_bipartite_state, random_density_matrix
from qcorr.reductions import SeparabilityInstance, sep_to_eof
from qcorr.serialize import state_to_json, write_json
from qcorr.suites import run_suite


def record(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_koashi_winter():
    t0 = time.perf_counter()
    rep = run_suite("koashi-winter", seed=1, count=50)
    elapsed = time.perf_counter() - t0
    record(1, "Koashi-Winter identity, 50 rank-2 states, dimC = rank",
           rep.passed and elapsed <= 600,
           f"worst residual {rep.worst_residual:.2e} (tol 1e-3), {elapsed:.0f} s (limit 600 s)")


def test_02_eof_matches_concurrence():
    t0 = time.perf_counter()
    worst = 0.0
    cfg = default_config(4)
    for seed in range(100):
        rng = np.random.default_rng([2, seed])
        s = random_bipartite_state(2, 2, rank=int(rng.integers(1, 5)), seed=rng)
        worst = max(worst, abs(MEASURES["eof"](s, cfg=cfg).value - eof_two_qubit(s.matrix)))
    elapsed = time.perf_counter() - t0
    record(2, "E_F vs concurrence formula, 100 two-qubit states",
           worst <= 1e-4 and elapsed <= 600,
           f"max deviation {worst:.2e} (tol 1e-4), {elapsed:.0f} s (limit 600 s)")


def test_03_channel_identity():
    rep = run_suite("holevo-identity", seed=3, count=50)
    record(3, "E_F = S(Phi(rho)) - chi on 50 channel instances", rep.passed,
           f"worst residual {rep.worst_residual:.2e} (tol 1e-3)")


def test_04_linopt_equality():
    rep = run_suite("linopt-equality", seed=4, count=100)
    grid = max(c["grid_violation"] for c in rep.cases)
    cert = max(c["certificate_violation"] for c in rep.cases)
    record(4, "seesaw max = grid max = certificate value, 100 operators", rep.passed,
           f"grid gap {grid:.2e} (tol 1e-4), certificate gap {cert:.2e} (tol 1e-6)")


def test_05_zero_discord_equivalence():
    rep = run_suite("classicality-equivalence", seed=5, count=200)
    qc = sum(c["constructed_qc"] for c in rep.cases)
    bad = sum(not c["ok"] for c in rep.cases)
    record(5, "QC verdict <=> D_N <= 1e-5", rep.passed and qc == 100,
           f"{qc} constructed QC + {200 - qc} Haar states, {bad} disagreements")


def test_06_inequality_chain():
    rep = run_suite("inequality-chain", seed=6, count=100)
    viol = sum(not c["ok"] for c in rep.cases)
    record(6, "E_F >= E_R, D_P <= D_N, 0 <= J <= I on 100 two-qubit states", rep.passed,
           f"{viol} violations, worst {rep.worst_residual:.2e}")


def test_07_gap_arithmetic():
    worst = 0.0
    for delta, (m, n) in [(0.1, (2, 2)), (0.5, (2, 3)), (1e-3, (3, 3)), (0.37, (4, 2))]:
        s = random_bipartite_state(m, n, seed=7)
        eps = sep_to_eof(SeparabilityInstance(s, delta)).eps
        # exact rational numerator and denominator, single rounding for ln 2
        ref = float(Fraction(delta) ** 2 / (2448 * m * n)) / math.log(2)
        worst = max(worst, abs(eps - ref) / ref)
    record(7, "eps = delta^2 / (2448 m n ln 2)", worst <= 1e-15,
           f"max relative error {worst:.1e} (tol 1e-15)")


def test_08_canonical_values():
    cfg = default_config(4)
    b = bell_state()
    got = {"I": mutual_information_result(b).value,
           "J": MEASURES["classical-povm"](b, cfg=cfg).value,
           "D": MEASURES["discord-povm"](b, cfg=cfg).value,
           "E_F": MEASURES["eof"](b, cfg=cfg).value,
           "E_R": MEASURES["rel-ent"](b, cfg=cfg).value}
    want = {"I": 2.0, "J": 1.0, "D": 1.0, "E_F": 1.0, "E_R": 1.0}
    bell_err = max(abs(got[k] - want[k]) for k in want)
    prod_worst = 0.0
    for seed in range(5):
        pa = random_density_matrix(2, seed=[8, seed]).matrix
        pb = random_density_matrix(2, seed=[9, seed]).matrix
        s = product_state(pa, pb)
        for name, fn in MEASURES.items():
            prod_worst = max(prod_worst, abs(fn(s, cfg=cfg).value))
    record(8, "Bell canonical values and product-state zeros",
           bell_err <= 1e-3 and prod_worst <= 1e-6,
           f"Bell max error {bell_err:.1e} (tol 1e-3), product max {prod_worst:.1e} (tol 1e-6)")


def test_09_determinism(tmp_path):
    state = tmp_path / "in.json"
    write_json(state, state_to_json(random_bipartite_state(2, 2, rank=2, seed=9)))
    commands = [["compute", "discord-povm", state, "--starts", "4"],
                ["compute", "eof", state, "--starts", "4", "--format", "csv"],
                ["classify", state],
                ["reduce", "sep-to-eof", state, "--delta", "0.2"],
                ["random", "separable", "2", "2", "--count", "3"],
                ["verify", "steering-completeness", "--count", "5"]]
    mismatched = []
    for i, cmd in enumerate(commands):
        out = tmp_path / f"run{i}"
        snaps = []
        for _ in range(2):
            code = main([str(c) for c in cmd] + ["--seed", "9", "--out", str(out)])
            snaps.append((code, {p.name: p.read_bytes() for p in sorted(out.iterdir())}))
        if snaps[0] != snaps[1] or snaps[0][0] != 0:
            mismatched.append(cmd[0])
    record(9, "bit-identical re-runs of every subcommand", not mismatched,
           f"{len(commands) - len(mismatched)}/{len(commands)} commands reproduced")


def test_10_steering_completeness():
    rep = run_suite("steering-completeness", seed=10, count=100)
    record(10, "sum_i p_i rho_i = rho_AB for 100 random POVMs", rep.passed,
           f"worst residual {rep.worst_residual:.1e} (tol 1e-8)")
