"""Named verification suites over seeded state batteries.

Each case records the compared quantities and a nonnegative ``residual`` (the
size of the identity mismatch or inequality violation). A case passes when
every check is within its declared tolerance; a suite passes when every case
does.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import classicality, measures, reductions
from .measurements import povm_from_matrix, steer_ensemble
from .optimize import Objective, OptimizerConfig, default_config, grid_oracle
from .qcore import (BipartiteState, LN2, bell_state, ptrace, purify, random_bipartite_state,
                    random_hermitian, random_unitary, von_neumann_entropy)
from .serialize import to_jsonable


@dataclass
class SuiteReport:
    name: str
    battery: dict
    tolerances: dict
    cases: list = field(default_factory=list)
    passed: bool = False
    worst_residual: float = 0.0

    def to_json(self) -> dict:
        return to_jsonable({"schema": "v1", "suite": self.name, "battery": self.battery,
                            "tolerances": self.tolerances, "passed": self.passed,
                            "worst_residual": self.worst_residual, "cases": self.cases})

    def to_csv(self) -> str:
        cols = []
        for case in self.cases:
            for k, v in case.items():
                if k not in cols and not isinstance(v, (dict, list, tuple)):
                    cols.append(k)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for case in self.cases:
            w.writerow({k: to_jsonable(case.get(k, "")) for k in cols})
        return buf.getvalue()


def _case_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _finish(report: SuiteReport) -> SuiteReport:
    report.passed = all(c["ok"] for c in report.cases)
    report.worst_residual = max((c["residual"] for c in report.cases), default=0.0)
    return report


def _checks(case: dict, checks: dict[str, tuple[float, float]]) -> dict:
    """checks maps name -> (violation, tolerance); violation <= 0 means satisfied."""
    worst = 0.0
    ok = True
    for name, (viol, tol) in checks.items():
        case[f"{name}_violation"] = viol
        worst = max(worst, viol)
        ok = ok and viol <= tol
    case["residual"] = max(worst, 0.0)
    case["ok"] = bool(ok)
    return case


def _entropies(state: BipartiteState) -> tuple[float, float]:
    return (von_neumann_entropy(ptrace(state.matrix, state.dims, [0])),
            von_neumann_entropy(state))


# ---------------------------------------------------------------------------
# suites


def koashi_winter(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    tol = 1e-3
    rep = SuiteReport("koashi-winter", {"seed": seed, "count": count, "dims": [2, 2], "rank": 2},
                      {"residual": tol})
    for i, rng in enumerate(_case_rngs(seed, count)):
        state = random_bipartite_state(2, 2, rank=2, seed=rng)
        ef = measures.eof(state, cfg=cfg).value
        inst = reductions.eof_to_discord(reductions.EofInstance(state, 0.0, 1.0), dimC=2)
        dp = measures.discord(inst.state, "povm", cfg).value
        s_a, s_ab = _entropies(state)
        resid = abs(ef - dp - s_a + s_ab)
        rep.cases.append(_checks({"case": i, "E_F": ef, "D_P_BC": dp, "S_A": s_a, "S_AB": s_ab},
                                 {"identity": (resid, tol)}))
    return _finish(rep)


def holevo_identity(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    tol = 1e-3
    rep = SuiteReport("holevo-identity", {"seed": seed, "count": count, "dims": [2, 2], "rank": 2},
                      {"residual": tol})
    for i, rng in enumerate(_case_rngs(seed, count)):
        state = random_bipartite_state(2, 2, rank=2, seed=rng)
        ef = measures.eof(state, cfg=cfg).value
        inst = reductions.eof_to_holevo(reductions.EofInstance(state, 0.0, 1.0))
        chi = measures.constrained_holevo(inst.channel, inst.rho, cfg=cfg)
        s_out = chi.report["output_entropy"]
        resid = abs(ef - s_out + chi.value)
        rep.cases.append(_checks({"case": i, "E_F": ef, "S_out": s_out, "chi": chi.value},
                                 {"identity": (resid, tol)}))
    return _finish(rep)


def _two_qubit_battery(rng: np.random.Generator) -> BipartiteState:
    return random_bipartite_state(2, 2, rank=int(rng.integers(1, 5)), seed=rng)


def inequality_chain(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    tols = {"J_P>=J_N": 1e-6, "D_P<=D_N": 1e-6, "E_F>=E_R": 1e-4, "J>=0": 0.0, "J<=I": 1e-7}
    rep = SuiteReport("inequality-chain", {"seed": seed, "count": count, "dims": [2, 2]}, tols)
    for i, rng in enumerate(_case_rngs(seed, count)):
        state = _two_qubit_battery(rng)
        mi = measures.mutual_information(state)
        jn = measures.classical_correlation(state, "vn", cfg).value
        jp = measures.classical_correlation(state, "povm", cfg).value
        ef = measures.eof(state, cfg=cfg).value
        er = measures.rel_ent_entanglement(state, cfg=cfg).value
        dn, dp = mi - jn, mi - jp
        case = {"case": i, "rank": state.rank(), "I": mi, "J_N": jn, "J_P": jp, "D_N": dn,
                "D_P": dp, "E_F": ef, "E_R": er}
        rep.cases.append(_checks(case, {
            "J_P>=J_N": (jn - jp, tols["J_P>=J_N"]), "D_P<=D_N": (dp - dn, tols["D_P<=D_N"]),
            "E_F>=E_R": (er - ef, tols["E_F>=E_R"]), "J>=0": (-min(jn, jp), tols["J>=0"]),
            "J<=I": (max(jn, jp) - mi, tols["J<=I"])}))
    return _finish(rep)


def norm_bounds(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    """E_R >= d_1^2/(2 m n ln2) and E_F >= d_2^2/(2448 ln2), recorded as margins."""
    tol = 1e-3
    rep = SuiteReport("norm-bounds", {"seed": seed, "count": count, "dims": [2, 2]},
                      {"relent": tol, "eof": tol})
    for i, rng in enumerate(_case_rngs(seed, count)):
        state = _two_qubit_battery(rng)
        m, n = state.dims
        er = measures.rel_ent_entanglement(state, cfg=cfg)
        ef = measures.eof(state, cfg=cfg)
        d1 = measures.distance_to_separable(state, "trace", cfg=cfg).value
        d2 = measures.distance_to_separable(state, "frobenius", cfg=cfg).value
        b1 = d1 ** 2 / (2 * m * n * LN2)
        b2 = d2 ** 2 / (2448 * LN2)
        case = {"case": i, "E_R": er.value, "E_F": ef.value, "dist_trace": d1, "dist_frob": d2,
                "relent_margin": er.value - b1, "eof_margin": ef.value - b2,
                "converged": bool(er.report.get("converged") and ef.report.get("converged"))}
        rep.cases.append(_checks(case, {"relent": (b1 - er.value, tol), "eof": (b2 - ef.value, tol)}))
    return _finish(rep)


def _product_top_eigenvalue(o: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """max_b <a,b|O|a,b> for qubit a on a batch of Bloch angles (closed-form 2x2 eigenvalue)."""
    t = o.reshape(2, 2, 2, 2)
    th, ph = angles[:, 0], angles[:, 1]
    a = np.stack([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)], axis=1)
    h = np.einsum("ka,abcd,kc->kbd", a.conj(), t, a)
    p = np.real(h[:, 0, 0] + h[:, 1, 1]) / 2
    q = np.real(h[:, 0, 0] - h[:, 1, 1]) / 2
    return p + np.sqrt(q * q + np.abs(h[:, 0, 1]) ** 2)


def linopt_grid(o: np.ndarray, step: float = 0.005) -> float:
    """Grid over the A Bloch sphere with the B side maximized exactly."""
    obj = Objective(fun=lambda x: -_product_top_eigenvalue(o, x[None])[0], arity=2,
                    batch=lambda pts: -_product_top_eigenvalue(o, pts))
    res = grid_oracle(obj, step, [(0.0, math.pi), (0.0, 2 * math.pi)])
    return -res.best_value


def linopt_equality(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    tols = {"grid": 1e-4, "certificate": 1e-6}
    rep = SuiteReport("linopt-equality", {"seed": seed, "count": count, "dims": [2, 2]}, tols)
    for i, rng in enumerate(_case_rngs(seed, count)):
        o = random_hermitian(4, rng)
        res = reductions.linopt_classical(o, (2, 2), cfg)
        grid = linopt_grid(o)
        cert = res.report["certificate_value"]
        rep.cases.append(_checks({"case": i, "seesaw": res.value, "grid": grid, "cc_value": cert},
                                 {"grid": (abs(res.value - grid), tols["grid"]),
                                  "certificate": (abs(res.value - cert), tols["certificate"])}))
    return _finish(rep)


def classicality_equivalence(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    """Half constructed QC states, half Haar-random states; verdict vs D_N <= 1e-5."""
    thresh = 1e-5
    rep = SuiteReport("classicality-equivalence",
                      {"seed": seed, "count": count, "dims": [2, 2], "qc_fraction": 0.5},
                      {"disagreements": 0, "discord_threshold": thresh})
    for i, rng in enumerate(_case_rngs(seed, count)):
        constructed = i % 2 == 0
        if constructed:
            state = classicality.random_qc_state(2, 2, rng)
        else:
            state = random_bipartite_state(2, 2, seed=rng)
        verdict = classicality.is_quantum_classical(state)
        dn = measures.discord(state, "vn", cfg).value
        agree = verdict.classical == (dn <= thresh)
        rep.cases.append({"case": i, "constructed_qc": constructed, "verdict": verdict.verdict,
                          "commutator_norm": verdict.max_commutator_norm, "D_N": dn,
                          "residual": 0.0 if agree else 1.0, "ok": bool(agree)})
    return _finish(rep)


def steering_completeness(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    tol = 1e-8
    rep = SuiteReport("steering-completeness", {"seed": seed, "count": count, "dims": [2, 2, 4]},
                      {"residual": tol})
    for i, rng in enumerate(_case_rngs(seed, count)):
        state = random_bipartite_state(2, 2, seed=rng)
        psi = purify(state, 4)
        k = int(rng.integers(4, 17))
        povm = povm_from_matrix(rng.standard_normal((k, 4)) + 1j * rng.standard_normal((k, 4)))
        ens = steer_ensemble(psi, povm)
        resid = float(np.max(np.abs(ens.mixture() - state.matrix)))
        rep.cases.append(_checks({"case": i, "outcomes": k, "members": len(ens)},
                                 {"mixture": (resid, tol)}))
    return _finish(rep)


def _bell_type(rng: np.random.Generator) -> BipartiteState:
    u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    b = bell_state().matrix
    return BipartiteState(u @ b @ u.conj().T, (2, 2))


def reduction_soundness(seed: int, count: int, cfg: OptimizerConfig) -> SuiteReport:
    """Yes-instances (separable) stay below thresholds; Bell-type no-instances clear the gap."""
    tol = 1e-6
    # Frobenius distance of a maximally entangled two-qubit state to S is 1/sqrt(3)
    delta = 0.5
    rep = SuiteReport("reduction-soundness", {"seed": seed, "count": count, "dims": [2, 2],
                                              "delta_no": delta}, {"threshold": tol})
    for i, rng in enumerate(_case_rngs(seed, count)):
        yes = i % 2 == 0
        if yes:
            state = classicality.random_separable_state(2, 2, int(rng.integers(1, 4)), rng)
        else:
            state = _bell_type(rng)
        e_inst = reductions.sep_to_eof(reductions.SeparabilityInstance(state, delta))
        d_inst = reductions.eof_to_discord(e_inst, dimC=state.rank())
        h_inst = reductions.eof_to_holevo(e_inst)
        ef = measures.eof(state, cfg=cfg).value
        dp = measures.discord(d_inst.state, "povm", cfg).value
        chi = measures.constrained_holevo(h_inst.channel, h_inst.rho, cfg=cfg).value
        case = {"case": i, "yes_instance": yes, "eps": e_inst.eps, "E_F": ef, "a": e_inst.a,
                "D_P": dp, "b": d_inst.b, "chi": chi, "c": h_inst.c}
        if yes:
            checks = {"eof": (ef - e_inst.a, tol), "discord": (dp - d_inst.b, tol),
                      "holevo": (h_inst.c - chi, tol)}
        else:
            eps = e_inst.eps
            checks = {"eof": (e_inst.a + eps - ef, 0.0), "discord": (d_inst.b + eps - dp, 0.0),
                      "holevo": (chi - (h_inst.c - eps), 0.0)}
        rep.cases.append(_checks(case, checks))
    return _finish(rep)


SUITES: dict[str, Callable[[int, int, OptimizerConfig], SuiteReport]] = {
    "koashi-winter": koashi_winter,
    "holevo-identity": holevo_identity,
    "inequality-chain": inequality_chain,
    "norm-bounds": norm_bounds,
    "linopt-equality": linopt_equality,
    "classicality-equivalence": classicality_equivalence,
    "steering-completeness": steering_completeness,
    "reduction-soundness": reduction_soundness,
}

DEFAULT_COUNTS = {"koashi-winter": 50, "holevo-identity": 50, "inequality-chain": 100,
                  "norm-bounds": 20, "linopt-equality": 100, "classicality-equivalence": 200,
                  "steering-completeness": 100, "reduction-soundness": 20}


def run_suite(name: str, seed: int = 0, count: int | None = None,
              cfg: OptimizerConfig | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    count = DEFAULT_COUNTS[name] if count is None else int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    cfg = cfg if cfg is not None else default_config(4)
    rep = SUITES[name](seed, count, cfg)
    rep.battery["config"] = cfg.to_dict()
    return rep
