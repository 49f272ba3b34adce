import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcorr.classicality import (ClassicalityReport, cc_in_extension_gap, full_extension_dims,
                                is_classical_classical, is_quantum_classical, random_cc_state,
                                random_qc_state, random_separable_state, reduce_extended,
                                separable_decomposition)
from qcorr.measurements import measure_B
from qcorr.measures import discord, distance_to_separable
from qcorr.qcore import (BipartiteState, DimensionError, bell_state, random_bipartite_state,
                         random_density_matrix, random_hermitian, random_unitary,
                         trace_norm)
from qcorr.reductions import cc_extension


def classical_mixture():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    return BipartiteState(m, (2, 2))


def dephased(state, witness):
    return sum(np.kron(np.eye(2), p) @ state.matrix @ np.kron(np.eye(2), p)
               for p in witness.projectors)


def test_classical_mixture_is_qc_with_computational_witness():
    s = classical_mixture()
    rep = is_quantum_classical(s)
    assert rep.classical
    proj = rep.witness.projectors
    diag = sorted(np.argmax(np.abs(np.diag(p))) for p in proj)
    assert diag == [0, 1]
    for p in proj:
        assert_allclose(np.abs(p), np.diag(np.abs(np.diag(p))), atol=1e-12)
    assert_allclose(dephased(s, rep.witness), s.matrix, atol=1e-7)


def test_bell_is_not_classical():
    rep = is_quantum_classical(bell_state())
    assert rep.verdict == "not-classical"
    assert rep.max_commutator_norm > 0.1
    assert rep.witness is None
    assert not is_classical_classical(bell_state()).classical


def test_random_qc_states(fast):
    for seed in range(4):
        s = random_qc_state(2, 2, seed)
        rep = is_quantum_classical(s)
        assert rep.classical
        assert rep.witness_residual <= 1e-7
        assert_allclose(dephased(s, rep.witness), s.matrix, atol=1e-7)
        assert discord(s, "vn", fast).value <= 1e-6


def test_qc_states_in_larger_dims():
    s = random_qc_state(3, 2, seed=4)
    assert is_quantum_classical(s).classical
    assert is_quantum_classical(random_qc_state(2, 3, seed=5)).classical


def test_qc_but_not_cc():
    s = random_qc_state(2, 2, seed=1)
    assert is_quantum_classical(s).classical
    assert not is_classical_classical(s).classical


def test_diagonal_state_is_cc():
    p = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    rep = is_classical_classical(BipartiteState(p, (2, 2)))
    assert rep.classical
    assert_allclose(np.sort(rep.probabilities.ravel()), [0.1, 0.2, 0.3, 0.4], atol=1e-8)


def test_cc_generator_round_trip():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        s = random_cc_state(2, 3, rng)
        rep = is_classical_classical(s)
        assert rep.classical
        assert rep.witness_residual <= 1e-8
        assert rep.probabilities.sum() == pytest.approx(1.0)
        # rebuild the generator's probabilities from the same stream
        rng = np.random.default_rng(seed)
        random_unitary(2, rng), random_unitary(3, rng)
        p = rng.dirichlet(np.ones(6))
        assert_allclose(np.sort(rep.probabilities.ravel()), np.sort(p), atol=1e-8)


def test_perturbation_flips_verdict():
    eps = 1e-3
    for seed in range(5):
        s = random_qc_state(2, 2, seed)
        h = random_hermitian(4, seed + 50)
        h -= np.trace(h) / 4 * np.eye(4)
        h /= np.linalg.norm(h)
        m = s.matrix + eps * h
        lam = np.linalg.eigvalsh(m)
        if lam.min() < 0:
            m = (m - lam.min() * np.eye(4)) / (1 - 4 * lam.min())
        rep = is_quantum_classical(BipartiteState(m, (2, 2)))
        assert rep.verdict == "not-classical"
        assert max(rep.max_commutator_norm, rep.max_normality_defect) >= eps / 10


def test_cc_implies_qc_on_both_cuts():
    states = [random_cc_state(2, 2, s) for s in range(5)]
    states += [random_qc_state(2, 2, s) for s in range(5)]
    states += [random_bipartite_state(2, 2, seed=s) for s in range(5)]
    for s in states:
        if is_classical_classical(s).classical:
            assert is_quantum_classical(s).classical
            assert is_quantum_classical(s.swap()).classical


def test_report_to_dict():
    d = is_classical_classical(classical_mixture()).to_dict()
    assert d["verdict"] == "classical"
    assert isinstance(ClassicalityReport("not-classical", 1.0, 0.0).to_dict()["witness_residual"],
                      type(None))


def test_cc_gap_on_cc_state_with_trivial_extension(fast):
    s = random_cc_state(2, 2, seed=3)
    assert cc_in_extension_gap(s, (1, 1), fast).value <= 1e-8


def test_cc_gap_on_separable_state(fast):
    decomp = separable_decomposition(2, 2, 2, seed=8)
    s = decomp.state()
    ext = cc_extension(decomp, (2, 2))
    assert trace_norm(reduce_extended(ext.matrix, (2, 2), (2, 2)) - s.matrix) <= 1e-12
    assert is_classical_classical(ext).classical
    res = cc_in_extension_gap(s, (2, 2), fast)
    assert res.value <= 1e-4
    red = reduce_extended(res.certificate.matrix, (2, 2), (2, 2))
    assert trace_norm(red - s.matrix) == pytest.approx(res.value, abs=1e-12)


def test_cc_gap_bell_lower_bounded_by_distance(fast):
    b = bell_state()
    gap = cc_in_extension_gap(b, (2, 2), fast).value
    assert gap >= distance_to_separable(b, "frobenius", cfg=fast).value - 1e-3


def test_cc_gap_dimension_cap():
    assert full_extension_dims(2, 2) == (16, 16)
    with pytest.raises(DimensionError):
        cc_in_extension_gap(random_separable_state(2, 2, 2, seed=1))


def test_measurement_invariance_of_witness():
    s = random_qc_state(2, 2, seed=9, terms=2)
    rep = is_quantum_classical(s)
    outcomes = measure_B(s, rep.witness)
    rebuilt = sum(p * np.kron(getattr(sig, "matrix", sig), proj) for p, sig, proj
                  in zip(outcomes.probabilities, outcomes.states, rep.witness.projectors)
                  if sig is not None)
    assert_allclose(rebuilt, s.matrix, atol=1e-7)


def test_density_is_qc_for_product_states():
    a, b = random_density_matrix(2, seed=1).matrix, random_density_matrix(2, seed=2).matrix
    assert is_classical_classical(BipartiteState(np.kron(a, b), (2, 2))).classical
