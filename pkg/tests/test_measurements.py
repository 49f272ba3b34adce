import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcorr.measurements import (POVM, VonNeumannMeasurement, bloch_projectors,
                                computational_basis, measure_B, povm_from_matrix, povm_from_rows,
                                steer_ensemble, trivial_measurement, unitary_from_params,
                                vn_from_unitary)
from qcorr.measures import eof
from qcorr.qcore import (BipartiteState, DimensionError, InvariantError, bell_state,
                         partial_trace, product_state, purify, random_bipartite_state,
                         random_density_matrix, random_unitary, von_neumann_entropy)

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def test_measure_classical_state():
    cc = BipartiteState(np.diag([0.5, 0, 0, 0.5]), (2, 2))
    out = measure_B(cc, computational_basis(2))
    assert_allclose(out.probabilities, [0.5, 0.5])
    assert_allclose(out.states[0], np.diag([1, 0]), atol=1e-14)
    assert_allclose(out.states[1], np.diag([0, 1]), atol=1e-14)


def test_measure_product_state_leaves_a_alone():
    ra = random_density_matrix(2, seed=1).matrix
    s = product_state(ra, random_density_matrix(3, seed=2).matrix)
    povm = povm_from_matrix(np.random.default_rng(0).standard_normal((5, 3)))
    for st in measure_B(s, povm).states:
        assert_allclose(st, ra, atol=1e-12)


@pytest.mark.parametrize("theta,phi", [(0.3, 1.1), (1.9, 4.0), (math.pi / 2, 0.0)])
def test_bloch_measurement_on_bell_gives_pure_states(theta, phi):
    out = measure_B(bell_state(), bloch_projectors(theta, phi))
    assert_allclose(out.probabilities, [0.5, 0.5], atol=1e-12)
    for st in out.states:
        assert von_neumann_entropy(st) == pytest.approx(0, abs=1e-9)


def test_measure_average_is_marginal():
    s = random_bipartite_state(3, 2, seed=4)
    out = measure_B(s, povm_from_matrix(np.random.default_rng(2).standard_normal((4, 2))))
    assert_allclose(out.average(), partial_trace(s, "A").matrix, atol=1e-8)


def test_measure_dimension_mismatch():
    with pytest.raises(DimensionError):
        measure_B(bell_state(), computational_basis(3))


def test_vn_from_unitary_examples():
    assert_allclose(vn_from_unitary(np.eye(3)).projectors, computational_basis(3).projectors)
    plus = vn_from_unitary(HADAMARD).projectors
    assert_allclose(plus[0], np.full((2, 2), 0.5), atol=1e-14)
    assert_allclose(plus[1], np.array([[0.5, -0.5], [-0.5, 0.5]]), atol=1e-14)
    u = random_unitary(4, seed=3)
    assert_allclose(vn_from_unitary(u).projectors.sum(axis=0), np.eye(4), atol=1e-9)
    with pytest.raises(InvariantError):
        vn_from_unitary(np.array([[1, 1], [0, 1]]))


def test_unitary_from_params_is_unitary():
    u = unitary_from_params(np.random.default_rng(0).standard_normal(9), 3)
    assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


def test_povm_from_matrix_examples():
    assert_allclose(povm_from_matrix(np.eye(2)).elements, computational_basis(2).projectors)
    dup = povm_from_matrix(np.array([[1, 0], [1, 0], [0, 1]]))
    assert_allclose(dup.elements[0], np.diag([0.5, 0]), atol=1e-14)
    assert_allclose(dup.elements.sum(axis=0), np.eye(2), atol=1e-12)
    m = np.random.default_rng(5).standard_normal((4, 2)) + 1j * np.random.default_rng(6).standard_normal((4, 2))
    povm = povm_from_matrix(m)
    assert len(povm.elements) == 4
    assert_allclose(povm.elements.sum(axis=0), np.eye(2), atol=1e-9)
    assert all(np.linalg.eigvalsh(e)[0] > -1e-12 for e in povm.elements)


def test_povm_errors():
    with pytest.raises(InvariantError, match="singular"):
        povm_from_matrix(np.array([[1, 0], [2, 0]]))
    with pytest.raises(InvariantError):
        povm_from_matrix(np.ones((5, 2)) + np.eye(5, 2))
    with pytest.raises(InvariantError, match="completeness"):
        POVM(np.array([np.diag([1, 0])]))
    with pytest.raises(InvariantError, match="orthogonal"):
        VonNeumannMeasurement(np.array([np.diag([1, 0]), np.diag([1, 0])]))


def test_null_outcomes_are_flagged():
    s = BipartiteState(np.diag([1.0, 0, 0, 0]), (2, 2))
    out = measure_B(s, computational_basis(2))
    assert out.states[1] is None
    assert out.probabilities[1] == 0


def test_steer_trivial_and_basis():
    s = random_bipartite_state(2, 2, rank=3, seed=2)
    psi = purify(s, 3)
    ens = steer_ensemble(psi, trivial_measurement(3))
    assert len(ens) == 1
    assert_allclose(ens.density(0), s.matrix, atol=1e-12)

    diag = BipartiteState(np.diag([0.1, 0.2, 0.3, 0.4]), (2, 2))
    ens = steer_ensemble(purify(diag, 4), computational_basis(4))
    assert_allclose(sorted(ens.weights), [0.1, 0.2, 0.3, 0.4], atol=1e-12)
    for st in ens.states:
        assert von_neumann_entropy(st) == pytest.approx(0, abs=1e-9)


def test_steer_random_povm_mixture():
    rng = np.random.default_rng(3)
    for seed in range(10):
        s = random_bipartite_state(2, 2, seed=seed)
        povm = povm_from_matrix(rng.standard_normal((7, 4)) + 1j * rng.standard_normal((7, 4)))
        ens = steer_ensemble(purify(s, 4), povm)
        assert np.max(np.abs(ens.mixture() - s.matrix)) <= 1e-8


def test_hjw_realizability_of_eof_ensembles(fast):
    """An optimal ensemble with k members is steered by a k-outcome projective measurement."""
    s = random_bipartite_state(2, 2, rank=2, seed=8)
    res = eof(s, k=4, cfg=fast)
    ens = res.certificate
    k = len(ens)
    psi = purify(s, k)
    # column j of the purification matrix is sqrt(lam_j) e_j
    cols = psi.as_matrix()[:, :2]
    lam = np.sum(np.abs(cols) ** 2, axis=0)
    vecs = cols / np.sqrt(lam)
    # sqrt(p_i) psi_i = sum_j W_ij sqrt(lam_j) e_j, with W a k x 2 isometry
    rows = np.array([math.sqrt(p) * st.vector for p, st in zip(ens.weights, ens.states)])
    w = (rows @ vecs.conj()) / np.sqrt(lam)
    assert_allclose(w.conj().T @ w, np.eye(2), atol=1e-9)
    basis = np.zeros((k, k), dtype=complex)
    basis[:, :2] = w
    q, _ = np.linalg.qr(np.hstack([w, np.random.default_rng(0).standard_normal((k, k - 2))]))
    basis[:, 2:] = q[:, 2:]
    # outcome i projects C onto conj(row i of the unitary)
    meas = vn_from_unitary(basis.conj().T)
    steered = steer_ensemble(psi, meas)
    for p, st in zip(ens.weights, ens.states):
        target = np.outer(st.vector, st.vector.conj())
        match = [abs(q - p) < 1e-7 and np.max(np.abs(r.matrix - target)) < 1e-7
                 for q, r in zip(steered.weights, steered.states)]
        assert any(match)


def test_povm_from_rows_builds_rank_one_elements():
    v = np.linalg.qr(np.random.default_rng(1).standard_normal((4, 2)))[0]
    povm = povm_from_rows(v)
    assert_allclose(povm.elements.sum(axis=0), np.eye(2), atol=1e-12)
