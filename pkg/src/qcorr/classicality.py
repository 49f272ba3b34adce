"""Zero-discord (quantum-classical / classical-classical) detection and CC search in extensions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _grad
from ._grad import pack, param_count, unpack
from .measurements import VonNeumannMeasurement, vn_from_unitary
from .measures import (DESK_DIM_CAP, NORM_SMOOTHING, MeasureResult, SeparableAnsatz, _cfg,
                       _frobenius_loss, _report, _trace_loss)
from .optimize import Objective, OptimizerConfig, local_search, minimize
from .qcore import (BipartiteState, DensityMatrix, DimensionError, ptrace, random_density_matrix,
                    random_pure_vector, random_unitary, trace_norm)

DEFAULT_TOL = 1e-8
DIAG_RETRIES = 5


@dataclass(frozen=True)
class ClassicalityReport:
    verdict: str
    max_commutator_norm: float
    max_normality_defect: float
    witness: VonNeumannMeasurement | tuple | None = None
    witness_residual: float = math.nan
    probabilities: np.ndarray | None = None

    @property
    def classical(self) -> bool:
        return self.verdict == "classical"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "max_commutator_norm": self.max_commutator_norm,
               "max_normality_defect": self.max_normality_defect,
               "witness_residual": None if math.isnan(self.witness_residual)
               else self.witness_residual}
        if self.probabilities is not None:
            out["probabilities"] = np.asarray(self.probabilities).tolist()
        return out


def _blocks(state: BipartiteState) -> np.ndarray:
    """B_kl with rho = sum_kl |k><l|_A (x) B_kl, shape (m, m, n, n)."""
    m, n = state.dims
    return state.matrix.reshape(m, n, m, n).transpose(0, 2, 1, 3)


def _common_eigenbasis(ops: np.ndarray, tol: float, seed: int = 0) -> tuple[np.ndarray | None, float]:
    """Unitary diagonalizing a commuting family, via a random real combination."""
    herm = np.concatenate([0.5 * (ops + np.conj(np.swapaxes(ops, 1, 2))),
                           -0.5j * (ops - np.conj(np.swapaxes(ops, 1, 2)))])
    scale = max(np.max(np.abs(herm)), 1e-300)
    rng = np.random.default_rng(seed)
    best_u, best_off = None, math.inf
    for _ in range(DIAG_RETRIES):
        coef = rng.standard_normal(len(herm))
        _, u = np.linalg.eigh(np.einsum("k,kab->ab", coef, herm))
        rot = np.conj(u.T)[None] @ ops @ u[None]
        off = rot - np.einsum("kaa->ka", rot)[:, :, None] * np.eye(ops.shape[1])[None]
        err = float(np.max(np.linalg.norm(off, axis=(1, 2))))
        if err < best_off:
            best_u, best_off = u, err
        if err <= tol * max(scale, 1.0):
            break
    return best_u, best_off


def _dephase_b(state: BipartiteState, u: np.ndarray) -> np.ndarray:
    m, n = state.dims
    projs = np.einsum("ak,bk->kab", u, u.conj())
    out = np.zeros_like(state.matrix)
    for p in projs:
        big = np.kron(np.eye(m), p)
        out += big @ state.matrix @ big
    return out


def is_quantum_classical(state: BipartiteState, tol: float = DEFAULT_TOL) -> ClassicalityReport:
    """Zero discord on B iff all blocks B_kl are normal and mutually commute."""
    m, n = state.dims
    blocks = _blocks(state).reshape(m * m, n, n)
    comm = 0.0
    for x, y in itertools.combinations(blocks, 2):
        comm = max(comm, float(np.linalg.norm(x @ y - y @ x)))
    normal = max(float(np.linalg.norm(b @ b.conj().T - b.conj().T @ b)) for b in blocks)
    if comm > tol or normal > tol:
        return ClassicalityReport("not-classical", comm, normal)
    u, _ = _common_eigenbasis(blocks, tol)
    witness = vn_from_unitary(u)
    resid = float(np.max(np.abs(_dephase_b(state, u) - state.matrix)))
    return ClassicalityReport("classical", comm, normal, witness, resid)


def is_classical_classical(state: BipartiteState, tol: float = DEFAULT_TOL) -> ClassicalityReport:
    """Quantum-classical on both cuts; the witness is the product basis pair."""
    rb = is_quantum_classical(state, tol)
    ra = is_quantum_classical(state.swap(), tol)
    comm = max(rb.max_commutator_norm, ra.max_commutator_norm)
    normal = max(rb.max_normality_defect, ra.max_normality_defect)
    if not (rb.classical and ra.classical):
        return ClassicalityReport("not-classical", comm, normal)
    ua = ra.witness.projectors
    ub = rb.witness.projectors
    probs = np.real(np.einsum("iab,jcd,bdac->ij", ua, ub,
                              state.matrix.reshape(*state.dims, *state.dims)))
    # rho must equal sum_ij p_ij Pa_i (x) Pb_j
    rebuilt = sum(probs[i, j] * np.kron(ua[i], ub[j])
                  for i in range(len(ua)) for j in range(len(ub)))
    resid = float(np.max(np.abs(rebuilt - state.matrix)))
    return ClassicalityReport("classical", comm, normal, (ra.witness, rb.witness), resid, probs)


# ---------------------------------------------------------------------------
# generators


def random_qc_state(m: int, n: int, seed=None, terms: int | None = None) -> BipartiteState:
    """sum_i p_i rho_i^A (x) |b_i><b_i| with a random orthonormal basis {b_i}."""
    rng = np.random.default_rng(seed)
    terms = n if terms is None else min(terms, n)
    u = random_unitary(n, rng)
    p = rng.dirichlet(np.ones(terms))
    rho = sum(p[i] * np.kron(random_density_matrix(m, seed=rng).matrix, np.outer(u[:, i], u[:, i].conj()))
              for i in range(terms))
    return BipartiteState(rho, (m, n))


def random_cc_state(m: int, n: int, seed=None) -> BipartiteState:
    """sum_ij p_ij |a_i><a_i| (x) |b_j><b_j| in a random product basis."""
    rng = np.random.default_rng(seed)
    ua, ub = random_unitary(m, rng), random_unitary(n, rng)
    p = rng.dirichlet(np.ones(m * n)).reshape(m, n)
    diag = np.diag(p.ravel()).astype(np.complex128)
    u = np.kron(ua, ub)
    return BipartiteState(u @ diag @ u.conj().T, (m, n))


def separable_decomposition(m: int, n: int, terms: int = 2, seed=None) -> SeparableAnsatz:
    """Random mixture of ``terms`` pure product states, kept in decomposed form."""
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(terms))
    a = np.array([random_pure_vector(m, rng) for _ in range(terms)])
    b = np.array([random_pure_vector(n, rng) for _ in range(terms)])
    return SeparableAnsatz(p, a, b)


def random_separable_state(m: int, n: int, terms: int = 2, seed=None) -> BipartiteState:
    return separable_decomposition(m, n, terms, seed).state()


# ---------------------------------------------------------------------------
# classical-classical states inside the extension set K


def full_extension_dims(m: int, n: int) -> tuple[int, int]:
    """Ancilla dims (m', n') giving AA' x BB' = m^3 n^2 x m^2 n^3."""
    return m * m * n * n, m * m * n * n


def _cc_parts(x: np.ndarray, m: int, n: int, ma: int, nb: int):
    da, db = m * ma, n * nb
    mat_a, mat_b, w = unpack(x, (da, da), (db, db), (da * db,))
    w = w.real
    return mat_a, mat_b, w


def _cc_marginal(ua: np.ndarray, ub: np.ndarray, w: np.ndarray, m: int, n: int, ma: int, nb: int):
    da, db = m * ma, n * nb
    ta = ua.T.reshape(da, m, ma)
    tb = ub.T.reshape(db, n, nb)
    alpha = ta @ np.conj(np.swapaxes(ta, 1, 2))
    beta = tb @ np.conj(np.swapaxes(tb, 1, 2))
    s = float(np.sum(w ** 2))
    p = (w ** 2 / s).reshape(da, db)
    sigma = np.einsum("ij,iac,jbd->abcd", p, alpha, beta).reshape(m * n, m * n)
    return sigma, p, s, ta, tb, alpha, beta


def cc_objective(state: BipartiteState, ext_dims: tuple[int, int], loss) -> Objective:
    """loss(rho - tr_{A'B'} sigma) over CC states sigma on AA' | BB'."""
    m, n = state.dims
    ma, nb = ext_dims
    da, db = m * ma, n * nb

    def vg(x):
        mat_a, mat_b, w = _cc_parts(x, m, n, ma, nb)
        ua, vjp_a = _grad.polar(mat_a)
        ub, vjp_b = _grad.polar(mat_b)
        if ua is None or ub is None or not np.any(w):
            return math.inf, np.zeros_like(x)
        sigma, p, s, ta, tb, alpha, beta = _cc_marginal(ua, ub, w, m, n, ma, nb)
        val, g = loss(sigma)
        gt = g.T.reshape(m, n, m, n)
        # d val = sum Gt[a,b,c,d] dsigma[a,b,c,d]
        dp = np.real(np.einsum("abcd,iac,jbd->ij", gt, alpha, beta))
        ga = np.einsum("ij,abcd,jbd->iac", p, gt, beta)
        gb = np.einsum("ij,abcd,iac->jbd", p, gt, alpha)
        # d val = Re tr(ga_i^T d alpha_i) with alpha_i = t_i t_i^dag
        gta = 2.0 * np.swapaxes(ga, 1, 2) @ ta
        gtb = 2.0 * np.swapaxes(gb, 1, 2) @ tb
        gua = gta.reshape(da, da).T
        gub = gtb.reshape(db, db).T
        flat_p = p.ravel()
        flat_dp = dp.ravel()
        gw = (2.0 * w / s) * (flat_dp - np.dot(flat_p, flat_dp))
        return val, np.concatenate([pack(vjp_a(gua), vjp_b(gub)), gw, np.zeros_like(gw)])

    arity = param_count((da, da), (db, db), (da * db,))
    return Objective(fun=lambda x: vg(x)[0], arity=arity, value_and_grad=vg)


def _marginal_eigen_start(state: BipartiteState, ext_dims) -> np.ndarray:
    m, n = state.dims
    ma, nb = ext_dims
    _, va = np.linalg.eigh(ptrace(state.matrix, state.dims, [0]))
    _, vb = np.linalg.eigh(ptrace(state.matrix, state.dims, [1]))
    ua = np.kron(va, np.eye(ma))
    ub = np.kron(vb, np.eye(nb))
    w = np.zeros((m * ma, n * nb))
    probs = np.real(np.einsum("ai,bj,abcd,ci,dj->ij", va.conj(), vb.conj(),
                              state.matrix.reshape(m, n, m, n), va, vb))
    w[np.ix_(np.arange(m) * ma, np.arange(n) * nb)] = np.sqrt(np.clip(probs, 0, None) + 1e-16)
    return np.concatenate([pack(ua.T, ub.T), w.ravel(), np.zeros(w.size)])


def cc_state_from_params(x: np.ndarray, state: BipartiteState, ext_dims) -> DensityMatrix:
    m, n = state.dims
    ma, nb = ext_dims
    mat_a, mat_b, w = _cc_parts(x, m, n, ma, nb)
    ua = _grad.polar(mat_a)[0].T
    ub = _grad.polar(mat_b)[0].T
    p = (w ** 2 / np.sum(w ** 2)).reshape(m * ma, n * nb)
    sig = sum(p[i, j] * np.kron(np.outer(ua[i], ua[i].conj()), np.outer(ub[j], ub[j].conj()))
              for i in range(m * ma) for j in range(n * nb) if p[i, j] > 0)
    return DensityMatrix(0.5 * (sig + sig.conj().T), (m * ma, n * nb))


def reduce_extended(sigma: np.ndarray, dims: tuple[int, int], ext_dims: tuple[int, int]) -> np.ndarray:
    """tr_{A'B'} of a state on (A A') (x) (B B')."""
    m, n = dims
    ma, nb = ext_dims
    return ptrace(sigma, (m, ma, n, nb), [0, 2])


def cc_in_extension_gap(state: BipartiteState, ext_dims: tuple[int, int] | None = None,
                        cfg: OptimizerConfig | None = None) -> MeasureResult:
    """min over CC states sigma on AA'|BB' of ||rho_AB - tr_{A'B'} sigma||_1 (upper bound).

    Without ``ext_dims`` the ancilla dimensions m'=n'=m^2 n^2 are used, which
    exceeds the desk-scale cap for every nontrivial input; pass smaller ones.
    """
    m, n = state.dims
    ext_dims = tuple(ext_dims) if ext_dims is not None else full_extension_dims(m, n)
    total = m * ext_dims[0] * n * ext_dims[1]
    if total > DESK_DIM_CAP:
        raise DimensionError(f"extended dimension {total} exceeds the desk-scale cap {DESK_DIM_CAP}")
    cfg = _cfg(cfg, state.dim)
    rho = state.matrix

    res = minimize(cc_objective(state, ext_dims, _frobenius_loss(rho)), cfg,
                   initial=[_marginal_eigen_start(state, ext_dims)])
    candidates = [res.best_params]
    for mu in NORM_SMOOTHING:
        x = local_search(cc_objective(state, ext_dims, _trace_loss(rho, mu)), candidates[-1], cfg)
        candidates.append(x.best_params)
    sigmas = [cc_state_from_params(x, state, ext_dims) for x in candidates]
    gaps = [trace_norm(rho - reduce_extended(s.matrix, state.dims, ext_dims)) for s in sigmas]
    best = int(np.argmin(gaps))
    return MeasureResult("cc_extension_gap", gaps[best], sigmas[best],
                         _report(res, cfg, ext_dims=list(ext_dims)), "upper")
