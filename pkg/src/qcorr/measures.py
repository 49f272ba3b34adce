"""Correlation and entanglement measures as optimization problems.

Every optimization-based value is a one-sided bound certified by the returned
certificate: ``bound_direction == "upper"`` means the true value is at most
``value`` (the optimizer achieved it), ``"lower"`` means at least ``value``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _grad
from ._grad import LN2, pack, param_count, unpack
from .measurements import NULL_OUTCOME, measure_B, povm_from_rows, vn_from_unitary
from .optimize import (Objective, OptimizationResult, OptimizerConfig,
                       default_config, local_search, minimize)
from .qcore import (BipartiteState, DensityMatrix, DimensionError, Ensemble, PureState,
                    QuantumChannel, RANK_TOL, entropy_of_spectrum, frobenius_norm,
                    mutual_information, partial_trace_channel, ptrace, relative_entropy,
                    trace_norm, von_neumann_entropy)

DESK_DIM_CAP = 64
RELENT_PENALTY = 1e6
BOUND_SLACK = 1e-7


@dataclass(frozen=True)
class SeparableAnsatz:
    """sigma = sum_i q_i |a_i><a_i| (x) |b_i><b_i| with unit vectors a_i, b_i."""

    weights: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("separable ansatz weights must be a probability vector")

    @classmethod
    def from_vectors(cls, c: np.ndarray, d: np.ndarray) -> "SeparableAnsatz":
        nc = np.linalg.norm(c, axis=1)
        nd = np.linalg.norm(d, axis=1)
        w = (nc * nd) ** 2
        keep = w > 0
        w = w[keep] / w[keep].sum()
        return cls(w, c[keep] / nc[keep, None], d[keep] / nd[keep, None])

    @property
    def dims(self) -> tuple[int, int]:
        return self.a.shape[1], self.b.shape[1]

    def matrix(self) -> np.ndarray:
        x = np.einsum("ia,ib->iab", self.a, self.b).reshape(len(self.weights), -1)
        return np.einsum("i,ip,iq->pq", self.weights, x, x.conj())

    def state(self) -> BipartiteState:
        s = self.matrix()
        return BipartiteState(0.5 * (s + s.conj().T), self.dims)


@dataclass(frozen=True)
class MeasureResult:
    name: str
    value: float
    certificate: Any = None
    report: dict = field(default_factory=dict)
    bound_direction: str = "upper"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    def __float__(self):
        return self.value


def _report(res: OptimizationResult | None, cfg: OptimizerConfig | None, **kw) -> dict:
    out = {} if res is None else res.summary()
    if cfg is not None:
        out["config"] = cfg.to_dict()
    out.update(kw)
    return out


def _cfg(cfg: OptimizerConfig | None, total_dim: int) -> OptimizerConfig:
    return cfg if cfg is not None else default_config(total_dim)


def _spectrum(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lam, vecs = np.linalg.eigh(rho)
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    r = max(int(np.sum(lam > RANK_TOL)), 1)
    return np.clip(lam[:r], 0.0, None), vecs[:, :r]


# ---------------------------------------------------------------------------
# mutual information, classical correlation, discord


def conditional_entropy_objective(state: BipartiteState, k: int) -> Objective:
    """sum_i p_i S(rho_A^i) over rank-one measurements on B built from a k x n matrix."""
    m, n = state.dims
    r = state.matrix.reshape(m, n, m, n)

    def vg(x):
        mat, = unpack(x, (k, n))
        v, vjp = _grad.polar(mat)
        if v is None:
            return math.inf, np.zeros_like(x)
        xs = np.einsum("ib,abce,ie->iac", v, r, v.conj())
        val, g = _grad.weighted_entropy(xs)
        kk = np.einsum("ica,abce->ibe", g, r)
        gv = 2.0 * np.einsum("ib,ibe->ie", v, kk)
        return val, pack(vjp(gv))

    return Objective(fun=lambda x: vg(x)[0], arity=param_count((k, n)), value_and_grad=vg)


def measurement_from_rows(v: np.ndarray, kind: str):
    if kind == "vn":
        return vn_from_unitary(v.conj().T)
    return povm_from_rows(v)


def average_conditional_entropy(state: BipartiteState, meas) -> float:
    out = measure_B(state, meas)
    return sum(p * von_neumann_entropy(s) for p, s in zip(out.probabilities, out.states)
               if s is not None and p >= NULL_OUTCOME)


def _min_conditional_entropy(state: BipartiteState, kind: str, cfg: OptimizerConfig):
    m, n = state.dims
    vn_obj = conditional_entropy_objective(state, n)
    # computational basis always enters as the first start
    vn_res = minimize(vn_obj, cfg, initial=[pack(np.eye(n, dtype=complex))])
    best_rows = _grad.polar(unpack(vn_res.best_params, (n, n))[0])[0]
    if kind == "vn":
        return vn_res, best_rows
    k = n * n
    obj = conditional_entropy_objective(state, k)
    embed = np.zeros((k, n), dtype=complex)
    embed[:n] = best_rows
    res = minimize(obj, cfg, initial=[pack(embed)])
    if res.best_value > vn_res.best_value:
        res = OptimizationResult(vn_res.best_value, pack(embed), res.converged,
                                 res.starts_within_tol, res.evaluations, res.start_values)
    rows = _grad.polar(unpack(res.best_params, (k, n))[0])[0]
    return res, rows


def classical_correlation(state: BipartiteState, kind: str = "vn",
                          cfg: OptimizerConfig | None = None) -> MeasureResult:
    """J(A|B) = S(A) - min_measurements sum_i p_i S(rho_A^i); a certified lower bound."""
    if kind not in ("vn", "povm"):
        raise ValueError(f"kind must be 'vn' or 'povm', got {kind!r}")
    cfg = _cfg(cfg, state.dim)
    res, rows = _min_conditional_entropy(state, kind, cfg)
    meas = measurement_from_rows(rows, kind)
    cond = average_conditional_entropy(state, meas)
    sa = von_neumann_entropy(ptrace(state.matrix, state.dims, [0]))
    sb = von_neumann_entropy(ptrace(state.matrix, state.dims, [1]))
    j = sa - cond
    if j < -BOUND_SLACK or j > min(sa, sb) + BOUND_SLACK:
        raise ArithmeticError(f"classical correlation {j} outside [0, min(S_A, S_B)]")
    j = min(max(j, 0.0), min(sa, sb))
    return MeasureResult(f"J_{kind}", j, meas, _report(res, cfg, conditional_entropy=cond),
                         "lower")


def discord(state: BipartiteState, kind: str = "vn",
            cfg: OptimizerConfig | None = None) -> MeasureResult:
    """D(A|B) = I(A:B) - J(A|B), measured on B; a certified upper bound."""
    jres = classical_correlation(state, kind, cfg)
    mi = mutual_information(state)
    d = mi - jres.value
    if d < -BOUND_SLACK:
        raise ArithmeticError(f"discord {d} is negative")
    return MeasureResult(f"D_{kind}", max(d, 0.0), jres.certificate,
                         dict(jres.report, mutual_information=mi, classical_correlation=jres.value),
                         "upper")


def mutual_information_result(state: BipartiteState) -> MeasureResult:
    return MeasureResult("I", mutual_information(state), None, {}, "exact-eigen")


# ---------------------------------------------------------------------------
# ensembles: entanglement of formation and constrained Holevo quantities


def ensemble_objective(lam: np.ndarray, vecs: np.ndarray, kraus: np.ndarray, k: int) -> Objective:
    """sum_i p_i S(Phi(psi_i)) over HJW ensembles of rho = vecs diag(lam) vecs^dag.

    Parameters form a k x r matrix M; the ensemble is sqrt(p_i) psi_i = row i of
    polar(M) diag(sqrt(lam)) vecs^T.
    """
    r = lam.size
    base = np.sqrt(lam)[:, None] * vecs.T
    base_h = base.conj().T

    def vg(x):
        mat, = unpack(x, (k, r))
        v, vjp = _grad.polar(mat)
        if v is None:
            return math.inf, np.zeros_like(x)
        psi = v @ base
        y = np.einsum("jon,kn->koj", kraus, psi)
        val, g = _grad.weighted_entropy(y @ np.conj(np.swapaxes(y, 1, 2)))
        gy = 2.0 * g @ y
        gpsi = np.einsum("jon,koj->kn", kraus.conj(), gy)
        return val, pack(vjp(gpsi @ base_h))

    return Objective(fun=lambda x: vg(x)[0], arity=param_count((k, r)), value_and_grad=vg)


def _ensemble_from_params(x, lam, vecs, k, dims, parent) -> Ensemble:
    r = lam.size
    v = _grad.polar(unpack(x, (k, r))[0])[0]
    psi = v @ (np.sqrt(lam)[:, None] * vecs.T)
    p = np.sum(np.abs(psi) ** 2, axis=1)
    keep = p > NULL_OUTCOME
    members = [PureState(row / np.linalg.norm(row), dims) for row in psi[keep]]
    return Ensemble(p[keep] / p[keep].sum(), members, parent=parent)


def _eigen_start(k: int, r: int) -> np.ndarray:
    m = np.zeros((k, r), dtype=complex)
    m[:r] = np.eye(r)
    return pack(m)


def _min_output_entropy(rho: np.ndarray, kraus: np.ndarray, k: int | None, cap: int,
                        cfg: OptimizerConfig, dims):
    lam, vecs = _spectrum(rho)
    r = lam.size
    k = cap if k is None else k
    if k < r:
        raise ValueError(f"ensemble size k = {k} is smaller than rank = {r}")
    obj = ensemble_objective(lam, vecs, kraus, k)
    res = minimize(obj, cfg, initial=[_eigen_start(k, r)])
    return res, _ensemble_from_params(res.best_params, lam, vecs, k, dims, None)


def ensemble_average_entropy(ens: Ensemble, ch: QuantumChannel) -> float:
    return sum(p * von_neumann_entropy(ch.apply_matrix(ens.density(i)))
               for i, p in enumerate(ens.weights))


def eof(state: BipartiteState, k: int | None = None,
        cfg: OptimizerConfig | None = None) -> MeasureResult:
    """Entanglement of formation, minimized over k-member pure-state ensembles (upper bound)."""
    m, n = state.dims
    cfg = _cfg(cfg, state.dim)
    ch = partial_trace_channel(m, n)
    res, ens = _min_output_entropy(state.matrix, ch.kraus, k, (m * n) ** 2, cfg, state.dims)
    ens = Ensemble(ens.weights, ens.states, parent=state)
    val = ensemble_average_entropy(ens, ch)
    return MeasureResult("E_F", val, ens, _report(res, cfg, k=len(ens)), "upper")


def constrained_holevo(ch: QuantumChannel, rho, k: int | None = None,
                       cfg: OptimizerConfig | None = None) -> MeasureResult:
    """chi_Phi(rho) = S(Phi(rho)) - min ensemble output entropy (lower bound)."""
    mat = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho, dtype=complex)
    if mat.shape != (ch.dim_in, ch.dim_in):
        raise DimensionError(f"channel expects dim {ch.dim_in}, got state of shape {mat.shape}")
    cfg = _cfg(cfg, ch.dim_in)
    res, ens = _min_output_entropy(mat, ch.kraus, k, ch.dim_in ** 2, cfg, ())
    out_entropy = von_neumann_entropy(ch.apply_matrix(mat))
    avg = ensemble_average_entropy(ens, ch)
    return MeasureResult("chi_rho", out_entropy - avg, ens,
                         _report(res, cfg, output_entropy=out_entropy, min_average_entropy=avg),
                         "lower")


def _holevo_quantity(w: np.ndarray, ch: QuantumChannel) -> float:
    nrm = np.linalg.norm(w)
    if nrm == 0:
        return 0.0
    psi = w / nrm
    outs = np.einsum("jon,kn->koj", ch.kraus, psi)
    outs = outs @ np.conj(np.swapaxes(outs, 1, 2))
    avg = _grad.weighted_entropy(outs)[0]
    return _grad.entropy_bits(outs.sum(axis=0)) - avg


def holevo_capacity(ch: QuantumChannel, k: int | None = None,
                    cfg: OptimizerConfig | None = None) -> MeasureResult:
    """chi_Phi = sup_rho chi_Phi(rho), maximized jointly over input ensembles (lower bound).

    An ensemble of k unnormalized vectors w_i fixes both the input state
    sum_i w_i w_i^dag and its decomposition, so one search covers the outer
    supremum over rho and the inner infimum over decompositions.
    """
    n = ch.dim_in
    k = n * n if k is None else k
    cfg = _cfg(cfg, n)
    obj = Objective(fun=lambda x: -_holevo_quantity(unpack(x, (k, n))[0], ch),
                    arity=param_count((k, n)))
    eye = np.zeros((k, n), dtype=complex)
    eye[:n] = np.eye(n)
    res = minimize(obj, cfg.with_(method="lbfgs"), initial=[pack(eye)])
    w = unpack(res.best_params, (k, n))[0]
    w = w / np.linalg.norm(w)
    p = np.sum(np.abs(w) ** 2, axis=1)
    keep = p > NULL_OUTCOME
    rho = w.T @ w.conj()
    ens = Ensemble(p[keep] / p[keep].sum(), [PureState(r / np.linalg.norm(r)) for r in w[keep]],
                   parent=DensityMatrix(0.5 * (rho + rho.conj().T)))
    val = von_neumann_entropy(ch.apply_matrix(ens.mixture())) - ensemble_average_entropy(ens, ch)
    return MeasureResult("chi", max(val, 0.0), ens, _report(res, cfg), "lower")


# ---------------------------------------------------------------------------
# separable ansatz: relative entropy of entanglement and distances


def separable_objective(state: BipartiteState, k: int, loss) -> Objective:
    """Generic objective loss(sigma) over the k-term separable ansatz.

    ``loss(sigma)`` returns (value, dvalue/dsigma) with dvalue = tr(G dsigma).
    """
    m, n = state.dims

    def vg(x):
        c, d = unpack(x, (k, m), (k, n))
        xs = np.einsum("ia,ib->iab", c, d).reshape(k, m * n)
        y = xs.T @ xs.conj()
        t = float(np.real(np.trace(y)))
        if not t > 0:
            return math.inf, np.zeros_like(x)
        sigma = y / t
        val, g = loss(sigma)
        if not math.isfinite(val):
            return val, np.zeros_like(x)
        gy = (g - np.real(np.trace(g @ sigma)) * np.eye(m * n)) / t
        gx = (2.0 * xs @ gy.T).reshape(k, m, n)
        gc = np.einsum("iab,ib->ia", gx, d.conj())
        gd = np.einsum("iab,ia->ib", gx, c.conj())
        return val, pack(gc, gd)

    return Objective(fun=lambda x: vg(x)[0], arity=param_count((k, m), (k, n)), value_and_grad=vg)


def _relent_loss(rho: np.ndarray):
    neg_s = -entropy_of_spectrum(np.clip(np.linalg.eigvalsh(rho), 0, None))

    def loss(sigma):
        s, q = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
        rq = np.conj(q.T) @ rho @ q
        diag = np.real(np.diag(rq))
        bad = s <= 1e-14
        if np.any(bad & (diag > RANK_TOL)):
            return RELENT_PENALTY, np.zeros_like(sigma)
        s = np.maximum(s, 1e-300)
        cross = float(np.sum(diag * np.log(s))) / LN2
        g = -_grad.log_derivative_adjoint((s, q), rho) / LN2
        return neg_s - cross, g

    return loss


def _frobenius_loss(rho: np.ndarray):
    def loss(sigma):
        diff = sigma - rho
        return float(np.real(np.sum(np.abs(diff) ** 2))), 2.0 * diff
    return loss


def _trace_loss(rho: np.ndarray, mu: float = 0.0):
    """Trace norm of sigma - rho, smoothed as sum sqrt(lam^2 + mu^2) when mu > 0."""
    def loss(sigma):
        lam, q = np.linalg.eigh(sigma - rho)
        if mu > 0:
            root = np.sqrt(lam * lam + mu * mu)
            return float(np.sum(root)), (q * (lam / root)) @ q.conj().T
        return float(np.sum(np.abs(lam))), (q * np.sign(lam)) @ q.conj().T
    return loss


def _frobenius_norm_loss(rho: np.ndarray, mu: float):
    """sqrt(||sigma - rho||_2^2 + mu^2): sharp near zero, unlike the squared loss."""
    def loss(sigma):
        diff = sigma - rho
        root = math.sqrt(float(np.real(np.sum(np.abs(diff) ** 2))) + mu * mu)
        return root, diff / root
    return loss


NORM_SMOOTHING = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)


def _separable_search(state: BipartiteState, k: int | None, loss, cfg, initial=()):
    m, n = state.dims
    k = (m * n) ** 2 if k is None else k
    if k < 1 or k > (m * n) ** 2:
        raise ValueError(f"ansatz size k must be in [1, {(m * n) ** 2}], got {k}")
    obj = separable_objective(state, k, loss)
    starts = [_product_eigen_start(state, k)] + list(initial)
    res = minimize(obj, cfg, initial=starts)
    c, d = unpack(res.best_params, (k, m), (k, n))
    return res, SeparableAnsatz.from_vectors(c, d), k


def _product_eigen_start(state: BipartiteState, k: int) -> np.ndarray:
    """Ansatz start at the product of the marginals' eigenbases (exact for product states)."""
    m, n = state.dims
    la, va = np.linalg.eigh(ptrace(state.matrix, state.dims, [0]))
    lb, vb = np.linalg.eigh(ptrace(state.matrix, state.dims, [1]))
    c = np.zeros((k, m), dtype=complex)
    d = np.zeros((k, n), dtype=complex)
    terms = [(i, j) for i in range(m) for j in range(n)]
    for t in range(k):
        i, j = terms[t % len(terms)]
        share = 1.0 if t < len(terms) else 1e-3
        c[t] = np.sqrt(max(la[i], 0) * share + 1e-8) * va[:, i]
        d[t] = np.sqrt(max(lb[j], 0) + 1e-8) * vb[:, j]
    return pack(c, d)


def rel_ent_entanglement(state: BipartiteState, k: int | None = None,
                         cfg: OptimizerConfig | None = None) -> MeasureResult:
    """E_R = min over separable sigma of S(rho || sigma) (upper bound, certificate sigma)."""
    cfg = _cfg(cfg, state.dim)
    res, ans, k = _separable_search(state, k, _relent_loss(state.matrix), cfg)
    val = relative_entropy(state.matrix, ans.matrix())
    return MeasureResult("E_R", val, ans, _report(res, cfg, k=k), "upper")


def distance_to_separable(state: BipartiteState, norm: str = "trace", k: int | None = None,
                          cfg: OptimizerConfig | None = None) -> MeasureResult:
    """min over separable sigma of ||rho - sigma|| in the trace or Frobenius norm (upper bound)."""
    if norm not in ("trace", "frobenius"):
        raise ValueError(f"norm must be 'trace' or 'frobenius', got {norm!r}")
    cfg = _cfg(cfg, state.dim)
    res, ans, k = _separable_search(state, k, _frobenius_loss(state.matrix), cfg)
    # refine against the target norm itself by smoothing continuation
    m, n = state.dims
    target = trace_norm if norm == "trace" else frobenius_norm
    make = _trace_loss if norm == "trace" else _frobenius_norm_loss
    val = target(state.matrix - ans.matrix())
    x = res.best_params
    for mu in NORM_SMOOTHING:
        x = local_search(separable_objective(state, k, make(state.matrix, mu)), x, cfg).best_params
        cand = SeparableAnsatz.from_vectors(*unpack(x, (k, m), (k, n)))
        cval = target(state.matrix - cand.matrix())
        if cval < val:
            ans, val = cand, cval
    return MeasureResult(f"dist_{norm}", val, ans, _report(res, cfg, k=k), "upper")


# ---------------------------------------------------------------------------
# squashed entanglement upper bounds


def _squashed_objective(state: BipartiteState, dC: int, classical: bool):
    m, n = state.dims
    lam, vecs = _spectrum(state.matrix)
    r = lam.size
    x = vecs * np.sqrt(lam)
    de = r if classical else r * dC
    # extension = tr_E' of (I_AB x V)|Psi_ABE>, V: E -> C E'
    shape = (dC * de, r)

    def phi_of(mat):
        v, vjp = _grad.polar(mat)
        if v is None:
            return None, None
        return (x @ v.T).reshape(m, n, dC, de), vjp

    if classical:
        terms = [(0.5, [0]), (0.5, [1]), (-0.5, [0, 1])]
    else:
        terms = [(0.5, [0, 2]), (0.5, [1, 2]), (-0.5, [2]), (-0.5, [0, 1, 2])]

    def vg(p):
        mat, = unpack(p, shape)
        phi, vjp = phi_of(mat)
        if phi is None:
            return math.inf, np.zeros_like(p)
        if classical:
            # C is dephased: sum over outcomes c of p_c I(A:B)_c / 2
            val, gphi = 0.0, np.zeros_like(phi)
            for c in range(dC):
                block = phi[:, :, c, :][:, :, None, :]
                v, g = _grad.marginal_entropies(block, terms)
                val += v
                gphi[:, :, c, :] = g[:, :, 0, :]
        else:
            val, gphi = _grad.marginal_entropies(phi, terms)
        gphi = gphi.reshape(m * n, dC * de)
        gv = gphi.T @ x.conj()
        return val, pack(vjp(gv))

    def extension(p) -> np.ndarray:
        phi, _ = phi_of(unpack(p, shape)[0])
        t = phi.reshape(m * n * dC, de)
        rho = t @ t.conj().T
        if classical:
            r4 = rho.reshape(m * n, dC, m * n, dC)
            keep = np.zeros_like(r4)
            for c in range(dC):
                keep[:, c, :, c] = r4[:, c, :, c]
            rho = keep.reshape(m * n * dC, m * n * dC)
        return rho

    trivial = np.zeros((dC, de, r), dtype=complex)
    trivial[0, :r, :] = np.eye(r)
    start = pack(trivial.reshape(shape))
    return Objective(fun=lambda p: vg(p)[0], arity=param_count(shape), value_and_grad=vg), \
        extension, start


def conditional_mutual_information(rho_abc: np.ndarray, dims) -> float:
    """I(A:B|C) = S(AC) + S(BC) - S(C) - S(ABC)."""
    s = lambda keep: von_neumann_entropy(ptrace(rho_abc, dims, keep))
    return s([0, 2]) + s([1, 2]) - s([2]) - von_neumann_entropy(rho_abc)


def squashed_upper(state: BipartiteState, dC: int = 2, classical: bool = False,
                   cfg: OptimizerConfig | None = None) -> MeasureResult:
    """Upper bound on (classical) squashed entanglement from extensions with dim C = dC."""
    m, n = state.dims
    if dC < 1:
        raise ValueError("dC must be >= 1")
    if m * n * dC > DESK_DIM_CAP:
        raise DimensionError(f"m*n*dC = {m * n * dC} exceeds the desk-scale cap {DESK_DIM_CAP}")
    cfg = _cfg(cfg, state.dim)
    obj, extension, start = _squashed_objective(state, dC, classical)
    res = minimize(obj, cfg, initial=[start])
    ext = extension(res.best_params)
    ext = DensityMatrix(0.5 * (ext + ext.conj().T), (m, n, dC))
    val = 0.5 * conditional_mutual_information(ext.matrix, (m, n, dC))
    name = "E_sq_C_upper" if classical else "E_sq_upper"
    return MeasureResult(name, max(val, 0.0), ext, _report(res, cfg, dC=dC), "upper")


MEASURES = {
    "mutual-information": lambda s, **kw: mutual_information_result(s),
    "classical-vn": lambda s, **kw: classical_correlation(s, "vn", kw.get("cfg")),
    "classical-povm": lambda s, **kw: classical_correlation(s, "povm", kw.get("cfg")),
    "discord-vn": lambda s, **kw: discord(s, "vn", kw.get("cfg")),
    "discord-povm": lambda s, **kw: discord(s, "povm", kw.get("cfg")),
    "eof": lambda s, **kw: eof(s, kw.get("k"), kw.get("cfg")),
    "rel-ent": lambda s, **kw: rel_ent_entanglement(s, kw.get("k"), kw.get("cfg")),
    "distance-trace": lambda s, **kw: distance_to_separable(s, "trace", kw.get("k"), kw.get("cfg")),
    "distance-frobenius": lambda s, **kw: distance_to_separable(s, "frobenius", kw.get("k"),
                                                                kw.get("cfg")),
    "squashed": lambda s, **kw: squashed_upper(s, kw.get("dC") or 2, False, kw.get("cfg")),
    "squashed-classical": lambda s, **kw: squashed_upper(s, kw.get("dC") or 2, True, kw.get("cfg")),
}
CHANNEL_MEASURES = ("constrained-holevo", "holevo-capacity")
