"""Measurements on one subsystem, optimizer parametrizations, and steering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .qcore import (BipartiteState, DimensionError, Ensemble, InvariantError,
                    TripartitePureState, RANK_TOL)

MEAS_TOL = 1e-8
NULL_OUTCOME = 1e-12


def _stack(ops) -> np.ndarray:
    arr = np.array([np.asarray(o, dtype=np.complex128) for o in ops])
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionError(f"measurement operators must be square matrices, got {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_complete(ops: np.ndarray) -> None:
    err = np.max(np.abs(ops.sum(axis=0) - np.eye(ops.shape[1])))
    if err > MEAS_TOL:
        raise InvariantError(f"completeness invariant violated: |sum E_i - I| = {err:.3e}")


@dataclass(frozen=True, eq=False)
class POVM:
    elements: np.ndarray

    def __post_init__(self):
        ops = _stack(self.elements)
        n = ops.shape[1]
        if len(ops) > n * n:
            raise InvariantError(f"POVM has {len(ops)} elements; at most n^2 = {n * n} allowed")
        for e in ops:
            if np.max(np.abs(e - e.conj().T)) > MEAS_TOL:
                raise InvariantError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(e)[0] < -1e-9:
                raise InvariantError("PSD invariant violated for a POVM element")
        _check_complete(ops)
        object.__setattr__(self, "elements", ops)

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    kind = "povm"


@dataclass(frozen=True, eq=False)
class VonNeumannMeasurement:
    projectors: np.ndarray

    def __post_init__(self):
        ops = _stack(self.projectors)
        for i, p in enumerate(ops):
            if np.max(np.abs(p - p.conj().T)) > MEAS_TOL or np.max(np.abs(p @ p - p)) > MEAS_TOL:
                raise InvariantError(f"projector {i} is not an idempotent Hermitian matrix")
            for q in ops[i + 1:]:
                if np.max(np.abs(p @ q)) > MEAS_TOL:
                    raise InvariantError("projectors are not mutually orthogonal")
        _check_complete(ops)
        object.__setattr__(self, "projectors", ops)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def elements(self) -> np.ndarray:
        return self.projectors

    kind = "vn"


@dataclass(frozen=True, eq=False)
class MeasurementOutcomeSet:
    """Outcome probabilities with conditional states; null outcomes hold ``None``."""

    probabilities: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if abs(p.sum() - 1.0) > MEAS_TOL:
            raise InvariantError(f"outcome probabilities sum to {p.sum():.12g}")
        object.__setattr__(self, "probabilities", p)

    def __len__(self):
        return len(self.probabilities)

    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.probabilities, self.states) if s is not None)


def measure_B(state: BipartiteState, meas) -> MeasurementOutcomeSet:
    """Measure subsystem B; return p_i and rho_A^i = tr_B(rho (I x E_i)) / p_i."""
    m, n = state.dims
    if meas.dim != n:
        raise DimensionError(f"measurement acts on dim {meas.dim}, subsystem B has dim {n}")
    r = state.matrix.reshape(m, n, m, n)
    unnorm = np.einsum("abce,ieb->iac", r, meas.elements)
    probs = np.real(np.einsum("iaa->i", unnorm))
    probs = np.clip(probs, 0.0, None)
    states = []
    for p, x in zip(probs, unnorm):
        if p < NULL_OUTCOME:
            states.append(None)
        else:
            x = x / p
            states.append(0.5 * (x + x.conj().T))
    return MeasurementOutcomeSet(probs, tuple(states))


# ---------------------------------------------------------------------------
# parametrizations


def _is_unitary(u: np.ndarray, tol: float = MEAS_TOL) -> bool:
    return u.ndim == 2 and u.shape[0] == u.shape[1] and \
        np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def vn_from_unitary(u) -> VonNeumannMeasurement:
    """Rank-one projectors onto the columns of a unitary."""
    u = np.asarray(u, dtype=np.complex128)
    if not _is_unitary(u):
        raise InvariantError("vn_from_unitary needs a unitary matrix")
    return VonNeumannMeasurement(np.einsum("ak,bk->kab", u, u.conj()))


def hermitian_from_params(x: np.ndarray, n: int) -> np.ndarray:
    """Hermitian n x n matrix from n^2 reals (diagonal, then real/imag upper parts)."""
    x = np.asarray(x, dtype=float)
    if x.size != n * n:
        raise DimensionError(f"need {n * n} parameters, got {x.size}")
    h = np.zeros((n, n), dtype=np.complex128)
    h[np.diag_indices(n)] = x[:n]
    iu = np.triu_indices(n, 1)
    k = len(iu[0])
    h[iu] = x[n:n + k] + 1j * x[n + k:]
    h[(iu[1], iu[0])] = np.conj(h[iu])
    return h


def unitary_from_params(x: np.ndarray, n: int) -> np.ndarray:
    """U = exp(iH); surjective onto U(n)."""
    return expm(1j * hermitian_from_params(x, n))


def polar_isometry(mat: np.ndarray) -> np.ndarray:
    """M (M^dag M)^{-1/2}: the isometry closest to a full-column-rank M."""
    s = mat.conj().T @ mat
    lam, q = np.linalg.eigh(s)
    if lam[0] <= RANK_TOL * max(lam[-1], 1.0):
        raise InvariantError(f"M^dag M is singular (min eigenvalue {lam[0]:.3e})")
    return mat @ ((q / np.sqrt(lam)) @ q.conj().T)


def povm_from_matrix(mat) -> POVM:
    """Rank-one POVM whose elements are built from the rows of M (M^dag M)^{-1/2}."""
    mat = np.asarray(mat, dtype=np.complex128)
    k, n = mat.shape
    if k > n * n:
        raise InvariantError(f"{k} rows exceed the n^2 = {n * n} element cap")
    v = polar_isometry(mat)
    return POVM(np.einsum("ia,ib->iab", v.conj(), v))


def povm_from_rows(v: np.ndarray) -> POVM:
    """Rank-one POVM from the rows of an isometry (no renormalization)."""
    return POVM(np.einsum("ia,ib->iab", v.conj(), v))


def trivial_measurement(n: int) -> POVM:
    return POVM(np.eye(n)[None])


def computational_basis(n: int) -> VonNeumannMeasurement:
    return vn_from_unitary(np.eye(n))


def bloch_projectors(theta: float, phi: float) -> VonNeumannMeasurement:
    """Qubit projective measurement along the Bloch direction (theta, phi)."""
    nvec = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    ns = np.einsum("k,kab->ab", nvec, sig)
    return VonNeumannMeasurement(np.array([(np.eye(2) + ns) / 2, (np.eye(2) - ns) / 2]))


# ---------------------------------------------------------------------------
# steering


def _sqrtm_psd(e: np.ndarray) -> np.ndarray:
    lam, q = np.linalg.eigh(e)
    return (q * np.sqrt(np.clip(lam, 0.0, None))) @ q.conj().T


def steer_ensemble(psi: TripartitePureState, measC) -> Ensemble:
    """Ensemble on AB produced by measuring C of a tripartite pure state."""
    da, db, dc = psi.dims
    if measC.dim != dc:
        raise DimensionError(f"measurement acts on dim {measC.dim}, subsystem C has dim {dc}")
    x = psi.as_matrix()
    weights, states = [], []
    for e in measC.elements:
        half = _sqrtm_psd(e)
        y = x @ half.T
        rho = y @ y.conj().T
        p = float(np.real(np.trace(rho)))
        if p < NULL_OUTCOME:
            continue
        rho = rho / p
        weights.append(p)
        states.append(BipartiteState(0.5 * (rho + rho.conj().T), (da, db)))
    w = np.array(weights)
    return Ensemble(w / w.sum(), states, parent=psi.reduced_ab())
