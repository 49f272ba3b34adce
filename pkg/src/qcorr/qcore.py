"""Dense quantum linear algebra: states, channels, purification, entropies and norms.

All entropies are in bits. Composite indices are A-major: the row index of a
bipartite matrix on ``m x n`` dimensions is ``i = a * n + b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
RANK_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
# dedicated +infinity value returned by relative_entropy on support violation
INFINITY = math.inf

LN2 = math.log(2.0)


class InvariantError(ValueError):
    """A value violates one of the declared type invariants."""


class DimensionError(ValueError):
    """Declared dimensions do not match the data."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def check_density_matrix(mat: np.ndarray) -> None:
    """Raise InvariantError unless ``mat`` is Hermitian, unit trace and PSD."""
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {mat.shape}")
    herm = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if herm > HERMITIAN_TOL:
        raise InvariantError(f"Hermitian invariant violated: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(mat)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvariantError(f"unit-trace invariant violated: trace = {tr.real:.12g}")
    lam_min = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
    if lam_min < -PSD_TOL:
        raise InvariantError(f"PSD invariant violated: minimum eigenvalue = {lam_min:.3e}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix with optional subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        mat = _frozen(self.matrix)
        dims = tuple(int(d) for d in self.dims) or (mat.shape[0],)
        if any(d < 1 for d in dims):
            raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
        if int(np.prod(dims)) != mat.shape[0]:
            raise DimensionError(f"dims {dims} do not multiply to matrix size {mat.shape[0]}")
        check_density_matrix(mat)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigvalsh(self) -> np.ndarray:
        return _clip_spectrum(np.linalg.eigvalsh(self.matrix))

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.eigvalsh() > tol))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


class BipartiteState(DensityMatrix):
    """DensityMatrix on A (x) B with ``dims == (m, n)``."""

    def __init__(self, matrix, dims):
        super().__init__(matrix, tuple(dims))
        if len(self.dims) != 2:
            raise DimensionError(f"bipartite state needs exactly two dims, got {self.dims}")

    @property
    def dimA(self) -> int:
        return self.dims[0]

    @property
    def dimB(self) -> int:
        return self.dims[1]

    def swap(self) -> "BipartiteState":
        """Same state with the roles of A and B exchanged."""
        m, n = self.dims
        t = self.matrix.reshape(m, n, m, n).transpose(1, 0, 3, 2).reshape(m * n, m * n)
        return BipartiteState(t, (n, m))

    def conjugate_local(self, ua: np.ndarray, ub: np.ndarray) -> "BipartiteState":
        u = np.kron(ua, ub)
        return BipartiteState(u @ self.matrix @ u.conj().T, self.dims)


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        vec = _frozen(np.ravel(self.vector))
        dims = tuple(int(d) for d in self.dims) or (vec.shape[0],)
        if int(np.prod(dims)) != vec.shape[0]:
            raise DimensionError(f"dims {dims} do not multiply to vector length {vec.shape[0]}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > HERMITIAN_TOL:
            raise InvariantError(f"unit-norm invariant violated: |psi| = {norm:.12g}")
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def density(self) -> DensityMatrix:
        rho = np.outer(self.vector, self.vector.conj())
        if len(self.dims) == 2:
            return BipartiteState(rho, self.dims)
        return DensityMatrix(rho, self.dims)


@dataclass(frozen=True, eq=False)
class TripartitePureState:
    """Pure state on A (x) B (x) C; usually a purification of ``source``."""

    vector: np.ndarray
    dims: tuple[int, int, int]
    source: BipartiteState | None = field(default=None, repr=False)

    def __post_init__(self):
        vec = _frozen(np.ravel(self.vector))
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or int(np.prod(dims)) != vec.shape[0]:
            raise DimensionError(f"tripartite dims {dims} do not match vector length {vec.shape[0]}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > HERMITIAN_TOL:
            raise InvariantError(f"unit-norm invariant violated: |psi| = {norm:.12g}")
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "dims", dims)
        if self.source is not None:
            err = np.max(np.abs(self.reduced_ab().matrix - self.source.matrix))
            if err > HERMITIAN_TOL:
                raise InvariantError(f"purification invariant violated: |tr_C Psi - rho| = {err:.3e}")

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to a (dA*dB, dC) matrix."""
        da, db, dc = self.dims
        return self.vector.reshape(da * db, dc)

    def reduced_ab(self) -> BipartiteState:
        x = self.as_matrix()
        return BipartiteState(x @ x.conj().T, self.dims[:2])

    def reduced_bc(self) -> BipartiteState:
        da, db, dc = self.dims
        x = self.vector.reshape(da, db * dc)
        return BipartiteState(x.T @ x.conj(), (db, dc))

    def reduced_a(self) -> DensityMatrix:
        da, db, dc = self.dims
        x = self.vector.reshape(da, db * dc)
        return DensityMatrix(x @ x.conj().T)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map in operator-sum form; ``kraus`` has shape (r, dim_out, dim_in)."""

    kraus: np.ndarray

    def __post_init__(self):
        ks = np.array(self.kraus, dtype=np.complex128, copy=True)
        if ks.ndim == 2:
            ks = ks[None]
        if ks.ndim != 3 or ks.shape[0] == 0:
            raise DimensionError(f"kraus operators must stack to (r, out, in), got {ks.shape}")
        comp = np.einsum("koi,koj->ij", ks.conj(), ks)
        err = np.max(np.abs(comp - np.eye(ks.shape[2])))
        if err > COMPLETENESS_TOL:
            raise InvariantError(f"completeness invariant violated: |sum K^dag K - I| = {err:.3e}")
        ks.setflags(write=False)
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def dim_out(self) -> int:
        return self.kraus.shape[1]

    def __call__(self, rho):
        return apply_channel(self, rho)

    def apply_matrix(self, x: np.ndarray) -> np.ndarray:
        """Apply to an arbitrary (not necessarily normalized) square matrix."""
        return np.einsum("koi,ij,kpj->op", self.kraus, x, self.kraus.conj())

    def adjoint_matrix(self, y: np.ndarray) -> np.ndarray:
        return np.einsum("koi,op,kpj->ij", self.kraus.conj(), y, self.kraus)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted states ``{(p_i, state_i)}`` averaging to ``parent``."""

    weights: np.ndarray
    states: tuple
    parent: DensityMatrix | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))
        if len(w) != len(self.states):
            raise DimensionError("ensemble weights and states differ in length")
        if np.any(w < -1e-12) or np.any(w > 1 + 1e-12):
            raise InvariantError("ensemble weights must lie in [0, 1]")
        if abs(w.sum() - 1.0) > 1e-9:
            raise InvariantError(f"ensemble weights sum to {w.sum():.12g}, not 1")
        if self.parent is not None:
            err = np.max(np.abs(self.mixture() - self.parent.matrix))
            if err > 1e-8:
                raise InvariantError(f"ensemble mixture differs from parent state by {err:.3e}")

    def __len__(self):
        return len(self.weights)

    def density(self, i: int) -> np.ndarray:
        s = self.states[i]
        if isinstance(s, PureState):
            return np.outer(s.vector, s.vector.conj())
        return s.matrix

    def mixture(self) -> np.ndarray:
        return sum(p * self.density(i) for i, p in enumerate(self.weights))


def as_matrix(x) -> np.ndarray:
    if isinstance(x, (DensityMatrix, PureState)):
        return x.matrix if isinstance(x, DensityMatrix) else x.density().matrix
    return np.asarray(x, dtype=np.complex128)


# ---------------------------------------------------------------------------
# partial traces, purification


def ptrace(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a raw matrix over every subsystem not in ``keep``."""
    dims = tuple(dims)
    keep = sorted(keep)
    n = len(dims)
    t = mat.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # bring kept axes to the front, traced to the back
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def partial_trace(state: BipartiteState, keep: str) -> DensityMatrix:
    """Reduced state of subsystem ``keep`` ('A' or 'B')."""
    if len(state.dims) != 2:
        raise DimensionError(f"expected a bipartite state, got dims {state.dims}")
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    idx = 0 if keep == "A" else 1
    return DensityMatrix(ptrace(state.matrix, state.dims, [idx]))


def purify(state: DensityMatrix, dimC: int) -> TripartitePureState:
    """Purification sum_j sqrt(lam_j) |e_j>_AB |j>_C from the eigendecomposition."""
    lam, vecs = np.linalg.eigh(state.matrix)
    if lam[0] < -PSD_TOL:
        raise InvariantError(f"PSD invariant violated: minimum eigenvalue = {lam[0]:.3e}")
    order = np.argsort(lam)[::-1]
    lam, vecs = np.clip(lam[order], 0.0, None), vecs[:, order]
    rank = int(np.sum(lam > RANK_TOL))
    if dimC < rank:
        raise DimensionError(f"dimC = {dimC} is smaller than rank(rho) = {rank}")
    keep = min(dimC, lam.size)
    x = np.zeros((state.dim, dimC), dtype=np.complex128)
    x[:, :keep] = vecs[:, :keep] * np.sqrt(lam[:keep])
    dims = state.dims if len(state.dims) == 2 else (1, state.dim)
    src = state if isinstance(state, BipartiteState) else BipartiteState(state.matrix, dims)
    vec = x.ravel()
    return TripartitePureState(vec / np.linalg.norm(vec), (dims[0], dims[1], dimC), src)


# ---------------------------------------------------------------------------
# entropies and norms


def _clip_spectrum(lam: np.ndarray) -> np.ndarray:
    if lam.size and lam.min() < -PSD_TOL:
        raise InvariantError(f"PSD invariant violated: minimum eigenvalue = {lam.min():.3e}")
    return np.clip(lam, 0.0, None)


def entropy_of_spectrum(lam) -> float:
    lam = np.asarray(lam, dtype=float)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam))) if lam.size else 0.0


def von_neumann_entropy(state) -> float:
    """S(rho) = -tr rho log2 rho with 0 log 0 = 0."""
    mat = as_matrix(state)
    return entropy_of_spectrum(_clip_spectrum(np.linalg.eigvalsh(mat)))


def relative_entropy(rho, sigma) -> float:
    """S(rho || sigma) in bits; INFINITY when supp(rho) is not inside supp(sigma)."""
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionError(f"dimension mismatch: {r.shape} vs {s.shape}")
    lr, vr = np.linalg.eigh(r)
    ls, vs = np.linalg.eigh(s)
    lr, ls = _clip_spectrum(lr), _clip_spectrum(ls)
    kernel = vs[:, ls <= RANK_TOL]
    if kernel.shape[1]:
        # weight of rho on the kernel of sigma
        leak = np.real(np.trace(kernel.conj().T @ r @ kernel))
        if leak > RANK_TOL:
            return INFINITY
    sup = ls > RANK_TOL
    log_s = (vs[:, sup] * np.log2(ls[sup])) @ vs[:, sup].conj().T
    cross = float(np.real(np.trace(r @ log_s)))
    return max(-entropy_of_spectrum(lr) - cross, 0.0)


def mutual_information(state: BipartiteState) -> float:
    """I(A:B) = S(A) + S(B) - S(AB)."""
    sa = von_neumann_entropy(ptrace(state.matrix, state.dims, [0]))
    sb = von_neumann_entropy(ptrace(state.matrix, state.dims, [1]))
    return max(sa + sb - von_neumann_entropy(state.matrix), 0.0)


def trace_norm(x) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(x), compute_uv=False)))


def frobenius_norm(x) -> float:
    return float(np.linalg.norm(np.asarray(x), "fro"))


# ---------------------------------------------------------------------------
# random generation


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure_vector(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pure_state(dim: int, seed=None, dims: Sequence[int] = ()) -> PureState:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    return PureState(random_pure_vector(dim, seed), tuple(dims))


def random_density_matrix(dim: int, rank: int | None = None, seed=None,
                          dims: Sequence[int] = ()) -> DensityMatrix:
    """Induced-measure random state: trace out a rank-sized ancilla of a Haar pure state."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must satisfy 1 <= rank <= {dim}, got {rank}")
    x = random_pure_vector(dim * rank, seed).reshape(dim, rank)
    rho = x @ x.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    if len(dims) == 2:
        return BipartiteState(rho, dims)
    return DensityMatrix(rho, tuple(dims))


def random_bipartite_state(m: int, n: int, rank: int | None = None, seed=None) -> BipartiteState:
    return random_density_matrix(m * n, rank, seed, (m, n))


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with phase fix."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


# ---------------------------------------------------------------------------
# channels


def apply_channel(ch: QuantumChannel, state) -> DensityMatrix:
    """sum_k K rho K^dag."""
    mat = as_matrix(state)
    if mat.shape != (ch.dim_in, ch.dim_in):
        raise DimensionError(f"channel expects dim {ch.dim_in}, got state of shape {mat.shape}")
    out = ch.apply_matrix(mat)
    return DensityMatrix(0.5 * (out + out.conj().T))


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel(np.eye(dim)[None])


def depolarizing_channel(dim: int, dim_out: int | None = None) -> QuantumChannel:
    """Fully depolarizing map rho -> I / dim_out."""
    dim_out = dim if dim_out is None else dim_out
    ks = np.zeros((dim_out * dim, dim_out, dim), dtype=np.complex128)
    for o in range(dim_out):
        for i in range(dim):
            ks[o * dim + i, o, i] = 1.0 / math.sqrt(dim_out)
    return QuantumChannel(ks)


def dephasing_channel(p: float = 0.5) -> QuantumChannel:
    """Qubit dephasing with Kraus {sqrt(1-p) I, sqrt(p) Z}."""
    return QuantumChannel(np.array([math.sqrt(1 - p) * np.eye(2),
                                    math.sqrt(p) * np.diag([1.0, -1.0])]))


def partial_trace_channel(m: int, n: int, keep: str = "A") -> QuantumChannel:
    """tr_B (or tr_A) as a channel from C^{mn} to C^m (or C^n)."""
    if keep == "A":
        ks = np.stack([np.kron(np.eye(m), np.eye(n)[b:b + 1]) for b in range(n)])
    else:
        ks = np.stack([np.kron(np.eye(m)[a:a + 1], np.eye(n)) for a in range(m)])
    return QuantumChannel(ks)


# ---------------------------------------------------------------------------
# standard states


def bell_state() -> BipartiteState:
    v = np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2)
    return BipartiteState(np.outer(v, v.conj()), (2, 2))


def singlet_projector() -> np.ndarray:
    v = np.array([0, 1, -1, 0], dtype=np.complex128) / math.sqrt(2)
    return np.outer(v, v.conj())


def werner_state(w: float) -> BipartiteState:
    """w |Phi+><Phi+| + (1 - w) I/4."""
    return BipartiteState(w * bell_state().matrix + (1 - w) * np.eye(4) / 4, (2, 2))


def product_state(rho_a, rho_b) -> BipartiteState:
    a, b = as_matrix(rho_a), as_matrix(rho_b)
    return BipartiteState(np.kron(a, b), (a.shape[0], b.shape[0]))
