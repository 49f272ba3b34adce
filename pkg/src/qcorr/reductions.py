"""Promise-problem instances and the polynomial-time maps between them.

Chain: separability -> entanglement of formation -> discord (via purification)
and -> constrained Holevo quantity (via a Stinespring channel), plus the
separability -> "classical state in an extension set" map and linear
optimization over classical states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import DESK_DIM_CAP, MeasureResult, SeparableAnsatz, _cfg, _report
from .optimize import OptimizerConfig, seesaw
from .qcore import (BipartiteState, DimensionError, InvariantError, QuantumChannel, RANK_TOL,
                    HERMITIAN_TOL, check_density_matrix, ptrace, purify, trace_norm,
                    von_neumann_entropy)
from .serialize import (SCHEMA, SchemaError, channel_from_json, channel_to_json, decode_complex,
                        digest, encode_complex, state_from_json, state_to_json)

EOF_GAP_CONSTANT = 2448
MEMBERSHIP_TOL = 1e-8


def _positive(name: str, x: float) -> float:
    x = float(x)
    if not x > 0:
        raise ValueError(f"{name} must be positive, got {x}")
    return x


@dataclass(frozen=True, eq=False)
class SeparabilityInstance:
    """Yes: rho separable. No: Frobenius distance to the separable set >= delta."""

    state: BipartiteState
    delta: float
    provenance: str = ""

    def __post_init__(self):
        _positive("delta", self.delta)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "separability", "state": state_to_json(self.state),
                "delta": float(self.delta), "provenance": self.provenance}


@dataclass(frozen=True, eq=False)
class EofInstance:
    """Yes: E_F <= a. No: E_F >= a + eps."""

    state: BipartiteState
    a: float
    eps: float
    provenance: str = ""

    def __post_init__(self):
        _positive("eps", self.eps)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "eof", "state": state_to_json(self.state),
                "a": float(self.a), "eps": float(self.eps), "provenance": self.provenance}


@dataclass(frozen=True, eq=False)
class DiscordInstance:
    """Yes: D(rho_BC | C) <= b. No: >= b + eps. The measured subsystem is the second one."""

    state: BipartiteState
    b: float
    eps: float
    kind: str = "povm"
    provenance: str = ""

    def __post_init__(self):
        _positive("eps", self.eps)
        if self.kind not in ("vn", "povm"):
            raise ValueError(f"kind must be 'vn' or 'povm', got {self.kind!r}")

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "discord", "state": state_to_json(self.state),
                "b": float(self.b), "eps": float(self.eps), "measurement": self.kind,
                "measured_subsystem": "C", "dims": list(self.state.dims),
                "provenance": self.provenance}


@dataclass(frozen=True, eq=False)
class HolevoInstance:
    """Yes: chi_Phi(rho) >= c. No: chi_Phi(rho) <= c - eps."""

    channel: QuantumChannel
    rho: np.ndarray
    c: float
    eps: float
    provenance: str = ""

    def __post_init__(self):
        _positive("eps", self.eps)
        rho = np.array(self.rho, dtype=np.complex128)
        check_density_matrix(rho)
        if rho.shape[0] != self.channel.dim_in:
            raise DimensionError("input state and channel dimensions differ")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "holevo", "channel": channel_to_json(self.channel),
                "rho": encode_complex(self.rho), "c": float(self.c), "eps": float(self.eps),
                "provenance": self.provenance}


@dataclass(frozen=True, eq=False)
class KInstance:
    """K = {extensions on AA'|BB' reducing to rho_AB}. Yes: K meets CC. No: gap >= delta."""

    state: BipartiteState
    ext_dims: tuple[int, int]
    delta: float
    tol: float = MEMBERSHIP_TOL
    provenance: str = ""

    def __post_init__(self):
        _positive("delta", self.delta)
        ma, nb = (int(x) for x in self.ext_dims)
        if ma < 1 or nb < 1:
            raise DimensionError("extension dims must be positive")
        object.__setattr__(self, "ext_dims", (ma, nb))

    @property
    def extended_dims(self) -> tuple[int, int]:
        m, n = self.state.dims
        return m * self.ext_dims[0], n * self.ext_dims[1]

    def contains(self, extended) -> bool:
        """Membership oracle: a valid state on AA'|BB' whose marginal on AB is rho."""
        mat = np.asarray(getattr(extended, "matrix", extended), dtype=np.complex128)
        da, db = self.extended_dims
        if mat.shape != (da * db, da * db):
            return False
        try:
            check_density_matrix(mat)
        except InvariantError:
            return False
        m, n = self.state.dims
        red = ptrace(mat, (m, self.ext_dims[0], n, self.ext_dims[1]), [0, 2])
        return trace_norm(red - self.state.matrix) <= self.tol

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "k-extension", "state": state_to_json(self.state),
                "ext_dims": list(self.ext_dims), "delta": float(self.delta),
                "oracle": {"type": "partial-trace-match", "norm": "trace", "tol": self.tol},
                "provenance": self.provenance}


INSTANCE_TYPES = {"separability": SeparabilityInstance, "eof": EofInstance,
                  "discord": DiscordInstance, "holevo": HolevoInstance, "k-extension": KInstance}


def instance_from_json(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise SchemaError("instance JSON needs a 'kind' field")
    kind = d["kind"]
    prov = d.get("provenance", "")
    try:
        if kind == "separability":
            return SeparabilityInstance(state_from_json(d["state"]), d["delta"], prov)
        if kind == "eof":
            return EofInstance(state_from_json(d["state"]), d["a"], d["eps"], prov)
        if kind == "discord":
            return DiscordInstance(state_from_json(d["state"]), d["b"], d["eps"],
                                   d.get("measurement", "povm"), prov)
        if kind == "holevo":
            return HolevoInstance(channel_from_json(d["channel"]), decode_complex(d["rho"]),
                                  d["c"], d["eps"], prov)
        if kind == "k-extension":
            tol = d.get("oracle", {}).get("tol", MEMBERSHIP_TOL)
            return KInstance(state_from_json(d["state"]), tuple(d["ext_dims"]), d["delta"],
                             tol, prov)
    except KeyError as exc:
        raise SchemaError(f"{kind} instance is missing field {exc}") from None
    raise SchemaError(f"unknown instance kind {kind!r}")


def _bipartite(state) -> BipartiteState:
    if not isinstance(state, BipartiteState):
        raise DimensionError("reduction input must be a bipartite state")
    return state


# ---------------------------------------------------------------------------
# reductions


def eof_gap(delta: float, m: int, n: int) -> float:
    """eps = delta^2 / (2448 m n ln 2)."""
    return delta * delta / (EOF_GAP_CONSTANT * m * n * math.log(2.0))


def sep_to_eof(inst: SeparabilityInstance) -> EofInstance:
    state = _bipartite(inst.state)
    m, n = state.dims
    return EofInstance(state, 0.0, eof_gap(inst.delta, m, n), digest(inst.to_json()))


def eof_to_discord(inst: EofInstance, dimC: int | None = None, kind: str = "povm") -> DiscordInstance:
    """Purify rho_AB into C and keep rho_BC; D(rho_BC|C) = E_F + S(A) - S(AB).

    von Neumann instances always use the full dimC = m^2 n^2; POVM instances
    may shrink C down to rank(rho_AB).
    """
    state = _bipartite(inst.state)
    m, n = state.dims
    full = (m * n) ** 2
    if kind == "vn" and dimC is not None and dimC != full:
        raise ValueError(f"von Neumann instances need dimC = m^2 n^2 = {full}")
    dimC = full if dimC is None else int(dimC)
    psi = purify(state, dimC)
    s_a = von_neumann_entropy(ptrace(state.matrix, state.dims, [0]))
    s_ab = von_neumann_entropy(state)
    b = inst.a - s_a + s_ab
    return DiscordInstance(psi.reduced_bc(), b, inst.eps, kind, digest(inst.to_json()))


def embed_channel(state: BipartiteState) -> tuple[QuantumChannel, np.ndarray, np.ndarray]:
    """Channel Phi(x) = tr_B(V x V^dag) with V the support isometry of ``state``.

    Returns (Phi, rho, V) where rho = diag(nonzero eigenvalues), so that
    V rho V^dag = state and Phi(rho) = tr_B state.
    """
    m, n = state.dims
    lam, vecs = np.linalg.eigh(state.matrix)
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    r = int(np.sum(lam > RANK_TOL))
    if r == 0:
        raise InvariantError("state has rank 0")
    v = vecs[:, :r]
    lam = lam[:r] / lam[:r].sum()
    # K_b[a, j] = <a, b| v_j>
    kraus = v.reshape(m, n, r).transpose(1, 0, 2)
    return QuantumChannel(kraus), np.diag(lam).astype(np.complex128), v


def eof_to_holevo(inst: EofInstance) -> HolevoInstance:
    state = _bipartite(inst.state)
    ch, rho, _ = embed_channel(state)
    out = ch.apply_matrix(rho)
    c = von_neumann_entropy(0.5 * (out + out.conj().T)) - inst.a
    return HolevoInstance(ch, rho, c, inst.eps, digest(inst.to_json()))


def sep_to_k(inst: SeparabilityInstance, ext_dims: tuple[int, int]) -> KInstance:
    state = _bipartite(inst.state)
    m, n = state.dims
    ma, nb = ext_dims
    if m * ma * n * nb > DESK_DIM_CAP:
        raise DimensionError(f"extended dimension {m * ma * n * nb} exceeds the cap {DESK_DIM_CAP}")
    return KInstance(state, (ma, nb), inst.delta, MEMBERSHIP_TOL, digest(inst.to_json()))


def cc_extension(decomp: SeparableAnsatz, ext_dims: tuple[int, int]) -> BipartiteState:
    """sum_i q_i |a_i, i><a_i, i| (x) |b_i, i><b_i, i|: a CC state on AA'|BB'.

    The flags |i> make the local vectors orthonormal, and tracing them out
    gives back sum_i q_i |a_i><a_i| (x) |b_i><b_i|.
    """
    k = len(decomp.weights)
    ma, nb = ext_dims
    if ma < k or nb < k:
        raise DimensionError(f"a {k}-term decomposition needs extension dims >= ({k}, {k})")
    m, n = decomp.dims
    da, db = m * ma, n * nb
    out = np.zeros((da * db, da * db), dtype=np.complex128)
    for i, q in enumerate(decomp.weights):
        va = np.kron(decomp.a[i], np.eye(ma)[i])
        vb = np.kron(decomp.b[i], np.eye(nb)[i])
        v = np.kron(va, vb)
        out += q * np.outer(v, v.conj())
    return BipartiteState(out, (da, db))


# ---------------------------------------------------------------------------
# linear optimization over classical states


def _top_eigvec(h: np.ndarray) -> np.ndarray:
    return np.linalg.eigh(h)[1][:, -1]


def linopt_classical(op, dims: tuple[int, int] | None = None,
                     cfg: OptimizerConfig | None = None) -> MeasureResult:
    """max tr(rho O) over CC states, found as the max over pure product states by seesaw.

    The maxima over CC, QC and separable states coincide and are attained at
    a product of pure states, which is reported (as a CC state) as certificate.
    """
    o = np.asarray(op, dtype=np.complex128)
    if o.ndim != 2 or o.shape[0] != o.shape[1]:
        raise DimensionError("operator must be a square matrix")
    if np.max(np.abs(o - o.conj().T)) > HERMITIAN_TOL:
        raise InvariantError("Hermiticity invariant violated for the operator")
    o = 0.5 * (o + o.conj().T)
    if dims is None:
        side = int(round(math.sqrt(o.shape[0])))
        if side * side != o.shape[0]:
            raise DimensionError("pass dims for a non-square composite dimension")
        dims = (side, side)
    m, n = dims
    if m * n != o.shape[0]:
        raise DimensionError(f"dims {dims} do not match operator size {o.shape[0]}")
    t = o.reshape(m, n, m, n)
    cfg = _cfg(cfg, m * n)

    def value(blocks):
        a, b = blocks
        return float(np.real(np.einsum("a,b,abcd,c,d->", a.conj(), b.conj(), t, a, b)))

    def best_a(blocks):
        b = blocks[1]
        return _top_eigvec(np.einsum("b,abcd,d->ac", b.conj(), t, b))

    def best_b(blocks):
        a = blocks[0]
        return _top_eigvec(np.einsum("a,abcd,c->bd", a.conj(), t, a))

    def init(rng):
        a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return a / np.linalg.norm(a), b / np.linalg.norm(b)

    res, (a, b) = seesaw(value, [best_a, best_b], init, cfg)
    v = np.kron(a, b)
    cert = BipartiteState(np.outer(v, v.conj()), (m, n))
    cert_value = float(np.real(np.trace(cert.matrix @ o)))
    return MeasureResult("linopt_classical", res.best_value, cert,
                         _report(res, cfg, certificate_value=cert_value), "lower",
                         {"a": a, "b": b})
