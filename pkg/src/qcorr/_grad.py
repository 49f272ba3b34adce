"""Value-and-gradient building blocks for the measure objectives.

Complex parameters Z are optimized through x = [Re Z, Im Z]. A "gradient" of a
real function f with respect to Z is g = df/dRe Z + i df/dIm Z, so that
df = Re sum(conj(g) * dZ). For f = tr(G X) with X = Y Y^dag, g_Y = 2 G Y.
"""

from __future__ import annotations

import math

import numpy as np

LN2 = math.log(2.0)
_FLOOR = 1e-300


def pack(*arrays: np.ndarray) -> np.ndarray:
    return np.concatenate([np.concatenate([a.real.ravel(), a.imag.ravel()]) for a in arrays])


def unpack(x: np.ndarray, *shapes: tuple[int, ...]) -> list[np.ndarray]:
    out, pos = [], 0
    for shape in shapes:
        size = int(np.prod(shape))
        re = x[pos:pos + size]
        im = x[pos + size:pos + 2 * size]
        out.append((re + 1j * im).reshape(shape))
        pos += 2 * size
    return out


def param_count(*shapes: tuple[int, ...]) -> int:
    return sum(2 * int(np.prod(s)) for s in shapes)


def weighted_entropy(x: np.ndarray) -> tuple[float, np.ndarray]:
    """Sum over a stack of PSD matrices X_i of tr(X_i) * S(X_i / tr X_i), in bits.

    Returns the value and dF/dX_i = (log2(tr X_i) I - log2 X_i).
    """
    x = 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))
    lam, q = np.linalg.eigh(x)
    lam = np.clip(lam, 0.0, None)
    p = lam.sum(axis=-1)
    loglam = np.log(np.maximum(lam, _FLOOR))
    logp = np.log(np.maximum(p, _FLOOR))
    val = -np.sum(lam * loglam) + np.sum(p * logp)
    gdiag = (logp[..., None] - loglam) / LN2
    grad = (q * gdiag[..., None, :]) @ np.conj(np.swapaxes(q, -1, -2))
    return float(val / LN2), grad


def entropy_bits(x: np.ndarray) -> float:
    """Von Neumann entropy of (a stack of) density matrices, summed, no gradient."""
    lam = np.clip(np.linalg.eigvalsh(x), 0.0, None)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def polar(m: np.ndarray):
    """V = M (M^dag M)^{-1/2} and a vector-Jacobian product g_V -> g_M.

    Returns (None, None) when M^dag M is numerically singular.
    """
    s = np.conj(m.T) @ m
    lam, q = np.linalg.eigh(s)
    if lam[0] <= 1e-12 * max(lam[-1], 1e-300):
        return None, None
    f = lam ** -0.5
    t = (q * f) @ np.conj(q.T)
    v = m @ t

    def vjp(gv: np.ndarray) -> np.ndarray:
        h = np.conj(q.T) @ (np.conj(m.T) @ gv) @ q
        dl = lam[:, None] - lam[None, :]
        df = f[:, None] - f[None, :]
        same = np.abs(dl) <= 1e-12 * np.abs(lam[:, None])
        gamma = np.where(same, -0.5 * lam[:, None] ** -1.5, df / np.where(same, 1.0, dl))
        k = q @ (gamma * h) @ np.conj(q.T)
        kh = 0.5 * (k + np.conj(k.T))
        return gv @ t + 2.0 * m @ kh

    return v, vjp


def log_derivative_adjoint(sigma_eig: tuple[np.ndarray, np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Adjoint Frechet derivative of log at sigma applied to rho (natural log)."""
    s, q = sigma_eig
    ls = np.log(s)
    ds = s[:, None] - s[None, :]
    dl = ls[:, None] - ls[None, :]
    same = np.abs(ds) <= 1e-13 * np.maximum(s[:, None], s[None, :])
    gamma = np.where(same, 1.0 / np.maximum(s[:, None], _FLOOR), dl / np.where(same, 1.0, ds))
    rq = np.conj(q.T) @ rho @ q
    return q @ (gamma * rq) @ np.conj(q.T)


def marginal_entropies(phi: np.ndarray, terms) -> tuple[float, np.ndarray]:
    """sum_t coef_t * S(marginal of |phi><phi| on axes_t), with gradient wrt phi.

    ``phi`` is a tensor with one axis per subsystem (unnormalized allowed: the
    entropies are of the normalized marginals weighted by the squared norm).
    """
    nd = phi.ndim
    total = 0.0
    grad = np.zeros_like(phi)
    for coef, keep in terms:
        keep = list(keep)
        rest = [i for i in range(nd) if i not in keep]
        perm = keep + rest
        t = np.transpose(phi, perm)
        dk = int(np.prod([phi.shape[i] for i in keep])) if keep else 1
        mat = t.reshape(dk, -1)
        val, g = weighted_entropy((mat @ np.conj(mat.T))[None])
        total += coef * val
        gm = 2.0 * coef * (g[0] @ mat)
        grad += np.transpose(gm.reshape(t.shape), np.argsort(perm))
    return total, grad
