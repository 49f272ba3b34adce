"""Deterministic multi-start minimization, grid oracles and seesaw maximization.

Every infimum in the package is realized by :func:`minimize`. A returned
``best_value`` is always the objective evaluated at ``best_params``, so it is an
achieved (certified) upper bound on the infimum, never a claim of optimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

GRID_MAX_ARITY = 4
CONVERGED_STARTS = 3


class InfeasibleError(RuntimeError):
    """Every start evaluated to +infinity."""


@dataclass(frozen=True)
class Objective:
    """Pure real objective on R^arity.

    ``value_and_grad`` optionally returns ``(f, df/dx)``; when present the local
    search uses it. ``batch`` optionally evaluates an ``(N, arity)`` array at once
    and is only used by :func:`grid_oracle`.
    """

    fun: Callable[[np.ndarray], float]
    arity: int
    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]] | None = None
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x) -> float:
        return float(self.fun(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 32
    max_iters: int = 3000
    tol_f: float = 1e-9
    seed: int = 0
    box: tuple[tuple[float, float], ...] | None = None
    # "auto" picks L-BFGS when a gradient is available, else Nelder-Mead
    method: str = "auto"

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if not self.tol_f > 0:
            raise ValueError("tol_f must be positive")
        if self.method not in ("auto", "nelder-mead", "lbfgs"):
            raise ValueError(f"unknown local method {self.method!r}")

    def with_(self, **kw) -> "OptimizerConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return {"starts": self.starts, "max_iters": self.max_iters, "tol_f": self.tol_f,
                "seed": self.seed, "method": self.method,
                "box": None if self.box is None else [list(b) for b in self.box]}

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        d = dict(d)
        if d.get("box") is not None:
            d["box"] = tuple(tuple(b) for b in d["box"])
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


def default_config(total_dim: int, **kw) -> OptimizerConfig:
    """32 starts for two-qubit-sized problems, 128 beyond."""
    return OptimizerConfig(starts=32 if total_dim <= 4 else 128, **kw)


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_params: np.ndarray
    converged: bool
    starts_within_tol: int
    evaluations: int
    start_values: tuple[float, ...] = ()
    history: tuple[float, ...] = field(default=(), repr=False)

    def summary(self) -> dict:
        return {"best_value": self.best_value, "converged": self.converged,
                "starts_within_tol": self.starts_within_tol, "evaluations": self.evaluations,
                "starts": len(self.start_values)}


class _Counter:
    def __init__(self, obj: Objective):
        self.obj = obj
        self.n = 0

    def fun(self, x):
        self.n += 1
        if not np.all(np.isfinite(x)):
            return math.inf
        with np.errstate(all="ignore"):
            v = float(self.obj.fun(x))
        return v if math.isfinite(v) else math.inf

    def fun_grad(self, x):
        self.n += 1
        if not np.all(np.isfinite(x)):
            return 1e300, np.zeros_like(x)
        with np.errstate(all="ignore"):
            v, g = self.obj.value_and_grad(x)
        if not math.isfinite(v):
            # L-BFGS line search backs off from non-finite points
            return 1e300, np.zeros_like(x)
        return float(v), np.asarray(g, dtype=float)


def start_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Per-start generators split from the master seed (start i -> child i)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _start_point(rng: np.random.Generator, arity: int, box) -> np.ndarray:
    if box is None:
        return rng.standard_normal(arity)
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    return lo + (hi - lo) * rng.random(arity)


def _local(counter: _Counter, x0: np.ndarray, cfg: OptimizerConfig) -> tuple[float, np.ndarray]:
    method = cfg.method
    if method == "auto":
        method = "lbfgs" if counter.obj.value_and_grad is not None else "nelder-mead"
    bounds = None if cfg.box is None else list(cfg.box)
    with np.errstate(invalid="ignore"):
        res = _run_local(counter, x0, cfg, method, bounds)
    x = np.asarray(res.x, dtype=float)
    return counter.fun(x), x


def _run_local(counter: _Counter, x0: np.ndarray, cfg: OptimizerConfig, method: str, bounds):
    if method == "lbfgs":
        if counter.obj.value_and_grad is not None:
            res = _scipy_minimize(counter.fun_grad, x0, jac=True, method="L-BFGS-B", bounds=bounds,
                                  options={"maxiter": cfg.max_iters, "ftol": 1e-15, "gtol": 1e-12,
                                           "maxcor": 30})
        else:
            res = _scipy_minimize(counter.fun, x0, method="L-BFGS-B", bounds=bounds,
                                  options={"maxiter": cfg.max_iters, "ftol": 1e-15, "gtol": 1e-10})
    else:
        res = _scipy_minimize(counter.fun, x0, method="Nelder-Mead", bounds=bounds,
                              options={"maxiter": cfg.max_iters * max(1, x0.size),
                                       "maxfev": cfg.max_iters * max(1, x0.size) * 2,
                                       "xatol": 1e-10, "fatol": cfg.tol_f * 1e-3, "adaptive": x0.size > 4})
    return res


def minimize(obj: Objective, cfg: OptimizerConfig | None = None,
             initial: Sequence[np.ndarray] = ()) -> OptimizationResult:
    """Multi-start local minimization.

    ``initial`` points are refined first, then ``cfg.starts`` seeded random
    starts. Results are merged in start order, so the outcome depends only on
    ``(obj, cfg, initial)``.
    """
    cfg = cfg or OptimizerConfig()
    counter = _Counter(obj)
    x0s = [np.asarray(x, dtype=float).copy() for x in initial]
    x0s += [_start_point(rng, obj.arity, cfg.box) for rng in start_streams(cfg.seed, cfg.starts)]
    values, params = [], []
    for x0 in x0s:
        if obj.arity == 0:
            v, x = counter.fun(x0), x0
        else:
            v, x = _local(counter, x0, cfg)
        values.append(v)
        params.append(x)
    finite = [i for i, v in enumerate(values) if math.isfinite(v)]
    if not finite:
        raise InfeasibleError("objective is +infinity at every start")
    best = min(finite, key=lambda i: values[i])
    best_value = values[best]
    within = sum(1 for v in values if math.isfinite(v) and v - best_value <= cfg.tol_f)
    return OptimizationResult(best_value=best_value, best_params=params[best],
                              converged=within >= CONVERGED_STARTS, starts_within_tol=within,
                              evaluations=counter.n, start_values=tuple(values))


def local_search(obj: Objective, x0: np.ndarray, cfg: OptimizerConfig | None = None
                 ) -> OptimizationResult:
    """Single local refinement from ``x0`` (no random starts)."""
    cfg = cfg or OptimizerConfig()
    counter = _Counter(obj)
    v, x = _local(counter, np.asarray(x0, dtype=float).copy(), cfg)
    if not math.isfinite(v):
        raise InfeasibleError("objective is +infinity after local refinement")
    return OptimizationResult(best_value=v, best_params=x, converged=False, starts_within_tol=1,
                              evaluations=counter.n, start_values=(v,))


def grid_oracle(obj: Objective, resolution: float | Sequence[float] | int | Sequence[int],
                box: Sequence[tuple[float, float]], endpoint: bool | Sequence[bool] = True,
                chunk: int = 200_000) -> OptimizationResult:
    """Exhaustive evaluation on a rectangular grid.

    ``resolution`` is either a step size (float) or a point count (int) per
    axis. ``endpoint=False`` drops the upper edge of an axis (periodic angles).
    """
    if obj.arity > GRID_MAX_ARITY:
        raise ValueError(f"grid oracle supports arity <= {GRID_MAX_ARITY}, got {obj.arity}")
    box = [tuple(map(float, b)) for b in box]
    if len(box) != obj.arity or any(hi <= lo for lo, hi in box):
        raise ValueError("grid oracle needs a non-empty box per parameter")
    res = list(resolution) if isinstance(resolution, (list, tuple)) else [resolution] * obj.arity
    ends = list(endpoint) if isinstance(endpoint, (list, tuple)) else [endpoint] * obj.arity
    axes = []
    for (lo, hi), r, end in zip(box, res, ends):
        count = int(r) if isinstance(r, (int, np.integer)) else int(round((hi - lo) / r)) + 1
        axes.append(np.linspace(lo, hi, count, endpoint=end))
    shape = [len(a) for a in axes]
    total = int(np.prod(shape))
    best_value, best_idx = math.inf, None
    for start in range(0, total, chunk):
        flat = np.arange(start, min(total, start + chunk))
        idx = np.unravel_index(flat, shape)
        pts = np.stack([a[i] for a, i in zip(axes, idx)], axis=1)
        if obj.batch is not None:
            vals = np.asarray(obj.batch(pts), dtype=float)
        else:
            vals = np.array([obj.fun(p) for p in pts])
        vals = np.where(np.isfinite(vals), vals, math.inf)
        j = int(np.argmin(vals))
        if vals[j] < best_value:
            best_value, best_idx = float(vals[j]), flat[j]
    if best_idx is None:
        raise InfeasibleError("objective is +infinity on the whole grid")
    idx = np.unravel_index(best_idx, shape)
    x = np.array([a[i] for a, i in zip(axes, idx)])
    return OptimizationResult(best_value=best_value, best_params=x, converged=True,
                              starts_within_tol=1, evaluations=total)


def seesaw(value: Callable[[tuple], float], maximizers: Sequence[Callable[[tuple], np.ndarray]],
           init: Callable[[np.random.Generator], tuple], cfg: OptimizerConfig | None = None,
           flatten: Callable[[tuple], np.ndarray] | None = None) -> tuple[OptimizationResult, tuple]:
    """Alternating exact block maximization, restarted from seeded initial blocks.

    ``maximizers[i](blocks)`` returns the optimal block i with the others fixed.
    Iteration stops when a full sweep improves the value by less than ``tol_f``.
    Returns the result (``best_value`` is the maximum found) and the best blocks.
    """
    cfg = cfg or OptimizerConfig()
    flatten = flatten or (lambda blocks: np.concatenate(
        [np.concatenate([np.real(b).ravel(), np.imag(b).ravel()]) for b in blocks]))
    evals = 0
    values, histories, all_blocks = [], [], []
    for rng in start_streams(cfg.seed, cfg.starts):
        blocks = tuple(init(rng))
        cur = value(blocks)
        evals += 1
        hist = [cur]
        for _ in range(cfg.max_iters):
            for i, upd in enumerate(maximizers):
                blocks = blocks[:i] + (upd(blocks),) + blocks[i + 1:]
            new = value(blocks)
            evals += 1
            hist.append(new)
            done = new - cur < cfg.tol_f
            cur = new
            if done:
                break
        values.append(cur)
        histories.append(tuple(hist))
        all_blocks.append(blocks)
    best = int(np.argmax(values))
    within = sum(1 for v in values if values[best] - v <= cfg.tol_f)
    res = OptimizationResult(best_value=float(values[best]), best_params=flatten(all_blocks[best]),
                             converged=within >= CONVERGED_STARTS, starts_within_tol=within,
                             evaluations=evals, start_values=tuple(values), history=histories[best])
    return res, all_blocks[best]

