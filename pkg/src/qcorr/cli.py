"""Command-line interface: compute, classify, reduce, verify, random.

Exit codes: 0 success, 1 suite failure, 2 parse or validation error,
3 optimizer infeasibility.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, classicality, measures, reductions, suites
from .optimize import InfeasibleError, OptimizerConfig, default_config
from .qcore import (BipartiteState, DimensionError, InvariantError, random_bipartite_state,
                    random_pure_state)
from .serialize import (SCHEMA, SchemaError, channel_from_json, decode_complex, read_json,
                        result_to_json, state_from_json, state_to_json, to_jsonable, write_json,
                        atomic_write_text)

EXIT_OK, EXIT_SUITE_FAILED, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2, 3

STATE_MEASURES = tuple(measures.MEASURES) + ("cc-gap",)
CHANNEL_MEASURES = measures.CHANNEL_MEASURES
REDUCTIONS = ("sep-to-eof", "eof-to-discord", "eof-to-holevo", "sep-to-k")
RANDOM_KINDS = ("haar-mixed", "pure", "qc", "cc", "separable")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int
    starts: int | None
    tol: float
    max_iters: int
    out: str
    format: str

    def optimizer(self, total_dim: int) -> OptimizerConfig:
        base = default_config(total_dim)
        return base.with_(seed=self.seed, tol_f=self.tol, max_iters=self.max_iters,
                          starts=self.starts if self.starts is not None else base.starts)

    def to_dict(self, total_dim: int | None = None) -> dict:
        out = {"seed": self.seed, "starts": self.starts, "tol": self.tol,
               "max_iters": self.max_iters, "out": self.out, "format": self.format}
        if total_dim is not None:
            out["optimizer"] = self.optimizer(total_dim).to_dict()
        return out


def _file_digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _envelope(rc: RunConfig, command: str, inputs: dict, total_dim: int | None, body: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "version": __version__,
            "run_config": rc.to_dict(total_dim),
            "inputs": {name: {"path": p, "sha256": _file_digest(p)} for name, p in inputs.items()},
            **body}


def _csv_text(rows: list[dict]) -> str:
    cols = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(to_jsonable(r))
    return buf.getvalue()


def _unwrap(d, key: str):
    """Accept a bare object, an instance carrying it under ``key``, or a reduce envelope."""
    if isinstance(d, dict) and "instance" in d:
        d = d["instance"]
    if isinstance(d, dict) and key in d and isinstance(d[key], dict):
        d = d[key]
    return d


def _load_state(path: str) -> BipartiteState:
    state = state_from_json(_unwrap(read_json(path), "state"))
    if not isinstance(state, BipartiteState):
        raise DimensionError("expected a bipartite state (dims of length 2)")
    return state


def _load_operator(path: str) -> tuple[np.ndarray, tuple[int, int] | None]:
    d = read_json(path)
    if not isinstance(d, dict) or "matrix" not in d:
        raise SchemaError("operator file needs a 'matrix' field")
    mat = decode_complex(d["matrix"])
    dims = tuple(int(x) for x in d["dims"]) if "dims" in d else None
    return mat, dims


# ---------------------------------------------------------------------------
# commands


def cmd_compute(args, rc: RunConfig) -> int:
    name = args.measure
    inputs = {"input": args.input}
    if name in CHANNEL_MEASURES:
        doc = read_json(args.input)
        ch = channel_from_json(_unwrap(doc, "channel"))
        total = ch.dim_in
        cfg = rc.optimizer(total)
        if name == "constrained-holevo":
            inst = _unwrap(doc, "instance")
            if args.rho is not None:
                inputs["rho"] = args.rho
                rho = state_from_json(read_json(args.rho))
            elif isinstance(inst, dict) and "rho" in inst:
                rho = decode_complex(inst["rho"])
            else:
                raise UsageError("constrained-holevo needs --rho STATE_FILE or a holevo instance")
            res = measures.constrained_holevo(ch, rho, args.k, cfg)
        else:
            res = measures.holevo_capacity(ch, args.k, cfg)
    elif name == "linopt":
        op, dims = _load_operator(args.input)
        total = op.shape[0]
        res = reductions.linopt_classical(op, dims, rc.optimizer(total))
    else:
        state = _load_state(args.input)
        total = state.dim
        cfg = rc.optimizer(total)
        if name == "cc-gap":
            res = classicality.cc_in_extension_gap(state, args.ext_dims, cfg)
        else:
            res = measures.MEASURES[name](state, cfg=cfg, k=args.k, dC=args.dC)
    doc = _envelope(rc, "compute", inputs, total, {"measure": name, "result": result_to_json(res)})
    out = Path(rc.out)
    write_json(out / "result.json", doc)
    if rc.format == "csv":
        row = {"measure": name, "value": res.value, "bound_direction": res.bound_direction,
               "converged": res.report.get("converged", ""), "seed": rc.seed,
               "input_sha256": doc["inputs"]["input"]["sha256"]}
        atomic_write_text(out / "result.csv", _csv_text([row]))
    print(json.dumps({"measure": name, "value": to_jsonable(res.value),
                      "bound_direction": res.bound_direction}))
    return EXIT_OK


def cmd_classify(args, rc: RunConfig) -> int:
    state = _load_state(args.input)
    qc = classicality.is_quantum_classical(state, args.tol_class)
    cc = classicality.is_classical_classical(state, args.tol_class)
    body = {"quantum_classical": qc.to_dict(), "classical_classical": cc.to_dict()}
    if qc.witness is not None:
        body["quantum_classical"]["witness"] = {"type": "vn",
                                                "elements": to_jsonable(qc.witness.elements)}
    doc = _envelope(rc, "classify", {"input": args.input}, None, body)
    write_json(Path(rc.out) / "classification.json", doc)
    print(json.dumps({"quantum_classical": qc.verdict, "classical_classical": cc.verdict}))
    return EXIT_OK


def _as_instance(d: dict, kind: str, args):
    if isinstance(d, dict) and "instance" in d:
        d = d["instance"]
    if isinstance(d, dict) and "kind" in d:
        return reductions.instance_from_json(d)
    state = state_from_json(d)
    if kind.startswith("sep-"):
        if args.delta is None:
            raise UsageError("a plain state input to a separability reduction needs --delta")
        return reductions.SeparabilityInstance(state, args.delta)
    if args.eps is None:
        raise UsageError("a plain state input to an E_F reduction needs --eps")
    return reductions.EofInstance(state, args.a, args.eps)


def cmd_reduce(args, rc: RunConfig) -> int:
    kind = args.kind
    inst = _as_instance(read_json(args.input), kind, args)
    want = reductions.SeparabilityInstance if kind.startswith("sep-") else reductions.EofInstance
    if not isinstance(inst, want):
        raise SchemaError(f"{kind} expects a {want.__name__}, got {type(inst).__name__}")
    if kind == "sep-to-eof":
        out = reductions.sep_to_eof(inst)
    elif kind == "eof-to-discord":
        out = reductions.eof_to_discord(inst, args.dimC, args.meas_kind)
    elif kind == "eof-to-holevo":
        out = reductions.eof_to_holevo(inst)
    else:
        if args.ext_dims is None:
            raise UsageError("sep-to-k needs --ext-dims M' N'")
        out = reductions.sep_to_k(inst, tuple(args.ext_dims))
    doc = _envelope(rc, "reduce", {"input": args.input}, None,
                    {"reduction": kind, "instance": out.to_json()})
    write_json(Path(rc.out) / "instance.json", doc)
    print(json.dumps({"reduction": kind, "provenance": out.provenance}))
    return EXIT_OK


def cmd_verify(args, rc: RunConfig) -> int:
    if args.suite not in suites.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(suites.SUITES)}")
    rep = suites.run_suite(args.suite, rc.seed, args.count, rc.optimizer(4))
    out = Path(rc.out)
    doc = _envelope(rc, "verify", {}, 4, {"report": rep.to_json()})
    write_json(out / "report.json", doc)
    atomic_write_text(out / "cases.csv", rep.to_csv())
    print(json.dumps({"suite": rep.name, "passed": rep.passed,
                      "worst_residual": to_jsonable(rep.worst_residual),
                      "cases": len(rep.cases)}))
    return EXIT_OK if rep.passed else EXIT_SUITE_FAILED


def _random_state(kind: str, m: int, n: int, rank, terms: int, rng) -> BipartiteState:
    if kind == "haar-mixed":
        return random_bipartite_state(m, n, rank, rng)
    if kind == "pure":
        return BipartiteState(random_pure_state(m * n, rng).density().matrix, (m, n))
    if kind == "qc":
        return classicality.random_qc_state(m, n, rng)
    if kind == "cc":
        return classicality.random_cc_state(m, n, rng)
    return classicality.random_separable_state(m, n, terms, rng)


def cmd_random(args, rc: RunConfig) -> int:
    m, n = args.m, args.n
    if m < 1 or n < 1 or m * n > measures.DESK_DIM_CAP:
        raise DimensionError(f"dims must be positive with m*n <= {measures.DESK_DIM_CAP}")
    if args.count < 1:
        raise UsageError("count must be >= 1")
    out = Path(rc.out)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(rc.seed).spawn(args.count)]
    names = []
    for i, rng in enumerate(rngs):
        state = _random_state(args.kind, m, n, args.rank, args.terms, rng)
        doc = state_to_json(state)
        doc["generator"] = {"kind": args.kind, "dims": [m, n], "rank": args.rank,
                            "terms": args.terms, "seed": rc.seed, "index": i}
        name = f"{args.kind}_{i:04d}.json"
        write_json(out / name, doc)
        names.append(name)
    manifest = {"schema": SCHEMA, "command": "random", "version": __version__,
                "run_config": rc.to_dict(), "files": names}
    write_json(out / "manifest.json", manifest)
    print(json.dumps({"kind": args.kind, "count": len(names)}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--starts", type=int, default=None,
                        help="multi-start count (default: 32 for total dim <= 4, else 128)")
    common.add_argument("--tol", type=float, default=1e-9, help="optimizer tol_f")
    common.add_argument("--max-iters", type=int, default=3000)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="qcorr", description="Quantum correlation measures and reductions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", parents=[common], help="evaluate a measure")
    c.add_argument("measure", choices=STATE_MEASURES + CHANNEL_MEASURES + ("linopt",))
    c.add_argument("input", help="state JSON (channel JSON for channel measures)")
    c.add_argument("--rho", help="input state for constrained-holevo")
    c.add_argument("--k", type=int, default=None, help="ensemble / separable-term count")
    c.add_argument("--dC", type=int, default=None, help="extension dimension for squashed bounds")
    c.add_argument("--ext-dims", type=int, nargs=2, default=None, metavar=("M2", "N2"))
    c.set_defaults(func=cmd_compute)

    k = sub.add_parser("classify", parents=[common], help="zero-discord classification")
    k.add_argument("input")
    k.add_argument("--tol-class", type=float, default=classicality.DEFAULT_TOL)
    k.set_defaults(func=cmd_classify)

    r = sub.add_parser("reduce", parents=[common], help="map an instance through a reduction")
    r.add_argument("kind", choices=REDUCTIONS)
    r.add_argument("input", help="instance JSON, or a state JSON with --delta / --eps")
    r.add_argument("--delta", type=float)
    r.add_argument("--a", type=float, default=0.0)
    r.add_argument("--eps", type=float)
    r.add_argument("--dimC", type=int)
    r.add_argument("--meas-kind", choices=("vn", "povm"), default="povm")
    r.add_argument("--ext-dims", type=int, nargs=2, default=None, metavar=("M2", "N2"))
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite")
    v.add_argument("--count", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("random", parents=[common], help="generate random states")
    g.add_argument("kind", choices=RANDOM_KINDS)
    g.add_argument("m", type=int)
    g.add_argument("n", type=int)
    g.add_argument("--rank", type=int, default=None)
    g.add_argument("--terms", type=int, default=2)
    g.add_argument("--count", type=int, default=1)
    g.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rc = RunConfig(args.seed, args.starts, args.tol, args.max_iters, args.out, args.format)
    try:
        rc.optimizer(4)
        return args.func(args, rc)
    except InfeasibleError as exc:
        print(f"error: optimizer infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ArithmeticError as exc:
        print(f"error: estimate failed its consistency check: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvariantError, DimensionError, SchemaError, UsageError, ValueError, KeyError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
