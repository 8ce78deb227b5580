"""Command line front end: ``hypersync <command> <file> [options]``.

Every command builds a JSON report (written with ``--json``) and prints a
short human summary. Exit status is 0 on success, 1 when the analysis
answers "no" (not balanced, not invariant, ...), and 2 for usage errors,
unreadable input and exceeded caps.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import __version__
from .dynamics import (
    INVARIANCE_TOL,
    flow_invariance_check,
    integrate,
    linear_coupling,
    product_coupling,
    restriction_equals_quotient,
    trajectory_invariance,
)
from .exceptions import (
    DocumentError,
    HypersyncError,
    NoConvergence,
    NonFiniteState,
    NotBalanced,
    NotEquilibrium,
    TooLarge,
    UsageError,
    ZeroComponent,
)
from .fileformat import HypergraphDocument, _to_json, document_from_hypergraph, parse_hypergraph_file
from .hypergraph import Hypergraph, incidence_digraph, is_connected, tail_cardinalities
from .partition import Partition
from .replicator import replicator_synchrony, stability_report
from .synchrony import (
    DEFAULT_CAP,
    BalanceWitness,
    coarsest_balanced,
    enumerate_balanced,
    input_equivalence,
    is_balanced,
    quotient,
)
from .validation import check_partition

COMMANDS = (
    "validate", "info", "input-eq", "check-balanced", "coarsest", "lattice", "quotient",
    "incidence", "simulate", "invariance", "restriction-check", "replicator-stability",
    "synchrony-of-matrix",
)


class Outcome:
    def __init__(self, result: dict, summary: str, ok: bool = True):
        self.result = result
        self.summary = summary
        self.ok = ok


def _classes(H: Hypergraph, part: Partition) -> list[list[str]]:
    return [[H.labels[i] for i in cls] for cls in part.classes()]


def _fmt_classes(classes) -> str:
    return " | ".join("{" + ",".join(c) + "}" for c in classes)


def _witness(H: Hypergraph, part: Partition, w: Optional[BalanceWitness]) -> Optional[dict]:
    if w is None:
        return None
    reps = [H.labels[r] for r in part.representatives()]

    def pats(keys):
        return [{"k": k, "pattern": dict(zip(reps, p))} for k, p in keys]

    return {
        "cells": [H.labels[w.cell], H.labels[w.other]],
        "k": w.k,
        "pattern": dict(zip(reps, w.pattern)),
        "weights": [str(w.weight), str(w.other_weight)],
        "patterns": [pats(w.patterns), pats(w.other_patterns)],
    }


def _partition_arg(opts, H: Hypergraph, required: bool) -> Optional[Partition]:
    if opts.partition is None:
        if required:
            raise UsageError("this command needs --partition")
        return None
    return check_partition(opts.partition, H)


def _coupling(doc: HypergraphDocument):
    spec = doc.coupling or {"family": "product", "d": 1, "f": "zero"}
    make = product_coupling if spec["family"] == "product" else linear_coupling
    exact = spec["d"] == 1
    return make(spec["f"], d=spec["d"], exact=exact), spec


def _matrix(M) -> list[list[str]]:
    return [[str(x) for x in row] for row in M]


def cmd_validate(doc, H, opts) -> Outcome:
    return Outcome({"valid": True, "nodes": H.n, "edges": H.m}, f"valid document: {H.n} nodes, {H.m} hyperedges")


def cmd_info(doc, H, opts) -> Outcome:
    per_node = {H.labels[c]: sorted(tail_cardinalities(H, c)) for c in H.nodes}
    res = {
        "nodes": list(H.labels),
        "n": H.n,
        "m": H.m,
        "tail_cardinalities": sorted(tail_cardinalities(H)),
        "node_tail_cardinalities": per_node,
        "connected": is_connected(H),
        "has_matrices": doc.matrices is not None,
    }
    return Outcome(res, f"{H.n} nodes, {H.m} hyperedges, tail cardinalities {res['tail_cardinalities']}")


def cmd_input_eq(doc, H, opts) -> Outcome:
    classes = _classes(H, input_equivalence(H))
    return Outcome({"classes": classes}, "input equivalence: " + _fmt_classes(classes))


def cmd_check_balanced(doc, H, opts) -> Outcome:
    part = _partition_arg(opts, H, required=True)
    res = is_balanced(H, part)
    out = {"partition": _classes(H, part), "balanced": res.balanced, "witness": _witness(H, part, res.witness)}
    if res:
        return Outcome(out, "balanced")
    cells = out["witness"]["cells"]
    return Outcome(out, f"not balanced: cells {cells[0]} and {cells[1]} differ", ok=False)


def cmd_coarsest(doc, H, opts) -> Outcome:
    classes = _classes(H, coarsest_balanced(H))
    return Outcome({"classes": classes}, "coarsest balanced: " + _fmt_classes(classes))


def cmd_lattice(doc, H, opts) -> Outcome:
    parts = enumerate_balanced(H, cap=opts.cap)
    listing = [_classes(H, p) for p in parts]
    lines = [f"{len(parts)} balanced partitions"] + ["  " + _fmt_classes(c) for c in listing]
    return Outcome({"cap": opts.cap, "count": len(parts), "partitions": listing}, "\n".join(lines))


def cmd_quotient(doc, H, opts) -> Outcome:
    part = _partition_arg(opts, H, required=False) or coarsest_balanced(H)
    try:
        Q = quotient(H, part)
    except NotBalanced as exc:
        return Outcome(
            {"partition": _classes(H, part), "balanced": False, "witness": _witness(H, part, exc.witness)},
            "partition is not balanced; no quotient", ok=False,
        )
    qdoc = _to_json(document_from_hypergraph(Q))
    return Outcome(
        {"partition": _classes(H, part), "balanced": True, "quotient": qdoc},
        f"quotient: {Q.n} nodes, {Q.m} hyperedges",
    )


def cmd_incidence(doc, H, opts) -> Outcome:
    D = incidence_digraph(H)
    res = {
        "node_order": list(H.labels),
        "edge_order": [e.id for e in H.edges],
        "W": _matrix(D.W),
        "T": _matrix(D.T),
    }
    lines = ["W ="] + ["  " + " ".join(r) for r in res["W"]] + ["T ="] + ["  " + " ".join(r) for r in res["T"]]
    return Outcome(res, "\n".join(lines))


def cmd_simulate(doc, H, opts) -> Outcome:
    coupling, spec = _coupling(doc)
    rng = np.random.default_rng(opts.seed)
    x0 = rng.uniform(0.1, 0.9, size=(H.n, spec["d"]) if spec["d"] > 1 else H.n)
    try:
        traj = integrate(H, coupling, x0, opts.dt, opts.steps)
    except NonFiniteState as exc:
        return Outcome({"coupling": spec, "diverged_at_step": exc.step}, str(exc), ok=False)
    if opts.csv:
        _write_csv(opts.csv, traj, opts.dt, H.n, spec["d"])
    final = traj[-1].reshape(H.n, spec["d"])
    res = {
        "coupling": spec,
        "dt": opts.dt,
        "steps": opts.steps,
        "seed": opts.seed,
        "initial": np.asarray(x0).reshape(H.n, spec["d"]).tolist(),
        "final": final.tolist(),
        "csv": opts.csv,
    }
    return Outcome(res, f"integrated {opts.steps} steps to t={opts.dt * opts.steps:g}")


def _write_csv(path: str, traj: np.ndarray, dt: float, n: int, d: int) -> None:
    header = ["t"] + [f"x_{i}_{k}" for i in range(n) for k in range(d)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for s, state in enumerate(traj):
            w.writerow([repr(s * dt)] + [repr(float(v)) for v in np.ravel(state)])


def cmd_invariance(doc, H, opts) -> Outcome:
    part = _partition_arg(opts, H, required=False) or coarsest_balanced(H)
    coupling, spec = _coupling(doc)
    rep = flow_invariance_check(H, coupling, part, trials=opts.trials, seed=opts.seed, tol=opts.tol)
    res = {
        "partition": _classes(H, part),
        "coupling": spec,
        "mode": rep.mode,
        "trials": rep.trials,
        "seed": rep.seed,
        "passed": rep.passed,
        "max_spread": rep.max_spread,
        "witness": None,
    }
    if rep.witness:
        a, b = rep.witness["cells"]
        res["witness"] = dict(rep.witness, cells=[H.labels[a], H.labels[b]])
    if rep.passed and opts.steps:
        try:
            drift = trajectory_invariance(H, coupling, part, dt=opts.dt, steps=opts.steps, seed=opts.seed)
            res["trajectory_max_distance"] = drift
            res["passed"] = drift <= max(opts.tol, 1e-8)
        except NonFiniteState as exc:
            res["trajectory_diverged_at_step"] = exc.step
    summary = "polydiagonal is flow-invariant" if res["passed"] else "polydiagonal is NOT flow-invariant"
    return Outcome(res, summary, ok=res["passed"])


def cmd_restriction(doc, H, opts) -> Outcome:
    part = _partition_arg(opts, H, required=False) or coarsest_balanced(H)
    coupling, spec = _coupling(doc)
    try:
        rep = restriction_equals_quotient(H, part, coupling, trials=opts.trials, seed=opts.seed, tol=opts.tol)
    except NotBalanced as exc:
        return Outcome(
            {"partition": _classes(H, part), "balanced": False, "witness": _witness(H, part, exc.witness)},
            "partition is not balanced", ok=False,
        )
    res = {
        "partition": _classes(H, part),
        "coupling": spec,
        "trials": rep.trials,
        "seed": rep.seed,
        "passed": rep.passed,
        "max_error": rep.max_error,
        "witness": rep.witness,
    }
    return Outcome(res, "restricted field equals quotient field" if rep.passed else "restriction mismatch", ok=rep.passed)


def _need_matrices(doc: HypergraphDocument) -> None:
    if doc.matrices is None:
        raise UsageError("this command needs a 'matrices' section with K and H")


def cmd_replicator_stability(doc, H, opts) -> Outcome:
    _need_matrices(doc)
    sysm = doc.replicator()
    p = doc.equilibrium()
    try:
        rep = stability_report(sysm, p, tol=opts.tol if opts.tol_given else 1e-9, printed=doc.matrices.get("J"))
    except (NotEquilibrium, ZeroComponent) as exc:
        return Outcome({"equilibrium": [str(v) for v in p], "error": str(exc)}, str(exc), ok=False)
    res = {"equilibrium": [str(v) for v in p]}
    res.update(rep.as_dict())
    ev = ", ".join(f"{z.real:.6g}{z.imag:+.6g}i" for z in rep.eigenvalues)
    summary = f"eigenvalues: {ev}\ntransverse verdict: {rep.verdict}"
    if rep.discrepancy:
        summary += (
            f"\nnote: supplied reference Jacobian differs from the computed one"
            f" (max |diff| {rep.discrepancy['max_abs_difference']:.3g})"
        )
    return Outcome(res, summary)


def cmd_synchrony_of_matrix(doc, H, opts) -> Outcome:
    _need_matrices(doc)
    sysm = doc.replicator()
    parts = replicator_synchrony(sysm, cap=opts.cap, seed=opts.seed)
    labels = [str(i + 1) for i in range(sysm.n)]
    listing = [[[labels[i] for i in cls] for cls in p.classes()] for p in parts]
    lines = [f"{len(parts)} synchrony partitions of K"] + ["  " + _fmt_classes(c) for c in listing]
    return Outcome({"cap": opts.cap, "count": len(parts), "partitions": listing}, "\n".join(lines))


HANDLERS: dict[str, Callable] = {
    "validate": cmd_validate,
    "info": cmd_info,
    "input-eq": cmd_input_eq,
    "check-balanced": cmd_check_balanced,
    "coarsest": cmd_coarsest,
    "lattice": cmd_lattice,
    "quotient": cmd_quotient,
    "incidence": cmd_incidence,
    "simulate": cmd_simulate,
    "invariance": cmd_invariance,
    "restriction-check": cmd_restriction,
    "replicator-stability": cmd_replicator_stability,
    "synchrony-of-matrix": cmd_synchrony_of_matrix,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypersync", description="Synchrony analysis of weighted directed hypergraphs.")
    p.add_argument("--version", action="version", version=f"hypersync {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="hypergraph document (JSON)")
    p.add_argument("--partition", help='classes separated by "|", labels by ","')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--csv", metavar="OUT", help="write the trajectory here (simulate)")
    return p


def _options_echo(opts) -> dict:
    keys = ("partition", "seed", "cap", "dt", "steps", "trials", "tol", "csv")
    return {k: getattr(opts, k) for k in keys}


def render_report(command: str, path: str, digest: str, opts, status: str, result: dict) -> str:
    report = {
        "tool": "hypersync",
        "version": __version__,
        "command": {"name": command, "file": path, "options": _options_echo(opts)},
        "input_sha256": digest,
        "status": status,
        "result": result,
    }
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(opts, text: str) -> None:
    if opts.json == "-":
        sys.stdout.write(text)
    elif opts.json:
        with open(opts.json, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    try:
        opts = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"hypersync: usage error: {exc}", file=sys.stderr)
        return 2
    opts.tol_given = opts.tol is not None
    if opts.tol is None:
        opts.tol = INVARIANCE_TOL
    if opts.dt <= 0 or opts.steps < 0 or opts.cap < 0 or opts.trials < 1:
        print("hypersync: usage error: --dt must be positive; --steps, --cap non-negative; --trials positive", file=sys.stderr)
        return 2

    try:
        with open(opts.file, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"hypersync: cannot read {opts.file}: {exc.strerror}", file=sys.stderr)
        return 2
    digest = hashlib.sha256(raw).hexdigest()

    def finish(status: str, result: dict, code: int, message: str, stream) -> int:
        _emit(opts, render_report(opts.command, opts.file, digest, opts, status, result))
        if opts.json != "-":
            print(message, file=stream)
        return code

    try:
        doc = parse_hypergraph_file(raw.decode("utf-8"))
        H = doc.hypergraph()
    except (DocumentError, UnicodeDecodeError) as exc:
        code = 1 if opts.command == "validate" else 2
        return finish("invalid", {"valid": False, "error": str(exc)}, code, f"hypersync: invalid document: {exc}", sys.stderr)

    try:
        out = HANDLERS[opts.command](doc, H, opts)
    except TooLarge as exc:
        return finish("error", {"error": str(exc)}, 2, f"hypersync: {exc}", sys.stderr)
    except (UsageError, DocumentError) as exc:
        return finish("error", {"error": str(exc)}, 2, f"hypersync: usage error: {exc}", sys.stderr)
    except NoConvergence as exc:
        return finish("fail", {"error": str(exc)}, 1, f"hypersync: {exc}", sys.stderr)
    except HypersyncError as exc:
        return finish("error", {"error": str(exc)}, 2, f"hypersync: {exc}", sys.stderr)
    return finish("ok" if out.ok else "fail", out.result, 0 if out.ok else 1, out.summary, sys.stdout)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
