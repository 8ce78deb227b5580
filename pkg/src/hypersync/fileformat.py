"""JSON document format for hypergraphs, replicator matrices and coupling choices.

A document looks like::

    {
      "format": "hypersync/1",
      "nodes": ["1", "2", "3"],            # or a node count
      "edges": [
        {"id": "e1", "tail": [["1", 1], ["2", 1]], "head": ["3"], "weight": "3/2"}
      ],
      "matrices": {"K": [["0", "1"], ["-1", "0"]], "H": [[0, 0], [0, 0]],
                   "p": ["1/2", "1/2"]},      # optional; p defaults to uniform
      "coupling": {"family": "product", "d": 1, "f": "zero"}   # optional
    }

Weights and matrix entries are integers, decimals or ``"p/q"`` strings and
are held as exact rationals. A tail entry may also be a bare label
(multiplicity one). :func:`print_document` writes a canonical form that
parses back to an equal document.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exceptions import DocumentSemanticError, DocumentSyntaxError, HypergraphError
from .hypergraph import Hypergraph, as_fraction, build_hypergraph
from .replicator import ReplicatorSystem

__all__ = [
    "FORMAT",
    "EdgeRecord",
    "HypergraphDocument",
    "parse_hypergraph_file",
    "print_document",
    "load_document",
    "document_from_hypergraph",
]

FORMAT = "hypersync/1"
TOP_KEYS = {"format", "nodes", "edges", "matrices", "coupling"}
MATRIX_KEYS = {"K", "H", "p", "J"}
COUPLING_FAMILIES = {"product", "linear"}
INTERNAL_TAGS = {"zero", "decay", "cubic"}


@dataclass(frozen=True)
class EdgeRecord:
    id: str
    tail: tuple[tuple[str, int], ...]
    head: tuple[str, ...]
    weight: Fraction


@dataclass(frozen=True)
class HypergraphDocument:
    labels: tuple[str, ...]
    edges: tuple[EdgeRecord, ...] = ()
    nodes_as_count: bool = False
    matrices: Optional[dict] = field(default=None, hash=False)
    coupling: Optional[dict] = field(default=None, hash=False)
    format: str = FORMAT

    def hypergraph(self) -> Hypergraph:
        return build_hypergraph(
            self.labels,
            [{"id": e.id, "tail": list(e.tail), "head": list(e.head), "weight": e.weight} for e in self.edges],
        )

    def replicator(self):
        if not self.matrices or "K" not in self.matrices:
            raise DocumentSemanticError("document has no replicator matrices", path="matrices")
        return ReplicatorSystem(self.matrices["K"], self.matrices["H"])

    def equilibrium(self) -> tuple[Fraction, ...]:
        """The ``p`` entry of the matrices section, or the uniform vector."""
        if self.matrices and "p" in self.matrices:
            return self.matrices["p"]
        n = len(self.matrices["K"]) if self.matrices else len(self.labels)
        return tuple(Fraction(1, n) for _ in range(n))


class _Locator:
    """Maps JSON paths to 1-based line numbers by walking the text with raw_decode."""

    def __init__(self, text: str):
        self.text = text
        self.decoder = json.JSONDecoder()

    def line_of(self, offset: int) -> int:
        return self.text.count("\n", 0, offset) + 1

    def _skip(self, i: int) -> int:
        while i < len(self.text) and self.text[i] in " \t\r\n":
            i += 1
        return i

    def _members(self, start: int):
        """Yield (key_or_index, value_offset) for the container starting at ``start``."""
        t = self.text
        opener = t[start]
        i = self._skip(start + 1)
        idx = 0
        while i < len(t) and t[i] not in "]}":
            if opener == "{":
                key, i = self.decoder.raw_decode(t, i)
                i = self._skip(i)
                i = self._skip(i + 1)  # colon
            else:
                key = idx
            yield key, i
            _, i = self.decoder.raw_decode(t, i)
            i = self._skip(i)
            if i < len(t) and t[i] == ",":
                i = self._skip(i + 1)
            idx += 1

    def find(self, path: list) -> Optional[int]:
        try:
            pos = self._skip(0)
            for step in path:
                for key, off in self._members(pos):
                    if key == step:
                        pos = off
                        break
                else:
                    return None
            return self.line_of(pos)
        except (ValueError, IndexError):
            return None


def _path_str(path: list) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out


def parse_hypergraph_file(text: str) -> HypergraphDocument:
    """Parse and validate a document.

    Malformed JSON raises :class:`DocumentSyntaxError` with line and column;
    invalid content raises :class:`DocumentSemanticError` with the offending
    path and, when it can be located, its line.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, line=exc.lineno, column=exc.colno) from None
    loc = _Locator(text)

    def fail(msg, path):
        raise DocumentSemanticError(msg, line=loc.find(path), path=_path_str(path) or "<root>")

    if not isinstance(raw, dict):
        fail("document must be a JSON object", [])
    unknown = sorted(set(raw) - TOP_KEYS)
    if unknown:
        fail(f"unknown top-level keys {unknown}", [unknown[0]])
    fmt = raw.get("format", FORMAT)
    if fmt != FORMAT:
        fail(f"unsupported format {fmt!r}; expected {FORMAT!r}", ["format"])

    nodes = raw.get("nodes")
    if isinstance(nodes, bool) or nodes is None:
        fail("'nodes' must be a count or a list of labels", ["nodes"])
    if isinstance(nodes, int):
        if nodes < 0:
            fail("node count must be non-negative", ["nodes"])
        labels, as_count = tuple(str(i + 1) for i in range(nodes)), True
    elif isinstance(nodes, list):
        for i, lab in enumerate(nodes):
            if isinstance(lab, bool) or not isinstance(lab, (str, int)):
                fail(f"node label {lab!r} must be a string", ["nodes", i])
        labels, as_count = tuple(str(lab) for lab in nodes), False
        if len(set(labels)) != len(labels):
            fail("node labels must be unique", ["nodes"])
    else:
        fail("'nodes' must be a count or a list of labels", ["nodes"])
    known = set(labels)

    raw_edges = raw.get("edges", [])
    if not isinstance(raw_edges, list):
        fail("'edges' must be a list", ["edges"])
    edges = []
    for j, rec in enumerate(raw_edges):
        here = ["edges", j]
        if not isinstance(rec, dict):
            fail("edge record must be an object", here)
        extra = sorted(set(rec) - {"id", "tail", "head", "weight"})
        if extra:
            fail(f"unknown edge keys {extra}", here + [extra[0]])
        eid = str(rec.get("id", f"e{j + 1}"))
        tail_raw = rec.get("tail")
        if not isinstance(tail_raw, list) or not tail_raw:
            fail("tail must be a nonempty list", here + ["tail"])
        tail = []
        for t, entry in enumerate(tail_raw):
            if isinstance(entry, list):
                if len(entry) != 2:
                    fail("tail entry must be [label, multiplicity]", here + ["tail", t])
                lab, mult = entry
            else:
                lab, mult = entry, 1
            lab = str(lab)
            if lab not in known:
                fail(f"unknown node {lab!r} in tail", here + ["tail", t])
            if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
                fail(f"multiplicity must be a positive integer, got {mult!r}", here + ["tail", t])
            tail.append((lab, mult))
        head_raw = rec.get("head")
        if not isinstance(head_raw, list) or not head_raw:
            fail("head must be a nonempty list", here + ["head"])
        head = []
        for h, lab in enumerate(head_raw):
            lab = str(lab)
            if lab not in known:
                fail(f"unknown node {lab!r} in head", here + ["head", h])
            head.append(lab)
        try:
            weight = as_fraction(rec.get("weight", 1))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            fail(f"bad weight {rec.get('weight')!r}: {exc}", here + ["weight"])
        edges.append(EdgeRecord(eid, tuple(tail), tuple(head), weight))

    matrices = None
    if "matrices" in raw:
        matrices = _parse_matrices(raw["matrices"], fail)
    coupling = None
    if "coupling" in raw:
        coupling = _parse_coupling(raw["coupling"], fail)

    doc = HypergraphDocument(labels, tuple(edges), as_count, matrices, coupling)
    try:
        doc.hypergraph()
    except HypergraphError as exc:
        msg = str(exc)
        bad = next((j for j, e in enumerate(edges) if repr(e.id) in msg), None)
        fail(msg, ["edges", bad] if bad is not None else ["edges"])
    return doc


def _parse_matrices(sec, fail) -> dict:
    base = ["matrices"]
    if not isinstance(sec, dict):
        fail("'matrices' must be an object", base)
    extra = sorted(set(sec) - MATRIX_KEYS)
    if extra:
        fail(f"unknown matrix keys {extra}", base + [extra[0]])
    if "K" not in sec or "H" not in sec:
        fail("matrices section needs both K and H", base)
    out = {}
    for name in ("K", "H", "J"):
        if name not in sec:
            continue
        rows = sec[name]
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            fail(f"{name} must be a list of rows", base + [name])
        if any(len(r) != len(rows) for r in rows):
            fail(f"{name} must be square", base + [name])
        parsed = []
        for i, r in enumerate(rows):
            row = []
            for j, x in enumerate(r):
                try:
                    row.append(as_fraction(x))
                except (ValueError, TypeError, ZeroDivisionError) as exc:
                    fail(f"bad entry {x!r}: {exc}", base + [name, i, j])
            parsed.append(tuple(row))
        out[name] = tuple(parsed)
    n = len(out["K"])
    for name in ("H", "J"):
        if name in out and len(out[name]) != n:
            fail(f"{name} must have the same size as K", base + [name])
    if "p" in sec:
        vec = sec["p"]
        if not isinstance(vec, list) or len(vec) != n:
            fail(f"p must be a list of {n} entries", base + ["p"])
        try:
            out["p"] = tuple(as_fraction(x) for x in vec)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            fail(f"bad entry in p: {exc}", base + ["p"])
    return out


def _parse_coupling(sec, fail) -> dict:
    base = ["coupling"]
    if not isinstance(sec, dict):
        fail("'coupling' must be an object", base)
    extra = sorted(set(sec) - {"family", "d", "f"})
    if extra:
        fail(f"unknown coupling keys {extra}", base + [extra[0]])
    family = sec.get("family", "product")
    if family not in COUPLING_FAMILIES:
        fail(f"coupling family must be one of {sorted(COUPLING_FAMILIES)}", base + ["family"])
    d = sec.get("d", 1)
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        fail("d must be a positive integer", base + ["d"])
    f = sec.get("f", "zero")
    if f not in INTERNAL_TAGS:
        fail(f"f must be one of {sorted(INTERNAL_TAGS)}", base + ["f"])
    return {"family": family, "d": d, "f": f}


def _num(x: Fraction) -> str:
    return str(x)


def _to_json(doc: HypergraphDocument) -> dict:
    out: dict = {"format": doc.format}
    out["nodes"] = len(doc.labels) if doc.nodes_as_count else list(doc.labels)
    out["edges"] = [
        {"id": e.id, "tail": [[lab, m] for lab, m in e.tail], "head": list(e.head), "weight": _num(e.weight)}
        for e in doc.edges
    ]
    if doc.matrices is not None:
        mats = {}
        for name in ("K", "H", "J"):
            if name in doc.matrices:
                mats[name] = [[_num(x) for x in row] for row in doc.matrices[name]]
        if "p" in doc.matrices:
            mats["p"] = [_num(x) for x in doc.matrices["p"]]
        out["matrices"] = mats
    if doc.coupling is not None:
        out["coupling"] = dict(doc.coupling)
    return out


def print_document(doc: HypergraphDocument) -> str:
    """Canonical text: two-space indent, one edge per line, rationals as strings."""
    data = _to_json(doc)
    lines = ["{", f'  "format": {json.dumps(data["format"])},', f'  "nodes": {json.dumps(data["nodes"])},']
    if data["edges"]:
        lines.append('  "edges": [')
        lines.append(",\n".join("    " + json.dumps(e) for e in data["edges"]))
        lines.append("  ]" + ("," if len(data) > 3 else ""))
    else:
        lines.append('  "edges": []' + ("," if len(data) > 3 else ""))
    tail_keys = [k for k in ("matrices", "coupling") if k in data]
    for i, key in enumerate(tail_keys):
        sep = "," if i < len(tail_keys) - 1 else ""
        if key == "matrices":
            lines.append('  "matrices": {')
            items = list(data["matrices"].items())
            for j, (name, val) in enumerate(items):
                comma = "," if j < len(items) - 1 else ""
                if name == "p":
                    lines.append(f'    "p": {json.dumps(val)}{comma}')
                else:
                    rows = ",\n".join("      " + json.dumps(r) for r in val)
                    lines.append(f'    "{name}": [\n{rows}\n    ]{comma}')
            lines.append("  }" + sep)
        else:
            lines.append(f'  "coupling": {json.dumps(data["coupling"])}{sep}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_document(path) -> HypergraphDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_hypergraph_file(fh.read())


def document_from_hypergraph(H: Hypergraph, matrices: Optional[dict] = None, coupling: Optional[dict] = None) -> HypergraphDocument:
    edges = tuple(
        EdgeRecord(e.id, tuple((H.labels[v], m) for v, m in e.tail), tuple(H.labels[i] for i in e.head), e.weight)
        for e in H.edges
    )
    return HypergraphDocument(H.labels, edges, False, matrices, coupling)
