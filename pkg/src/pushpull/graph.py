"""Graph ingestion and the CSR form every other module consumes.

Loaders produce a :class:`RawEdges` staging record; :func:`build_graph`
normalizes it (self-loop removal, symmetrization, duplicate collapse) into an
immutable :class:`CsrGraph` whose adjacency lists are sorted ascending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path

import numpy as np


class GraphFormatError(ValueError):
    """A graph file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphBoundsError(GraphFormatError):
    """An entry references a vertex outside the declared dimensions."""


@dataclass
class RawEdges:
    num_vertices_hint: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    # set by the MatrixMarket loader for `symmetric` headers; build_graph mirrors entries
    symmetric: bool = False

    def __post_init__(self):
        self.src = np.asarray(self.src, dtype=np.int64)
        self.dst = np.asarray(self.dst, dtype=np.int64)
        self.weight = np.asarray(self.weight, dtype=np.float64)
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise ValueError("src, dst and weight must have equal length")
        if len(self.src) and (self.src.min() < 0 or self.dst.min() < 0):
            raise ValueError("vertex ids must be non-negative")
        if len(self.weight) and not (np.all(np.isfinite(self.weight)) and self.weight.min() >= 0):
            raise ValueError("edge weights must be finite and non-negative")
        if self.num_vertices_hint < 0:
            raise ValueError("num_vertices_hint must be non-negative")

    @classmethod
    def from_pairs(cls, edges, num_vertices_hint: int | None = None) -> "RawEdges":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples."""
        src, dst, w = [], [], []
        for e in edges:
            src.append(int(e[0]))
            dst.append(int(e[1]))
            w.append(float(e[2]) if len(e) > 2 else 1.0)
        if num_vertices_hint is None:
            num_vertices_hint = 1 + max(max(src, default=-1), max(dst, default=-1))
        return cls(num_vertices_hint, np.array(src), np.array(dst), np.array(w))

    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(u), int(v), float(w)) for u, v, w in zip(self.src, self.dst, self.weight)]

    def __len__(self):
        return len(self.src)


@dataclass(frozen=True, eq=False)
class CsrGraph:
    """Directed, symmetric graph in CSR form.

    Because the graph is symmetric the in-adjacency equals the out-adjacency;
    the ``in_*`` attributes are views of the same arrays.
    """

    num_vertices: int
    out_offsets: np.ndarray
    out_targets: np.ndarray
    out_weights: np.ndarray
    name: str = field(default="", compare=False)

    @property
    def num_edges(self) -> int:
        return int(self.out_offsets[-1])

    @property
    def in_offsets(self) -> np.ndarray:
        return self.out_offsets

    @property
    def in_sources(self) -> np.ndarray:
        return self.out_targets

    @property
    def in_weights(self) -> np.ndarray:
        return self.out_weights

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_offsets)

    def in_degrees(self) -> np.ndarray:
        # counted from the target side so symmetry is actually checked, not assumed
        return np.bincount(self.out_targets, minlength=self.num_vertices)

    def edge_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.out_degrees())

    def neighbors(self, v: int) -> np.ndarray:
        return self.out_targets[self.out_offsets[v]:self.out_offsets[v + 1]]

    def __eq__(self, other):
        if not isinstance(other, CsrGraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and np.array_equal(self.out_offsets, other.out_offsets)
            and np.array_equal(self.out_targets, other.out_targets)
            and np.array_equal(self.out_weights, other.out_weights)
        )

    __hash__ = None


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    avg_degree: float
    stddev_degree: float


def _open_text(path):
    try:
        return open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot open {path}: {exc.strerror}") from exc


def load_matrix_market(path: str | PathLike) -> RawEdges:
    """Read a MatrixMarket coordinate file; 1-based ids become 0-based."""
    with _open_text(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise GraphFormatError("empty file", line=1)

    header = lines[0].split()
    if len(header) < 5 or header[0].lower() != "%%matrixmarket":
        raise GraphFormatError("expected '%%MatrixMarket matrix coordinate <field> <symmetry>'", line=1)
    obj, fmt, fld, sym = (h.lower() for h in header[1:5])
    if obj != "matrix" or fmt != "coordinate":
        raise GraphFormatError(f"unsupported MatrixMarket layout '{obj} {fmt}'", line=1)
    if fld not in ("pattern", "real", "integer"):
        raise GraphFormatError(f"unsupported field type '{fld}'", line=1)
    if sym not in ("general", "symmetric"):
        raise GraphFormatError(f"unsupported symmetry '{sym}'", line=1)

    i = 1
    while i < len(lines) and (not lines[i].strip() or lines[i].lstrip().startswith("%")):
        i += 1
    if i == len(lines):
        raise GraphFormatError("missing size line", line=i + 1)
    size = lines[i].split()
    try:
        rows, cols, nnz = (int(x) for x in size[:3])
        if len(size) != 3:
            raise ValueError
    except ValueError:
        raise GraphFormatError(f"malformed size line {lines[i].strip()!r}", line=i + 1) from None

    n = max(rows, cols)
    src = np.empty(nnz, dtype=np.int64)
    dst = np.empty(nnz, dtype=np.int64)
    w = np.ones(nnz, dtype=np.float64)
    want = 2 if fld == "pattern" else 3
    k = 0
    for lineno in range(i + 2, len(lines) + 1):
        text = lines[lineno - 1]
        if not text.strip() or text.lstrip().startswith("%"):
            continue
        tok = text.split()
        if len(tok) < want:
            raise GraphFormatError(f"expected {want} fields, got {len(tok)}", line=lineno)
        try:
            r, c = int(tok[0]), int(tok[1])
            val = abs(float(tok[2])) if want == 3 else 1.0
        except ValueError:
            raise GraphFormatError(f"non-numeric entry {text.strip()!r}", line=lineno) from None
        if not (1 <= r <= rows and 1 <= c <= cols):
            raise GraphBoundsError(f"entry ({r},{c}) outside declared {rows}x{cols} matrix", line=lineno)
        if not math.isfinite(val):
            raise GraphFormatError(f"non-finite value {tok[2]!r}", line=lineno)
        if k >= nnz:
            raise GraphFormatError(f"more entries than the declared {nnz}", line=lineno)
        src[k], dst[k], w[k] = r - 1, c - 1, val
        k += 1
    if k != nnz:
        raise GraphFormatError(f"declared {nnz} entries, found {k}", line=len(lines))
    return RawEdges(n, src, dst, w, symmetric=(sym == "symmetric"))


def load_edge_list(path: str | PathLike) -> RawEdges:
    """Read ``u v [w]`` lines with 0-based ids; ``#`` starts a comment line."""
    src, dst, w = [], [], []
    with _open_text(path) as fh:
        for lineno, text in enumerate(fh, start=1):
            s = text.strip()
            if not s or s.startswith("#"):
                continue
            tok = s.split()
            if len(tok) not in (2, 3):
                raise GraphFormatError(f"expected 'u v [w]', got {s!r}", line=lineno)
            try:
                u, v = int(tok[0]), int(tok[1])
                wt = float(tok[2]) if len(tok) == 3 else 1.0
            except ValueError:
                raise GraphFormatError(f"non-numeric token in {s!r}", line=lineno) from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative vertex id in {s!r}", line=lineno)
            if not math.isfinite(wt) or wt < 0:
                raise GraphFormatError(f"weight must be finite and non-negative in {s!r}", line=lineno)
            src.append(u)
            dst.append(v)
            w.append(wt)
    hint = 1 + max(max(src, default=-1), max(dst, default=-1))
    return RawEdges(hint, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(w))


def load_graph(path: str | PathLike, fmt: str | None = None) -> CsrGraph:
    """Load and normalize a graph file; format inferred from the extension."""
    p = Path(path)
    if fmt is None:
        fmt = "mtx" if p.suffix.lower() == ".mtx" else "el"
    if fmt == "mtx":
        raw = load_matrix_market(p)
    elif fmt == "el":
        raw = load_edge_list(p)
    else:
        raise ValueError(f"unknown graph format {fmt!r} (expected 'mtx' or 'el')")
    g = build_graph(raw)
    object.__setattr__(g, "name", p.stem)
    return g


def build_graph(raw: RawEdges, symmetrize: bool = True, drop_self_loops: bool = True) -> CsrGraph:
    n = int(raw.num_vertices_hint)
    src, dst, w = raw.src, raw.dst, raw.weight
    if len(src):
        n = max(n, int(max(src.max(), dst.max())) + 1)
    if drop_self_loops:
        keep = src != dst
        src, dst, w = src[keep], dst[keep], w[keep]
    if symmetrize or raw.symmetric:
        src, dst, w = np.concatenate([src, dst]), np.concatenate([dst, src]), np.concatenate([w, w])

    # sort by (src, dst, weight) so the first of each duplicate run carries the minimum weight
    order = np.lexsort((w, dst, src))
    src, dst, w = src[order], dst[order], w[order]
    if len(src):
        first = np.ones(len(src), dtype=bool)
        first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        src, dst, w = src[first], dst[first], w[first]

    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return CsrGraph(n, offsets, dst.astype(np.int64), w.astype(np.float64))


def flatten(g: CsrGraph) -> RawEdges:
    """Re-export a graph as its directed edge list."""
    return RawEdges(g.num_vertices, g.edge_sources(), g.out_targets.copy(), g.out_weights.copy())


def export_edge_list(g: CsrGraph, path: str | PathLike) -> None:
    """Write the canonical ``u v w`` form, one line per directed edge."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in zip(g.edge_sources(), g.out_targets, g.out_weights):
            fh.write(f"{u} {v} {w:.17g}\n")


def degree_stats(g: CsrGraph) -> DegreeStats:
    if g.num_vertices == 0:
        raise ValueError("degree statistics are undefined for an empty graph")
    deg = g.out_degrees().astype(np.float64)
    return DegreeStats(int(deg.max()), float(deg.mean()), float(deg.std()))
