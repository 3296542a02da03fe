"""k-uniform hypergraph container, text interchange format, and generators.

Vertices are 0-based in memory; the text format (and everything the CLI
prints) is 1-based. Edge rows are kept in canonical form: indices sorted
ascending inside each row, rows sorted lexicographically, no duplicates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Hypergraph",
    "HypergraphFormatError",
    "DegreeProfile",
    "degrees",
    "is_connected",
    "parse_hypergraph",
    "write_hypergraph",
    "generate",
    "sunflower",
    "hypercycle",
    "squid",
    "s_path",
    "loose_path",
    "complete",
    "complete_minus",
]


class HypergraphFormatError(ValueError):
    """Raised when hypergraph text violates the interchange format."""


class Hypergraph:
    """Immutable k-uniform hypergraph with compact (m, k) edge storage."""

    def __init__(self, n: int, k: int, edges: np.ndarray):
        edges = np.asarray(edges, dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, k)
        if k < 3:
            raise ValueError(f"uniformity k must be >= 3, got {k}")
        if n < 1:
            raise ValueError(f"need at least one vertex, got n={n}")
        if edges.ndim != 2 or edges.shape[1] != k:
            raise ValueError(f"edge matrix must have shape (m, {k})")
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("vertex index out of range")
            if np.any(np.diff(edges, axis=1) <= 0):
                raise ValueError("edge rows must be strictly increasing")
            order = np.lexsort(edges.T[::-1])
            if np.any(order != np.arange(edges.shape[0])):
                raise ValueError("edge rows must be in lexicographic order")
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("duplicate edge")
        edges.setflags(write=False)
        self.n = n
        self.k = k
        self.edges = edges
        self._degree_profile: DegreeProfile | None = None

    @classmethod
    def from_edges(cls, n: int, k: int, rows) -> "Hypergraph":
        """Build from any iterable of edges, canonicalizing the row order."""
        rows = [tuple(int(v) for v in row) for row in rows]
        for row in rows:
            if len(row) != k:
                raise ValueError(f"edge {row} does not have {k} vertices")
            if len(set(row)) != k:
                raise ValueError(f"edge {row} repeats a vertex")
        mat = np.array(sorted(tuple(sorted(row)) for row in rows), dtype=np.int64)
        if not rows:
            mat = np.empty((0, k), dtype=np.int64)
        if len(rows) and len({tuple(sorted(r)) for r in rows}) != len(rows):
            raise ValueError("duplicate edge")
        return cls(n, k, mat)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and self.edges.shape == other.edges.shape
            and bool(np.all(self.edges == other.edges))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, k={self.k}, m={self.m})"


@dataclass(frozen=True)
class DegreeProfile:
    """Per-vertex degrees plus the incidence lists behind them."""

    degrees: np.ndarray
    min_degree: int
    max_degree: int
    incidence: tuple[tuple[int, ...], ...]


def degrees(H: Hypergraph) -> DegreeProfile:
    """Degree profile of H; cached on the (immutable) hypergraph."""
    if H._degree_profile is not None:
        return H._degree_profile
    deg = np.bincount(H.edges.ravel(), minlength=H.n).astype(np.int64)
    inc: list[list[int]] = [[] for _ in range(H.n)]
    for eid, row in enumerate(H.edges):
        for v in row:
            inc[int(v)].append(eid)
    prof = DegreeProfile(
        degrees=deg,
        min_degree=int(deg.min()),
        max_degree=int(deg.max()),
        incidence=tuple(tuple(lst) for lst in inc),
    )
    deg.setflags(write=False)
    H._degree_profile = prof
    return prof


def is_connected(H: Hypergraph) -> bool:
    """True iff every pair of vertices is joined by a walk of edges.

    Isolated vertices disconnect the hypergraph; a single-vertex hypergraph
    is trivially connected.
    """
    parent = np.arange(H.n)

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for row in H.edges:
        r0 = find(int(row[0]))
        for v in row[1:]:
            r = find(int(v))
            if r != r0:
                parent[r] = r0
    return len({find(v) for v in range(H.n)}) == 1


# ---------------------------------------------------------------------------
# text interchange format
# ---------------------------------------------------------------------------

def parse_hypergraph(data: str | bytes) -> Hypergraph:
    """Parse the text format: header ``k n m``, then m rows of k indices.

    Vertex indices in the file are 1-based. Lines starting with ``#`` are
    comments; tokens may be separated by any whitespace.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise HypergraphFormatError(f"not an ASCII file: {exc}") from None
    tokens: list[str] = []
    for line in data.splitlines():
        if line.lstrip().startswith("#"):
            continue
        tokens.extend(line.split())
    if len(tokens) < 3:
        raise HypergraphFormatError("missing 'k n m' header")
    try:
        k, n, m = (int(t) for t in tokens[:3])
    except ValueError:
        raise HypergraphFormatError(f"malformed header {tokens[:3]!r}") from None
    if k < 3:
        raise HypergraphFormatError(f"uniformity k must be >= 3, got {k}")
    if n < 1 or m < 0:
        raise HypergraphFormatError(f"bad sizes n={n}, m={m}")
    body = tokens[3:]
    if len(body) != m * k:
        raise HypergraphFormatError(
            f"expected {m * k} vertex tokens for m={m} edges, found {len(body)}"
        )
    try:
        flat = [int(t) for t in body]
    except ValueError:
        raise HypergraphFormatError("non-integer vertex token") from None
    rows = []
    for i in range(m):
        row = flat[i * k : (i + 1) * k]
        if any(v < 1 or v > n for v in row):
            raise HypergraphFormatError(f"vertex index out of range in edge {row}")
        if len(set(row)) != k:
            raise HypergraphFormatError(f"edge {row} repeats a vertex")
        rows.append(tuple(sorted(v - 1 for v in row)))
    if len(set(rows)) != len(rows):
        raise HypergraphFormatError("duplicate edge")
    try:
        return Hypergraph.from_edges(n, k, rows)
    except ValueError as exc:
        raise HypergraphFormatError(str(exc)) from None


def write_hypergraph(H: Hypergraph) -> str:
    """Serialize to the text format (1-based, canonical row order, LF)."""
    lines = [f"{H.k} {H.n} {H.m}"]
    for row in H.edges:
        lines.append(" ".join(str(int(v) + 1) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# structured generators
# ---------------------------------------------------------------------------

def sunflower(k: int, d: int) -> Hypergraph:
    """d petals of k-1 fresh vertices each, all through the single center 0."""
    if d < 1:
        raise ValueError(f"sunflower needs d >= 1 petals, got {d}")
    rows = [
        (0, *range(1 + i * (k - 1), 1 + (i + 1) * (k - 1))) for i in range(d)
    ]
    return Hypergraph.from_edges(1 + d * (k - 1), k, rows)


def hypercycle(k: int, s: int) -> Hypergraph:
    """Cycle of s edges, consecutive edges sharing exactly one vertex.

    Shared vertices are 0..s-1; edge i also gets k-2 private vertices. With
    s = 2 the two intersection vertices would coincide, so s >= 3.
    """
    if s < 3:
        raise ValueError(f"hypercycle needs s >= 3 edges, got {s}")
    rows = []
    for i in range(s):
        priv = range(s + i * (k - 2), s + (i + 1) * (k - 2))
        rows.append((i, (i + 1) % s, *priv))
    return Hypergraph.from_edges(s * (k - 1), k, rows)


def squid(k: int) -> Hypergraph:
    """k-1 disjoint legs of size k joined by one body edge through their heads."""
    rows = [tuple(range(j * k, (j + 1) * k)) for j in range(k - 1)]
    body = tuple(j * k for j in range(k - 1)) + ((k - 1) * k,)
    rows.append(body)
    return Hypergraph.from_edges(k * (k - 1) + 1, k, rows)


def s_path(k: int, s: int, l: int) -> Hypergraph:
    """Path of l edges, consecutive edges overlapping in exactly s vertices."""
    if not 1 <= s < k:
        raise ValueError(f"s-path needs 1 <= s < k, got s={s}, k={k}")
    if l < 1:
        raise ValueError(f"s-path needs l >= 1 edges, got {l}")
    rows = [tuple(range(i * (k - s), i * (k - s) + k)) for i in range(l)]
    return Hypergraph.from_edges(s + l * (k - s), k, rows)


def loose_path(k: int, l: int) -> Hypergraph:
    """Path whose consecutive edges share a single vertex (s = 1)."""
    return s_path(k, 1, l)


def complete(n: int, k: int) -> Hypergraph:
    """All C(n, k) edges."""
    if n < k:
        raise ValueError(f"complete hypergraph needs n >= k, got n={n}, k={k}")
    rows = list(itertools.combinations(range(n), k))
    return Hypergraph.from_edges(n, k, rows)


def complete_minus(n: int, k: int) -> Hypergraph:
    """Complete hypergraph with the single edge {0, ..., k-1} deleted."""
    if n < k:
        raise ValueError(f"complete hypergraph needs n >= k, got n={n}, k={k}")
    first = tuple(range(k))
    rows = [e for e in itertools.combinations(range(n), k) if e != first]
    return Hypergraph.from_edges(n, k, rows)


_GENERATORS = {
    "sunflower": lambda k, p: sunflower(k, p["d"]),
    "hypercycle": lambda k, p: hypercycle(k, p["s"]),
    "squid": lambda k, p: squid(k),
    "s_path": lambda k, p: s_path(k, p["s"], p["l"]),
    "loose_path": lambda k, p: loose_path(k, p["l"]),
    "complete": lambda k, p: complete(p["n"], k),
    "complete_minus": lambda k, p: complete_minus(p["n"], k),
}


def generate(kind: str, k: int, **params) -> Hypergraph:
    """Dispatch to a structured generator by kind name.

    Kinds and their parameters: sunflower(d), hypercycle(s), squid,
    s_path(s, l), loose_path(l), complete(n), complete_minus(n).
    """
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown hypergraph kind {kind!r}") from None
    try:
        return gen(k, params)
    except KeyError as exc:
        raise ValueError(f"kind {kind!r} needs parameter {exc.args[0]!r}") from None
