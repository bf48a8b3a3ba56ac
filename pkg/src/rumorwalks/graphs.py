"""Immutable undirected graphs: validated construction, generator families,
and edge-list file I/O.

Vertex numbering is canonical per family so traces are comparable across
runs: distinguished vertices come first (star center, the two double-star
centers, tree roots in heap order, ring vertices), then the remaining
vertices in construction order.
"""
from __future__ import annotations

from collections import deque
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GenerationFailureError, InvalidParameterError, LoadError

__all__ = [
    "Graph",
    "generate_star",
    "generate_double_star",
    "generate_heavy_binary_tree",
    "generate_siamese_trees",
    "generate_cycle_stars_cliques",
    "generate_random_regular",
    "generate_clique_path",
    "generate_complete",
    "generate_cycle",
    "load_edge_list",
    "save_edge_list",
]


class Graph:
    """Undirected simple connected graph in compressed sparse row form.

    Instances are immutable after construction; the underlying arrays are
    marked read-only so a graph can be shared freely between trials.
    Use :meth:`from_edges` for validated construction.
    """

    __slots__ = ("n", "m", "family_tag", "indptr", "indices", "degrees",
                 "_cumdeg", "_adj")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray,
                 family_tag: str | None = None):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.degrees = np.diff(self.indptr)
        self.m = int(self.indices.shape[0] // 2)
        self.family_tag = family_tag
        self._cumdeg = None
        self._adj = None
        for arr in (self.indptr, self.indices, self.degrees):
            arr.setflags(write=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges, family_tag: str | None = None) -> "Graph":
        """Build a graph from an iterable of (u, v) pairs, enforcing all
        invariants: valid ids, no self-loops, no duplicate edges, connected.
        """
        n = int(n)
        if n < 1:
            raise InvalidParameterError(f"vertex count must be >= 1, got {n}")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise InvalidParameterError("edges must be pairs of vertex ids")
        m = e.shape[0]
        if m > 0:
            if e.min() < 0 or e.max() >= n:
                raise InvalidParameterError(
                    f"edge endpoint out of range for n={n}")
            if (e[:, 0] == e[:, 1]).any():
                raise InvalidParameterError("self-loops are not allowed")
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            keys = lo * n + hi
            if np.unique(keys).shape[0] != m:
                raise InvalidParameterError("duplicate edges are not allowed")
        if n > 1 and m == 0:
            raise InvalidParameterError("graph with n > 1 vertices has no edges")

        if m == 0:
            indptr = np.zeros(n + 1, dtype=np.int64)
            indices = np.zeros(0, dtype=np.int64)
        else:
            u2 = np.concatenate([e[:, 0], e[:, 1]])
            v2 = np.concatenate([e[:, 1], e[:, 0]])
            order = np.lexsort((v2, u2))
            indices = v2[order]
            counts = np.bincount(u2, minlength=n)
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])

        g = cls(n, indptr, indices, family_tag)
        if not g.is_connected():
            raise InvalidParameterError("graph is not connected")
        return g

    # -- accessors ---------------------------------------------------------

    def degree(self, u: int) -> int:
        return int(self.degrees[u])

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor ids of u (read-only view)."""
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    @property
    def adjacency(self) -> tuple:
        """Per-vertex sorted neighbor tuples (materialized lazily)."""
        if self._adj is None:
            self._adj = tuple(tuple(int(v) for v in self.neighbors(u))
                              for u in range(self.n))
        return self._adj

    @property
    def cumulative_degrees(self) -> np.ndarray:
        """cumsum(degrees); used for exact stationary sampling."""
        if self._cumdeg is None:
            cd = np.cumsum(self.degrees)
            cd.setflags(write=False)
            self._cumdeg = cd
        return self._cumdeg

    def edges(self) -> np.ndarray:
        """Canonical (m, 2) edge array with u < v, sorted lexicographically."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    @property
    def is_regular(self) -> bool:
        return self.n == 1 or bool((self.degrees == self.degrees[0]).all())

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        if self.m == 0:
            return False
        csg = csr_matrix((np.ones(self.indices.shape[0], dtype=np.int8),
                          self.indices, self.indptr), shape=(self.n, self.n))
        ncomp = connected_components(csg, directed=False, return_labels=False)
        return int(ncomp) == 1

    def is_bipartite(self) -> bool:
        color = np.full(self.n, -1, dtype=np.int8)
        color[0] = 0
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.neighbors(u):
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    queue.append(int(v))
                elif color[v] == color[u]:
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.m, self.indices.tobytes()))

    def __repr__(self):
        tag = f", family={self.family_tag!r}" if self.family_tag else ""
        return f"Graph(n={self.n}, m={self.m}{tag})"


# -- deterministic families -------------------------------------------------

def generate_star(leaves: int) -> Graph:
    """Star: center is vertex 0, leaves are 1..leaves."""
    if leaves < 1:
        raise InvalidParameterError(f"star needs >= 1 leaf, got {leaves}")
    edges = [(0, i) for i in range(1, leaves + 1)]
    return Graph.from_edges(leaves + 1, edges, f"star(leaves={leaves})")


def generate_double_star(n: int) -> Graph:
    """Two adjacent centers (vertices 0 and 1), each with n/2 - 1 leaves.

    n must be even and >= 4; the graph has exactly n vertices.
    """
    if n < 4 or n % 2 != 0:
        raise InvalidParameterError(
            f"double star needs even vertex count >= 4, got {n}")
    half = n // 2
    edges = [(0, 1)]
    edges += [(0, i) for i in range(2, half + 1)]
    edges += [(1, i) for i in range(half + 1, n)]
    return Graph.from_edges(n, edges, f"double-star(n={n})")


def _heavy_tree_edges(n: int, vmap) -> list:
    """Complete binary tree in heap order plus a clique on its leaves.

    ``vmap`` maps a heap index (0 = root) to a final vertex id, which lets
    the same construction serve both the standalone tree and the two halves
    of the glued variant.
    """
    edges = [(vmap((i - 1) // 2), vmap(i)) for i in range(1, n)]
    first_leaf = (n - 1) // 2
    leaves = np.array([vmap(i) for i in range(first_leaf, n)], dtype=np.int64)
    a, b = np.triu_indices(leaves.shape[0], k=1)
    edges += list(zip(leaves[a].tolist(), leaves[b].tolist()))
    return edges


def _check_complete_tree_size(n: int, what: str) -> None:
    if n < 3 or (n + 1) & n != 0:
        raise InvalidParameterError(
            f"{what} needs n = 2^h - 1 with h >= 2, got {n}")


def generate_heavy_binary_tree(n: int) -> Graph:
    """Complete binary tree on n = 2^h - 1 vertices whose (n+1)/2 leaves are
    additionally joined into a clique.  Root is vertex 0, heap numbering.
    """
    _check_complete_tree_size(n, "heavy binary tree")
    edges = _heavy_tree_edges(n, lambda i: i)
    return Graph.from_edges(n, edges, f"heavy-tree(n={n})")


def generate_siamese_trees(n: int) -> Graph:
    """Two heavy binary trees on n vertices each sharing their root.

    The shared root is vertex 0 (degree 4); the first tree occupies
    vertices 1..n-1 and the second n..2n-2, both in heap order.  Total
    vertex count is 2n - 1.
    """
    _check_complete_tree_size(n, "siamese trees")
    edges = _heavy_tree_edges(n, lambda i: i)
    edges += _heavy_tree_edges(n, lambda i: 0 if i == 0 else (n - 1) + i)
    return Graph.from_edges(2 * n - 1, edges, f"siamese(n={n})")


def generate_cycle_stars_cliques(m: int) -> Graph:
    """Ring of m stars whose leaves each anchor an (m+1)-clique.

    Vertices, in canonical order: ring vertices c_0..c_{m-1}; then m leaves
    per ring vertex; then m clique vertices per leaf.  Each leaf l is joined
    to its ring vertex and to its own m clique vertices, and {l} plus those
    m vertices form a complete graph.  Total vertex count: m + m^2 + m^3.
    """
    if m < 3:
        raise InvalidParameterError(f"ring length must be >= 3, got {m}")
    edges = [(i, (i + 1) % m) for i in range(m)]
    leaf0 = m
    cliq0 = m + m * m
    for i in range(m):
        for j in range(m):
            leaf = leaf0 + i * m + j
            edges.append((i, leaf))
            block = [leaf] + [cliq0 + (i * m + j) * m + k for k in range(m)]
            for a in range(len(block)):
                for b in range(a + 1, len(block)):
                    edges.append((block[a], block[b]))
    nverts = m + m * m + m ** 3
    return Graph.from_edges(nverts, edges, f"cycle-stars-cliques(m={m})")


def generate_complete(n: int) -> Graph:
    if n < 2:
        raise InvalidParameterError(f"complete graph needs n >= 2, got {n}")
    a, b = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.column_stack([a, b]), f"complete(n={n})")


def generate_cycle(n: int) -> Graph:
    if n < 3:
        raise InvalidParameterError(f"cycle needs n >= 3, got {n}")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Graph.from_edges(n, edges, f"cycle(n={n})")


def generate_clique_path(k: int, d: int) -> Graph:
    """Path of k cliques of d vertices each; consecutive cliques are joined
    by a single bridge edge from the last vertex of one to the first vertex
    of the next.
    """
    if k < 1 or d < 2:
        raise InvalidParameterError(
            f"clique path needs k >= 1 cliques of d >= 2 vertices, got k={k} d={d}")
    edges = []
    for i in range(k):
        base = i * d
        a, b = np.triu_indices(d, k=1)
        edges += list(zip((base + a).tolist(), (base + b).tolist()))
        if i + 1 < k:
            edges.append((base + d - 1, base + d))
    return Graph.from_edges(k * d, edges, f"clique-path(k={k},d={d})")


# -- random regular graphs ---------------------------------------------------

def _suitable(stubs: np.ndarray, edge_keys: set, n: int) -> bool:
    """True if the leftover stub multiset can still be paired into new,
    non-loop edges.  Mirrors the standard stub-matching feasibility test.
    """
    if stubs.size == 0:
        return True
    vals, counts = np.unique(stubs, return_counts=True)
    vals = vals.tolist()
    for i, u in enumerate(vals):
        for v in vals[i + 1:]:
            if u * n + v not in edge_keys:
                return True
    return False


def _pairing_attempt(n: int, d: int, gen: np.random.Generator):
    """One stub-matching pass: repeatedly shuffle unmatched stubs, keep the
    pairings that form new simple edges, and re-queue the rest.  Returns the
    edge array, or None when no valid completion exists for this pass.
    """
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    edge_keys: set = set()
    parts = []
    while stubs.size:
        gen.shuffle(stubs)
        a = stubs[0::2]
        b = stubs[1::2]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keys = lo * n + hi
        ok = lo != hi
        first = np.zeros(keys.shape[0], dtype=bool)
        first[np.unique(keys, return_index=True)[1]] = True
        fresh = np.fromiter((k not in edge_keys for k in keys.tolist()),
                            dtype=bool, count=keys.shape[0])
        good = ok & first & fresh
        if good.any():
            parts.append(np.column_stack([lo[good], hi[good]]))
            edge_keys.update(keys[good].tolist())
            stubs = np.concatenate([a[~good], b[~good]])
        else:
            if not _suitable(stubs, edge_keys, n):
                return None
    return np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)


def generate_random_regular(n: int, d: int, seed: int,
                            max_restarts: int = 1000) -> Graph:
    """Random d-regular simple graph via stub matching.

    Self-loops and duplicate pairings are rejected at the stub level and the
    affected stubs re-shuffled; a pass that cannot complete, or that yields a
    disconnected graph, triggers a full restart.  Raises
    GenerationFailureError after ``max_restarts`` restarts.
    """
    if n < 2:
        raise InvalidParameterError(f"regular graph needs n >= 2, got {n}")
    if d < 1 or d >= n:
        raise InvalidParameterError(f"degree must satisfy 1 <= d < n, got d={d}")
    if (n * d) % 2 != 0:
        raise InvalidParameterError(f"n*d must be even, got n={n} d={d}")
    gen = np.random.Generator(np.random.PCG64(seed))
    tag = f"regular(n={n},d={d})"
    for _ in range(max_restarts):
        e = _pairing_attempt(n, d, gen)
        if e is None:
            continue
        try:
            return Graph.from_edges(n, e, tag)
        except InvalidParameterError:
            continue  # disconnected: restart from scratch
    raise GenerationFailureError(
        f"no connected {d}-regular graph on {n} vertices after "
        f"{max_restarts} restarts")


# -- edge-list file I/O -------------------------------------------------------

def save_edge_list(graph: Graph, path) -> None:
    """Write ``n m`` header then one ``u v`` line per edge (u < v, sorted)."""
    lines = [f"{graph.n} {graph.m}"]
    lines += [f"{u} {v}" for u, v in graph.edges().tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_edge_list(path) -> Graph:
    """Parse and validate an edge-list file written by :func:`save_edge_list`.

    Raises LoadError with a line reference on any malformed content or
    graph-invariant violation.
    """
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise LoadError(f"{path}: empty file")

    def ints(line: str, lineno: int, what: str) -> list:
        parts = line.split()
        if len(parts) != 2:
            raise LoadError(f"{path}:{lineno}: expected two integers ({what})")
        try:
            return [int(p) for p in parts]
        except ValueError as exc:
            raise LoadError(f"{path}:{lineno}: non-integer field") from exc

    n, m = ints(lines[0], 1, "header 'n m'")
    if n < 1 or m < 0:
        raise LoadError(f"{path}:1: invalid header n={n} m={m}")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise LoadError(
            f"{path}: header declares {m} edges but file has {len(body)}")
    edges = []
    for i, ln in enumerate(body, start=2):
        u, v = ints(ln, i, "edge 'u v'")
        if not (0 <= u < n and 0 <= v < n):
            raise LoadError(f"{path}:{i}: endpoint out of range for n={n}")
        if u >= v:
            raise LoadError(f"{path}:{i}: edges must satisfy u < v")
        edges.append((u, v))
    try:
        return Graph.from_edges(n, edges)
    except InvalidParameterError as exc:
        raise LoadError(f"{path}: {exc}") from exc
