"""Independent ground truth for the solver's outputs.

Exhaustive simplex-grid minimization, stationary-point enumeration over QP
faces, closed-form connectivity values, the chain-quartic minimum behind
two-path connectivity, vertex-cut upper bounds, and brute-force edge
connectivity. The grid and enumeration routines share no moving parts with
the trust-region solver, so agreement between the two is meaningful.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ftr import FTRConfig, _minimize_on_sphere, project_sphere
from .hypergraph import Hypergraph, degrees, is_connected
from .subproblem import TRSubproblem
from .tensor import EdgeForm

__all__ = [
    "GridSpec",
    "grid_alpha_j",
    "qp_enum_oracle",
    "closed_form_alpha",
    "beta_two_path",
    "upper_bound_vertex_cut",
    "edge_connectivity_small",
]

_GRID_DIM_LIMIT = 12


@dataclass(frozen=True)
class GridSpec:
    depth: int
    refine_rounds: int = 3

    def __post_init__(self):
        if self.depth < 2:
            raise ValueError("depth must be at least 2")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be nonnegative")


def _batch_form_values(coeffs, edges, k, X):
    """Row-wise sum_i c_i X_i^k - k * sum_e prod(X[e])."""
    vals = X**k @ coeffs
    if edges.shape[0]:
        vals = vals - k * np.prod(X[:, edges], axis=2).sum(axis=1)
    return vals


def _scan_simplex(eval_batch, r, depth, chunk=200_000):
    """Minimum of eval_batch over the integer grid {t : depth*t composition}.

    Grid points are compositions of `depth` into r parts, produced from
    stars-and-bars combinations in blocks so memory stays flat.
    """
    best_v, best_t = np.inf, None
    bars = itertools.combinations(range(depth + r - 1), r - 1)
    while True:
        block = list(itertools.islice(bars, chunk))
        if not block:
            break
        B = np.asarray(block, dtype=np.int64).reshape(len(block), r - 1)
        ext = np.empty((B.shape[0], r + 1), dtype=np.int64)
        ext[:, 0] = -1
        ext[:, 1:r] = B
        ext[:, r] = depth + r - 1
        T = (np.diff(ext, axis=1) - 1) / depth
        vals = eval_batch(T)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_v, best_t = float(vals[i]), T[i].copy()
    return best_v, best_t


def _pattern_refine(eval_batch, t0, v0, step, rounds):
    """Greedy pattern search over sum-preserving pair moves t_i += h, t_j -= h,
    shrinking h fourfold each round. Keeps every iterate on the simplex."""
    t, v = t0.copy(), v0
    h = step
    r = t.size
    for _ in range(rounds):
        for _ in range(60):
            cands = []
            for i in range(r):
                for j in range(r):
                    if i == j or t[j] < h - 1e-15:
                        continue
                    c = t.copy()
                    c[i] += h
                    c[j] -= h
                    cands.append(c)
            if not cands:
                break
            T = np.vstack(cands)
            vals = eval_batch(T)
            b = int(np.argmin(vals))
            if vals[b] < v - 1e-15:
                v, t = float(vals[b]), T[b]
            else:
                break
        h /= 4.0
    return v, t


def grid_alpha_j(H: Hypergraph, j: int, spec: GridSpec) -> float:
    """Upper bound on the pinned minimum by exhaustive simplex search.

    The substitution t = x^[k] turns the feasible set into the unit simplex
    over the unpinned coordinates; the grid enumerates it at resolution
    1/depth and a local pattern search sharpens the incumbent. Converges to
    the true minimum as depth grows.
    """
    r = H.n - 1
    if r > _GRID_DIM_LIMIT:
        raise ValueError(
            "pinned dimension too large for the exhaustive grid; use the multistart solver"
        )
    keep = [v for v in range(H.n) if v != j]
    remap = {v: i for i, v in enumerate(keep)}
    coeffs = degrees(H).degrees[keep].astype(float)
    rows = [[remap[v] for v in e] for e in H.edges.tolist() if j not in e]
    edges = np.asarray(rows, dtype=np.int64).reshape(-1, H.k)
    k = H.k

    def eval_batch(T):
        return _batch_form_values(coeffs, edges, k, T ** (1.0 / k))

    best_v, best_t = _scan_simplex(eval_batch, r, spec.depth)
    best_v, _ = _pattern_refine(eval_batch, best_t, best_v, 1.0 / spec.depth, spec.refine_rounds)
    return float(best_v)


def qp_enum_oracle(sub: TRSubproblem) -> tuple[float, np.ndarray]:
    """Global minimum of the trust-region QP by face enumeration.

    Every bound-activity pattern (at-lower / at-upper / free per coordinate)
    is visited; on each face the stationarity system with the equality
    multiplier is solved directly. A global minimizer is interior to and
    stationary on the face of its own active set, so it is found; patterns
    with one free coordinate double as the polytope's vertices. Singular or
    inconsistent faces are skipped because their minima live on sub-faces,
    which are enumerated too.
    """
    r = sub.g.size
    if r > 6:
        raise ValueError("enumeration oracle is limited to dimension 6")
    g, a, lo, hi = sub.g, sub.a, sub.lo, sub.hi
    Wd = sub.W.to_dense()
    na = float(np.linalg.norm(a))

    def model(d):
        return float(g @ d + 0.5 * (d @ (Wd @ d)))

    best_v, best_d = 0.0, np.zeros(r)  # the origin is always feasible
    box_tol = 1e-9 * (1.0 + float(np.linalg.norm(sub.hi, np.inf)))
    for pattern in itertools.product((0, 1, 2), repeat=r):
        d = np.zeros(r)
        free = []
        for i, p in enumerate(pattern):
            if p == 0:
                d[i] = lo[i]
            elif p == 1:
                d[i] = hi[i]
            else:
                free.append(i)
        free = np.asarray(free, dtype=np.int64)
        fixed = np.asarray([i for i in range(r) if pattern[i] != 2], dtype=np.int64)
        if free.size == 0:
            if abs(float(a @ d)) <= 1e-10 * max(1.0, na * float(np.linalg.norm(d))):
                v = model(d)
                if v < best_v:
                    best_v, best_d = v, d.copy()
            continue
        aF = a[free]
        b = d[fixed]
        rhs1 = -(g[free] + (Wd[np.ix_(free, fixed)] @ b if fixed.size else 0.0))
        if float(np.linalg.norm(aF, np.inf)) <= 1e-13:
            # the equality never sees this face; it must hold on the fixed part
            if abs(float(a[fixed] @ b) if fixed.size else 0.0) > 1e-10 * max(1.0, na):
                continue
            M = Wd[np.ix_(free, free)]
            rhs = rhs1
        else:
            nf = free.size
            M = np.zeros((nf + 1, nf + 1))
            M[:nf, :nf] = Wd[np.ix_(free, free)]
            M[:nf, nf] = -aF
            M[nf, :nf] = aF
            rhs = np.append(rhs1, -(float(a[fixed] @ b) if fixed.size else 0.0))
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
        if not np.all(np.isfinite(sol)):
            continue
        if float(np.linalg.norm(M @ sol - rhs, np.inf)) > 1e-7 * (
            1.0 + float(np.linalg.norm(rhs, np.inf))
        ):
            continue
        dF = sol[: free.size]
        if np.any(dF < lo[free] - box_tol) or np.any(dF > hi[free] + box_tol):
            continue
        d[free] = dF
        v = model(d)
        if v < best_v:
            best_v, best_d = v, d.copy()
    return best_v, best_d


def closed_form_alpha(kind: str, n: int, k: int) -> float | None:
    """Known exact connectivity values; None when the class has no formula."""
    if kind == "complete":
        return float(math.comb(n - 2, k - 2))
    if kind == "single_edge":
        return 1.0
    return None


def _comb0(a: int, b: int) -> int:
    return math.comb(a, b) if 0 <= b <= a else 0


def upper_bound_vertex_cut(n: int, k: int, v: int) -> float:
    """Connectivity upper bound from a size-v vertex cut in the complete
    k-graph frame: C(n-2,k-2) - [C(n-v-1,k-1) - C(floor((n-v)/2)-1,k-1)]*(k-1)/(n-1)."""
    if not 1 <= v <= n - k:
        raise ValueError("cut size must satisfy 1 <= v <= n - k")
    bracket = _comb0(n - v - 1, k - 1) - _comb0((n - v) // 2 - 1, k - 1)
    return _comb0(n - 2, k - 2) - bracket * (k - 1) / (n - 1)


def beta_two_path(l: int, cfg: FTRConfig | None = None) -> float:
    """Minimum of sum_{i<=l-2} y_i^4 - 4 * (chain of overlapping quadruple
    products) over the nonnegative quartic sphere in l variables.

    Restricting to y >= 0 loses nothing: each product term enters with a
    negative coefficient and prod|y| >= prod y with the quartic terms
    unchanged, so |y*| does at least as well as any sign pattern. Minimized
    with the trust-region machinery from seeded restarts; small l gets a
    pattern-search polish on the t = y^[4] simplex.
    """
    if l < 4 or l % 2 or l > 40:
        raise ValueError("l must be an even integer in [4, 40]")
    cfg = cfg if cfg is not None else FTRConfig()
    m = (l - 2) // 2
    edges = np.asarray(
        [[2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3] for i in range(m)], dtype=np.int64
    )
    coeffs = np.ones(l)
    coeffs[-2:] = 0.0
    form = EdgeForm(l, 4, edges, coeffs)
    keep = np.ones(l, dtype=bool)
    best = np.inf
    best_y = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, 9000001, l, r])
        y0 = np.abs(rng.standard_normal(l))
        while not np.any(y0 > 0.0):
            y0 = np.abs(rng.standard_normal(l))
        lam, y, _iters, _status, _fo, _rec = _minimize_on_sphere(
            form, keep, project_sphere(y0, 4), cfg
        )
        if lam < best:
            best, best_y = float(lam), y
    if l <= 10 and best_y is not None:

        def eval_batch(T):
            return _batch_form_values(coeffs, edges, 4, T**0.25)

        t = best_y**4
        t /= t.sum()
        v0 = float(eval_batch(t[None, :])[0])
        v, _ = _pattern_refine(eval_batch, t, v0, 1e-3, 6)
        best = min(best, float(v))
    return best


def _connected_rows(n: int, rows: np.ndarray) -> bool:
    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in rows:
        r0 = find(int(e[0]))
        for v in e[1:]:
            rv = find(int(v))
            if rv != r0:
                parent[rv] = r0
    return len({find(v) for v in range(n)}) == 1


def edge_connectivity_small(H: Hypergraph) -> int:
    """Minimum number of edges whose removal disconnects the graph, by
    subset enumeration in increasing cardinality. Disconnected input: 0."""
    if H.m > 20:
        raise ValueError("edge-cut enumeration is limited to 20 edges")
    if not is_connected(H):
        return 0
    for size in range(1, H.m + 1):
        for cut in itertools.combinations(range(H.m), size):
            mask = np.ones(H.m, dtype=bool)
            mask[list(cut)] = False
            if not _connected_rows(H.n, H.edges[mask]):
                return size
    raise AssertionError("removing all edges must disconnect")  # n >= k >= 3
