"""Laplacian-tensor contractions streamed over the compact edge matrix.

Nothing here materializes an order-k tensor. Per-edge leave-one-out
products come from one forward and one backward cumulative-product pass,
so coordinates that are exactly zero never force a division.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .hypergraph import Hypergraph, degrees

__all__ = [
    "PinnedPoint",
    "SparseSymMatrix",
    "EdgeForm",
    "lap_value",
    "lap_grad",
    "lap_hess",
    "lagrangian_parts",
]


@dataclass(frozen=True)
class PinnedPoint:
    """Nonnegative point with one coordinate held at exactly zero."""

    x: np.ndarray
    pinned: int

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        if x.ndim != 1:
            raise ValueError("x must be a vector")
        if not 0 <= self.pinned < x.size:
            raise ValueError("pinned index out of range")
        if x[self.pinned] != 0.0:
            raise ValueError("pinned coordinate must be exactly zero")
        if np.any(x < 0.0):
            raise ValueError("coordinates must be nonnegative")

    def feasibility_error(self, k: int) -> float:
        """|sum x_i^k - 1|."""
        return abs(float(np.sum(self.x**k)) - 1.0)


@dataclass(frozen=True)
class SparseSymMatrix:
    """Symmetric matrix stored as unique upper-triangle COO entries (i <= j)."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.int64))
        object.__setattr__(self, "cols", np.asarray(self.cols, dtype=np.int64))
        object.__setattr__(self, "vals", np.asarray(self.vals, dtype=float))
        if not (self.rows.shape == self.cols.shape == self.vals.shape):
            raise ValueError("rows/cols/vals must have equal length")
        if self.rows.size and np.any(self.rows > self.cols):
            raise ValueError("entries must satisfy i <= j")

    @property
    def nnz(self) -> int:
        return int(self.vals.size)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.bincount(self.rows, weights=self.vals * x[self.cols], minlength=self.n)
        off = self.rows != self.cols
        if np.any(off):
            y += np.bincount(
                self.cols[off], weights=self.vals[off] * x[self.rows[off]], minlength=self.n
            )
        return y

    def quad(self, x: np.ndarray) -> float:
        return float(np.asarray(x, dtype=float) @ self.matvec(x))

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        np.add.at(A, (self.rows, self.cols), self.vals)
        diag = np.diag(A).copy()
        A = A + A.T
        np.fill_diagonal(A, diag)
        return A

    def restrict(self, keep: np.ndarray) -> "SparseSymMatrix":
        """Principal submatrix on the True positions of boolean mask `keep`."""
        keep = np.asarray(keep, dtype=bool)
        newidx = np.cumsum(keep) - 1
        sel = keep[self.rows] & keep[self.cols]
        return SparseSymMatrix(
            n=int(keep.sum()),
            rows=newidx[self.rows[sel]],
            cols=newidx[self.cols[sel]],
            vals=self.vals[sel].copy(),
        )


class EdgeForm:
    """Evaluations of sum_i c_i x_i^k - k*sum_e prod(x_e) and its derivatives.

    With c = degree vector this is the Laplacian form L x^k. The coefficient
    vector is kept general so the synthetic chain objective used by the
    two-path beta oracle can reuse the same kernels.
    """

    def __init__(self, n: int, k: int, edges: np.ndarray, coeffs: np.ndarray):
        self.n = int(n)
        self.k = int(k)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, k)
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.shape != (self.n,):
            raise ValueError("coefficient vector must have length n")
        m = self.edges.shape[0]
        # distinct co-occurring pairs (i < j), plus the inverse map that sends
        # each (edge, position-pair) slot to its unique pair id
        pr, pc = [], []
        self._pair_slots = list(itertools.combinations(range(k), 2))
        for p, q in self._pair_slots:
            i = self.edges[:, p]
            j = self.edges[:, q]
            pr.append(np.minimum(i, j))
            pc.append(np.maximum(i, j))
        if m:
            flat_r = np.concatenate(pr)
            flat_c = np.concatenate(pc)
            key = flat_r * self.n + flat_c
            uniq, inv = np.unique(key, return_inverse=True)
            self._pair_rows = uniq // self.n
            self._pair_cols = uniq % self.n
            self._pair_inv = inv
        else:
            self._pair_rows = np.empty(0, dtype=np.int64)
            self._pair_cols = np.empty(0, dtype=np.int64)
            self._pair_inv = np.empty(0, dtype=np.int64)
        self._diag_idx = np.flatnonzero(self.coeffs > 0)

    def _edge_values(self, x: np.ndarray) -> np.ndarray:
        return x[self.edges]

    def value(self, x: np.ndarray) -> float:
        prods = np.prod(self._edge_values(x), axis=1) if self.m else 0.0
        return float(self.coeffs @ x**self.k - self.k * np.sum(prods))

    def adjacency_value(self, x: np.ndarray) -> float:
        prods = np.prod(self._edge_values(x), axis=1) if self.m else 0.0
        return float(self.k * np.sum(prods))

    def grad(self, x: np.ndarray) -> np.ndarray:
        g = self.coeffs * x ** (self.k - 1)
        if self.m:
            loo = self._leave_one_out(self._edge_values(x))
            g -= np.bincount(self.edges.ravel(), weights=loo.ravel(), minlength=self.n)
        return g

    def hess(self, x: np.ndarray) -> SparseSymMatrix:
        """Matrix unfolding of the (k-2)-fold contraction.

        Diagonal: c_i x_i^(k-2) at coefficient-positive vertices. Off-diagonal
        (i, j): -(1/(k-1)) * sum over edges containing both of the product of
        the remaining k-2 coordinates. Structure does not depend on x.
        """
        k = self.k
        diag_vals = self.coeffs[self._diag_idx] * x[self._diag_idx] ** (k - 2)
        if self.m:
            l2o = np.empty((self.edges.shape[0], len(self._pair_slots)))
            cols = np.arange(k)
            xe = self._edge_values(x)
            for t, (p, q) in enumerate(self._pair_slots):
                sel = (cols != p) & (cols != q)
                l2o[:, t] = np.prod(xe[:, sel], axis=1)
            pair_vals = -np.bincount(
                self._pair_inv, weights=l2o.ravel(order="F"), minlength=self._pair_rows.size
            ) / (k - 1)
        else:
            pair_vals = np.empty(0)
        return SparseSymMatrix(
            n=self.n,
            rows=np.concatenate([self._diag_idx, self._pair_rows]),
            cols=np.concatenate([self._diag_idx, self._pair_cols]),
            vals=np.concatenate([diag_vals, pair_vals]),
        )

    def lagrangian(self, x: np.ndarray, lam: float, keep: np.ndarray) -> tuple[np.ndarray, SparseSymMatrix]:
        """Gradient and Hessian of value(x) - lam * sum x^k, both restricted
        to the True positions of `keep` (scaled as in lagrangian_parts)."""
        g = self.grad(x) - lam * x ** (self.k - 1)
        W = _lagrangian_W(self, x, lam).restrict(keep)
        return g[keep], W

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @staticmethod
    def _leave_one_out(xe: np.ndarray) -> np.ndarray:
        """Per-row products over all positions but one, via prefix/suffix passes."""
        m, k = xe.shape
        pre = np.ones_like(xe)
        suf = np.ones_like(xe)
        np.cumprod(xe[:, :-1], axis=1, out=pre[:, 1:])
        rev = np.cumprod(xe[:, ::-1], axis=1)[:, ::-1]
        suf[:, :-1] = rev[:, 1:]
        return pre * suf


def _form(H: Hypergraph) -> EdgeForm:
    cached = getattr(H, "_edge_form", None)
    if cached is None:
        cached = EdgeForm(H.n, H.k, H.edges, degrees(H).degrees.astype(float))
        H._edge_form = cached
    return cached


def lap_value(H: Hypergraph, p: PinnedPoint) -> float:
    """L x^k = sum_e ( sum_{i in e} x_i^k - k prod_{i in e} x_i )."""
    return _form(H).value(p.x)


def lap_grad(H: Hypergraph, p: PinnedPoint) -> np.ndarray:
    """(L x^{k-1})_i = d_i x_i^{k-1} - sum_{e : i in e} prod_{v in e, v != i} x_v.

    The component at the pinned vertex is reported; callers mask it.
    """
    return _form(H).grad(p.x)


def lap_hess(H: Hypergraph, p: PinnedPoint) -> SparseSymMatrix:
    """Matrix L x^{k-2}; rows/columns touching the pinned vertex are masked downstream."""
    return _form(H).hess(p.x)


def _lagrangian_W(form: EdgeForm, x: np.ndarray, lam: float) -> SparseSymMatrix:
    """(k-1) * (hess(x) - lam * diag(x^(k-2))), with a full structural diagonal."""
    k = form.k
    hess = form.hess(x)
    off = hess.rows != hess.cols
    diag = (k - 1) * (form.coeffs * x ** (k - 2) - lam * x ** (k - 2))
    idx = np.arange(form.n)
    return SparseSymMatrix(
        n=form.n,
        rows=np.concatenate([idx, hess.rows[off]]),
        cols=np.concatenate([idx, hess.cols[off]]),
        vals=np.concatenate([diag, (k - 1) * hess.vals[off]]),
    )


def lagrangian_parts(
    H: Hypergraph, p: PinnedPoint, lam: float
) -> tuple[np.ndarray, SparseSymMatrix]:
    """Reduced Lagrangian gradient and Hessian at a pinned point.

    g = L x^{k-1} - lam * x^[k-1] and W = (k-1) * (L x^{k-2} - lam * diag(x^[k-2])),
    both restricted to the n-1 unpinned coordinates.
    """
    keep = np.ones(H.n, dtype=bool)
    keep[p.pinned] = False
    return _form(H).lagrangian(p.x, lam, keep)
