"""Shared randomized builders for the solver and oracle tests.

Everything here is seeded by the caller so the suite stays deterministic.
"""

import numpy as np
import pytest

from hypercon import Hypergraph, SparseSymMatrix, TRSubproblem, is_connected


def make_qp(rng: np.random.Generator, r: int, kind: str = "indefinite") -> TRSubproblem:
    """Random trust-region subproblem of dimension r.

    The box mimics the one the outer iteration builds: lo = max(-delta, -x)
    for a nonnegative point x with a few exact zeros (active lower bounds)
    and hi = delta throughout.  `kind` selects the curvature: "psd",
    "indefinite", or "zero".
    """
    delta = float(rng.uniform(0.3, 2.5))
    # keep nonzero coordinates away from 0: a tiny x_i makes a_i = x_i^2
    # nearly degenerate, and the enumeration oracle's equality tolerance
    # then admits points the exact constraint rules out
    x = rng.uniform(0.08, 1.2, size=r)
    x[rng.random(r) < 0.3] = 0.0
    lo = np.maximum(-delta, -x)
    hi = np.full(r, delta)
    g = rng.standard_normal(r)
    if kind == "psd":
        B = rng.standard_normal((r, r))
        M = B @ B.T + 1e-3 * np.eye(r)
    elif kind == "zero":
        M = np.zeros((r, r))
    elif kind == "indefinite":
        B = rng.standard_normal((r, r))
        M = 0.5 * (B + B.T)
    else:
        raise ValueError(f"unknown curvature kind {kind!r}")
    rows, cols = np.triu_indices(r)
    W = SparseSymMatrix(n=r, rows=rows, cols=cols, vals=M[rows, cols])
    # hyperplane normal shaped like x**(k-1): zero exactly where x is zero
    a = x**2
    if rng.random() < 0.2:
        a = np.abs(rng.standard_normal(r))
        a[rng.random(r) < 0.25] = 0.0
    if not np.any(a):
        a[int(rng.integers(r))] = 1.0
    return TRSubproblem(g=g, W=W, a=a, delta=delta, lo=lo, hi=hi)


def random_connected(rng: np.random.Generator, n: int, k: int, m: int | None = None) -> Hypergraph:
    """Connected k-uniform hypergraph on n vertices, found by rejection."""
    if m is None:
        m = max(2, -(-2 * n // k))
    for _ in range(500):
        rows = {tuple(sorted(rng.choice(n, size=k, replace=False).tolist())) for _ in range(m)}
        H = Hypergraph.from_edges(n, k, sorted(rows))
        if is_connected(H):
            return H
    raise RuntimeError(f"no connected instance found for n={n}, k={k}, m={m}")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
