"""Feasible trust-region minimization on the nonnegative k-norm sphere.

One vertex at a time is pinned to zero and the Laplacian form is minimized
over {x >= 0, sum x^k = 1, x[j] = 0}. Every iterate stays feasible: the
trust-region step solves a box-and-hyperplane QP in the unpinned
coordinates and accepted trial points are pulled back to the sphere by
scaling. The connectivity value is the minimum over candidate vertices of
the per-vertex minima, each taken over independent seeded restarts.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hypergraph import Hypergraph, is_connected
from .reduction import candidate_vertices
from .subproblem import TRSubproblem, solve_tr_qp
from .tensor import EdgeForm, PinnedPoint, lap_value, _form

__all__ = [
    "FTRConfig",
    "TraceRecord",
    "SolverTrace",
    "VertexResult",
    "RestartStats",
    "ConnectivityResult",
    "SolverError",
    "init_point",
    "project_sphere",
    "multiplier",
    "ftr_solve_vertex",
    "kkt_certificate",
    "compute_alpha",
]


class SolverError(RuntimeError):
    """No restart of some candidate vertex reached a converged state."""


@dataclass(frozen=True)
class FTRConfig:
    """Knobs of the trust-region iteration and the multistart driver."""

    sigma0: float = 0.25
    sigma1: float = 0.5
    sigma2: float = 0.75
    eps: float = 1e-8
    delta0: float = 2.0
    delta_max: float = 10.0
    max_outer_iter: int = 10000
    restarts: int = 100
    seed: int = 0
    qp_tol: float = 1e-10
    qp_max_iter: int | None = None
    step_norm: str = "inf"  # norm used by the stopping test: "inf" | "euclid"
    lambda_rule: str = "gradient"  # multiplier update: "gradient" | "adjacency"

    def __post_init__(self):
        if not 0.0 < self.sigma0 < self.sigma1 < self.sigma2:
            raise ValueError("need 0 < sigma0 < sigma1 < sigma2")
        if not self.sigma1 < 1.0:
            raise ValueError("sigma1 must be below 1")
        if not 0.0 < self.delta0 <= self.delta_max:
            raise ValueError("need 0 < delta0 <= delta_max")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if self.max_outer_iter < 1 or self.restarts < 1:
            raise ValueError("iteration and restart counts must be positive")
        if self.step_norm not in ("inf", "euclid"):
            raise ValueError("step_norm must be 'inf' or 'euclid'")
        if self.lambda_rule not in ("gradient", "adjacency"):
            raise ValueError("lambda_rule must be 'gradient' or 'adjacency'")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    f: float
    lam: float
    delta: float
    rho: float
    step_norm: float
    accepted: bool


@dataclass(frozen=True)
class SolverTrace:
    records: tuple[TraceRecord, ...]


@dataclass(frozen=True)
class VertexResult:
    vertex: int
    alpha_j: float
    x: PinnedPoint
    iterations: int
    status: str  # "converged" | "iter_cap"
    kkt_residual: float


@dataclass(frozen=True)
class RestartStats:
    vertex: int
    best_alpha: float
    hit_ratio: float
    mean_iterations: float
    mean_time_s: float
    n_converged: int
    n_runs: int


@dataclass(frozen=True)
class ConnectivityResult:
    alpha: float
    argmin: int | None
    per_vertex: tuple[VertexResult, ...]
    restart_stats: tuple[RestartStats, ...]
    connected: bool


def project_sphere(x, k: int, pinned: int | None = None):
    """Scale x onto the unit k-norm sphere.

    Returns a bare array, or a PinnedPoint when `pinned` names a coordinate
    that is exactly zero (scaling keeps it zero).
    """
    x = np.asarray(x, dtype=float)
    nrm = float(np.sum(x**k)) ** (1.0 / k)
    if not nrm > 0.0:
        raise ValueError("cannot project the zero vector")
    z = x / nrm
    if pinned is None:
        return z
    return PinnedPoint(x=z, pinned=pinned)


def init_point(n: int, j: int, k: int, rng: np.random.Generator) -> PinnedPoint:
    """Random feasible start: |standard normal| in the unpinned coordinates,
    zero at j, scaled to the sphere. All-zero draws are redrawn."""
    draw = np.abs(rng.standard_normal(n - 1))
    while not np.any(draw > 0.0):
        draw = np.abs(rng.standard_normal(n - 1))
    x = np.zeros(n)
    x[:j] = draw[:j]
    x[j + 1 :] = draw[j:]
    return project_sphere(x, k, pinned=j)


def multiplier(H: Hypergraph, x: PinnedPoint) -> float:
    """Gradient-rule multiplier: the form value itself on the unit sphere."""
    return lap_value(H, x)


def _reproject(y: np.ndarray, k: int) -> np.ndarray:
    """Pull a trial point back to the sphere; clamp rounding-level negatives
    (anything in [-1e-15, 0)) to zero and rescale once more."""
    z = y / float(np.sum(y**k)) ** (1.0 / k)
    tiny = (z > -1e-15) & (z < 0.0)
    if np.any(tiny):
        z[tiny] = 0.0
    return z / float(np.sum(z**k)) ** (1.0 / k)


def _lam_of(form: EdgeForm, x: np.ndarray, raw: float, rule: str) -> float:
    return raw if rule == "gradient" else form.adjacency_value(x)


def _first_order_residual(form: EdgeForm, x: np.ndarray, lam: float, keep: np.ndarray) -> float:
    """max of complementarity ||min(x, g)||_inf over movable coordinates,
    sphere feasibility error, and the multiplier defect |lam - grad(f).x|."""
    xr = x[keep]
    g = (form.grad(x) - lam * x ** (form.k - 1))[keep]
    comp = float(np.linalg.norm(np.minimum(xr, g), np.inf)) if xr.size else 0.0
    feas = abs(float(np.sum(x**form.k)) - 1.0)
    return max(comp, feas, abs(lam - form.value(x)))


def _minimize_on_sphere(form: EdgeForm, keep: np.ndarray, x0: np.ndarray, cfg: FTRConfig):
    """Trust-region loop for min value(x) over {x >= 0, sum x^k = 1} with the
    coordinates where keep is False frozen at zero.

    Returns (lam, x, iterations, status, first_order_residual, records).
    """
    k = form.k
    x = np.array(x0, dtype=float)
    delta = cfg.delta0
    records: list[TraceRecord] = []
    status = "iter_cap"
    iters = cfg.max_outer_iter
    for t in range(cfg.max_outer_iter):
        raw = form.value(x)
        f = raw / k
        lam = _lam_of(form, x, raw, cfg.lambda_rule)
        g, W = form.lagrangian(x, lam, keep)
        xr = x[keep]
        sub = TRSubproblem(
            g=g,
            W=W,
            a=xr ** (k - 1),
            delta=delta,
            lo=np.maximum(-delta, -xr),
            hi=np.full(xr.size, delta),
        )
        # thorough=False: restarts and the convergence certificates cover
        # global step quality, so each step only needs Cauchy decrease and
        # the stall-escape walks
        step = solve_tr_qp(sub, tol=cfg.qp_tol, max_iter=cfg.qp_max_iter, thorough=False)
        dn = float(np.linalg.norm(step.d, np.inf if cfg.step_norm == "inf" else 2))
        if dn <= cfg.eps:
            records.append(TraceRecord(t, f, lam, delta, float("nan"), dn, False))
            status = "converged"
            iters = t + 1
            break
        pred = step.model_decrease
        if pred > 0.0:
            y = x.copy()
            y[keep] = xr + step.d
            z = _reproject(y, k)
            rho = (f - form.value(z) / k) / pred
        else:
            z = None
            rho = -np.inf  # vanished model decrease counts as a plain rejection
        accepted = rho >= cfg.sigma0
        records.append(TraceRecord(t, f, lam, delta, float(rho), dn, accepted))
        if accepted:
            x = z
        elif delta <= 1e-14:
            # the radius has collapsed; decide by the stationarity residual
            fo = _first_order_residual(form, x, lam, keep)
            status = "converged" if fo <= 1e-6 else "iter_cap"
            iters = t + 1
            break
        if rho <= cfg.sigma1:
            delta *= 0.5
        elif rho > cfg.sigma2:
            delta = min(cfg.delta_max, 2.0 * delta)
    raw = form.value(x)
    lam = _lam_of(form, x, raw, cfg.lambda_rule)
    fo = _first_order_residual(form, x, lam, keep)
    return lam, x, iters, status, fo, records


def ftr_solve_vertex(
    H: Hypergraph, j: int, x0: PinnedPoint, cfg: FTRConfig
) -> tuple[VertexResult, SolverTrace]:
    """Minimize the Laplacian form with vertex j pinned, from one start."""
    if x0.pinned != j or x0.x.size != H.n:
        raise ValueError("starting point does not match the pinned vertex")
    if x0.feasibility_error(H.k) > 1e-8:
        raise ValueError("starting point is off the unit k-norm sphere")
    keep = np.ones(H.n, dtype=bool)
    keep[j] = False
    lam, x, iters, status, fo, records = _minimize_on_sphere(_form(H), keep, x0.x, cfg)
    result = VertexResult(
        vertex=j,
        alpha_j=float(lam),
        x=PinnedPoint(x=x, pinned=j),
        iterations=iters,
        status=status,
        kkt_residual=fo,
    )
    return result, SolverTrace(records=tuple(records))


def kkt_certificate(
    H: Hypergraph,
    j: int,
    x: PinnedPoint,
    lam: float,
    tol_act: float = 1e-6,
    active_tol: float = 1e-8,
    max_face_dim: int = 2000,
) -> tuple[float, float | None]:
    """Stationarity diagnostics at a pinned point.

    First value: max of complementarity, feasibility, and multiplier defects.
    Second: smallest eigenvalue of the curvature matrix on the face where the
    tangency constraint holds and decisively-active coordinates (x_i at zero
    with Lagrangian gradient above tol_act) are frozen; None when the face
    dimension exceeds max_face_dim and the eigensolve is skipped.
    """
    form = _form(H)
    keep = np.ones(H.n, dtype=bool)
    keep[j] = False
    fo = _first_order_residual(form, x.x, lam, keep)
    g, W = form.lagrangian(x.x, lam, keep)
    xr = x.x[keep]
    a = xr ** (form.k - 1)
    fixed = (xr <= active_tol) & (g > tol_act)
    face = np.flatnonzero(~fixed)
    dim = face.size
    if dim == 0:
        return fo, 0.0
    if dim > max_face_dim:
        return fo, None
    Wd = W.to_dense()[np.ix_(face, face)]
    aF = a[face]
    p = int(np.argmax(np.abs(aF)))
    if abs(aF[p]) <= 1e-13:
        M = Wd
    elif dim == 1:
        return fo, 0.0
    else:
        others = np.delete(np.arange(dim), p)
        Z = np.zeros((dim, dim - 1))
        Z[others, np.arange(dim - 1)] = 1.0
        Z[p] = -aF[others] / aF[p]
        Q = np.linalg.qr(Z)[0]
        M = Q.T @ Wd @ Q
    return fo, float(np.linalg.eigvalsh(M)[0])


def compute_alpha(
    H: Hypergraph,
    cfg: FTRConfig | None = None,
    strategy: str = "dominance",
    max_workers: int | None = None,
) -> ConnectivityResult:
    """Analytic connectivity: min over candidate vertices of the pinned
    minima, each the best of cfg.restarts seeded starts.

    Restart r of vertex j draws from a generator keyed (seed, j, r), so the
    result does not depend on scheduling. Disconnected input short-circuits
    to zero without any solver run. Raises SolverError when some candidate
    vertex finishes all restarts without a single converged status.
    """
    cfg = cfg if cfg is not None else FTRConfig()
    if not is_connected(H):
        return ConnectivityResult(
            alpha=0.0, argmin=None, per_vertex=(), restart_stats=(), connected=False
        )
    cand = candidate_vertices(H, strategy).vertices
    jobs = [(j, r) for j in cand for r in range(cfg.restarts)]

    def run(job: tuple[int, int]) -> tuple[VertexResult, float]:
        j, r = job
        rng = np.random.default_rng([cfg.seed, j, r])
        x0 = init_point(H.n, j, H.k, rng)
        t0 = time.perf_counter()
        res, _ = ftr_solve_vertex(H, j, x0, cfg)
        return res, time.perf_counter() - t0

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]

    per_vertex: list[VertexResult] = []
    stats: list[RestartStats] = []
    for idx, j in enumerate(cand):
        runs = outcomes[idx * cfg.restarts : (idx + 1) * cfg.restarts]
        best = runs[0][0]
        for res, _dt in runs[1:]:
            if res.alpha_j < best.alpha_j:
                best = res
        n_conv = sum(1 for res, _dt in runs if res.status == "converged")
        if n_conv == 0:
            raise SolverError(f"no restart converged for pinned vertex {j}")
        tol = 1e-6 * max(1.0, abs(best.alpha_j))
        hits = sum(1 for res, _dt in runs if res.alpha_j <= best.alpha_j + tol)
        per_vertex.append(best)
        stats.append(
            RestartStats(
                vertex=j,
                best_alpha=best.alpha_j,
                hit_ratio=hits / len(runs),
                mean_iterations=float(np.mean([res.iterations for res, _dt in runs])),
                mean_time_s=float(np.mean([dt for _res, dt in runs])),
                n_converged=n_conv,
                n_runs=len(runs),
            )
        )
    alpha = min(v.alpha_j for v in per_vertex)
    argmin = next(v.vertex for v in per_vertex if v.alpha_j == alpha)
    return ConnectivityResult(
        alpha=float(alpha),
        argmin=int(argmin),
        per_vertex=tuple(per_vertex),
        restart_stats=tuple(stats),
        connected=True,
    )
