"""Box + single-equality trust-region subproblem and its active-set solver.

    minimize    m(d) = g.d + 0.5 d'Wd
    subject to  a.d = 0,   lo <= d <= hi

with lo <= 0 <= hi, so d = 0 is always feasible. The solver is a primal
active-set loop: the single equality constraint is eliminated through a
pivot coordinate (largest |a_i| among the free variables), each face is
solved by a dense factorization, and indefinite faces are escaped along
negative-curvature rays walked to the nearer box wall. Both ray
orientations are evaluated so asymmetric boxes cannot trap the iterate on
the wrong side. All tie-breaks go to the smallest index.

On small problems whose curvature is indefinite on the equality plane, the
loop is re-run from a handful of deterministic seeds (Cauchy point,
negative-curvature walls, a descent corner, coordinate walls) and the best
endpoint wins; convex problems need no such help because any KKT point is
already global.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import SparseSymMatrix

__all__ = ["TRSubproblem", "StepResult", "cauchy_point", "solve_tr_qp"]

_ATOL = 1e-13  # below this, a coefficient of the equality normal counts as zero
_DENSE_LIMIT = 4000  # faces are factored densely; refuse absurd dimensions
_MULTISTART_DIM = 16  # extra active-set seeds only below this dimension


@dataclass(frozen=True)
class TRSubproblem:
    """One trust-region model: gradient, curvature, equality normal, box."""

    g: np.ndarray
    W: SparseSymMatrix
    a: np.ndarray
    delta: float
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        for name in ("g", "a", "lo", "hi"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        r = self.g.size
        if not (self.a.size == self.lo.size == self.hi.size == r == self.W.n):
            raise ValueError("inconsistent subproblem dimensions")
        if not self.delta > 0:
            raise ValueError("trust radius must be positive")
        if np.any(self.lo > 1e-12) or np.any(self.hi < -1e-12):
            raise ValueError("origin must be feasible (lo <= 0 <= hi)")
        if np.any(self.lo > self.hi):
            raise ValueError("empty box")


@dataclass(frozen=True)
class StepResult:
    d: np.ndarray
    model_decrease: float
    kkt_residual: float
    status: str  # "stationary" | "iteration_cap" | "cauchy_only"


def _model(g: np.ndarray, Wd: np.ndarray, d: np.ndarray) -> float:
    return float(g @ d + 0.5 * (d @ (Wd @ d)))


def _alt_project_rows(V, a, aa, lo, hi, sweeps=20):
    """Alternating projection of each row of V onto {a.d = 0} within the box.

    Rows that have already landed in the intersection are fixed points of
    further sweeps, so the whole batch can keep sweeping until every row's
    hyperplane residual is negligible (convergence is linear and cheap).
    """
    D = np.clip(V, lo, hi)
    if aa <= 0.0:
        return D
    for _ in range(sweeps):
        D -= np.outer((D @ a) / aa, a)
        np.clip(D, lo, hi, out=D)
    na = np.sqrt(aa)
    for _ in range(400):
        res = D @ a
        bound = 1e-12 * np.maximum(na * np.linalg.norm(D, axis=1), 1e-30)
        if np.all(np.abs(res) <= bound):
            break
        D -= np.outer(res / aa, a)
        np.clip(D, lo, hi, out=D)
    return D


def _snap_to_hyperplane(d, a, aa, lo, hi):
    """Exact projection onto {a.z = 0} inside the box via its 1-D dual.

    z(nu) = clip(d - nu*a, lo, hi) makes phi(nu) = a.z(nu) nonincreasing and
    piecewise linear; a root always exists because 0 is feasible. Bisection
    to float resolution gives a feasible point with machine-size residual.
    """
    if aa <= 0.0:
        return np.clip(d, lo, hi)
    lo_nu, hi_nu = -1.0, 1.0
    scale = max(1.0, float(np.linalg.norm(d, np.inf)))
    while float(a @ np.clip(d - lo_nu * a, lo, hi)) < 0.0 and lo_nu > -1e18:
        lo_nu *= 2.0
    while float(a @ np.clip(d - hi_nu * a, lo, hi)) > 0.0 and hi_nu < 1e18:
        hi_nu *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo_nu + hi_nu)
        if float(a @ np.clip(d - mid * a, lo, hi)) > 0.0:
            lo_nu = mid
        else:
            hi_nu = mid
        if hi_nu - lo_nu <= 1e-18 * scale:
            break
    return np.clip(d - 0.5 * (lo_nu + hi_nu) * a, lo, hi)


def _cauchy(g, Wd, a, lo, hi, delta, sweeps=20):
    aa = float(a @ a)
    gp = g - ((a @ g) / aa) * a if aa > 0.0 else g.copy()
    gn = float(np.linalg.norm(gp, np.inf))
    zero = np.zeros(g.size)
    if gn <= 0.0:
        return zero
    tau_max = 4.0 * delta / gn
    best_d, best_m, best_tau = zero, 0.0, 0.0

    def scan(taus):
        nonlocal best_d, best_m, best_tau
        taus = taus[taus > 0.0]
        if taus.size == 0:
            return
        D = _alt_project_rows(-np.outer(taus, gp), a, aa, lo, hi, sweeps)
        mv = D @ g + 0.5 * np.einsum("ij,ij->i", D, D @ Wd)
        i = int(np.argmin(mv))
        if mv[i] < best_m:
            best_d, best_m, best_tau = D[i].copy(), float(mv[i]), float(taus[i])

    scan(np.linspace(0.0, tau_max, 33)[1:])
    h = tau_max / 32.0
    for _ in range(3):
        scan(np.linspace(max(best_tau - h, 0.0), best_tau + h, 9))
        h /= 4.0
    if aa > 0.0:
        res = abs(float(a @ best_d))
        if res > 1e-11 * max(np.sqrt(aa) * float(np.linalg.norm(best_d)), 1e-30):
            best_d = _snap_to_hyperplane(best_d, a, aa, lo, hi)
            if _model(g, Wd, best_d) > 0.0:
                return zero
    return best_d


def cauchy_point(sub: TRSubproblem, sweeps: int = 20) -> np.ndarray:
    """Minimizer of the model along the projected steepest-descent path.

    The path is d(tau) = Proj(-tau * g_proj) where g_proj is g with its
    component along `a` removed; the minimizer over a refined tau grid that
    includes tau = 0 is returned, so m(d_C) <= m(0) always holds.
    """
    if sub.g.size > _DENSE_LIMIT:
        raise ValueError("subproblem too large for the dense model kernel")
    return _cauchy(sub.g, sub.W.to_dense(), sub.a, sub.lo, sub.hi, sub.delta, sweeps)


def _face_step(Wd, q, a, free, tol):
    """Newton step or escape ray on the current face; None when pinned down."""
    idx = np.flatnonzero(free)
    if idx.size == 0:
        return None
    aF = a[idx]
    p = int(np.argmax(np.abs(aF)))
    if abs(aF[p]) <= _ATOL:
        Z = np.eye(idx.size)
    elif idx.size == 1:
        return None  # a single free variable is fully determined by a.d = 0
    else:
        others = np.delete(np.arange(idx.size), p)
        Z = np.zeros((idx.size, idx.size - 1))
        Z[others, np.arange(idx.size - 1)] = 1.0
        Z[p, :] = -aF[others] / aF[p]
    WFF = Wd[np.ix_(idx, idx)]
    H = Z.T @ WFF @ Z
    rhs = -(Z.T @ q[idx])

    def embed(vec):
        s = np.zeros(a.size)
        s[idx] = Z @ vec
        return s

    try:
        np.linalg.cholesky(H)
        return "newton", embed(np.linalg.solve(H, rhs))
    except np.linalg.LinAlgError:
        pass
    w, V = np.linalg.eigh(H)
    scale = max(1.0, float(abs(w[-1])), float(abs(w[0])))
    if w[0] < -tol * scale:
        u = embed(V[:, 0])
        return "ray", u / float(np.linalg.norm(u, np.inf))
    keep = w > tol * scale
    if np.any(~keep):
        cn = V[:, ~keep].T @ rhs
        j = int(np.argmax(np.abs(cn)))
        if abs(cn[j]) > tol * max(1.0, float(np.linalg.norm(rhs, np.inf))):
            # model is linear and nonconstant along this null direction
            u = embed(V[:, ~keep][:, j] * np.sign(cn[j]))
            return "ray", u / float(np.linalg.norm(u, np.inf))
    if np.any(keep):
        y = V[:, keep] @ ((V[:, keep].T @ rhs) / w[keep])
    else:
        y = np.zeros(rhs.size)
    return "newton", embed(y)


def _ratio_test(d, s, lo, hi):
    """Largest feasible tau along s; smallest blocking index on ties."""
    tau, blocker, side = np.inf, -1, ""
    for i in range(d.size):
        si = s[i]
        if si > 1e-300:
            t, sd = (hi[i] - d[i]) / si, "hi"
        elif si < -1e-300:
            t, sd = (lo[i] - d[i]) / si, "lo"
        else:
            continue
        t = max(t, 0.0)
        if t < tau - 1e-12 * (1.0 + t):
            tau, blocker, side = t, i, sd
    return tau, blocker, side


def _equality_multiplier(q, a, free, at_lo, at_hi):
    """Multiplier for a.d = 0: least squares over the free face when it sees
    the constraint, otherwise the point of the active-bound interval nearest
    zero (midpoint of the violated interval when none exists)."""
    aF = a[free]
    den = float(aF @ aF)
    if den > _ATOL**2:
        return float((aF @ q[free]) / den)
    upper, lower = np.inf, -np.inf
    for i in np.flatnonzero(at_lo):
        ai = a[i]
        if ai > _ATOL:
            upper = min(upper, q[i] / ai)
        elif ai < -_ATOL:
            lower = max(lower, q[i] / ai)
    for i in np.flatnonzero(at_hi):
        ai = a[i]
        if ai > _ATOL:
            lower = max(lower, q[i] / ai)
        elif ai < -_ATOL:
            upper = min(upper, q[i] / ai)
    if lower <= upper:
        if np.isfinite(lower) and np.isfinite(upper):
            return float(min(max(0.0, lower), upper))
        if np.isfinite(lower):
            return float(max(0.0, lower))
        if np.isfinite(upper):
            return float(min(0.0, upper))
        return 0.0
    return float(0.5 * (lower + upper))


def _kkt_residual(g, Wd, a, lo, hi, d):
    q = g + Wd @ d
    act = 1e-9 * (1.0 + float(np.linalg.norm(hi, np.inf)))
    at_lo = d - lo <= act
    at_hi = hi - d <= act
    free = ~(at_lo | at_hi)
    nu = _equality_multiplier(q, a, free, at_lo & ~at_hi, at_hi & ~at_lo)
    r = q - nu * a
    res = np.minimum(d - lo, np.maximum(d - hi, r))
    return float(np.linalg.norm(res, np.inf)) if res.size else 0.0


def _active_set_loop(g, Wd, a, lo, hi, d0, at_lo, at_hi, tol, max_iter):
    """Run the primal loop from one seed; returns (d, status)."""
    d = d0.copy()
    at_lo = at_lo.copy()
    at_hi = at_hi.copy()
    status = "iteration_cap"
    last_release = -1
    moved_since_release = True
    for _ in range(max_iter):
        q = g + Wd @ d
        free = ~(at_lo | at_hi)
        move = _face_step(Wd, q, a, free, tol)
        ztol = 1e-12 * (1.0 + float(np.linalg.norm(d, np.inf)))
        if move is not None and move[0] == "newton":
            if float(np.linalg.norm(move[1], np.inf)) <= ztol:
                move = None
        if move is None:
            nu = _equality_multiplier(q, a, free, at_lo, at_hi)
            mu = q - nu * a
            worst = None
            worst_val = -tol * max(1.0, float(np.linalg.norm(q, np.inf)))
            for i in np.flatnonzero(at_lo):
                if mu[i] < worst_val:
                    worst_val, worst = mu[i], (int(i), "lo")
            for i in np.flatnonzero(at_hi):
                if -mu[i] < worst_val:
                    worst_val, worst = -mu[i], (int(i), "hi")
            if worst is None:
                status = "stationary"
                break
            if worst[0] == last_release and not moved_since_release:
                break  # degenerate release loop; keep the honest residual
            i, side = worst
            (at_lo if side == "lo" else at_hi)[i] = False
            last_release, moved_since_release = i, False
            continue
        kind, direction = move
        if kind == "newton":
            tau, blocker, side = _ratio_test(d, direction, lo, hi)
            if tau > 0.0:
                d = d + min(tau, 1.0) * direction
                moved_since_release = True
            if tau < 1.0 and blocker >= 0:
                d[blocker] = lo[blocker] if side == "lo" else hi[blocker]
                (at_lo if side == "lo" else at_hi)[blocker] = True
            np.clip(d, lo, hi, out=d)
        else:
            u = direction
            tau_p, bp, sp = _ratio_test(d, u, lo, hi)
            tau_m, bm, sm = _ratio_test(d, -u, lo, hi)
            cands = []
            if np.isfinite(tau_p):
                cands.append((_model(g, Wd, np.clip(d + tau_p * u, lo, hi)), 1.0, tau_p, bp, sp))
            if np.isfinite(tau_m):
                cands.append((_model(g, Wd, np.clip(d - tau_m * u, lo, hi)), -1.0, tau_m, bm, sm))
            if not cands:
                break  # free directions exist but nothing blocks: cannot happen
            if len(cands) == 2:
                tie = 1e-14 * (1.0 + min(abs(cands[0][0]), abs(cands[1][0])))
                if abs(cands[0][0] - cands[1][0]) <= tie:
                    chosen = cands[0] if float(q @ u) <= 0.0 else cands[1]
                else:
                    chosen = min(cands, key=lambda c: c[0])
            else:
                chosen = cands[0]
            _, sign, tau, blocker, side = chosen
            if tau > 0.0:
                d = d + sign * tau * u
                moved_since_release = True
            if blocker >= 0:
                d[blocker] = lo[blocker] if side == "lo" else hi[blocker]
                (at_lo if side == "lo" else at_hi)[blocker] = True
            np.clip(d, lo, hi, out=d)
    return d, status


def _activity_from(d, lo, hi):
    """Clamp a feasible point onto whichever bounds it already touches."""
    at_lo = d - lo <= 1e-12 * (1.0 + np.abs(lo))
    at_hi = (hi - d <= 1e-12 * (1.0 + np.abs(hi))) & ~at_lo
    d = np.clip(d, lo, hi)
    d[at_lo] = lo[at_lo]
    d[at_hi] = hi[at_hi]
    return d, at_lo, at_hi


def _hyperplane_basis(a):
    """Orthonormal basis of {d : a.d = 0} (identity when a is negligible)."""
    r = a.size
    na = float(np.linalg.norm(a))
    if na <= _ATOL:
        return np.eye(r)
    Q = np.linalg.qr(a.reshape(r, 1) / na, mode="complete")[0]
    return Q[:, 1:]


def _walk_start(d_from, u, lo, hi, a, aa):
    """Feasible seed along u: ratio-test the dominant components, clip the
    rest at their walls, and restore the hyperplane exactly.

    Small components must not take part in the ratio test: an eigenvector
    carries noise-level entries of arbitrary sign, and one of them pointing
    out of an active bound would pin the whole walk at tau = 0.
    """
    big = np.abs(u) >= 0.5 * float(np.linalg.norm(u, np.inf))
    tau, _, _ = _ratio_test(d_from[big], u[big], lo[big], hi[big])
    if not np.isfinite(tau) or tau <= 0.0:
        return None
    d = np.clip(d_from + tau * u, lo, hi)
    return _snap_to_hyperplane(d, a, aa, lo, hi)


def _coordinate_walks(d_from, a, aa, lo, hi):
    """Feasible points reached from d_from by pushing one coordinate to a
    wall while the a-coupled coordinates compensate to stay on {a.d = 0}."""
    out = []
    for i in range(a.size):
        u = np.zeros(a.size)
        u[i] = 1.0
        if aa > 0.0:
            u -= (a[i] / aa) * a
        nm = float(np.linalg.norm(u, np.inf))
        if nm <= _ATOL:
            continue
        u /= nm
        for sgn in (1.0, -1.0):
            walked = _walk_start(d_from, sgn * u, lo, hi, a, aa)
            if walked is not None:
                out.append(walked)
    return out


def _pair_walks(d_from, a, aa, lo, hi):
    """Feasible points pushing two coordinates jointly toward walls.

    Complements the single-coordinate walks: a pair at its bounds with clean
    multipliers but strong negative cross-curvature only pays off when both
    move together.
    """
    r = a.size
    out = []
    for i in range(r - 1):
        for j in range(i + 1, r):
            for si, sj in ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)):
                u = np.zeros(r)
                u[i] = si
                u[j] = sj
                if aa > 0.0:
                    u -= ((si * a[i] + sj * a[j]) / aa) * a
                nm = float(np.linalg.norm(u, np.inf))
                if nm <= _ATOL:
                    continue
                walked = _walk_start(d_from, u / nm, lo, hi, a, aa)
                if walked is not None:
                    out.append(walked)
    return out


def _extra_starts(g, a, aa, lo, hi, d_c, Q, w, V, full, pairs):
    """Deterministic seeds beyond the origin, in a fixed order.

    Walks along the most negative eigenvectors of the hyperplane-projected
    model Hessian are always included; the gradient corner and per-coordinate
    walks cost one active-set run each, so they are reserved for small
    problems (full=True); the quadratically many pair walks are reserved for
    thorough standalone solves (pairs=True).
    """
    seeds = [d_c]
    scale = max(1.0, float(abs(w[0])), float(abs(w[-1]))) if w.size else 1.0
    for col in range(min(2, V.shape[1])):
        if w[col] >= -1e-12 * scale:
            break
        u = Q @ V[:, col]
        u /= float(np.linalg.norm(u, np.inf))
        for sgn in (1.0, -1.0):
            walked = _walk_start(np.zeros(a.size), sgn * u, lo, hi, a, aa)
            if walked is not None:
                seeds.append(walked)
    if not full:
        return seeds
    corner = np.where(g > 0.0, lo, hi)
    seeds.append(_snap_to_hyperplane(corner, a, aa, lo, hi))
    seeds.extend(_coordinate_walks(np.zeros(a.size), a, aa, lo, hi))
    if pairs:
        seeds.extend(_pair_walks(np.zeros(a.size), a, aa, lo, hi))
    return seeds


def solve_tr_qp(
    sub: TRSubproblem,
    tol: float = 1e-10,
    max_iter: int | None = None,
    thorough: bool = True,
) -> StepResult:
    """Primal active-set solve of the trust-region subproblem.

    Returns a feasible step whose model value never exceeds the Cauchy
    point's; status reports whether the step is face-stationary, was cut off
    by the iteration cap, or fell back to the Cauchy point outright.

    With thorough=True (the default), small indefinite models additionally
    get pair walks and an incumbent flip sweep, which in practice pin the
    global model optimum in low dimensions. An outer iteration that wraps
    this call in restarts and stationarity certificates can pass
    thorough=False: Cauchy decrease, feasibility, and the stall-escape walks
    are unaffected, and the per-call cost drops severalfold.
    """
    g, a, lo, hi = sub.g, sub.a, sub.lo, sub.hi
    r = g.size
    if r > _DENSE_LIMIT:
        raise ValueError("subproblem too large for the dense QP kernel")
    if max_iter is None:
        max_iter = 50 * max(r, 1)
    Wd = sub.W.to_dense()
    aa = float(a @ a)

    d_c = _cauchy(g, Wd, a, lo, hi, sub.delta)
    m_c = _model(g, Wd, d_c)

    zero_lo = lo >= -1e-14  # coordinates of x_t sitting at zero start bound-active
    d, status = _active_set_loop(
        g, Wd, a, lo, hi, np.zeros(r), zero_lo, np.zeros(r, dtype=bool), tol, max_iter
    )
    m_best = _model(g, Wd, d)

    # Faces can hide the global minimizer of an indefinite model. Small
    # problems always get the full seed sweep; larger ones get the
    # negative-eigenvector walks only when the base step made no progress at
    # model scale, the signature of stalling on a saddle face (a pair of
    # coordinates at bound with vanishing multipliers but joint negative
    # curvature never trips the one-at-a-time release test).
    small = r <= _MULTISTART_DIM
    deep = small and thorough
    model_scale = sub.delta * float(np.linalg.norm(g, np.inf))
    if r:
        model_scale += sub.delta**2 * float(np.abs(Wd).max())
    stalled = -m_best <= 1e-12 * model_scale
    if r >= 2 and (small or stalled):
        Q = _hyperplane_basis(a)
        if Q.shape[1]:
            w, V = np.linalg.eigh(Q.T @ Wd @ Q)
            if w[0] < -tol * max(1.0, float(abs(w[0])), float(abs(w[-1]))):
                for seed in _extra_starts(
                    g, a, aa, lo, hi, d_c, Q, w, V, full=small, pairs=deep
                ):
                    s0, s_lo, s_hi = _activity_from(seed, lo, hi)
                    cand, cand_status = _active_set_loop(
                        g, Wd, a, lo, hi, s0, s_lo, s_hi, tol, max_iter
                    )
                    mv = _model(g, Wd, cand)
                    if mv < m_best - 1e-15 * (1.0 + abs(m_best)):
                        d, status, m_best = cand, cand_status, mv
                if deep:
                    # a coordinate can sit at the wrong wall with a clean
                    # multiplier when crossing the box is what pays off, so
                    # sweep single-coordinate flips and negative-curvature
                    # walks from the incumbent until none of them re-solves
                    # to a strictly better point
                    scale_w = max(1.0, float(abs(w[0])), float(abs(w[-1])))
                    neg = [c for c in range(V.shape[1]) if w[c] < -1e-12 * scale_w][:4]
                    for _ in range(2 * r):
                        improved = False
                        walks = _coordinate_walks(d, a, aa, lo, hi)
                        for col in neg:
                            u = Q @ V[:, col]
                            u /= float(np.linalg.norm(u, np.inf))
                            for sgn in (1.0, -1.0):
                                wk = _walk_start(d, sgn * u, lo, hi, a, aa)
                                if wk is not None:
                                    walks.append(wk)
                        for seed in walks:
                            s0, s_lo, s_hi = _activity_from(seed, lo, hi)
                            cand, cand_status = _active_set_loop(
                                g, Wd, a, lo, hi, s0, s_lo, s_hi, tol, max_iter
                            )
                            mv = _model(g, Wd, cand)
                            if mv < m_best - 1e-15 * (1.0 + abs(m_best)):
                                d, status, m_best = cand, cand_status, mv
                                improved = True
                        if not improved:
                            break

    chosen_d, final_status = d, status
    if m_c < m_best - 1e-15 * (1.0 + abs(m_best)):
        chosen_d = d_c
        final_status = "cauchy_only" if status == "stationary" else "iteration_cap"
    if aa > 0.0 and chosen_d.size:
        res = abs(float(a @ chosen_d))
        if res > 1e-11 * max(np.sqrt(aa) * float(np.linalg.norm(chosen_d)), 1e-30):
            chosen_d = _snap_to_hyperplane(chosen_d, a, aa, lo, hi)
    if _model(g, Wd, chosen_d) > 0.0:
        chosen_d = np.zeros(r)  # defensive: never hand back a model increase
        final_status = "iteration_cap"
    decrease = -_model(g, Wd, chosen_d)
    kkt = _kkt_residual(g, Wd, a, lo, hi, chosen_d)
    return StepResult(d=chosen_d, model_decrease=decrease, kkt_residual=kkt, status=final_status)
