"""Embedded LP solver: revised simplex with simple variable bounds.

Rows stay rows; bounds are handled implicitly so the basis never grows
with them.  The basis inverse is maintained as a sparse LU factorization
(SuperLU) plus a product-form eta file, refactorized periodically.  Two
phases: artificial variables drive the initial point feasible, then the
real objective is minimized.

Pivoting is Dantzig pricing by default and switches to Bland's smallest-
index rule while the objective stalls, which makes every solve
deterministic and cycle-free: identical problems and options produce
bit-identical solutions.  Ratio-test pivots are accepted only above a
scale-relative threshold; when the best pivot of an entering column is
unsafe the basis is refactorized and, if still unsafe, the column is
rejected for this pricing round rather than corrupting the basis.

Dual sign convention (minimization): duals of ``<=`` rows are <= 0 at
optimality; reporting layers that want nonnegative "prices" flip the sign
(see :func:`hubcap.analysis.co2_shadow_price`).  Reduced costs are
``c - A'y``: nonnegative at lower bounds, nonpositive at upper bounds.
At degenerate optima the duals reported are those of the final basis;
they need not be unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .lp import LpProblem

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

#: relative pivot admission thresholds: with eta updates in play / fresh LU
_PIVOT_STALE = 1e-7
_PIVOT_FRESH = 5e-10


class SingularBasisError(RuntimeError):
    """Basis factorization failed beyond refactorization retries."""


@dataclass(frozen=True)
class SolveOptions:
    tol_feas: float = 1e-6
    tol_opt: float = 1e-9
    max_iter: int = 200_000
    seed: int = 0          # reserved for perturbation strategies; the
                           # default pivot rules are deterministic
    refactor_every: int = 64
    stall_window: int = 300


@dataclass
class Solution:
    status: str
    objective: float
    x: np.ndarray
    y: np.ndarray
    reduced_costs: np.ndarray
    iterations: int


@dataclass(frozen=True)
class KktResiduals:
    """Scaled max-norm KKT residuals; all four <= 1e-6 on accepted solves."""

    primal_res: float
    dual_res: float
    gap: float
    comp_slack: float

    def as_dict(self) -> dict[str, float]:
        return {"primal_res": self.primal_res, "dual_res": self.dual_res,
                "gap": self.gap, "comp_slack": self.comp_slack}

    def max(self) -> float:
        return max(self.primal_res, self.dual_res, self.gap, self.comp_slack)


class _Basis:
    """Sparse LU of the basis plus a product-form eta file."""

    def __init__(self, a_csc: sp.csc_matrix):
        self._a = a_csc
        self._lu = None
        self._etas: list[tuple[int, np.ndarray]] = []

    def refactor(self, basis: np.ndarray) -> None:
        mat = self._a[:, basis].tocsc()
        try:
            self._lu = splu(mat, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SingularBasisError(f"basis factorization failed: {exc}") from exc
        self._etas = []

    @property
    def eta_count(self) -> int:
        return len(self._etas)

    def ftran(self, v: np.ndarray) -> np.ndarray:
        x = self._lu.solve(v)
        for r, w in self._etas:
            xr = x[r] / w[r]
            x -= w * xr
            x[r] = xr
        return x

    def btran(self, v: np.ndarray) -> np.ndarray:
        x = v.copy()
        for r, w in reversed(self._etas):
            x[r] = (x[r] - (w @ x - w[r] * x[r])) / w[r]
        return self._lu.solve(x, trans="T")

    def update(self, r: int, w: np.ndarray) -> None:
        self._etas.append((r, w.copy()))


class _Worker:
    """One solve on the slack-and-artificial extended system."""

    def __init__(self, lp: LpProblem, opts: SolveOptions):
        self.opts = opts
        m = lp.num_rows
        n = lp.num_cols
        a = lp.matrix().tocsc()

        le_rows = np.flatnonzero(lp.sense == "<")
        n_slack = le_rows.size
        slack = sp.coo_matrix(
            (np.ones(n_slack), (le_rows, np.arange(n_slack))), shape=(m, n_slack))

        lower = np.concatenate([lp.lower, np.zeros(n_slack)])
        upper = np.concatenate([lp.upper, np.full(n_slack, np.inf)])

        # Nonbasic start: finite lower bound, else finite upper, else 0.
        x0 = np.where(np.isfinite(lower), lower, np.where(np.isfinite(upper), upper, 0.0))
        resid = lp.rhs - sp.hstack([a, slack], format="csc") @ x0

        art_sign = np.where(resid >= 0, 1.0, -1.0)
        art = sp.coo_matrix((art_sign, (np.arange(m), np.arange(m))), shape=(m, m))

        self.a_full = sp.hstack([a, slack, art], format="csc")
        self.at_full = self.a_full.T.tocsr()
        self.m, self.n_struct, self.n_slack = m, n, n_slack
        self.n_art_start = n + n_slack
        self.n_total = n + n_slack + m
        self.b = lp.rhs.copy()
        self.lower = np.concatenate([lower, np.zeros(m)])
        self.upper = np.concatenate([upper, np.full(m, np.inf)])
        self.x = np.concatenate([x0, np.zeros(m)])
        self.vstat = np.full(self.n_total, AT_LOWER, dtype=np.int8)
        self.vstat[np.isneginf(self.lower) & np.isfinite(self.upper)] = AT_UPPER
        self._free = np.isneginf(self.lower) & np.isinf(self.upper)

        # Crash basis: feasible slacks cover their own <= rows, artificials
        # cover the rest.
        slack_col = {int(r): self.n_struct + k for k, r in enumerate(le_rows)}
        basis = np.empty(m, dtype=np.int64)
        for i in range(m):
            jslack = slack_col.get(i)
            if jslack is not None and resid[i] >= 0:
                basis[i] = jslack
                self.x[jslack] = resid[i]
            else:
                jart = self.n_art_start + i
                basis[i] = jart
                self.x[jart] = abs(resid[i])
        self.basis = basis
        self.vstat[self.basis] = BASIC
        self.factor = _Basis(self.a_full)
        self.factor.refactor(self.basis)
        self.iterations = 0
        self.c = np.zeros(self.n_total)

    # -- pricing -----------------------------------------------------------

    def _duals(self) -> np.ndarray:
        return self.factor.btran(self.c[self.basis])

    def _reduced_costs(self, y: np.ndarray) -> np.ndarray:
        return self.c - self.at_full @ y

    def _entering(self, rc: np.ndarray, bland: bool,
                  rejected: set[int] | None = None) -> int | None:
        tol = self.opts.tol_opt
        movable = self.lower < self.upper  # fixed columns can never enter
        at_low = (self.vstat == AT_LOWER) & movable
        at_up = (self.vstat == AT_UPPER) & movable
        free = at_low & self._free
        score = np.zeros(self.n_total)
        np.copyto(score, -rc, where=at_low)
        np.copyto(score, rc, where=at_up)
        score[free] = np.abs(rc[free])
        if rejected:
            score[list(rejected)] = 0.0
        candidates = score > tol
        if not candidates.any():
            return None
        if bland:
            return int(np.flatnonzero(candidates)[0])
        return int(np.argmax(score))

    def _column(self, j: int) -> np.ndarray:
        v = np.zeros(self.m)
        start, end = self.a_full.indptr[j], self.a_full.indptr[j + 1]
        v[self.a_full.indices[start:end]] = self.a_full.data[start:end]
        return v

    # -- ratio test ---------------------------------------------------------

    def _ratio(self, j: int, d: float, w: np.ndarray, pivot_tol: float,
               bland: bool = False):
        """Max step for entering column j moving in direction d.

        Returns (theta, leaving_position, leaving_side); a position of -1
        is a bound flip of the entering variable, ``theta=None`` means the
        step is unbounded.  Ties at the minimum ratio are broken by the
        largest pivot magnitude (numerical stability), or by the smallest
        leaving-variable index under Bland's rule, which together with
        smallest-index entering guarantees no cycling.
        """
        xb = self.x[self.basis]
        lb = self.lower[self.basis]
        ub = self.upper[self.basis]
        coef = d * w

        steps = np.full(self.m, np.inf)
        sides = np.full(self.m, AT_LOWER, dtype=np.int8)
        dec = coef > pivot_tol
        if dec.any():
            steps[dec] = (xb[dec] - lb[dec]) / coef[dec]
        inc = coef < -pivot_tol
        fin_up = inc & np.isfinite(ub)
        if fin_up.any():
            steps[fin_up] = (ub[fin_up] - xb[fin_up]) / -coef[fin_up]
            sides[fin_up] = AT_UPPER
        np.maximum(steps, 0.0, out=steps)

        theta = float(steps.min(initial=np.inf))
        flip = self.upper[j] - self.lower[j]
        if np.isfinite(flip) and flip < theta:
            return flip, -1, AT_LOWER
        if not np.isfinite(theta):
            return None, None, None

        ties = np.flatnonzero(steps <= theta + 1e-9 * (1.0 + theta))
        if bland:
            pos = int(ties[np.argmin(self.basis[ties])])
        else:
            pos = int(ties[np.argmax(np.abs(w[ties]))])
        return theta, pos, int(sides[pos])

    def _refresh(self) -> None:
        self.factor.refactor(self.basis)
        self._recompute_basics()

    def _recompute_basics(self) -> None:
        xz = self.x.copy()
        xz[self.basis] = 0.0
        self.x[self.basis] = self.factor.ftran(self.b - self.a_full @ xz)

    # -- main loop ----------------------------------------------------------

    def run_phase(self, c: np.ndarray) -> str:
        self.c = c
        opts = self.opts
        bland = False
        best = np.inf
        last_improve = self.iterations

        while True:
            if self.iterations >= opts.max_iter:
                return ITERATION_LIMIT
            y = self._duals()
            rc = self._reduced_costs(y)
            rejected: set[int] = set()

            while True:
                j = self._entering(rc, bland, rejected)
                if j is None:
                    if self.factor.eta_count:
                        # confirm against a fresh factorization
                        self._refresh()
                        y = self._duals()
                        rc = self._reduced_costs(y)
                        rejected.clear()
                        j = self._entering(rc, bland)
                    if j is None:
                        return OPTIMAL

                d = 1.0 if self.vstat[j] == AT_LOWER else -1.0
                if self._free[j]:
                    d = 1.0 if rc[j] < 0 else -1.0

                w = self.factor.ftran(self._column(j))
                scale = max(1.0, float(np.abs(w).max()))
                theta, pos, side = self._ratio(j, d, w, _PIVOT_FRESH * scale, bland)

                if self.factor.eta_count and (
                        theta is None or (pos >= 0 and abs(w[pos]) < _PIVOT_STALE * scale)):
                    # Pivot would be decided by possibly-stale numbers:
                    # rebuild the factorization and re-price from scratch.
                    self._refresh()
                    y = self._duals()
                    rc = self._reduced_costs(y)
                    rejected.clear()
                    continue
                if theta is None:
                    return UNBOUNDED
                if pos >= 0 and abs(w[pos]) < _PIVOT_FRESH * scale:
                    rejected.add(j)
                    continue
                break

            self.iterations += 1
            if pos == -1:
                # bound flip: no basis change
                self.x[j] = self.upper[j] if d > 0 else self.lower[j]
                self.x[self.basis] -= theta * d * w
                self.vstat[j] = AT_UPPER if d > 0 else AT_LOWER
            else:
                leave = self.basis[pos]
                self.x[self.basis] -= theta * d * w
                self.x[j] = self.x[j] + d * theta
                self.x[leave] = self.lower[leave] if side == AT_LOWER else self.upper[leave]
                self.basis[pos] = j
                self.vstat[j] = BASIC
                self.vstat[leave] = side
                self.factor.update(pos, w)
                if self.factor.eta_count >= opts.refactor_every:
                    self._refresh()

            obj = float(self.c @ self.x)
            if obj < best - 1e-12 * (1.0 + abs(best)):
                best = obj
                last_improve = self.iterations
                bland = False
            elif self.iterations - last_improve > opts.stall_window:
                bland = True

    def lock_artificials(self) -> None:
        art = np.arange(self.n_art_start, self.n_total)
        self.upper[art] = 0.0
        nonbasic_art = art[self.vstat[art] != BASIC]
        self.x[nonbasic_art] = 0.0

    def drive_out_artificials(self) -> None:
        if self.factor.eta_count:
            self._refresh()
        for pos in range(self.m):
            if self.basis[pos] < self.n_art_start:
                continue
            e = np.zeros(self.m)
            e[pos] = 1.0
            row = self.at_full @ self.factor.btran(e)
            found = None
            for j in range(self.n_art_start):
                if self.vstat[j] != BASIC and self.lower[j] < self.upper[j] \
                        and abs(row[j]) > _PIVOT_STALE:
                    found = j
                    break
            if found is None:
                continue  # redundant row; artificial stays basic at zero
            w = self.factor.ftran(self._column(found))
            if abs(w[pos]) < _PIVOT_STALE * max(1.0, float(np.abs(w).max())):
                continue
            leave = self.basis[pos]
            self.basis[pos] = found
            self.vstat[found] = BASIC
            self.vstat[leave] = AT_LOWER
            self.x[leave] = 0.0
            self.factor.update(pos, w)
            if self.factor.eta_count >= self.opts.refactor_every:
                self._refresh()


def solve(lp: LpProblem, opts: SolveOptions | None = None) -> Solution:
    """Minimize the LP; primal, duals and reduced costs come from the basis."""
    opts = opts or SolveOptions()
    w = _Worker(lp, opts)
    n = lp.num_cols

    c1 = np.zeros(w.n_total)
    c1[w.n_art_start:] = 1.0
    status = w.run_phase(c1)
    if status == ITERATION_LIMIT:
        return _finish(lp, w, ITERATION_LIMIT)
    infeas = float(c1 @ w.x)
    if infeas > opts.tol_feas * (1.0 + np.abs(lp.rhs).max(initial=0.0)):
        sol = _finish(lp, w, INFEASIBLE)
        sol.objective = float("nan")
        return sol

    w.drive_out_artificials()
    w.lock_artificials()

    c2 = np.zeros(w.n_total)
    c2[:n] = lp.c
    status = w.run_phase(c2)
    if status == UNBOUNDED:
        sol = _finish(lp, w, UNBOUNDED)
        sol.objective = float("-inf")
        return sol
    return _finish(lp, w, status)


def _finish(lp: LpProblem, w: _Worker, status: str) -> Solution:
    # Fresh factorization so the reported solution is as clean as possible.
    try:
        w._refresh()
    except SingularBasisError:
        pass
    y = w._duals()
    rc = w._reduced_costs(y)
    n = lp.num_cols
    return Solution(
        status=status,
        objective=float(lp.c @ w.x[:n]),
        x=w.x[:n].copy(),
        y=y.copy(),
        reduced_costs=rc[:n].copy(),
        iterations=w.iterations,
    )


def verify_kkt(lp: LpProblem, solution: Solution) -> KktResiduals:
    """Scaled KKT residuals of an optimal solution.

    primal: constraint and bound violation over ``1 + ||b||_inf``;
    dual: sign violations of duals and reduced costs over ``1 + ||c||_inf``;
    gap: primal-dual objective difference over ``1 + |objective|``;
    comp_slack: complementary-slackness products over ``1 + |objective|``.
    """
    if solution.status != OPTIMAL:
        raise ValueError(f"KKT verification needs an optimal solution, got {solution.status}")
    x, y = solution.x, solution.y
    a = lp.matrix()
    ax = a @ x
    eq = lp.sense == "="
    le = ~eq

    b_scale = 1.0 + np.abs(lp.rhs).max(initial=0.0)
    primal = 0.0
    if eq.any():
        primal = max(primal, np.abs(ax[eq] - lp.rhs[eq]).max())
    if le.any():
        primal = max(primal, np.maximum(ax[le] - lp.rhs[le], 0.0).max())
    primal = max(primal,
                 np.maximum(lp.lower - x, 0.0).max(initial=0.0),
                 np.maximum(x - lp.upper, 0.0).max(initial=0.0))

    rc = lp.c - a.T @ y
    c_scale = 1.0 + np.abs(lp.c).max(initial=0.0)
    dual = np.maximum(y[le], 0.0).max(initial=0.0)
    no_upper = np.isinf(lp.upper)
    no_lower = np.isneginf(lp.lower)
    dual = max(dual, np.maximum(-rc[no_upper], 0.0).max(initial=0.0))
    dual = max(dual, np.maximum(rc[no_lower], 0.0).max(initial=0.0))

    obj = solution.objective
    lam_lo = np.maximum(rc, 0.0)
    lam_up = np.maximum(-rc, 0.0)
    dual_obj = float(y @ lp.rhs)
    fin_lo = np.isfinite(lp.lower)
    fin_up = np.isfinite(lp.upper)
    dual_obj += float(lam_lo[fin_lo] @ lp.lower[fin_lo])
    dual_obj -= float(lam_up[fin_up] @ lp.upper[fin_up])
    gap = abs(obj - dual_obj)

    comp = 0.0
    slack = lp.rhs - ax
    if le.any():
        comp = np.abs(y[le] * slack[le]).max(initial=0.0)
    comp = max(comp, np.abs(lam_lo[fin_lo] * (x[fin_lo] - lp.lower[fin_lo])).max(initial=0.0))
    comp = max(comp, np.abs(lam_up[fin_up] * (lp.upper[fin_up] - x[fin_up])).max(initial=0.0))

    scale = 1.0 + abs(obj)
    return KktResiduals(
        primal_res=float(primal / b_scale),
        dual_res=float(dual / c_scale),
        gap=float(gap / scale),
        comp_slack=float(comp / scale),
    )
