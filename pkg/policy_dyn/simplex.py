"""
Dense two-phase simplex with Bland's rule.

The LPs solved here are tiny (a stationary polytope over |A| joint actions
plus a handful of deviation constraints) and frequently degenerate, so the
solver favours termination over speed: Bland's smallest-index rule for both
the entering and the leaving variable.

    maximize    c.x
    subject to  A_ub x <= b_ub
                A_eq x == b_eq
                x >= 0
"""
import logging
import attr
import numpy as np

from . import conf
from .errors import LPError, ValidationError

log = logging.getLogger(__name__)


@attr.s(frozen=True, eq=False)
class LPResult:
    status = attr.ib()      # 'optimal', 'infeasible' or 'unbounded'
    x = attr.ib(default=None, repr=False)
    value = attr.ib(default=None)
    iterations = attr.ib(default=0)

    @property
    def feasible(self):
        return self.status != 'infeasible'


class SimplexTableau:
    """
    The last row holds the reduced costs (negative entries may enter) and
    minus the objective value in its last column.
    """

    def __init__(self, table, basis, pivot_tol=conf.LP_PIVOT_TOL,
                 max_iterations=conf.LP_MAX_ITERATIONS):
        self.table = table
        self.basis = basis
        self.pivot_tol = pivot_tol
        self.max_iterations = max_iterations
        self.iterations = 0

    @property
    def n_rows(self):
        return self.table.shape[0] - 1

    def pivot(self, row, col):
        T = self.table
        T[row, :] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and T[r, col] != 0.0:
                T[r, :] -= T[r, col] * T[row, :]
        self.basis[row] = col

    def entering(self, allowed):
        costs = self.table[-1, :-1]
        for j in allowed:
            if costs[j] < -self.pivot_tol:
                return j
        return None

    def leaving(self, col):
        T = self.table
        best = None
        for i in range(self.n_rows):
            a = T[i, col]
            if a > self.pivot_tol:
                ratio = T[i, -1] / a
                if best is None or ratio < best[0] - 1e-12 or (
                        abs(ratio - best[0]) <= 1e-12 and self.basis[i] < self.basis[best[1]]):
                    best = (ratio, i)
        return None if best is None else best[1]

    def run(self, allowed):
        while True:
            col = self.entering(allowed)
            if col is None:
                return 'optimal'
            row = self.leaving(col)
            if row is None:
                return 'unbounded'
            self.pivot(row, col)
            self.iterations += 1
            if self.iterations > self.max_iterations:
                raise LPError('simplex did not terminate', self.iterations,
                              self.condition())

    def condition(self):
        B = self.table[:-1, self.basis]
        try:
            return float(np.linalg.cond(B))
        except np.linalg.LinAlgError:
            return float('inf')

    def solution(self, n):
        x = np.zeros(n)
        for i, j in enumerate(self.basis):
            if j < n:
                x[j] = self.table[i, -1]
        return x


def _as_2d(A, n):
    if A is None:
        return np.zeros((0, n))
    A = np.asarray(A, dtype=float)
    return A.reshape(-1, n)


def linprog(c=None, A_ub=None, b_ub=None, A_eq=None, b_eq=None, n=None,
            pivot_tol=conf.LP_PIVOT_TOL, feasibility_tol=conf.LP_FEASIBILITY_TOL):
    """
    Solve the LP above; ``c=None`` solves the feasibility problem only.
    """
    if n is None:
        if c is None:
            raise ValidationError('linprog needs either c or n')
        n = len(c)
    A_ub = _as_2d(A_ub, n)
    A_eq = _as_2d(A_eq, n)
    b_ub = np.asarray(b_ub if b_ub is not None else [], dtype=float)
    b_eq = np.asarray(b_eq if b_eq is not None else [], dtype=float)
    if len(b_ub) != len(A_ub) or len(b_eq) != len(A_eq):
        raise ValidationError('constraint matrices and bounds disagree in length')
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq

    # rows with negative right hand side are flipped, which turns a slack
    # into a surplus and requires an artificial variable
    rows = np.vstack([A_ub, A_eq])
    rhs = np.concatenate([b_ub, b_eq])
    slack_sign = np.ones(m_ub)
    needs_artificial = np.zeros(m, dtype=bool)
    needs_artificial[m_ub:] = True
    for i in range(m):
        if rhs[i] < 0:
            rows[i] *= -1
            rhs[i] *= -1
            if i < m_ub:
                slack_sign[i] = -1.0
                needs_artificial[i] = True
    art_rows = np.flatnonzero(needs_artificial)
    n_art = len(art_rows)
    art_start = n + m_ub
    width = art_start + n_art

    T = np.zeros((m + 1, width + 1))
    T[:m, :n] = rows
    T[:m, -1] = rhs
    basis = [0] * m
    for i in range(m_ub):
        T[i, n + i] = slack_sign[i]
        basis[i] = n + i
    for k, i in enumerate(art_rows):
        T[i, art_start + k] = 1.0
        basis[i] = art_start + k

    tableau = SimplexTableau(T, basis, pivot_tol)
    if n_art:
        # phase I: maximize -sum(artificials)
        T[-1, art_start:width] = 1.0
        for i in art_rows:
            T[-1, :] -= T[i, :]
        tableau.run(range(width))
        infeasibility = -T[-1, -1]
        if infeasibility > feasibility_tol:
            log.debug('LP infeasible (phase I optimum %.3e)', infeasibility)
            return LPResult('infeasible', iterations=tableau.iterations)
        # drive artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if tableau.basis[i] >= art_start:
                candidates = np.flatnonzero(np.abs(T[i, :art_start]) > pivot_tol)
                if len(candidates) == 0:
                    continue
                tableau.pivot(i, int(candidates[0]))
            keep.append(i)
        T = np.vstack([T[keep, :art_start], T[-1:, :art_start]])
        T = np.hstack([T, np.vstack([tableau.table[keep, -1:], tableau.table[-1:, -1:]])])
        tableau = SimplexTableau(T, [tableau.basis[i] for i in keep], pivot_tol,
                                 max_iterations=tableau.max_iterations - tableau.iterations)
        tableau.iterations = 0
    T = tableau.table
    T[-1, :] = 0.0
    if c is None or not np.any(c):
        x = tableau.solution(n)
        return LPResult('optimal', x, 0.0, tableau.iterations)

    # phase II
    c = np.asarray(c, dtype=float)
    T[-1, :n] = -c
    for i, j in enumerate(tableau.basis):
        if j < n and c[j] != 0.0:
            T[-1, :] += c[j] * T[i, :]
    status = tableau.run(range(T.shape[1] - 1))
    if status == 'unbounded':
        return LPResult('unbounded', iterations=tableau.iterations)
    x = tableau.solution(n)
    return LPResult('optimal', x, float(c @ x), tableau.iterations)
