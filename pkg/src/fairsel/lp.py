"""Small dense linear-program solver for box-constrained policies.

Solves   maximize c . v
         subject to G v <= h,  0 <= v <= 1

with a two-phase bounded-variable simplex.  Row counts here are tiny
(a handful of fairness and sign constraints) while the variable count is
up to a few hundred, so dense arithmetic with a fresh basis solve per
iteration is both simple and fast.  Entering and leaving choices use
least-index (Bland) selection, which rules out cycling on degenerate
vertices without perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11


class LpError(Exception):
    """Numerical breakdown inside the solver (tiny pivot, singular basis)."""


@dataclass(frozen=True)
class LpProblem:
    c: np.ndarray
    G: np.ndarray
    h: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=np.float64)
        G = np.asarray(self.G, dtype=np.float64)
        h = np.asarray(self.h, dtype=np.float64)
        if c.ndim != 1:
            raise ValueError("c must be a vector")
        if G.size == 0:
            G = G.reshape(0, c.size)
        if G.ndim != 2 or G.shape[1] != c.size:
            raise ValueError("G must have one column per variable")
        if h.shape != (G.shape[0],):
            raise ValueError("h must have one entry per row of G")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
            raise ValueError("problem data must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible"
    x: np.ndarray | None
    objective: float | None


def _simplex(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    upper: np.ndarray,
    basis: list[int],
    at_upper: np.ndarray,
    max_iter: int,
) -> tuple[list[int], np.ndarray]:
    """Maximize c.x for A x = b, 0 <= x <= upper, from the given basic start.

    Nonbasic variables sit at 0 or, where at_upper is set, at their upper
    bound.  Returns the final basis and nonbasic-at-upper flags.
    """
    k, n = A.shape
    if k == 0:
        raise LpError("simplex core called without rows")

    for _ in range(max_iter):
        B = A[:, basis]
        try:
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise LpError("singular basis") from exc

        reduced = c - y @ A
        basic_mask = np.zeros(n, dtype=bool)
        basic_mask[basis] = True
        improving = ~basic_mask & (
            (~at_upper & (reduced > FEAS_TOL)) | (at_upper & (reduced < -FEAS_TOL))
        )
        candidates = np.nonzero(improving)[0]
        if candidates.size == 0:
            return basis, at_upper
        j = int(candidates[0])  # least index

        # Current basic values.
        x_nb = np.where(at_upper, upper, 0.0)
        x_nb[basis] = 0.0
        rhs = b - A @ x_nb
        try:
            xb = np.linalg.solve(B, rhs)
            d = np.linalg.solve(B, A[:, j])
        except np.linalg.LinAlgError as exc:
            raise LpError("singular basis") from exc

        # The entering variable moves away from its bound by t >= 0;
        # each basic value moves by -sign * d * t.
        sign = -1.0 if at_upper[j] else 1.0
        move = sign * d

        best_t = upper[j]  # bound-to-bound flip
        leave_pos = -1
        for i in range(k):
            bi = basis[i]
            if move[i] > PIVOT_TOL:
                t_i = (xb[i] - 0.0) / move[i]
            elif move[i] < -PIVOT_TOL:
                ub = upper[bi]
                if not np.isfinite(ub):
                    continue
                t_i = (xb[i] - ub) / move[i]
            else:
                continue
            t_i = max(t_i, 0.0)
            if t_i < best_t - PIVOT_TOL or (
                t_i < best_t + PIVOT_TOL
                and leave_pos >= 0
                and basis[i] < basis[leave_pos]
            ):
                best_t = t_i
                leave_pos = i

        if not np.isfinite(best_t):
            # All variables are boxed in the problems built here, so an
            # unbounded ray signals corrupted input or arithmetic failure.
            raise LpError("unbounded direction in a boxed program")

        if leave_pos < 0:
            # Entering variable flips to its other bound; basis unchanged.
            at_upper[j] = ~at_upper[j]
            continue

        if abs(move[leave_pos]) < PIVOT_TOL:
            raise LpError("pivot element below tolerance")

        leaving = basis[leave_pos]
        # The leaving variable lands on whichever of its bounds it hit.
        hit_upper = move[leave_pos] < 0.0
        at_upper[leaving] = hit_upper
        at_upper[j] = False
        basis[leave_pos] = j

    raise LpError("iteration limit exceeded")


def _basic_point(
    A: np.ndarray, b: np.ndarray, upper: np.ndarray, basis: list[int], at_upper: np.ndarray
) -> np.ndarray:
    x = np.where(at_upper, upper, 0.0)
    x[basis] = 0.0
    try:
        xb = np.linalg.solve(A[:, basis], b - A @ x)
    except np.linalg.LinAlgError as exc:
        raise LpError("singular basis") from exc
    x[basis] = xb
    return x


def solve(problem: LpProblem) -> LpSolution:
    """Solve the program, returning a vertex optimum or infeasibility."""
    c0 = problem.c
    G = problem.G
    h = problem.h
    n = c0.size
    k = G.shape[0]

    if k == 0:
        x = (c0 > 0).astype(np.float64)
        return LpSolution("optimal", x, float(c0 @ x))

    # Standard form with one slack per row; rows with negative right-hand
    # side get an artificial variable so phase 1 can start feasible.
    neg = h < 0
    n_art = int(neg.sum())
    A = np.hstack([G, np.eye(k)])
    upper = np.concatenate([np.ones(n), np.full(k, np.inf)])
    if n_art:
        art_cols = np.zeros((k, n_art))
        for idx, row in enumerate(np.nonzero(neg)[0]):
            art_cols[row, idx] = -1.0
        A = np.hstack([A, art_cols])
        upper = np.concatenate([upper, np.full(n_art, np.inf)])

    total = A.shape[1]
    at_upper = np.zeros(total, dtype=bool)
    basis: list[int] = []
    art_of_row = {}
    art_idx = n + k
    for row in range(k):
        if neg[row]:
            basis.append(art_idx)
            art_of_row[row] = art_idx
            art_idx += 1
        else:
            basis.append(n + row)

    max_iter = 200 * (total + k) + 1000

    if n_art:
        c1 = np.zeros(total)
        c1[n + k :] = -1.0
        basis, at_upper = _simplex(A, h, c1, upper, basis, at_upper, max_iter)
        x = _basic_point(A, h, upper, basis, at_upper)
        if float(x[n + k :].sum()) > FEAS_TOL:
            return LpSolution("infeasible", None, None)
        # Freeze artificials at zero for phase 2.
        upper[n + k :] = 0.0
        at_upper[n + k :] &= False

    c2 = np.zeros(total)
    c2[:n] = c0
    basis, at_upper = _simplex(A, h, c2, upper, basis, at_upper, max_iter)
    x = _basic_point(A, h, upper, basis, at_upper)

    v = np.clip(x[:n], 0.0, 1.0)
    if np.any(np.abs(v - x[:n]) > 1e-7):
        raise LpError("solution violates its box beyond tolerance")
    resid = G @ v - h
    if np.any(resid > 1e-7 * (1.0 + np.abs(h))):
        raise LpError("solution violates a row beyond tolerance")
    return LpSolution("optimal", v, float(c0 @ v))
