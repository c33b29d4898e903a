"""Dense simplex solver for the small LPs behind zero-sum matrix games.

Solves max c^T x subject to A x <= b, x >= 0 with b >= 0, so the slack basis
is feasible from the start.  Entering column by most negative reduced cost;
leaving row by the lexicographic ratio rule (right-hand side first, then the
slack block, then the structural columns), which rules out cycling.  Dual
values are read off the slack columns of the final objective row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-11


class LPUnboundedError(RuntimeError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    duals: np.ndarray
    objective: float
    iterations: int


def simplex_max(A: np.ndarray, b: np.ndarray, c: np.ndarray, max_iter: int = 100_000) -> LPResult:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP shapes")
    if np.any(b < 0):
        raise ValueError("this solver requires b >= 0")

    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -c
    basis = list(range(n, n + m))
    # lexicographic comparison order: rhs, slack block, structural block
    lex_cols = [n + m] + list(range(n, n + m)) + list(range(n))

    for it in range(1, max_iter + 1):
        reduced = tab[m, : n + m]
        j = int(np.argmin(reduced))
        if reduced[j] >= -_EPS:
            x = np.zeros(n)
            for row, col in enumerate(basis):
                if col < n:
                    x[col] = tab[row, -1]
            duals = tab[m, n : n + m].copy()
            return LPResult(x=x, duals=duals, objective=float(tab[m, -1]), iterations=it - 1)
        col = tab[:m, j]
        candidates = [i for i in range(m) if col[i] > _EPS]
        if not candidates:
            raise LPUnboundedError("objective unbounded above")
        best = candidates[0]
        best_vec = tab[best, lex_cols] / col[best]
        for i in candidates[1:]:
            vec = tab[i, lex_cols] / col[i]
            delta = vec - best_vec
            nz = np.nonzero(np.abs(delta) > 1e-14)[0]
            if nz.size and delta[nz[0]] < 0:
                best, best_vec = i, vec
        r = best
        pivot = tab[r, j]
        tab[r] /= pivot
        for i in range(m + 1):
            if i != r and tab[i, j] != 0.0:
                tab[i] -= tab[i, j] * tab[r]
        basis[r] = j
    raise RuntimeError(f"simplex did not terminate in {max_iter} iterations")
