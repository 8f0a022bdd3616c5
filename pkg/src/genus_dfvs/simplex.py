"""Dense exact simplex for packing LPs ``max 1.y  s.t.  A y <= c, y >= 0``.

``A`` is 0/1 (rows are vertices, columns are cycles) and ``c >= 0``, so the
all-slack basis is feasible and no phase one is needed. Columns can be added
after a solve; the current basis stays feasible and the next solve continues
from it. The prices of the slack columns at optimality are the optimal
solution of the covering LP ``min c.x  s.t.  A^T x >= 1, x >= 0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from gmpy2 import mpq

_ZERO = mpq(0)
_ONE = mpq(1)


class UnboundedPacking(ArithmeticError):
    """A column has no positive entry: some cycle avoids every finite-cost vertex."""

    def __init__(self, column: int):
        super().__init__(f"column {column} is unbounded (covering LP infeasible)")
        self.column = column


class IterationLimit(RuntimeError):
    pass


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class PackingSimplex:
    """Tableau ``[B^-1 | B^-1 A]`` (slacks first) with rhs ``B^-1 c`` and reduced-cost row."""

    def __init__(self, capacities: Sequence, max_pivots: int = 200000):
        self.m = len(capacities)
        self.rhs: List[mpq] = [_q(c) for c in capacities]
        # slack block starts as the identity
        self.rows: List[List[mpq]] = [[_ZERO] * self.m for _ in range(self.m)]
        for i in range(self.m):
            self.rows[i][i] = _ONE
        self.ncols = 0
        self.cols_support: List[Sequence[int]] = []
        # reduced costs in the same column layout as the rows
        self.red: List[mpq] = [_ZERO] * self.m
        self.basis: List[int] = [i - self.m for i in range(self.m)]  # negative = slack
        self.value = _ZERO
        self.max_pivots = max_pivots
        self.pivots = 0

    # column j (structural) lives at index m + j of each row
    def add_column(self, support: Sequence[int]) -> int:
        """Append a 0/1 column with ones at ``support`` (row indices)."""
        j = self.ncols
        self.ncols += 1
        self.cols_support.append(tuple(support))
        for row in self.rows:
            row.append(sum((row[v] for v in support), _ZERO))
        self.red.append(sum((self.red[v] for v in support), _ZERO) - _ONE)
        return j

    def _entering(self, bland: bool) -> int:
        best, best_val = -1, _ZERO
        for k in range(self.m + self.ncols):
            r = self.red[k]
            if r < 0:
                if bland:
                    return k
                if r < best_val:
                    best, best_val = k, r
        return best

    def _leaving(self, k: int) -> int:
        best, best_ratio, best_var = -1, None, None
        for i, row in enumerate(self.rows):
            a = row[k]
            if a > 0:
                ratio = self.rhs[i] / a
                var = self.basis[i]
                if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and var < best_var):
                    best, best_ratio, best_var = i, ratio, var
        return best

    def _pivot(self, i: int, k: int) -> None:
        prow = self.rows[i]
        piv = prow[k]
        if piv != _ONE:
            inv = _ONE / piv
            prow = [x * inv for x in prow]
            self.rows[i] = prow
            self.rhs[i] *= inv
        nz = [(c, x) for c, x in enumerate(prow) if x]
        b = self.rhs[i]
        for r, row in enumerate(self.rows):
            if r == i:
                continue
            f = row[k]
            if f:
                for c, x in nz:
                    row[c] -= f * x
                self.rhs[r] -= f * b
        f = self.red[k]
        if f:
            for c, x in nz:
                self.red[c] -= f * x
            self.value -= f * b
        self.basis[i] = k - self.m
        self.pivots += 1

    def solve(self) -> None:
        degenerate_run = 0
        while True:
            k = self._entering(bland=degenerate_run > 50)
            if k < 0:
                return
            i = self._leaving(k)
            if i < 0:
                raise UnboundedPacking(k - self.m)
            degenerate_run = degenerate_run + 1 if self.rhs[i] == 0 else 0
            self._pivot(i, k)
            if self.pivots > self.max_pivots:
                raise IterationLimit(f"simplex exceeded {self.max_pivots} pivots")

    # -- results -------------------------------------------------------------

    def prices(self) -> List[Fraction]:
        """Optimal covering solution, one value per row."""
        return [Fraction(int(r.numerator), int(r.denominator)) for r in self.red[: self.m]]

    def primal(self) -> List[Fraction]:
        """Optimal packing solution, one value per column."""
        y = [Fraction(0)] * self.ncols
        for i, var in enumerate(self.basis):
            if var >= 0:
                r = self.rhs[i]
                y[var] = Fraction(int(r.numerator), int(r.denominator))
        return y

    def objective(self) -> Fraction:
        return Fraction(int(self.value.numerator), int(self.value.denominator))
