"""Exact sparse row reduction over F_p.

Rows are dicts mapping integer column indices to nonzero residues; the
pivot of a row is its smallest column.  One implementation serves the
Hilbert-series oracle, the Lie-membership solves, and the Massey
certificate construction.
"""

from __future__ import annotations

from .errors import BudgetError


def check_budget(rows: int, cols: int, budget):
    if budget is not None and rows * cols > budget:
        raise BudgetError(
            f"matrix of {rows} x {cols} = {rows * cols} entries exceeds the "
            f"budget of {budget}; raise the budget or lower the degree"
        )


class RowReducer:
    """Incremental echelon basis over F_p."""

    def __init__(self, p: int):
        self.p = p
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        """Reduce a row against the current pivots (the row is consumed)."""
        p = self.p
        row = {k: v % p for k, v in row.items() if v % p}
        while row:
            lead = min(row)
            piv = self.pivots.get(lead)
            if piv is None:
                break
            c = row[lead]
            for k, v in piv.items():
                nv = (row.get(k, 0) - c * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add(self, row: dict[int, int]):
        """Insert a row; returns its pivot column, or None if dependent."""
        row = self.reduce(row)
        if not row:
            return None
        lead = min(row)
        inv = pow(row[lead], -1, self.p)
        self.pivots[lead] = {k: (v * inv) % self.p for k, v in row.items()}
        return lead

    def reduce_fully(self, row: dict[int, int]) -> dict[int, int]:
        """Eliminate every pivot column present, not only the leading one.
        Terminates because pivot tails only touch larger columns."""
        p = self.p
        row = {k: v % p for k, v in row.items() if v % p}
        while True:
            hits = [k for k in row if k in self.pivots]
            if not hits:
                return row
            lead = min(hits)
            c = row[lead]
            for k, v in self.pivots[lead].items():
                nv = (row.get(k, 0) - c * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)

    def finalize(self):
        """Back-substitute so every pivot row is reduced against all others
        (reduced echelon form).  Tails then touch non-pivot columns only."""
        for lead in sorted(self.pivots, reverse=True):
            row = self.pivots.pop(lead)
            tail = {k: v for k, v in row.items() if k != lead}
            tail = self.reduce_fully(tail)
            tail[lead] = 1
            self.pivots[lead] = tail


class TrackingReducer:
    """Row reduction carrying a tracking vector through the same operations,
    used for solving linear systems and extracting row transforms."""

    def __init__(self, p: int):
        self.p = p
        self.pivots: dict[int, tuple[dict[int, int], dict]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row, trace):
        p = self.p
        row = {k: v % p for k, v in row.items() if v % p}
        trace = {k: v % p for k, v in trace.items() if v % p}
        while row:
            lead = min(row)
            hit = self.pivots.get(lead)
            if hit is None:
                break
            prow, ptrace = hit
            c = row[lead]
            for k, v in prow.items():
                nv = (row.get(k, 0) - c * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            for k, v in ptrace.items():
                nv = (trace.get(k, 0) - c * v) % p
                if nv:
                    trace[k] = nv
                else:
                    trace.pop(k, None)
        return row, trace

    def add(self, row, trace):
        row, trace = self.reduce(row, trace)
        if not row:
            return None
        lead = min(row)
        inv = pow(row[lead], -1, self.p)
        row = {k: (v * inv) % self.p for k, v in row.items()}
        trace = {k: (v * inv) % self.p for k, v in trace.items()}
        self.pivots[lead] = (row, trace)
        return lead


def solve_combination(p: int, columns, target):
    """Coefficients x with sum_i x_i * columns[i] = target over F_p, or None.

    Columns and target are sparse dicts over a shared row-index set.
    """
    tr = TrackingReducer(p)
    for i, col in enumerate(columns):
        tr.add(dict(col), {i: 1})
    residue, trace = tr.reduce(dict(target), {})
    if residue:
        return None
    return [(-trace.get(i, 0)) % p for i in range(len(columns))]


def rank(p: int, rows) -> int:
    red = RowReducer(p)
    for row in rows:
        red.add(dict(row))
    return red.rank


def dense_rank(p: int, matrix) -> int:
    return rank(p, ({j: v for j, v in enumerate(row) if v % p} for row in matrix))


def kernel_basis(p: int, matrix, ncols: int):
    """Basis of the right kernel of an m x ncols matrix over F_p."""
    red = RowReducer(p)
    for row in matrix:
        red.add({j: v for j, v in enumerate(row) if v % p})
    red.finalize()
    pivot_cols = set(red.pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for lead, prow in red.pivots.items():
            c = prow.get(free, 0)
            if c:
                vec[lead] = (-c) % p
        basis.append(vec)
    return basis


def is_invertible(p: int, matrix) -> bool:
    n = len(matrix)
    return all(len(row) == n for row in matrix) and dense_rank(p, matrix) == n
