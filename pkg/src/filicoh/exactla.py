"""Exact rational sparse linear algebra.

Kernel bases, rank, solving and span membership for the truncated cocycle
and coboundary systems.  Everything is exact (fractions.Fraction at the
interface) and deterministic: answers are read off the reduced row echelon
form, which is unique for a given column order, so identical inputs yield
identical bases byte for byte.

The elimination itself is delegated to sympy's sparse DomainMatrix over QQ
(gmpy2-backed), which handles the few-nonzeros-per-row systems produced by
the cochain complexes far better than a dense textbook sweep would.
"""
from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import UsageError

_ZERO = Fraction(0)


class SparseMatrix:
    """Immutable sparse matrix over the rationals.

    ``entries`` maps (row, col) to a nonzero Fraction.  Reduced echelon data
    is computed lazily once and cached, so repeated rank / solve / in_span
    queries against the same matrix cost one elimination.
    """

    def __init__(self, rows, cols, entries):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise UsageError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            v = Fraction(v)
            if v:
                self.entries[(r, c)] = v
        self._rref = None

    @classmethod
    def from_rows(cls, cols, row_dicts):
        """Build from an iterable of {col: value} dicts."""
        entries = {}
        n = 0
        for n, row in enumerate(row_dicts, start=1):
            for c, v in row.items():
                entries[(n - 1, c)] = v
        return cls(n, cols, entries)

    @classmethod
    def from_columns(cls, rows, col_dicts):
        """Build from an iterable of {row: value} dicts used as columns."""
        entries = {}
        n = 0
        for n, col in enumerate(col_dicts, start=1):
            for r, v in col.items():
                entries[(r, n - 1)] = v
        return cls(rows, n, entries)

    def column(self, c):
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def _domain_matrix(self):
        dod = {}
        for (r, c), v in self.entries.items():
            dod.setdefault(r, {})[c] = QQ(v.numerator, v.denominator)
        return DomainMatrix(dod, (self.rows, self.cols), QQ)

    def _rref_data(self):
        """(pivot row dicts keyed by pivot col, ordered pivot col list)."""
        if self._rref is None:
            if not self.entries:
                self._rref = ({}, [])
            else:
                R, pivots = self._domain_matrix().rref()
                pivots = [int(p) for p in pivots]
                rows = {}
                dok = R.to_dok()
                for (r, c), v in dok.items():
                    if r < len(pivots):
                        rows.setdefault(r, {})[int(c)] = Fraction(v.numerator, v.denominator)
                self._rref = ({pivots[r]: rows.get(r, {}) for r in range(len(pivots))},
                              pivots)
        return self._rref

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def rank(M):
    """Exact rank."""
    return len(M._rref_data()[1])


def kernel_basis(M):
    """Basis of ker(M) as a list of length-``cols`` tuples of Fractions.

    The basis is itself in reduced echelon form with pivot columns ascending,
    so the output is canonical: two matrices with the same kernel yield the
    same basis.
    """
    pivot_rows, pivots = M._rref_data()
    pivot_set = set(pivots)
    free = [c for c in range(M.cols) if c not in pivot_set]
    if not free:
        return []
    raw = []
    for f in free:
        vec = {f: Fraction(1)}
        for p in pivots:
            v = pivot_rows[p].get(f, _ZERO)
            if v:
                vec[p] = -v
        raw.append(vec)
    reduced = _rref_vectors(raw, M.cols)
    out = []
    for vec in reduced:
        out.append(tuple(vec.get(c, _ZERO) for c in range(M.cols)))
    return out


def _rref_vectors(vecs, ncols):
    """Row-reduce a small list of sparse vectors to canonical reduced form."""
    dod = {}
    for r, vec in enumerate(vecs):
        dod[r] = {c: QQ(v.numerator, v.denominator) for c, v in vec.items() if v}
    if not dod:
        return []
    M = DomainMatrix(dod, (len(vecs), ncols), QQ)
    R, pivots = M.rref()
    rows = {}
    for (r, c), v in R.to_dok().items():
        if r < len(pivots):
            rows.setdefault(r, {})[int(c)] = Fraction(v.numerator, v.denominator)
    return [rows.get(r, {}) for r in range(len(pivots))]


def solve(M, b):
    """One exact solution x of M x = b, or None if inconsistent.

    Free variables are set to zero under the deterministic pivot order, so
    the particular solution is unique for a given system.
    """
    bvec = _as_vector(b, M.rows)
    entries = dict(M.entries)
    for r, v in bvec.items():
        if v:
            entries[(r, M.cols)] = v
    aug = SparseMatrix(M.rows, M.cols + 1, entries)
    pivot_rows, pivots = aug._rref_data()
    if M.cols in pivots:
        return None
    x = [_ZERO] * M.cols
    for p in pivots:
        x[p] = pivot_rows[p].get(M.cols, _ZERO)
    return tuple(x)


def in_span(M, v):
    """Whether v lies in the column space of M, i.e. rank([M | v]) = rank(M)."""
    return solve(M, v) is not None


def _as_vector(b, n):
    if isinstance(b, dict):
        vec = {}
        for r, v in b.items():
            if not 0 <= r < n:
                raise UsageError(f"vector entry {r} outside length {n}")
            v = Fraction(v)
            if v:
                vec[r] = v
        return vec
    b = list(b)
    if len(b) != n:
        raise UsageError(f"vector has length {len(b)}, expected {n}")
    return {r: Fraction(v) for r, v in enumerate(b) if Fraction(v)}


def reduced_span(vectors):
    """Canonical reduced basis of the span of sparse dict-vectors.

    Vectors are keyed by arbitrary sortable coordinates (index tuples in
    practice); the result is the reduced row echelon form of the span, one
    dict per basis vector, pivots ascending with leading coefficient 1.
    """
    cols = sorted({c for vec in vectors for c in vec})
    idx = {c: i for i, c in enumerate(cols)}
    dod = {}
    r = 0
    for vec in vectors:
        row = {idx[c]: QQ(Fraction(v).numerator, Fraction(v).denominator)
               for c, v in vec.items() if Fraction(v)}
        if row:
            dod[r] = row
            r += 1
    if not dod:
        return []
    M = DomainMatrix(dod, (r, len(cols)), QQ)
    R, pivots = M.rref()
    rows = {}
    for (rr, cc), v in R.to_dok().items():
        if rr < len(pivots):
            rows.setdefault(rr, {})[cols[int(cc)]] = Fraction(v.numerator, v.denominator)
    return [rows.get(rr, {}) for rr in range(len(pivots))]


def reduce_mod_span(vec, reduced_basis):
    """Normal form of a sparse dict-vector modulo a reduced_span basis.

    Each basis vector's pivot is its smallest coordinate (coefficient 1);
    subtracting the matching multiples yields a canonical representative of
    the coset, independent of how the span was generated.
    """
    out = {c: Fraction(v) for c, v in vec.items() if Fraction(v)}
    for row in reduced_basis:
        pivot = min(row)
        coeff = out.get(pivot)
        if not coeff:
            continue
        for c, v in row.items():
            t = out.get(c, _ZERO) - coeff * v
            if t:
                out[c] = t
            else:
                out.pop(c, None)
    return out


def span_rank(vectors, coords=None):
    """Rank of the span of sparse dict-vectors, optionally restricted to
    a coordinate subset (used for interior-window dimension counts)."""
    index = {}
    dod = {}
    r = 0
    for vec in vectors:
        row = {}
        for c, v in vec.items():
            if coords is not None and c not in coords:
                continue
            v = Fraction(v)
            if not v:
                continue
            if c not in index:
                index[c] = len(index)
            row[index[c]] = QQ(v.numerator, v.denominator)
        if row:
            dod[r] = row
            r += 1
    if not dod:
        return 0
    M = DomainMatrix(dod, (r, len(index)), QQ)
    return M.rank()
