"""Homogeneous cochains, the differential, the graded bracket and Massey terms.

A homogeneous p-cochain of weight l sends (e_{i_1}, ..., e_{i_p}) to
a_{i_1...i_p} e_{i_1+...+i_p+l}; coefficients are stored sparsely on strictly
increasing key tuples and evaluation at other orderings applies the sign of
the permutation.  A key is legal only if its target index sum+l is >= 1.

Sign conventions (fixed once, everything downstream depends on them):

    degree 0:  (d a)(e_i)        = -[e_i, a]          i.e.  d e_m = [e_m, -]
    degree 1:  (d w)(e_i, e_j)   = w([e_i,e_j]) - [e_i, w(e_j)] + [e_j, w(e_i)]
    degree 2:  (d w)(e_i,e_j,e_k) = w([e_i,e_j],e_k) + w([e_j,e_k],e_i)
                                  + w([e_k,e_i],e_j) - [e_i, w(e_j,e_k)]
                                  - [e_j, w(e_k,e_i)] - [e_k, w(e_i,e_j)]

With these choices d(d(x)) = 0 and, for 2-cochains, d w equals the graded
bracket [mu, w] of w with the algebra's own cocycle mu.

Two bookkeeping attributes support exact finite-window reasoning:

    window     None for exact finitely supported data; a cutoff N when the
               cochain is the window truncation of an infinite object, in
               which case coefficients beyond N are unknown, not zero.
    row_bound  if set, all coefficients with smallest index > row_bound are
               known to vanish even beyond the window (the m-families and
               column-restricted corrections have this shape).

Operations here are exact on the data they are given; trust tracking for
truncated inputs is exposed through the *_window variants.
"""
from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations

from .errors import UsageError

_ZERO = Fraction(0)


def sort_with_sign(indices):
    """(sorted tuple, permutation sign); sign 0 when an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return tuple(sorted(idx)), 0
    sign = 1
    # insertion sort; fine for tuples of length <= 3
    for a in range(1, len(idx)):
        b = a
        while b > 0 and idx[b - 1] > idx[b]:
            idx[b - 1], idx[b] = idx[b], idx[b - 1]
            sign = -sign
            b -= 1
    return tuple(idx), sign


class HomogeneousCochain:
    """Sparse homogeneous cochain of fixed degree p in {0,1,2,3} and weight l."""

    __slots__ = ("degree", "weight", "coeffs", "window", "row_bound")

    def __init__(self, degree, weight, coeffs=None, window=None, row_bound=None):
        if degree not in (0, 1, 2, 3):
            raise UsageError(f"unsupported cochain degree {degree}")
        self.degree = degree
        self.weight = weight
        self.window = window
        self.row_bound = row_bound
        clean = {}
        for key, val in (coeffs or {}).items():
            key = (key,) if isinstance(key, int) else tuple(key)
            if len(key) != degree:
                raise UsageError(f"key {key} has arity {len(key)}, degree is {degree}")
            if any(i < 1 for i in key) or any(key[a] >= key[a + 1] for a in range(len(key) - 1)):
                raise UsageError(f"key {key} must be strictly increasing and >= 1")
            if sum(key) + weight < 1:
                raise UsageError(f"key {key} targets index {sum(key) + weight} < 1")
            val = Fraction(val)
            if val:
                clean[key] = val
        self.coeffs = clean

    @classmethod
    def zero(cls, degree, weight):
        return cls(degree, weight)

    def is_zero(self):
        return not self.coeffs

    def evaluate(self, indices):
        """Signed coefficient and target index at an arbitrary index tuple."""
        indices = tuple(indices)
        if len(indices) != self.degree:
            raise UsageError(
                f"evaluate called with {len(indices)} indices on a degree-{self.degree} cochain")
        target = sum(indices) + self.weight
        if target < 1:
            return _ZERO, target
        key, sign = sort_with_sign(indices)
        if sign == 0:
            return _ZERO, target
        return sign * self.coeffs.get(key, _ZERO), target

    def support_max(self):
        return max((k[-1] for k in self.coeffs), default=0)

    def restrict(self, max_index):
        """Drop keys with any index beyond max_index; result window = max_index."""
        kept = {k: v for k, v in self.coeffs.items() if k[-1] <= max_index}
        return HomogeneousCochain(self.degree, self.weight, kept,
                                  window=max_index, row_bound=self.row_bound)

    def _binary_check(self, other):
        if not isinstance(other, HomogeneousCochain):
            raise UsageError("expected a HomogeneousCochain")
        if self.degree != other.degree or self.weight != other.weight:
            raise UsageError(
                f"degree/weight mismatch: ({self.degree}, {self.weight}) vs "
                f"({other.degree}, {other.weight})")

    def _merge_window(self, other):
        wins = [w for w in (self.window, other.window) if w is not None]
        return min(wins) if wins else None

    def __add__(self, other):
        self._binary_check(other)
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs.get(k, _ZERO) + v
        return HomogeneousCochain(self.degree, self.weight, coeffs,
                                  window=self._merge_window(other))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        factor = Fraction(factor)
        return HomogeneousCochain(
            self.degree, self.weight,
            {k: factor * v for k, v in self.coeffs.items()},
            window=self.window, row_bound=self.row_bound)

    def __eq__(self, other):
        return (isinstance(other, HomogeneousCochain)
                and self.degree == other.degree
                and self.weight == other.weight
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.degree, self.weight, frozenset(self.coeffs.items())))

    def __repr__(self):
        n = len(self.coeffs)
        return f"HomogeneousCochain(degree={self.degree}, weight={self.weight}, nnz={n})"

    def to_json(self):
        items = sorted(self.coeffs.items())
        return {"degree": self.degree, "weight": self.weight,
                "coeffs": [[list(k), str(v)] for k, v in items]}

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        coeffs = {tuple(k): Fraction(v) for k, v in doc["coeffs"]}
        return cls(doc["degree"], doc["weight"], coeffs)


def legal_keys(degree, weight, N):
    """All legal key tuples with max index <= N, in lexicographic order."""
    if degree == 0:
        return [()] if weight >= 1 else []
    return [key for key in combinations(range(1, N + 1), degree)
            if sum(key) + weight >= 1]


def differential_row(alg, degree, weight, T):
    """The differential evaluated at tuple T as a linear form on coefficients.

    Returns {key: coefficient} such that (d w)(T) = sum coeff * w[key] for any
    weight-``weight`` cochain w of the given degree, or None when the target
    index of T is below 1 (no equation).  This single primitive backs both
    the concrete differential and the assembly of truncated linear systems.
    """
    target = sum(T) + weight
    if target < 1:
        return None
    row = {}

    def add(indices, coeff):
        if not coeff:
            return
        key, sign = sort_with_sign(indices)
        if sign == 0 or sum(key) + weight < 1:
            return
        v = row.get(key, _ZERO) + sign * coeff
        if v:
            row[key] = v
        else:
            row.pop(key, None)

    if degree == 0:
        if weight < 1:
            return {}
        (i,) = T
        add((), alg.bracket_coeff(weight, i))
    elif degree == 1:
        i, j = T
        add((i + j,), alg.bracket_coeff(i, j))
        if j + weight >= 1:
            add((j,), -alg.bracket_coeff(i, j + weight))
        if i + weight >= 1:
            add((i,), alg.bracket_coeff(j, i + weight))
    elif degree == 2:
        i, j, k = T
        for (a, b), c in (((i, j), k), ((j, k), i), ((k, i), j)):
            sgn = 1 if a < b else -1
            lo, hi = (a, b) if a < b else (b, a)
            cab = alg.bracket_coeff(lo, hi)
            if cab:
                add((lo + hi, c), sgn * cab)
        for x, (a, b) in ((i, (j, k)), (j, (k, i)), (k, (i, j))):
            if a + b + weight >= 1:
                add((a, b), -alg.bracket_coeff(x, a + b + weight))
    else:
        raise UsageError("the differential is not provided in degree 3 and above")
    return row


def differential(alg, coch, N):
    """d(coch) with output keys confined to max index <= N.

    Exact for finitely supported data; for window truncations only the
    interior of the output window is trustworthy.
    """
    if coch.degree >= 3:
        raise UsageError("the differential is not provided in degree 3 and above")
    out = {}
    for T in legal_keys(coch.degree + 1, coch.weight, N):
        row = differential_row(alg, coch.degree, coch.weight, T)
        if not row:
            continue
        val = _ZERO
        for key, c in row.items():
            a = coch.coeffs.get(key)
            if a is not None:
                val += c * a
        if val:
            out[T] = val
    return HomogeneousCochain(coch.degree + 1, coch.weight, out,
                              window=coch.window if coch.window is not None else N)


def _split_sign(S, R):
    """Sign of the shuffle putting the concatenation (S, R) into sorted order;
    S and R are individually sorted and disjoint."""
    inv = 0
    for s in S:
        for r in R:
            if r < s:
                inv += 1
    return -1 if inv % 2 else 1


def _compose(a, b):
    """The insertion composition a o b: sum over shuffles of b into the first
    slot of a.  Degree p+q-1, weight sum; exact on the stored data."""
    p, q = a.degree, b.degree
    out = {}
    for kb, vb in b.coeffs.items():
        m = sum(kb) + b.weight
        if m < 1:
            continue
        for ka, va in a.coeffs.items():
            if m not in ka:
                continue
            pos = ka.index(m)
            rest = ka[:pos] + ka[pos + 1:]
            if set(rest) & set(kb):
                continue
            T = tuple(sorted(rest + kb))
            sign = (-1) ** pos * _split_sign(kb, rest)
            v = out.get(T, _ZERO) + sign * va * vb
            if v:
                out[T] = v
            else:
                out.pop(T, None)
    wins = [w for w in (a.window, b.window) if w is not None]
    return HomogeneousCochain(p + q - 1, a.weight + b.weight, out,
                              window=min(wins) if wins else None)


def nr_bracket(a, b):
    """Graded bracket [a, b] = a o b - (-1)^{(p-1)(q-1)} b o a on cochains.

    On degree-1 pairs this is the commutator a(b(x)) - b(a(x)); on degree-2
    pairs the sign is +, so the bracket is symmetric there.
    """
    p, q = a.degree, b.degree
    if p + q - 1 > 3:
        raise UsageError(f"bracket of degrees {p} and {q} lands in degree {p + q - 1} > 3")
    if p + q - 1 < 0:
        raise UsageError("bracket needs at least one positive-degree argument")
    ab = _compose(a, b)
    ba = _compose(b, a)
    sign = (-1) ** ((p - 1) * (q - 1))
    return ab - ba.scale(sign)


def massey_term(a, b):
    """Symmetrised obstruction bilinear form on 2-cochains:
    (i,j,k) -> a(b(e_i,e_j),e_k) + b(a(e_i,e_j),e_k) + cyclic.

    Coincides with the graded bracket [a, b] in degree (2, 2); kept as its
    own operation so the deformation equation has no sign ambiguity.
    """
    if a.degree != 2 or b.degree != 2:
        raise UsageError("massey_term is defined for pairs of 2-cochains")
    return _compose(a, b) + _compose(b, a)


def massey_square(w):
    """Half the diagonal of massey_term: (i,j,k) -> w(w(e_i,e_j),e_k) + cyclic."""
    return massey_term(w, w).scale(Fraction(1, 2))


def _pair_ref(coch, x, y):
    """Signed coefficient of coch at (e_x, e_y) with trust tracking.

    Returns (value, trusted).  Beyond the cochain's window a coefficient is
    unknown unless a row bound certifies it zero.
    """
    if x == y:
        return _ZERO, True
    sign = 1
    if x > y:
        x, y, sign = y, x, -1
    if x + y + coch.weight < 1:
        return _ZERO, True
    if coch.window is None or y <= coch.window:
        return sign * coch.coeffs.get((x, y), _ZERO), True
    if coch.row_bound is not None and x > coch.row_bound:
        return _ZERO, True
    return _ZERO, False


def massey_rhs_window(a, b, N):
    """massey_term(a, b) evaluated on all triples with max index <= N,
    tracking which values are exactly determined by the stored windows.

    Returns (values, trusted): values maps trusted triples to their exact,
    possibly zero, coefficients; trusted is the set of those triples.
    Untrusted triples referenced a coefficient beyond a window.
    """
    weight = a.weight + b.weight
    values = {}
    trusted = set()
    for T in legal_keys(3, weight, N):
        i, j, k = T
        total = _ZERO
        ok = True
        for outer, inner in ((a, b), (b, a)):
            for (x, y), z in (((i, j), k), ((j, k), i), ((k, i), j)):
                v_in, t_in = _pair_ref(inner, x, y)
                if not t_in:
                    ok = False
                    break
                if not v_in:
                    continue
                m = x + y + inner.weight
                v_out, t_out = _pair_ref(outer, m, z)
                if not t_out:
                    ok = False
                    break
                total += v_out * v_in
            if not ok:
                break
        if ok:
            trusted.add(T)
            if total:
                values[T] = total
    return values, trusted


def massey_square_window(w, N):
    """Trusted window evaluation of massey_square(w)."""
    values, trusted = massey_rhs_window(w, w, N)
    return {T: v / 2 for T, v in values.items()}, trusted
