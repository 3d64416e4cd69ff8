"""Weight-graded cocycle and coboundary spaces by exact finite truncation.

For a weight l and degree p the unknowns are the legal coefficient keys with
max index <= N; the imposed equations are exactly those evaluations of the
degree-(p+1) differential whose every referenced coefficient lies inside the
window, so no equation ever constrains an absent unknown.

Truncated kernels acquire spurious solutions supported near the cutoff (keys
such as (N-1, N) end up referenced by no safe equation at all), and window
coboundaries likewise diverge from restrictions of true coboundaries near N.
All reported dimensions are therefore ranks of the spaces restricted to the
window interior (max index <= N - margin), where both effects die off; the
dimensions are additionally required to agree at cutoffs N and N + delta,
and representatives to agree on the common interior, before a report is
marked stable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import exactla
from .cochain import HomogeneousCochain, differential_row, legal_keys, nr_bracket
from .errors import NotACocycleError, UsageError

_ZERO = Fraction(0)


@dataclass(frozen=True)
class TruncationWindow:
    """Cutoff N, stability delta and interior margin for truncated systems."""
    cutoff: int
    stability_delta: int = 5
    margin: int = 5

    def __post_init__(self):
        if self.stability_delta < 1:
            raise UsageError("stability delta must be >= 1")
        if self.margin < 1:
            raise UsageError("margin must be >= 1")
        if self.cutoff <= self.margin + 3:
            raise UsageError("cutoff must exceed margin + 3")

    def bumped(self, steps=1):
        return TruncationWindow(self.cutoff + steps * self.stability_delta,
                                self.stability_delta, self.margin)


DEFAULT_WINDOW = TruncationWindow(60)


class AssembledSystem:
    """Truncated cocycle system: ordered unknown keys plus safe equation rows."""

    def __init__(self, alg, degree, weight, cutoff):
        self.alg = alg
        self.degree = degree
        self.weight = weight
        self.cutoff = cutoff
        self.keys = legal_keys(degree, weight, cutoff)
        self.kidx = {k: i for i, k in enumerate(self.keys)}
        self.rows = []
        self.row_tuples = []
        seen = set()
        for T in legal_keys(degree + 1, weight, cutoff):
            row = differential_row(alg, degree, weight, T)
            if not row:
                continue
            if any(key not in self.kidx for key in row):
                continue  # references a coefficient beyond the window
            token = tuple(sorted((self.kidx[k], v) for k, v in row.items()))
            if token in seen:
                continue
            seen.add(token)
            self.rows.append({self.kidx[k]: v for k, v in row.items()})
            self.row_tuples.append(T)
        self.matrix = exactla.SparseMatrix.from_rows(len(self.keys), self.rows)
        self._col_rows = None

    def vector(self, coch):
        """Window coordinate vector of a cochain, as {column: value}."""
        return {self.kidx[k]: v for k, v in coch.coeffs.items() if k in self.kidx}

    def first_failing_row(self, coch):
        """First imposed equation a cochain violates, or None if it passes all."""
        vec = self.vector(coch)
        if self._col_rows is None:
            self._col_rows = {}
            for rn, row in enumerate(self.rows):
                for c in row:
                    self._col_rows.setdefault(c, []).append(rn)
        hits = sorted({rn for c in vec for rn in self._col_rows.get(c, ())})
        for rn in hits:
            val = _ZERO
            for c, coeff in self.rows[rn].items():
                v = vec.get(c)
                if v is not None:
                    val += coeff * v
            if val:
                return self.row_tuples[rn], val
        return None

    def interior_keys(self, margin):
        return [k for k in self.keys if (k[-1] if k else 0) <= self.cutoff - margin]


_SYSTEM_CACHE = {}


def assembled_system(alg, degree, weight, cutoff):
    key = (alg.cache_key, degree, weight, cutoff)
    sys = _SYSTEM_CACHE.get(key)
    if sys is None:
        sys = _SYSTEM_CACHE[key] = AssembledSystem(alg, degree, weight, cutoff)
    return sys


def cocycle_basis(alg, degree, weight, window):
    """Canonical basis of the truncated cocycle space Z^p_l(N).

    The raw window kernel: near the cutoff it contains tail solutions that
    do not extend to true cocycles; dimension counts belong to cohomology().
    """
    if degree not in (1, 2):
        raise UsageError("cocycle systems are assembled for degrees 1 and 2")
    sys = assembled_system(alg, degree, weight, window.cutoff)
    basis = exactla.kernel_basis(sys.matrix)
    out = []
    for vec in basis:
        coeffs = {sys.keys[c]: v for c, v in enumerate(vec) if v}
        out.append(HomogeneousCochain(degree, weight, coeffs, window=window.cutoff))
    return out


def coboundary_generators(alg, degree, weight, cutoff):
    """Images d(delta_K) of the basis (p-1)-cochains, as key-dict vectors."""
    gens = {K: {} for K in legal_keys(degree - 1, weight, cutoff)}
    for T in legal_keys(degree, weight, cutoff):
        row = differential_row(alg, degree - 1, weight, T)
        if not row:
            continue
        for key, coeff in row.items():
            if key in gens:
                gens[key][T] = coeff
    return [gens[K] for K in sorted(gens)]


def coboundary_basis(alg, degree, weight, window):
    """Canonical basis of the truncated coboundary space B^p_l(N).

    Every basis vector is checked against the assembled cocycle equations,
    so B <= Z holds exactly by construction.
    """
    if degree not in (1, 2):
        raise UsageError("coboundary systems are assembled for degrees 1 and 2")
    sys = assembled_system(alg, degree, weight, window.cutoff)
    gens = coboundary_generators(alg, degree, weight, window.cutoff)
    reduced = exactla.reduced_span(gens)
    out = []
    for vec in reduced:
        coch = HomogeneousCochain(degree, weight, vec, window=window.cutoff)
        bad = sys.first_failing_row(coch)
        if bad is not None:
            raise AssertionError(
                f"coboundary violates cocycle equation at {bad[0]}: residual {bad[1]}")
        out.append(coch)
    return out


@dataclass
class CohomologyReport:
    """Dimensions and representatives for one (degree, weight).

    dim_Z, dim_B and dim_H are interior ranks: the truncated spaces restricted
    to keys with max index <= N - margin, which is where window artifacts
    vanish.  Representatives are supported on the interior, normalised with
    lexicographically first coefficient 1, and reduced against the interior
    coboundary span (which in particular zeroes the 1-column wherever the
    coboundary equations permit).
    """
    algebra: str
    degree: int
    weight: int
    window: TruncationWindow
    dim_Z: int
    dim_B: int
    dim_H: int
    representatives: list
    stable: bool
    retried: bool = False

    def to_json(self):
        return {
            "algebra": self.algebra,
            "degree": self.degree,
            "weight": self.weight,
            "window": {"cutoff": self.window.cutoff,
                       "stability_delta": self.window.stability_delta,
                       "margin": self.window.margin},
            "dim_Z": self.dim_Z,
            "dim_B": self.dim_B,
            "dim_H": self.dim_H,
            "stable": self.stable,
            "retried": self.retried,
            "representatives": [r.to_json() for r in self.representatives],
        }


def _single_cutoff(alg, degree, weight, cutoff, margin):
    """dims and canonical representatives at one cutoff."""
    sys = assembled_system(alg, degree, weight, cutoff)
    kernel = exactla.kernel_basis(sys.matrix)
    kernel_vecs = [{sys.keys[c]: v for c, v in enumerate(vec) if v} for vec in kernel]
    bgens = coboundary_generators(alg, degree, weight, cutoff)
    interior = set(sys.interior_keys(margin))

    def restrict(vec):
        return {k: v for k, v in vec.items() if k in interior}

    z_int = [restrict(v) for v in kernel_vecs]
    b_int = [restrict(v) for v in bgens]
    dim_z = exactla.span_rank(z_int)
    dim_b = exactla.span_rank(b_int)
    b_rref = exactla.reduced_span(b_int)
    residues = []
    for vec in z_int:
        r = exactla.reduce_mod_span(vec, b_rref)
        if r:
            residues.append(r)
    reps = exactla.reduced_span(residues)
    if len(reps) != dim_z - dim_b:
        raise AssertionError("representative count disagrees with interior ranks")
    return dim_z, dim_b, reps


def _reps_to_cochains(reps, degree, weight, interior_cutoff):
    return [HomogeneousCochain(degree, weight, r, window=interior_cutoff) for r in reps]


def cohomology(alg, degree, weight, window=DEFAULT_WINDOW):
    """CohomologyReport for H^p_l at the given window.

    Dimensions are computed at N and N + delta and must agree, and the
    representatives must agree on the common interior; a failed comparison
    triggers one automatic retry at cutoffs N + delta and N + 2 delta before
    the report is marked unstable.
    """
    if degree not in (1, 2):
        raise UsageError("cohomology reports cover degrees 1 and 2")
    margin = window.margin
    attempts = [(window, window.bumped())]
    retried = False
    for attempt, (w_lo, w_hi) in enumerate(attempts):
        lo = _single_cutoff(alg, degree, weight, w_lo.cutoff, margin)
        hi = _single_cutoff(alg, degree, weight, w_hi.cutoff, margin)
        if _cutoffs_agree(lo, hi, w_lo.cutoff - 2 * margin):
            reps = _reps_to_cochains(lo[2], degree, weight, w_lo.cutoff - margin)
            return CohomologyReport(alg.name, degree, weight, w_lo,
                                    lo[0], lo[1], lo[0] - lo[1], reps,
                                    stable=True, retried=retried)
        if attempt == 0:
            retried = True
            attempts.append((window.bumped(), window.bumped(2)))
    reps = _reps_to_cochains(lo[2], degree, weight, w_lo.cutoff - margin)
    return CohomologyReport(alg.name, degree, weight, w_lo,
                            lo[0], lo[1], lo[0] - lo[1], reps,
                            stable=False, retried=retried)


def _cutoffs_agree(lo, hi, common_max):
    """Same interior cohomology dimension at both cutoffs, and representative
    normal forms that agree on the doubly-interior zone.

    The outermost few interior keys of the smaller window are themselves
    reduced against a slightly poorer coboundary span (generators just past
    its cutoff are missing), so representative values within bracket reach of
    the interior edge legitimately differ; comparing one margin deeper makes
    the check depend on stabilisation alone.
    """
    if (lo[0] - lo[1]) != (hi[0] - hi[1]):
        return False
    reps_lo, reps_hi = lo[2], hi[2]
    if len(reps_lo) != len(reps_hi):
        return False
    for a, b in zip(reps_lo, reps_hi):
        at = {k: v for k, v in a.items() if k[-1] <= common_max}
        bt = {k: v for k, v in b.items() if k[-1] <= common_max}
        if at != bt:
            return False
    return True


def is_coboundary(alg, coch, window=DEFAULT_WINDOW):
    """Preimage x with d(x) = coch over window cochains, or None.

    The input must pass the window cocycle equations (checked; the first
    failing equation is reported otherwise).  For window-truncated input the
    solve is restricted to equations whose references stay inside the window;
    exact finite input is solved against every window equation and the
    preimage is verified by applying the differential.
    """
    p = coch.degree
    if p not in (1, 2):
        raise UsageError("coboundary solving is provided for degrees 1 and 2")
    N = window.cutoff
    sys = assembled_system(alg, p, coch.weight, N)
    bad = sys.first_failing_row(coch)
    if bad is not None:
        raise UsageError(
            f"input is not a cocycle: equation at {bad[0]} has residual {bad[1]}")
    unknowns = legal_keys(p - 1, coch.weight, N)
    uidx = {k: i for i, k in enumerate(unknowns)}
    ref_safe = coch.window is not None
    rows = []
    rhs = {}
    for T in legal_keys(p, coch.weight, N):
        row = differential_row(alg, p - 1, coch.weight, T)
        if row is None:
            continue
        if ref_safe and any(key not in uidx for key in row):
            continue
        filtered = {uidx[k]: v for k, v in row.items() if k in uidx}
        rhs_val = coch.coeffs.get(T, _ZERO)
        if not filtered and not rhs_val:
            continue
        rows.append(filtered)
        rhs[len(rows) - 1] = rhs_val
    M = exactla.SparseMatrix.from_rows(len(unknowns), rows)
    x = exactla.solve(M, rhs)
    if x is None:
        return None
    coeffs = {unknowns[c]: v for c, v in enumerate(x) if v}
    pre = HomogeneousCochain(p - 1, coch.weight, coeffs,
                             window=N if ref_safe else None)
    return pre


def family(alg, m, weight, window=DEFAULT_WINDOW):
    """The m-family 2-cocycle in the given weight: m-column constantly 1,
    nothing above the m-column, lower columns forced by the cocycle equations.

    The residual gauge freedom (adding lower families or 1-column cocycles)
    is fixed deterministically: the whole 1-column is zero, and the leading
    entry of each lower column that generates a family of its own is zeroed
    (a_{2,3} for the 3-family, a_{3,4} for the 4-family).  Raises
    NotACocycleError when no such cocycle exists in this weight.
    """
    if m not in (2, 3, 4):
        raise UsageError("families are provided for m in {2, 3, 4}")
    N = window.cutoff
    sys = assembled_system(alg, 2, weight, N)
    rows = [dict(r) for r in sys.rows]
    rhs = {}
    ones = [k for k in sys.keys if k[0] == m and k[1] > m]
    if not ones:
        raise NotACocycleError(f"no legal {m}-column keys in weight {weight}")

    def constrain(key, value):
        rows.append({sys.kidx[key]: Fraction(1)})
        if value:
            rhs[len(rows) - 1] = Fraction(value)

    for key in ones:
        constrain(key, 1)
    for key in sys.keys:
        if key[0] > m:
            constrain(key, 0)
        elif key[0] == 1:
            constrain(key, 0)
    if m == 3 and (2, 3) in sys.kidx:
        constrain((2, 3), 0)
    if m == 4 and (3, 4) in sys.kidx:
        constrain((3, 4), 0)
    M = exactla.SparseMatrix.from_rows(len(sys.keys), rows)
    x = exactla.solve(M, rhs)
    if x is None:
        raise NotACocycleError(
            f"the {m}-family is not a cocycle in weight {weight} for {alg.name}")
    coeffs = {sys.keys[c]: v for c, v in enumerate(x) if v}
    return HomogeneousCochain(2, weight, coeffs, window=N, row_bound=m)


def h1_generators(weight, cutoff=DEFAULT_WINDOW.cutoff):
    """The canonical weight-l degree-1 representative, or None.

    weight 0: the grading map e_k -> k e_k.  weight 2: e_1 -> 0, e_k -> e_{k+2}.
    weight l >= 3: e_1 -> -1/2 e_{l+1}, e_2 -> 1/2 e_{l+2}, e_k -> e_{k+l}.
    Nothing in weight 1 or below 0.
    """
    if weight == 0:
        coeffs = {(k,): Fraction(k) for k in range(1, cutoff + 1)}
    elif weight == 2:
        coeffs = {(k,): Fraction(1) for k in range(2, cutoff + 1)}
    elif weight >= 3:
        coeffs = {(1,): Fraction(-1, 2), (2,): Fraction(1, 2)}
        coeffs.update({(k,): Fraction(1) for k in range(3, cutoff + 1)})
    else:
        return None
    return HomogeneousCochain(1, weight, coeffs, window=cutoff)


def d0_image(alg, weight, cutoff):
    """d(e_l) = [e_l, -] as a weight-l 1-cochain, or None when l < 1."""
    if weight < 1:
        return None
    coeffs = {}
    for i in range(1, cutoff + 1):
        if i + weight < 1:
            continue
        c = alg.bracket_coeff(weight, i)
        if c:
            coeffs[(i,)] = c
    return HomogeneousCochain(1, weight, coeffs, window=cutoff)


def h1_bracket(alg, l1, l2, window=DEFAULT_WINDOW):
    """[generator_{l1}, generator_{l2}] as a multiple of the weight-(l1+l2)
    generator in cohomology; returns the exact rational coefficient.

    The cochain bracket is reduced modulo coboundaries by solving inside the
    zone where the truncated generators are exact.
    """
    N = window.cutoff
    g1 = h1_generators(l1, N)
    g2 = h1_generators(l2, N)
    if g1 is None or g2 is None:
        raise UsageError(f"no generators exist in weights {l1} and {l2}")
    br = nr_bracket(g1, g2)
    valid_to = N - max(0, l1, l2)
    br = br.restrict(valid_to)
    L = l1 + l2
    gen = h1_generators(L, valid_to)
    cob = d0_image(alg, L, valid_to)
    columns = []
    if gen is not None:
        columns.append(gen.coeffs)
    if cob is not None:
        columns.append(cob.coeffs)
    keys = legal_keys(1, L, valid_to)
    kidx = {k: i for i, k in enumerate(keys)}
    M = exactla.SparseMatrix.from_columns(
        len(keys), [{kidx[k]: v for k, v in col.items()} for col in columns])
    b = {kidx[k]: v for k, v in br.coeffs.items()}
    x = exactla.solve(M, b)
    if x is None:
        raise UsageError(
            f"bracket of weights ({l1}, {l2}) did not reduce against the "
            f"weight-{L} generator and coboundaries")
    return x[0] if gen is not None else _ZERO


def gauge_fixed_cocycles(alg, degree, weight, window, zero_columns=(1,)):
    """Kernel of the window system with the given columns pinned to zero,
    as key-dict vectors (raw window; restrict to the interior for counts)."""
    sys = assembled_system(alg, degree, weight, window.cutoff)
    rows = [dict(r) for r in sys.rows]
    for key in sys.keys:
        if key[0] in zero_columns:
            rows.append({sys.kidx[key]: Fraction(1)})
    M = exactla.SparseMatrix.from_rows(len(sys.keys), rows)
    basis = exactla.kernel_basis(M)
    return [{sys.keys[c]: v for c, v in enumerate(vec) if v} for vec in basis]


def gauge_fixed_coboundaries(alg, degree, weight, window, zero_columns=(1,)):
    """Span of the coboundaries whose own coefficients vanish on the given
    columns, as key-dict vectors."""
    cutoff = window.cutoff
    pre_keys = legal_keys(degree - 1, weight, cutoff)
    gens = coboundary_generators(alg, degree, weight, cutoff)
    # rows of the map (pre-cochain) -> (forbidden-column values)
    rows = []
    forbidden = [k for k in legal_keys(degree, weight, cutoff) if k[0] in zero_columns]
    fidx = {k: i for i, k in enumerate(forbidden)}
    cols = []
    for gen in gens:
        cols.append({fidx[k]: v for k, v in gen.items() if k in fidx})
    M = exactla.SparseMatrix.from_columns(len(forbidden), cols)
    coeff_basis = exactla.kernel_basis(M)
    out = []
    for vec in coeff_basis:
        total = {}
        for c, lam in enumerate(vec):
            if not lam:
                continue
            for k, v in gens[c].items():
                t = total.get(k, _ZERO) + lam * v
                if t:
                    total[k] = t
                else:
                    total.pop(k, None)
        out.append(total)
    return out
