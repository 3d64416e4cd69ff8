"""Order-by-order deformation prolongation and the obstruction calculus.

A deformed bracket [.,.]_t = [.,.] + sum_k t^k alpha_k satisfies the Jacobi
identity iff for every order k

    d(alpha_k) + R_k = 0,   R_k = 1/2 sum_{i+j=k, i,j>=1} massey_term(alpha_i, alpha_j),

with alpha_1 the leading 2-cocycle.  At order 2 this is exactly
d(alpha_2) = -massey_square(alpha_1).  prolong() solves these equations
order by order inside the window, imposing an equation at a triple only
when the right-hand side is exactly determined by the stored data (trust
tracking from the cochain layer) and the left-hand side references no
coefficient beyond the window.

Two solver gauges are exposed.  The default solves over all window
coefficients and returns the deterministic particular solution.  The
column-restricted gauge reproduces the published construction: corrections
are drawn from the 2- and 3-columns only and the order-k relation is imposed
on the equation subset that construction tracks (triples with smallest index
2); it is a reproduction gauge, not a full-Jacobi gauge, and the residual
bookkeeping records which equation set was used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exactla
from .algebra import BracketTable, abelian_ideal_floor, preset, verify_jacobi
from .cochain import (HomogeneousCochain, differential_row, legal_keys,
                      massey_rhs_window, massey_square_window)
from .cohomology import (DEFAULT_WINDOW, TruncationWindow, assembled_system,
                         cohomology, family)
from .errors import NotACocycleError, UnstableError, UsageError

_ZERO = Fraction(0)

TRUE_FINITE = "true_finite"
FORMAL = "formal"
OBSTRUCTED = "obstructed"


@dataclass
class DeformationSeries:
    """Ordered corrections alpha_1..alpha_K with per-order obstruction record.

    The formal parameter t multiplies alpha_k by t^k in the deformed bracket
    [.,.]_t = [.,.] + sum t^k alpha_k.  status true_finite means corrections
    vanish beyond finite_order and the order relations were verified far
    enough (order 2*finite_order) to hold at every order; formal means
    nonzero corrections persisted to the verified order; obstructed carries
    the first non-compensable residual.
    """
    algebra: str
    weight: int
    corrections: list
    status: str
    window: object
    mode: str = "full"
    finite_order: int | None = None
    verified_to: int = 0
    residual_counts: list = field(default_factory=list)
    obstruction: tuple | None = None  # (order, residual 3-cochain)

    PARAMETER_NOTE = ("the formal parameter t multiplies the order-k correction "
                      "by t^k in the deformed bracket")

    def correction(self, k):
        return self.corrections[k - 1]

    def to_json(self):
        doc = {
            "algebra": self.algebra,
            "weight": self.weight,
            "status": self.status,
            "mode": self.mode,
            "finite_order": self.finite_order,
            "verified_to": self.verified_to,
            "parameter_note": self.PARAMETER_NOTE,
            "corrections": [c.to_json() for c in self.corrections],
            "residual_nonzero_counts": list(self.residual_counts),
        }
        if self.obstruction is not None:
            order, res = self.obstruction
            doc["obstruction"] = {"order": order, "residual": res.to_json()}
        else:
            doc["obstruction"] = None
        return doc


def _order_rhs(corrections, k, cutoff):
    """R_k values and the set of triples where they are exactly determined.

    Pairs reaching beyond the stored corrections contribute nothing: they
    only arise in the finite-series check, where the higher corrections are
    zero by construction.
    """
    values = {}
    trusted = None
    for i in range(1, k):
        j = k - i
        if i > j:
            break
        if j > len(corrections):
            continue
        vals, trust = massey_rhs_window(corrections[i - 1], corrections[j - 1], cutoff)
        if i == j:
            vals = {T: v / 2 for T, v in vals.items()}
        for T, v in vals.items():
            t = values.get(T, _ZERO) + v
            if t:
                values[T] = t
            else:
                values.pop(T, None)
        trusted = trust if trusted is None else (trusted & trust)
    return values, (trusted or set())


def _correction_system(alg, weight_out, cutoff, columns):
    """Unknown 2-keys and safe differential rows for one prolongation order."""
    keys = [key for key in legal_keys(2, weight_out, cutoff)
            if columns is None or key[0] in columns]
    kidx = {key: i for i, key in enumerate(keys)}
    rows = {}
    for T in legal_keys(3, weight_out, cutoff):
        if columns is not None and T[0] != 2:
            continue
        row = differential_row(alg, 2, weight_out, T)
        if row is None:
            continue
        safe = {}
        drop = False
        for key, coeff in row.items():
            if columns is not None and key[0] not in columns:
                continue  # pinned to zero by the gauge ansatz
            if key[-1] > cutoff:
                drop = True  # references a coefficient beyond the window
                break
            safe[kidx[key]] = coeff
        if not drop:
            rows[T] = safe
    return keys, kidx, rows


def prolong(alg, leading, max_order, window=DEFAULT_WINDOW, columns=None,
            shrink=None):
    """Prolong a 2-cocycle order by order up to max_order.

    columns=None solves each order over every window coefficient and stores
    the correction truncated to a trust horizon that retreats by ``shrink``
    (default: the window margin) per order: the particular solution of a
    truncated order is under-determined near its own boundary, and feeding
    those arbitrary tail values into the next right-hand side manufactures
    spurious obstructions.  columns=(2, 3) is the column-restricted
    reproduction gauge, whose corrections are fully pinned and need no
    retreat.  Raises UsageError when the leading term is not a window
    cocycle or the window cannot support the requested order.
    """
    if leading.degree != 2:
        raise UsageError("deformation leading terms are 2-cochains")
    if max_order < 1:
        raise UsageError("max_order must be >= 1")
    N = window.cutoff
    weight = leading.weight
    sys = assembled_system(alg, 2, weight, N)
    bad = sys.first_failing_row(leading)
    if bad is not None:
        raise UsageError(
            f"leading term is not a cocycle: equation at {bad[0]} has residual {bad[1]}")
    if weight > 0:
        max_order = min(max_order, max(1, (N - 3) // weight))
    if shrink is None:
        shrink = window.margin
    mode = "full" if columns is None else f"columns_{''.join(map(str, columns))}"
    horizon = leading.window if leading.window is not None else N
    corrections = [leading]
    residual_counts = [0]
    for k in range(2, max_order + 1):
        w_out = k * weight
        if columns is None:
            horizon -= shrink
            if horizon <= window.margin + 3:
                raise UsageError(
                    f"window cutoff {N} cannot support order {k}: trust horizon "
                    f"exhausted (raise the cutoff or lower max_order)")
        rhs_values, trusted = _order_rhs(corrections, k, N)
        keys, kidx, rows = _correction_system(alg, w_out, N, columns)
        eq_rows = []
        eq_rhs = {}
        for T, lhs in rows.items():
            if T not in trusted:
                continue
            rv = -rhs_values.get(T, _ZERO)
            if not lhs and not rv:
                continue
            eq_rows.append(lhs)
            if rv:
                eq_rhs[len(eq_rows) - 1] = rv
        M = exactla.SparseMatrix.from_rows(len(keys), eq_rows)
        x = exactla.solve(M, eq_rhs)
        if x is None:
            residual = HomogeneousCochain(3, w_out, rhs_values, window=N)
            return DeformationSeries(
                alg.name, weight, corrections, OBSTRUCTED, window, mode,
                verified_to=k - 1, residual_counts=residual_counts,
                obstruction=(k, residual))
        residual_counts.append(_residual_count(eq_rows, eq_rhs, x))
        coeffs = {keys[c]: v for c, v in enumerate(x) if v}
        if columns is None:
            coeffs = {key: v for key, v in coeffs.items() if key[-1] <= horizon}
            alpha = HomogeneousCochain(2, w_out, coeffs, window=horizon)
        else:
            alpha = HomogeneousCochain(2, w_out, coeffs, window=N,
                                       row_bound=max(columns))
        corrections.append(alpha)
    return _finalise(alg, weight, corrections, max_order, window, mode,
                     residual_counts)


def _residual_count(rows, rhs, x):
    bad = 0
    for rn, row in enumerate(rows):
        val = sum((coeff * x[c] for c, coeff in row.items()), _ZERO)
        if val != rhs.get(rn, _ZERO):
            bad += 1
    return bad


def _finalise(alg, weight, corrections, max_order, window, mode, residual_counts):
    k0 = max((k for k, c in enumerate(corrections, start=1) if not c.is_zero()),
             default=0)
    if k0 < max_order:
        # candidate finite series: all residuals beyond the verified range must
        # vanish identically, which only needs checking up to order 2*k0
        finite = True
        for k in range(max_order + 1, 2 * k0 + 1):
            values, _ = _order_rhs(corrections, k, window.cutoff)
            if any(values.values()):
                finite = False
                break
        if finite:
            return DeformationSeries(
                alg.name, weight, corrections, TRUE_FINITE, window, mode,
                finite_order=k0, verified_to=max(max_order, 2 * k0),
                residual_counts=residual_counts)
    return DeformationSeries(
        alg.name, weight, corrections, FORMAL, window, mode,
        verified_to=max_order, residual_counts=residual_counts)


@dataclass
class ObstructionReport:
    """Nonzero Massey-square components of a cocycle, interior of the window
    only, plus the coboundary-membership verdict for the total square."""
    algebra: str
    weight: int
    triples: list  # lexicographically ordered (i, j, k) with nonzero component
    values: dict
    square_is_coboundary: bool
    trusted_max: int

    def to_json(self):
        return {
            "algebra": self.algebra,
            "weight": self.weight,
            "triples": [list(T) for T in self.triples],
            "values": [[list(T), str(v)] for T, v in sorted(self.values.items())],
            "square_is_coboundary": self.square_is_coboundary,
            "trusted_max": self.trusted_max,
        }


def obstruction_report(alg, leading, window=DEFAULT_WINDOW):
    """Massey-square survey for one cocycle: which M_{ijk} are nonzero, and
    whether the square as a whole is compensable by a coboundary."""
    if leading.degree != 2:
        raise UsageError("obstruction reports are for 2-cochains")
    N = window.cutoff
    sys = assembled_system(alg, 2, leading.weight, N)
    bad = sys.first_failing_row(leading)
    if bad is not None:
        raise UsageError(
            f"input is not a cocycle: equation at {bad[0]} has residual {bad[1]}")
    values, trusted = massey_square_window(leading, N)
    interior_max = N - window.margin
    inner = {T: v for T, v in values.items()
             if T in trusted and T[-1] <= interior_max}
    triples = sorted(inner)
    w_out = 2 * leading.weight
    keys, kidx, rows = _correction_system(alg, w_out, N, None)
    eq_rows = []
    eq_rhs = {}
    for T, lhs in rows.items():
        if T not in trusted:
            continue
        rv = values.get(T, _ZERO)
        if not lhs and not rv:
            continue
        eq_rows.append(lhs)
        if rv:
            eq_rhs[len(eq_rows) - 1] = rv
    M = exactla.SparseMatrix.from_rows(len(keys), eq_rows)
    member = exactla.solve(M, eq_rhs) is not None
    return ObstructionReport(alg.name, leading.weight, triples, inner,
                             member, interior_max)


def classify_weight(alg, weight, window=DEFAULT_WINDOW, max_order=8):
    """Prolongation status for every cohomology class in one weight.

    Runs prolong on each stable representative and on whichever of the
    distinguished families exist in this weight.  Propagates instability.
    """
    report = cohomology(alg, 2, weight, window)
    if not report.stable:
        raise UnstableError(
            f"H^2 in weight {weight} did not stabilise at cutoff {window.cutoff}")
    entries = []
    rep_window = TruncationWindow(window.cutoff - window.margin,
                                  window.stability_delta, window.margin)
    for n, rep in enumerate(report.representatives, start=1):
        series = prolong(alg, rep, max_order, rep_window)
        entries.append((f"representative-{n}", series))
    for m in (2, 3, 4):
        try:
            fam = family(alg, m, weight, window)
        except NotACocycleError:
            continue
        series = prolong(alg, fam, max_order, window)
        entries.append((f"family-{m}", series))
    return report, entries


def deformation_table(alg, corrections, t, N):
    """Bracket table of [.,.] + sum t^k alpha_k on pairs <= N."""
    t = Fraction(t)
    table = {}
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            comps = {}
            base = alg.bracket_coeff(i, j)
            if base:
                comps[i + j] = base
            scale = Fraction(1)
            for alpha in corrections:
                scale *= t
                v = alpha.coeffs.get((i, j))
                if v:
                    target = i + j + alpha.weight
                    comps[target] = comps.get(target, _ZERO) + scale * v
            comps = {m: v for m, v in comps.items() if v}
            if comps:
                table[(i, j)] = comps
    return BracketTable(f"{alg.name}-deformed", N, table)


def deformed_algebra(alg, series, t, N):
    """Evaluate a finite deformation at an exact parameter value.

    Only true_finite series evaluate; the resulting table must pass the
    truncated Jacobi scan exactly.
    """
    if series.status != TRUE_FINITE:
        raise UsageError("formal deformations do not evaluate")
    table = deformation_table(alg, series.corrections, t, N)
    report = verify_jacobi(table, N)
    if not report.ok:
        raise AssertionError(
            f"finite deformation violates Jacobi at {report.failure}: {report.residual}")
    return table, report


@dataclass
class NonconvergenceWitness:
    """Finite-window witness separating the order-1 weight-0 deformation from
    the straight-line algebra it would have to converge to.

    The deformed table keeps an abelian ideal of codimension 3 inside the
    window while the graded Witt positive part admits none; this witnesses
    the published dichotomy, it does not prove non-convergence by itself.
    """
    cutoff: int
    deformed_floor: int | None
    deformed_codimension: int | None
    base_floor: int | None
    l1_floor: int | None

    def to_json(self):
        return {
            "cutoff": self.cutoff,
            "deformed_floor": self.deformed_floor,
            "deformed_codimension": self.deformed_codimension,
            "base_floor": self.base_floor,
            "l1_floor": self.l1_floor,
        }


def nonconvergence_witness(window=DEFAULT_WINDOW):
    """Compare abelian-ideal floors: order-1 weight-0 deformation of m2 at
    t = 1 versus the base algebra and L1, all inside one window."""
    N = window.cutoff
    m2 = preset("m2")
    fam3 = family(m2, 3, 0, window)
    table = deformation_table(m2, [fam3], 1, N)
    deformed = abelian_ideal_floor(table, N)
    base = abelian_ideal_floor(m2, N)
    l1 = abelian_ideal_floor(preset("L1"), N)
    codim = deformed - 1 if deformed is not None else None
    return NonconvergenceWitness(N, deformed, codim, base, l1)
