"""N-graded Lie algebras with one-dimensional homogeneous components.

An algebra is described by a structure-constant rule c(i, j) meaning
[e_i, e_j] = c(i, j) e_{i+j} on the basis e_1, e_2, ...  The rule is never
materialised: truncation happens at the point of use, so the same object
serves every cutoff.  Three presets cover the two-generator classification:

    m0:  [e_1, e_i] = e_{i+1} for i >= 2
    m2:  [e_1, e_i] = e_{i+1} for i >= 2,  [e_2, e_j] = e_{j+2} for j >= 3
    L1:  [e_i, e_j] = (j - i) e_{i+j}

plus user-defined rules loaded from JSON and gated through a Jacobi check.

Deformed brackets of finite deformations are not graded (one pair can hit
several weights), so they are materialised as a BracketTable instead.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError

PRESET_NAMES = ("m0", "m2", "L1")

_DEFAULT_JACOBI_GATE = 50


class GradedLieAlgebra:
    """Structure-constant rule for an N-graded Lie algebra.

    ``rule(i, j)`` must be defined for i < j only; antisymmetry is completed
    here.  ``cache_key`` is a hashable identity used to memoise assembled
    linear systems downstream.
    """

    def __init__(self, name, rule, cache_key=None):
        self.name = name
        self._rule = rule
        self.cache_key = cache_key if cache_key is not None else ("adhoc", id(rule))

    def bracket_coeff(self, i, j):
        """Exact coefficient c(i, j) of [e_i, e_j] = c(i, j) e_{i+j}."""
        if i < 1 or j < 1:
            raise ValueError(f"basis indices start at 1, got ({i}, {j})")
        if i == j:
            return Fraction(0)
        if i < j:
            return Fraction(self._rule(i, j))
        return -Fraction(self._rule(j, i))

    def bracket_components(self, i, j):
        """[e_i, e_j] as a sparse vector {target index: coefficient}."""
        c = self.bracket_coeff(i, j)
        return {i + j: c} if c else {}

    def __repr__(self):
        return f"GradedLieAlgebra({self.name!r})"


def _m0_rule(i, j):
    return 1 if (i == 1 and j >= 2) else 0


def _m2_rule(i, j):
    if i == 1 and j >= 2:
        return 1
    if i == 2 and j >= 3:
        return 1
    return 0


def _l1_rule(i, j):
    return j - i


_PRESETS = {"m0": _m0_rule, "m2": _m2_rule, "L1": _l1_rule}


def preset(name):
    """One of the classified two-generator algebras: m0, m2 or L1."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown algebra preset {name!r}; expected one of {PRESET_NAMES}")
    return GradedLieAlgebra(name, _PRESETS[name], cache_key=("preset", name))


@dataclass(frozen=True)
class JacobiReport:
    """Outcome of a truncated Jacobi scan.  Violations are data, not errors."""
    ok: bool
    failure: tuple | None = None  # first failing (i, j, k)
    residual: Fraction | None = None
    checked: int = 0
    skipped: int = 0  # table algebras only: triples leaving the stored window

    def __bool__(self):
        return self.ok


def verify_jacobi(alg, N):
    """Scan the Jacobi identity over all 1 <= i < j < k <= N.

    For a rule algebra the residual at (i, j, k) is
    c(i,j) c(i+j,k) + c(j,k) c(j+k,i) + c(k,i) c(k+i,j).
    Tables are handled componentwise; triples whose intermediate brackets
    leave the stored window are skipped and counted.
    """
    if N < 3:
        raise ValueError("Jacobi scan needs N >= 3")
    if isinstance(alg, BracketTable):
        return _verify_jacobi_table(alg, N)
    checked = 0
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            cij = alg.bracket_coeff(i, j)
            for k in range(j + 1, N + 1):
                res = (cij * alg.bracket_coeff(i + j, k)
                       + alg.bracket_coeff(j, k) * alg.bracket_coeff(j + k, i)
                       + alg.bracket_coeff(k, i) * alg.bracket_coeff(k + i, j))
                checked += 1
                if res:
                    return JacobiReport(False, (i, j, k), res, checked)
    return JacobiReport(True, checked=checked)


def abelian_ideal_floor(alg, N, lookahead=None):
    """Smallest k such that span{e_k, e_{k+1}, ...} is an abelian ideal, or None.

    Abelian: all brackets among tail elements vanish.  Ideal: every bracket
    [e_i, e_j] with j in the tail has all components of index >= k (automatic
    for graded rules, a real constraint for deformed tables whose components
    can drop below the pair sum).  For rule algebras the scan looks ahead to
    index ``lookahead`` (default 2N) so that a window-sized tail such as
    span{e_N} alone cannot pass vacuously; for tables the stored window is
    the horizon.
    """
    if N < 5:
        raise ValueError("abelian ideal scan needs N >= 5")
    if isinstance(alg, BracketTable):
        reach = alg.cutoff
    else:
        reach = lookahead if lookahead is not None else 2 * N
    for k in range(1, N + 1):
        if _tail_is_abelian_ideal(alg, k, reach):
            return k
    return None


def _tail_is_abelian_ideal(alg, k, reach):
    for j in range(k, reach + 1):
        for i in range(1, j):
            comps = alg.bracket_components(i, j)
            if not comps:
                continue
            if i >= k:
                return False  # tail not abelian
            if any(target < k for target, v in comps.items() if v):
                return False  # not an ideal
    return True


class BracketTable:
    """Explicit bracket table on indices <= cutoff.

    ``table[(i, j)]`` with i < j is a sparse vector {target: coefficient};
    unlisted pairs bracket to zero.  Used for evaluated deformed brackets,
    which may send one pair to several graded components.
    """

    def __init__(self, name, cutoff, table):
        self.name = name
        self.cutoff = cutoff
        self.table = {}
        for (i, j), comps in table.items():
            if not 1 <= i < j <= cutoff:
                raise ValueError(f"bad table pair ({i}, {j})")
            comps = {t: Fraction(v) for t, v in comps.items() if v}
            if comps:
                self.table[(i, j)] = comps

    def bracket_components(self, i, j):
        if i == j:
            return {}
        if i < j:
            return dict(self.table.get((i, j), {}))
        return {t: -v for t, v in self.table.get((j, i), {}).items()}

    def __repr__(self):
        return f"BracketTable({self.name!r}, cutoff={self.cutoff})"


def _verify_jacobi_table(tab, N):
    N = min(N, tab.cutoff)
    checked = skipped = 0
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            for k in range(j + 1, N + 1):
                res = {}
                ok = True
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for m, v in tab.bracket_components(a, b).items():
                        if m == c:
                            continue
                        if m > tab.cutoff:
                            ok = False
                            break
                        sign = 1 if m < c else -1
                        lo, hi = (m, c) if m < c else (c, m)
                        for t, w in tab.bracket_components(lo, hi).items():
                            res[t] = res.get(t, Fraction(0)) + sign * v * w
                    if not ok:
                        break
                if not ok:
                    skipped += 1
                    continue
                checked += 1
                bad = {t: v for t, v in res.items() if v}
                if bad:
                    t = min(bad)
                    return JacobiReport(False, (i, j, k), bad[t], checked, skipped)
    return JacobiReport(True, checked=checked, skipped=skipped)


def load_algebra(source, jacobi_gate=_DEFAULT_JACOBI_GATE):
    """Load a user-defined algebra from a JSON document.

    Format: {"name": str, "constants": [[i, j, "p/q"], ...], "default": "0"}.
    Unlisted pairs get the default; antisymmetry is completed automatically.
    The rule is gated through verify_jacobi at ``jacobi_gate`` because the
    cohomology downstream is meaningless on non-Lie data.
    """
    if isinstance(source, str):
        with open(source) as fh:
            doc = json.load(fh)
    else:
        doc = source
    try:
        name = doc["name"]
        default = Fraction(doc.get("default", "0"))
        constants = {}
        for i, j, val in doc.get("constants", []):
            i, j = int(i), int(j)
            if i == j:
                raise ConfigError(f"diagonal constant ({i}, {i}) is not allowed")
            if i > j:
                i, j, val = j, i, str(-Fraction(val))
            if (i, j) in constants and constants[(i, j)] != Fraction(val):
                raise ConfigError(f"conflicting constants for pair ({i}, {j})")
            constants[(i, j)] = Fraction(val)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed algebra document: {exc}") from exc

    def rule(i, j):
        return constants.get((i, j), default)

    key = ("custom", name, tuple(sorted((k, str(v)) for k, v in constants.items())),
           str(default))
    alg = GradedLieAlgebra(name, rule, cache_key=key)
    report = verify_jacobi(alg, jacobi_gate)
    if not report.ok:
        raise ConfigError(
            f"algebra {name!r} fails the Jacobi identity at {report.failure} "
            f"(residual {report.residual}); refusing to accept non-Lie data")
    return alg


def resolve_algebra(spec, jacobi_gate=_DEFAULT_JACOBI_GATE):
    """Accept a preset name or a path to a JSON algebra document."""
    if spec in _PRESETS:
        return preset(spec)
    return load_algebra(spec, jacobi_gate=jacobi_gate)
