"""Per-attribute fuzzy weights of a good.

Subjective weights come from the buyer's pairwise comparison matrix by
extent analysis, empirical weights average the buyer's previous purchases,
and the overall weight blends the two with a factor that grows as the buyer
keeps buying the same good.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

from .fuzzy import (
    ONE,
    TFN,
    ImportanceScale,
    add,
    approx_multiply,
    fuzzy_sum,
    inverse,
    scale,
)

SUBJECTIVE = "SW"
EMPIRICAL = "EW"
OVERALL = "W"


class NoEmpiricalData(LookupError):
    """The buyer has no purchase history for this good yet."""


class WeightContractError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    row: int  # 1-based
    col: int
    reason: str

    def __str__(self):
        return f"({self.row},{self.col}): {self.reason}"


class FuzzyPairwiseMatrix:
    """Reciprocal n x n matrix of fuzzy pairwise attribute comparisons."""

    def __init__(self, entries: Sequence[Sequence[TFN]]):
        self.entries = tuple(tuple(row) for row in entries)
        self.n = len(self.entries)
        if any(len(row) != self.n for row in self.entries):
            raise ValueError("pairwise matrix must be square")

    @classmethod
    def from_upper(cls, upper: Sequence[Sequence[TFN]]) -> "FuzzyPairwiseMatrix":
        """Build the full matrix from the strict upper triangle, row by row.

        ``upper[i]`` holds the comparisons of attribute ``i`` against
        attributes ``i+1 .. n-1``; the lower triangle is filled with
        reciprocals and the diagonal with (1,1,1,1).
        """
        n = len(upper) + 1
        rows = [[ONE] * n for _ in range(n)]
        for i, comparisons in enumerate(upper):
            if len(comparisons) != n - 1 - i:
                raise ValueError(f"upper-triangle row {i + 1} needs {n - 1 - i} entries, "
                                 f"got {len(comparisons)}")
            for k, a in enumerate(comparisons):
                j = i + 1 + k
                rows[i][j] = a
                rows[j][i] = inverse(a)
        return cls(rows)

    @classmethod
    def from_terms(cls, upper_terms: Sequence[Sequence[str]],
                   importance: ImportanceScale) -> "FuzzyPairwiseMatrix":
        """Upper triangle given as linguistic terms; ``"1/M"`` denotes a reciprocal."""
        return cls.from_upper([[parse_importance(t, importance) for t in row]
                               for row in upper_terms])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def permuted(self, order: Sequence[int]) -> "FuzzyPairwiseMatrix":
        return FuzzyPairwiseMatrix([[self.entries[i][j] for j in order] for i in order])


def parse_importance(term: str, importance: ImportanceScale) -> TFN:
    term = term.strip()
    if term.startswith("1/"):
        return inverse(importance[term[2:].strip()])
    return importance[term]


def validate_fpm(m: FuzzyPairwiseMatrix) -> Violation | None:
    """Return the first violated invariant, or None if the matrix is well formed."""
    for i in range(m.n):
        for j in range(m.n):
            a = m[i, j]
            if a.a1 <= 0:
                return Violation(i + 1, j + 1, f"entry {a!r} is not strictly positive")
            if i == j:
                if a != ONE:
                    return Violation(i + 1, j + 1, f"diagonal entry {a!r} is not (1,1,1,1)")
            elif i > j:
                expected = inverse(m[j, i])
                if a.as_tuple() != expected.as_tuple():
                    return Violation(i + 1, j + 1,
                                     f"entry {a!r} is not the inverse of {m[j, i]!r}")
    return None


@dataclass(frozen=True)
class WeightVector(Sequence):
    weights: tuple
    role: str = OVERALL

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if self.role not in (SUBJECTIVE, EMPIRICAL, OVERALL):
            raise ValueError(f"unknown weight role {self.role!r}")

    def __getitem__(self, i):
        return self.weights[i]

    def __len__(self):
        return len(self.weights)

    def with_role(self, role: str) -> "WeightVector":
        return WeightVector(self.weights, role)


def subjective_weights(m: FuzzyPairwiseMatrix) -> WeightVector:
    violation = validate_fpm(m)
    if violation is not None:
        raise WeightContractError(f"invalid pairwise matrix at {violation}")
    row_sums = [fuzzy_sum(row) for row in m.entries]
    grand_inverse = inverse(fuzzy_sum(row_sums))
    return WeightVector([approx_multiply(r, grand_inverse) for r in row_sums], SUBJECTIVE)


@dataclass(frozen=True)
class WeightHistory:
    """Overall weight vectors of one buyer's past purchases of one good."""

    window: int = 100
    delta: Real = 0.0
    rate: Real = 0.01
    vectors: tuple = field(default=())
    # running exact component sums, kept up to date by advance_delta
    _sums: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("history window must be a positive integer")
        if not 0 <= self.delta <= 1:
            raise ValueError(f"blend factor must lie in [0, 1], got {self.delta}")
        if self.rate < 0:
            raise ValueError("blend factor rate must be non-negative")
        object.__setattr__(self, "vectors", tuple(self.vectors)[-self.window:])


def _mean(values):
    values = list(values)
    if all(type(v) in (float, int) for v in values):
        # exact rational mean rounded once, so identical inputs give themselves back;
        # floats are dyadic, so the sum is exact over a shared power-of-two denominator
        ratios = [v.as_integer_ratio() for v in values]
        den = max(d for _, d in ratios)
        num = sum(n * (den // d) for n, d in ratios)
        return float(Fraction(num, den * len(values)))
    return sum(values) / len(values)


def _exact_sums(vectors):
    if not vectors or len({len(v) for v in vectors}) != 1:
        return None
    if not all(type(c) in (float, int) for v in vectors for q in v for c in q):
        return None
    return tuple(sum(Fraction(c) for c in comps)
                 for comps in zip(*(tuple(c for q in v for c in q) for v in vectors)))


def empirical_weights(h: WeightHistory) -> WeightVector:
    if not h.vectors:
        raise NoEmpiricalData("no previous purchases to average")
    recent = h.vectors[-h.window:]
    if h._sums is not None:
        k = len(recent)
        flat = [float(t / k) for t in h._sums]
        return WeightVector([TFN(*flat[i:i + 4]) for i in range(0, len(flat), 4)], EMPIRICAL)
    n = len(recent[0])
    if any(len(v) != n for v in recent):
        raise WeightContractError("weight vectors in history differ in length")
    out = []
    for i in range(n):
        out.append(TFN(*(_mean(v[i].as_tuple()[k] for v in recent) for k in range(4))))
    return WeightVector(out, EMPIRICAL)


def _between(value, lo, hi):
    return min(max(value, min(lo, hi)), max(lo, hi))


def blend_weights(sw: WeightVector, ew: WeightVector | None, delta: Real) -> WeightVector:
    """``delta * ew + (1 - delta) * sw`` attribute by attribute."""
    if not 0 <= delta <= 1:
        raise WeightContractError(f"blend factor must lie in [0, 1], got {delta}")
    if delta == 0:
        return sw.with_role(OVERALL)
    if ew is None:
        raise WeightContractError("empirical weights required when blend factor > 0")
    if len(ew) != len(sw):
        raise WeightContractError("subjective and empirical weights differ in length")
    if delta == 1:
        return ew.with_role(OVERALL)
    out = []
    for s, e in zip(sw, ew):
        w = add(scale(e, delta), scale(s, 1 - delta))
        # guard against rounding stepping outside the segment [s, e]
        out.append(TFN(*(_between(c, sc, ec) for c, sc, ec in zip(w, s, e))))
    return WeightVector(out, OVERALL)


def overall_weights(sw: WeightVector, h: WeightHistory) -> WeightVector:
    ew = empirical_weights(h) if h.vectors else None
    return blend_weights(sw, ew, h.delta if ew is not None else 0)


def advance_delta(h: WeightHistory, w: WeightVector | None = None) -> WeightHistory:
    """Register a completed purchase: raise the blend factor and remember ``w``."""
    vectors = h.vectors if w is None else h.vectors + (w.with_role(OVERALL),)
    out = WeightHistory(h.window, min(1, h.delta + h.rate), h.rate, vectors)
    if w is not None and h._sums is not None and len(w) == len(h.vectors[0]):
        dropped = h.vectors[:len(vectors) - len(out.vectors)]
        sums = _shift_sums(h._sums, w, dropped)
    else:
        sums = _exact_sums(out.vectors)
    object.__setattr__(out, "_sums", sums)
    return out


def _shift_sums(sums, added, dropped):
    new = [c for q in added for c in q]
    if not all(type(c) in (float, int) for c in new):
        return None
    sums = [t + Fraction(c) for t, c in zip(sums, new)]
    for v in dropped:
        sums = [t - Fraction(c) for t, c in zip(sums, (c for q in v for c in q))]
    return tuple(sums)
