"""Trapezoidal fuzzy numbers, linguistic scales and centroid defuzzification.

Components may be floats or :class:`fractions.Fraction`; every operation
preserves the numeric type, so rational inputs give exact results.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from numbers import Real
from typing import Iterable, Mapping


class FuzzyDomainError(ValueError):
    """Raised when an operation is undefined for its fuzzy operand."""


@dataclass(frozen=True)
class TrapezoidalFuzzyNumber:
    a1: Real
    a2: Real
    a3: Real
    a4: Real

    def __post_init__(self):
        comps = (self.a1, self.a2, self.a3, self.a4)
        if not all(math.isfinite(c) for c in comps):
            raise ValueError(f"fuzzy number components must be finite: {comps}")
        if not (self.a1 <= self.a2 <= self.a3 <= self.a4):
            raise ValueError(f"fuzzy number must satisfy a1 <= a2 <= a3 <= a4: {comps}")

    @classmethod
    def crisp(cls, c: Real) -> "TrapezoidalFuzzyNumber":
        return cls(c, c, c, c)

    @classmethod
    def of(cls, values: Iterable[Real]) -> "TrapezoidalFuzzyNumber":
        a1, a2, a3, a4 = values
        return cls(a1, a2, a3, a4)

    def as_tuple(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4)

    def __iter__(self):
        return iter(self.as_tuple())

    def __add__(self, other):
        if not isinstance(other, TrapezoidalFuzzyNumber):
            return NotImplemented
        return add(self, other)

    def __mul__(self, other):
        if isinstance(other, TrapezoidalFuzzyNumber):
            return approx_multiply(self, other)
        if isinstance(other, Real):
            return scale(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"TFN({self.a1!r}, {self.a2!r}, {self.a3!r}, {self.a4!r})"


TFN = TrapezoidalFuzzyNumber

ZERO = TFN(0, 0, 0, 0)
ONE = TFN(1, 1, 1, 1)


class _RepairCounter:
    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0

    def bump(self):
        with self._lock:
            self.count += 1


_repairs = _RepairCounter()


def repair_count() -> int:
    """Number of products whose outer components had to be clamped."""
    return _repairs.count


def reset_repair_count() -> None:
    with _repairs._lock:
        _repairs.count = 0


def add(a: TFN, b: TFN) -> TFN:
    return TFN(a.a1 + b.a1, a.a2 + b.a2, a.a3 + b.a3, a.a4 + b.a4)


def fuzzy_sum(numbers: Iterable[TFN]) -> TFN:
    total = None
    for n in numbers:
        total = n if total is None else add(total, n)
    return ZERO if total is None else total


def inverse(a: TFN) -> TFN:
    if a.a1 <= 0:
        raise FuzzyDomainError(f"inverse undefined for non-positive fuzzy number {a!r}")
    return TFN(1 / a.a4, 1 / a.a3, 1 / a.a2, 1 / a.a1)


def _product_components(a: TFN, b: TFN) -> tuple:
    # Expanded form of the four-point product approximation:
    #   c1 = 3/2 (a2-a1)(b2-b1) + 2[(a2-a1) b1 + (b2-b1) a1] + 3 a1 b1 - 2 a2 b2
    #   c4 = 3/2 (a4-a3)(b4-b3) - 2[(a4-a3) b4 + (b4-b3) a4] + 3 a4 b4 - 2 a3 b3
    # both collapse algebraically to the expressions below, which keep
    # A x (1,1,1,1) == A bit-exact in floating point.
    c1 = a.a1 * b.a1 - (a.a2 - a.a1) * (b.a2 - b.a1) / 2
    c4 = a.a4 * b.a4 - (a.a4 - a.a3) * (b.a4 - b.a3) / 2
    return c1, a.a2 * b.a2, a.a3 * b.a3, c4


def approx_multiply(a: TFN, b: TFN) -> TFN:
    """Trapezoidal approximation of the product of two fuzzy numbers.

    The middle components are the exact products ``a2*b2`` and ``a3*b3``.
    If the outer components fall inside them (possible only for inputs with
    negative parts) they are clamped and the repair counter is incremented.
    """
    c1, c2, c3, c4 = _product_components(a, b)
    if c1 > c2 or c4 < c3:
        _repairs.bump()
        c1 = min(c1, c2)
        c4 = max(c4, c3)
    return TFN(c1, c2, c3, c4)


def scale(a: TFN, c: Real) -> TFN:
    if c < 0:
        raise FuzzyDomainError(f"scale factor must be non-negative, got {c!r}")
    return TFN(c * a.a1, c * a.a2, c * a.a3, c * a.a4)


def defuzzify_coa(a: TFN) -> Real:
    """Centre-of-area value ``(a1 + a2 + a3 + a4) / 4``."""
    return (a.a1 + a.a2 + a.a3 + a.a4) / 4


# --- linguistic scales ------------------------------------------------------

IMPORTANCE_TERMS = ("E", "M", "H", "VH", "EI")
PERFORMANCE_TERMS = ("P", "A", "H", "VH", "EX")

DEFAULT_IMPORTANCE = {
    "E": TFN(1, 1, 1, 1),
    "M": TFN(1, 3, 3, 5),
    "H": TFN(3, 5, 5, 7),
    "VH": TFN(5, 7, 7, 9),
    "EI": TFN(7, 9, 9, 11),
}

DEFAULT_PERFORMANCE = {
    "P": TFN(0, 1, 2, 4),
    "A": TFN(1, 3, 4, 6),
    "H": TFN(4, 6, 7, 9),
    "VH": TFN(7, 9, 10, 12),
    "EX": TFN(10, 12, 13, 13),
}


class UnknownTermError(KeyError):
    pass


class LinguisticScale:
    """Ordered mapping from linguistic terms to fuzzy numbers."""

    terms: tuple = ()
    name = "scale"
    strictly_positive = True

    def __init__(self, mapping: Mapping[str, TFN] | None = None):
        mapping = dict(mapping if mapping is not None else self.defaults())
        missing = [t for t in self.terms if t not in mapping]
        extra = [t for t in mapping if t not in self.terms]
        if missing or extra:
            raise ValueError(f"{self.name} needs exactly terms {self.terms}; "
                             f"missing {missing}, unexpected {extra}")
        self._map = {t: _as_tfn(mapping[t]) for t in self.terms}
        for t, v in self._map.items():
            lowest = v.a1
            if lowest < 0 or (self.strictly_positive and lowest <= 0):
                raise ValueError(f"{self.name} term {t} must be positive: {v!r}")
        centroids = [defuzzify_coa(self._map[t]) for t in self.terms]
        if any(lo >= hi for lo, hi in zip(centroids, centroids[1:])):
            raise ValueError(f"{self.name} terms must increase by centroid in order {self.terms}")

    @classmethod
    def defaults(cls) -> dict:
        raise NotImplementedError

    def __getitem__(self, term: str) -> TFN:
        try:
            return self._map[term]
        except KeyError:
            raise UnknownTermError(f"unknown {self.name} term {term!r}") from None

    def __contains__(self, term) -> bool:
        return term in self._map

    def level(self, term: str) -> int:
        self[term]
        return self.terms.index(term)

    def shift(self, term: str, levels: int) -> str:
        """Move ``term`` by ``levels`` steps along the scale, saturating at the ends."""
        i = min(max(self.level(term) + levels, 0), len(self.terms) - 1)
        return self.terms[i]

    def items(self):
        return self._map.items()


class ImportanceScale(LinguisticScale):
    terms = IMPORTANCE_TERMS
    name = "importance scale"

    @classmethod
    def defaults(cls):
        return DEFAULT_IMPORTANCE


class PerformanceScale(LinguisticScale):
    terms = PERFORMANCE_TERMS
    name = "performance scale"
    # the default Poor rating starts at 0
    strictly_positive = False

    @classmethod
    def defaults(cls):
        return DEFAULT_PERFORMANCE


def term_to_fuzzy(scale: LinguisticScale, term: str) -> TFN:
    return scale[term]


def _as_tfn(value) -> TFN:
    if isinstance(value, TFN):
        return value
    return TFN.of(value)
