"""Seller selection: fuzzy and crisp value of each offer, and the argmax."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from numbers import Real

from .fuzzy import TFN, PerformanceScale, approx_multiply, defuzzify_coa, fuzzy_sum
from .ids import id_key
from .weights import WeightVector


class NoOffersError(LookupError):
    pass


class DimensionMismatch(ValueError):
    pass


class PerformanceMatrix:
    """Fuzzy ratings of each seller's offer, one row per seller.

    When ``scale`` is given every rating must be one of its quadruples.
    """

    def __init__(self, sellers: Sequence[str], rows: Sequence[Sequence[TFN]],
                 scale: PerformanceScale | None = None):
        self.sellers = tuple(sellers)
        self.rows = tuple(tuple(r) for r in rows)
        if len(self.sellers) != len(self.rows):
            raise DimensionMismatch("one row of ratings per seller required")
        if len(set(self.sellers)) != len(self.sellers):
            raise ValueError("duplicate seller in performance matrix")
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise DimensionMismatch(f"ragged performance matrix, row widths {sorted(widths)}")
        if scale is not None:
            allowed = {v.as_tuple() for _, v in scale.items()}
            floor = scale[scale.terms[0]]
            for s, row in zip(self.sellers, self.rows):
                for p in row:
                    if p.as_tuple() not in allowed:
                        below = p.a1 < floor.a1 or defuzzify_coa(p) < defuzzify_coa(floor)
                        why = "below the lowest rating" if below else "not on the scale"
                        raise ValueError(f"seller {s}: rating {p!r} is {why}")

    @classmethod
    def from_terms(cls, offers: Mapping[str, Sequence[str]],
                   scale: PerformanceScale) -> "PerformanceMatrix":
        sellers = list(offers)
        return cls(sellers, [[scale[t] for t in offers[s]] for s in sellers], scale)

    @property
    def n_attributes(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def row(self, seller: str) -> tuple:
        return self.rows[self.sellers.index(seller)]


@dataclass(frozen=True)
class OfferValuation:
    seller: str
    fuzzy: TFN
    crisp: Real


def fuzzy_value(row: Sequence[TFN], w: WeightVector) -> TFN:
    if len(row) != len(w):
        raise DimensionMismatch(f"{len(row)} ratings but {len(w)} attribute weights")
    return fuzzy_sum(approx_multiply(p, wj) for p, wj in zip(row, w))


def fuzzy_values(pr: PerformanceMatrix, w: WeightVector) -> list:
    return [fuzzy_value(row, w) for row in pr.rows]


def crisp_values(fv: Sequence[TFN]) -> list:
    return [defuzzify_coa(f) for f in fv]


def valuate(pr: PerformanceMatrix, w: WeightVector) -> list:
    fv = fuzzy_values(pr, w)
    return [OfferValuation(s, f, c) for s, f, c in zip(pr.sellers, fv, crisp_values(fv))]


def argmax_seller(ov: Sequence[OfferValuation]) -> str:
    """Seller with the highest crisp value; ties go to the lowest identifier."""
    if not ov:
        raise NoOffersError("no offers to choose from")
    best = min(ov, key=lambda o: (-o.crisp, id_key(o.seller)))
    return best.seller


def assess_actual_value(delivered: Sequence[TFN], w: WeightVector) -> Real:
    """Crisp value of a delivered good, rated on the same scale as the offers."""
    return defuzzify_coa(fuzzy_value(delivered, w))
