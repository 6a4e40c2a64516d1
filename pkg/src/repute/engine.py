"""Reputation updates, new-seller bootstrap and seller classification.

A buyer keeps one overall reputation per seller.  After each purchase the
surprise ``actual - expected`` decides the direction of the update; its size
grows with the transaction value and shrinks with the number of earlier
transactions between the same pair.  The result is blended with the other
buyers' opinion, weighted by how experienced the pair already is.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from numbers import Real

E_BASE = 1.01
# largest double below 1: the update keeps reputation in [0, 1)
MAX_REPUTATION = math.nextafter(1.0, 0.0)


class PolicyError(ValueError):
    pass


class Category(str, enum.Enum):
    REPUTED = "R"
    NON_REPUTED = "NR"
    DIS_REPUTED = "DR"
    NEW = "NEW"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BuyerPolicy:
    reputed_threshold: float = 0.45      # at or above: reputed
    disreputed_threshold: float = 0.15   # at or below: dis-reputed
    penalty: float = 2.0
    value_lambda: float = 0.001
    alpha_rate: float = 0.01
    beta_rate: float = 0.001
    rho_initial: float = 1.0
    rho_min: float = 0.05
    rho_decay: float = 0.995

    def __post_init__(self):
        errors = self.problems()
        if errors:
            raise PolicyError("; ".join(errors))

    def problems(self) -> list:
        out = []
        if not 0 < self.disreputed_threshold < self.reputed_threshold < 1:
            out.append("thresholds must satisfy 0 < dis-reputation threshold "
                       f"({self.disreputed_threshold}) < reputation threshold "
                       f"({self.reputed_threshold}) < 1")
        if not self.penalty > 1:
            out.append(f"penalty factor must exceed 1, got {self.penalty}")
        if not 0 < self.value_lambda < 1:
            out.append(f"value lambda must lie in (0, 1), got {self.value_lambda}")
        if self.alpha_rate < 0 or self.beta_rate < 0:
            out.append("experience rates must be non-negative")
        if not 0 <= self.rho_min <= self.rho_initial <= 1:
            out.append("exploration probability needs 0 <= minimum <= initial <= 1")
        if not 0 < self.rho_decay <= 1:
            out.append(f"exploration decay must lie in (0, 1], got {self.rho_decay}")
        return out


@dataclass(frozen=True)
class ReputationRecord:
    overall: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    transactions: int = 0

    def __post_init__(self):
        if not 0 <= self.overall < 1:
            raise ValueError(f"overall reputation must lie in [0, 1), got {self.overall}")
        if not 0 <= self.alpha <= 1 or self.beta < 0 or self.transactions < 0:
            raise ValueError(f"invalid experience state {self!r}")

    @classmethod
    def after(cls, transactions: int, overall: float = 0.0,
              policy: BuyerPolicy | None = None) -> "ReputationRecord":
        """Record of a pair that already completed ``transactions`` purchases."""
        policy = policy or BuyerPolicy()
        return cls(overall, min(1.0, transactions * policy.alpha_rate),
                   transactions * policy.beta_rate, transactions)


def eta(x: Real, value_lambda: float = 0.001) -> float:
    """Map a transaction value onto [0, 1): ``1 - 1.01 ** (-lambda * x)``."""
    if x < 0:
        raise ValueError(f"transaction value must be non-negative, got {x}")
    return 1.0 - E_BASE ** (-value_lambda * x)


def mu(eta_value: float, beta: float) -> float:
    return eta_value / (1.0 + beta)


def xi(eta_value: float, beta: float, gamma: float) -> float:
    if not gamma > 1:
        raise PolicyError(f"penalty factor must exceed 1, got {gamma}")
    return gamma * eta_value / (1.0 + beta)


def reputation_change(or_t: float, delta: float, x: Real, beta: float,
                      gamma: float, value_lambda: float = 0.001) -> float:
    """Signed, unclamped step applied to ``or_t`` for a surprise ``delta``."""
    if delta > 0:
        return mu(eta(x, value_lambda), beta) * (1.0 - or_t)
    if delta < 0:
        return -xi(eta(x, value_lambda), beta, gamma) * (1.0 - or_t)
    return 0.0


def update_individual(or_t: float, delta: float, x: Real, beta: float,
                      gamma: float, value_lambda: float = 0.001) -> float:
    """Individual reputation after a transaction with surprise ``delta``.

    The previous overall reputation is the starting point.  A zero surprise
    leaves it unchanged.
    """
    if not 0 <= or_t < 1:
        raise ValueError(f"reputation must lie in [0, 1), got {or_t}")
    if delta == 0:
        return or_t
    r = or_t + reputation_change(or_t, delta, x, beta, gamma, value_lambda)
    return min(max(r, 0.0), MAX_REPUTATION)


def combine_overall(r: float, shared: float | None, alpha: float) -> float:
    if not 0 <= alpha <= 1:
        raise ValueError(f"experience factor must lie in [0, 1], got {alpha}")
    if shared is None or alpha == 1:
        return r
    out = alpha * r + (1.0 - alpha) * shared
    # rounding must not leave the segment between the two opinions
    return min(max(out, min(r, shared)), max(r, shared))


def bootstrap_reputation(shared: float | None) -> float:
    """Starting reputation of a seller this buyer has never dealt with."""
    return 0.0 if shared is None else shared


def classify(or_next: float, policy: BuyerPolicy, current: Category,
             cheated: bool = False) -> Category:
    """Category of a seller after its overall reputation became ``or_next``.

    Dis-reputed is absorbing.  A new seller that cheats before leaving the
    new list is dis-reputed at once; it leaves the new list only when its
    reputation exceeds the dis-reputation threshold.
    """
    if current is Category.DIS_REPUTED:
        return current
    if current is Category.NEW:
        if cheated:
            return Category.DIS_REPUTED
        if or_next <= policy.disreputed_threshold:
            return Category.NEW
    if or_next >= policy.reputed_threshold:
        return Category.REPUTED
    if or_next > policy.disreputed_threshold:
        return Category.NON_REPUTED
    return Category.DIS_REPUTED


def advance_experience(rec: ReputationRecord, alpha_rate: float = 0.01,
                       beta_rate: float = 0.001) -> ReputationRecord:
    n = rec.transactions + 1
    # derived from the count rather than accumulated, so no drift
    return replace(rec, alpha=min(1.0, n * alpha_rate), beta=n * beta_rate, transactions=n)


@dataclass
class SellerCategoryIndex:
    """One buyer's partition of the sellers it knows about."""

    reputed: set = field(default_factory=set)
    non_reputed: set = field(default_factory=set)
    dis_reputed: set = field(default_factory=set)
    new: set = field(default_factory=set)

    def _sets(self):
        return {
            Category.REPUTED: self.reputed,
            Category.NON_REPUTED: self.non_reputed,
            Category.DIS_REPUTED: self.dis_reputed,
            Category.NEW: self.new,
        }

    def members(self, category: Category) -> set:
        return self._sets()[category]

    def category_of(self, seller: str) -> Category | None:
        for cat, s in self._sets().items():
            if seller in s:
                return cat
        return None

    def known(self) -> set:
        return self.reputed | self.non_reputed | self.dis_reputed | self.new

    def place(self, seller: str, category: Category) -> Category | None:
        """Move ``seller`` into ``category``; returns the previous category."""
        previous = self.category_of(seller)
        if previous is Category.DIS_REPUTED and category is not Category.DIS_REPUTED:
            raise ValueError(f"seller {seller} is dis-reputed and cannot leave that list")
        if previous is not None:
            self._sets()[previous].discard(seller)
        self._sets()[category].add(seller)
        return previous

    def is_partition(self) -> bool:
        sets = list(self._sets().values())
        return sum(map(len, sets)) == len(self.known())
