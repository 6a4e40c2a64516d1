"""Deterministic agent-based e-market.

Each step the scheduled buyers, in ascending id order, broadcast a demand
for a good.  Every active seller offering the good responds; the buyer
narrows the responders to an admissible pool, buys from the offer with the
highest crisp expected value, rates what was delivered, and updates its
reputation record and seller lists.

Randomness: one ``random.Random(seed)`` stream, consumed by exactly one
``random()`` draw per purchase decision (the exploration draw), in
schedule order.  Nothing else is random.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace

from .config import AttackScript, ProfileSpec, ScenarioConfig
from .engine import (
    BuyerPolicy,
    Category,
    ReputationRecord,
    SellerCategoryIndex,
    advance_experience,
    bootstrap_reputation,
    classify,
    combine_overall,
    update_individual,
)
from .fuzzy import PerformanceScale, defuzzify_coa
from .ids import id_key, sorted_ids
from .valuation import OfferValuation, argmax_seller, assess_actual_value, fuzzy_value
from .weights import (
    FuzzyPairwiseMatrix,
    WeightHistory,
    WeightVector,
    advance_delta,
    overall_weights,
    subjective_weights,
)

log = logging.getLogger(__name__)


class NoAdmissibleSeller(LookupError):
    pass


@dataclass
class HonestyProfile:
    """How a seller's delivered goods relate to its advertised ratings."""

    kind: str = "honest"
    levels: int = 1
    bonus: int = 0
    threshold: float | None = None

    @classmethod
    def from_spec(cls, spec: ProfileSpec) -> "HonestyProfile":
        return cls(spec.kind, spec.levels, spec.bonus, spec.threshold)

    def cheats_at(self, price: float) -> bool:
        if self.kind == "degrade":
            return True
        if self.kind == "value_cheat":
            return price >= self.threshold
        return False

    def deliver(self, ratings, price, scale: PerformanceScale) -> list:
        shift = -self.levels if self.cheats_at(price) else self.bonus
        return [scale.shift(t, shift) for t in ratings]


@dataclass
class SellerAgent:
    id: str
    offers: dict
    profile: HonestyProfile
    active: bool = True
    sales: int = 0
    exit_after_next: bool = False
    honest: bool = True


@dataclass
class BuyerAgent:
    id: str
    policy: BuyerPolicy
    categories: SellerCategoryIndex = field(default_factory=SellerCategoryIndex)
    records: dict = field(default_factory=dict)
    histories: dict = field(default_factory=dict)
    subjective: dict = field(default_factory=dict)
    rho: float = 1.0

    def category_of(self, seller: str) -> Category:
        return self.categories.category_of(seller) or Category.NEW

    def weights_for(self, good: str):
        return overall_weights(self.subjective[good], self.histories[good])


@dataclass
class TransactionRecord:
    step: int
    buyer: str
    seller: str
    good: str
    x: float
    f: float
    v: float
    delta: float
    r_next: float
    shared: float | None
    alpha: float
    beta: float
    or_next: float
    category: Category
    or_prev: float
    previous_category: Category
    bs_effect: float | None = None


@dataclass
class MarketEvent:
    step: int
    kind: str
    detail: str


@dataclass
class SeriesPoint:
    step: int
    buyer: str
    seller: str
    overall: float
    category: Category


@dataclass
class SimulationResult:
    transcript: list
    series: list
    events: list
    buyers: dict
    sellers: dict
    seed: int
    steps: int

    def orders_by_seller(self) -> dict:
        out = {}
        for rec in self.transcript:
            out[rec.seller] = out.get(rec.seller, 0) + 1
        return out

    def order_share(self) -> dict:
        """Fraction of orders placed with honest and with dishonest sellers."""
        total = len(self.transcript)
        dishonest = sum(1 for r in self.transcript if not self.sellers[r.seller].honest)
        if total == 0:
            return {"honest": 0.0, "dishonest": 0.0}
        return {"honest": (total - dishonest) / total, "dishonest": dishonest / total}

    def bs_effects(self) -> list:
        return [r for r in self.transcript if r.bs_effect is not None]

    def trajectory(self, buyer: str, seller: str) -> list:
        return [r.or_next for r in self.transcript if r.buyer == buyer and r.seller == seller]


def bs_effect_metric(r_individual: float, or_overall: float) -> float | None:
    """Percent change that the shared opinion added on top of the buyer's own rating."""
    if r_individual <= 0:
        return None
    return 100.0 * (or_overall - r_individual) / r_individual


def aggregate_shared(seller: str, requester: str, buyers: dict,
                     stuffed: dict | None = None) -> float | None:
    """Mean overall reputation of ``seller`` held by the other buyers.

    Buyers contribute if they transacted with the seller at least once, or
    if an active ballot attack makes them report a stuffed level instead.
    """
    stuffed = stuffed or {}
    values = []
    for bid in sorted_ids(buyers):
        if bid == requester:
            continue
        if bid in stuffed:
            values.append(stuffed[bid])
            continue
        rec = buyers[bid].records.get(seller)
        if rec is not None and rec.transactions >= 1:
            values.append(rec.overall)
    if not values:
        return None
    return sum(values) / len(values)


def candidate_pool(buyer: BuyerAgent, responders, rng: random.Random) -> list:
    """Sellers the buyer is willing to consider, in id order.

    Consumes one draw from ``rng`` and decays the buyer's exploration
    probability, whether or not exploration happens.
    """
    by_cat = {c: [] for c in Category}
    for s in sorted_ids(responders):
        by_cat[buyer.category_of(s)].append(s)
    explore = rng.random() < buyer.rho
    p = buyer.policy
    buyer.rho = max(p.rho_min, buyer.rho * p.rho_decay)
    if explore and by_cat[Category.NEW]:
        return by_cat[Category.NEW]
    for cat in (Category.REPUTED, Category.NON_REPUTED, Category.NEW):
        if by_cat[cat]:
            return by_cat[cat]
    return []


class Market:
    def __init__(self, config: ScenarioConfig, seed: int | None = None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.rng = random.Random(self.seed)
        self.scale = config.performance_scale
        self.transcript: list = []
        self.events: list = []
        self.series: list = []
        self.sellers = {}
        for sid in sorted_ids(config.sellers):
            spec = config.sellers[sid]
            self.sellers[sid] = SellerAgent(sid, dict(spec.offers),
                                            HonestyProfile.from_spec(spec.profile),
                                            honest=spec.profile.kind == "honest")
        for a in config.attacks:
            if a.kind in ("VIM", "SE") and a.target in self.sellers:
                self.sellers[a.target].honest = False
        self.buyers = {bid: self._make_buyer(config.buyers[bid]) for bid in sorted_ids(config.buyers)}
        self._fired: set = set()
        self._stuffing: dict = {}    # seller -> {colluder: level}
        self._ballots: dict = {}     # seller -> attack kind
        self._collusion: dict = {}   # (buyer, seller) -> REC | RET
        self._demands = self._expand_schedule()

    def _make_buyer(self, spec) -> BuyerAgent:
        cfg = self.config
        b = BuyerAgent(spec.id, spec.policy, rho=spec.policy.rho_initial)
        for gname, good in cfg.goods.items():
            upper = spec.importance.get(gname, good.importance)
            fpm = FuzzyPairwiseMatrix.from_terms(upper, cfg.importance_scale)
            b.subjective[gname] = subjective_weights(fpm)
            hist = spec.history.get(gname)
            if hist is None:
                b.histories[gname] = WeightHistory(good.history_window, 0.0, good.delta_rate)
            else:
                vectors = tuple(WeightVector(v) for v in hist.weights)
                b.histories[gname] = WeightHistory(good.history_window, hist.delta,
                                                   good.delta_rate, vectors)
        for sid in sorted_ids(self.sellers):
            prior = spec.reputation.get(sid)
            if prior is None:
                b.categories.place(sid, Category.NEW)
                continue
            b.records[sid] = ReputationRecord.after(prior.transactions, prior.overall, spec.policy)
            p = spec.policy
            if prior.overall >= p.reputed_threshold:
                cat = Category.REPUTED
            elif prior.overall > p.disreputed_threshold:
                cat = Category.NON_REPUTED
            else:
                cat = Category.DIS_REPUTED
            b.categories.place(sid, cat)
        return b

    def _expand_schedule(self) -> dict:
        by_step: dict = {}
        for order, d in enumerate(self.config.schedule):
            for t in d.steps:
                by_step.setdefault(t, []).append((id_key(d.buyer), order, d.buyer, d.good))
        return {t: [(b, g) for _, _, b, g in sorted(v)] for t, v in by_step.items()}

    # --- attacks --------------------------------------------------------------

    def _window_open(self, a: AttackScript, t: int) -> bool:
        if t < a.start or (a.end is not None and t >= a.end):
            return False
        seller = self.sellers.get(a.target)
        return seller is not None and seller.sales >= a.after_transactions

    def inject_attacks(self, t: int) -> None:
        self._stuffing, self._ballots, self._collusion = {}, {}, {}
        for i, a in enumerate(self.config.attacks):
            if not self._window_open(a, t):
                continue
            if a.kind in ("BS", "BM"):
                levels = self._stuffing.setdefault(a.target, {})
                for c in a.colluders:
                    levels[c] = a.level
                self._ballots[a.target] = a.kind
            elif a.kind == "REC_RET":
                self._collusion[(a.buyer, a.target)] = a.mode
            elif i not in self._fired:
                self._fired.add(i)
                self._fire_once(a, t)

    def _fire_once(self, a: AttackScript, t: int) -> None:
        seller = self.sellers[a.target]
        if a.kind == "VIM":
            seller.profile = replace(seller.profile, kind="value_cheat",
                                     threshold=a.threshold, levels=a.levels)
            seller.honest = False
            self._event(t, "VIM", f"{seller.id} cheats on sales priced >= {a.threshold}")
        elif a.kind == "SE":
            seller.exit_after_next = True
            self._event(t, "SE", f"{seller.id} will cheat on its next sale and exit")
        elif a.kind == "REN":
            seller.active = False
            fresh = SellerAgent(a.new_id, dict(seller.offers), replace(seller.profile),
                                honest=seller.honest)
            self.sellers[a.new_id] = fresh
            for b in self.buyers.values():
                b.categories.place(a.new_id, Category.NEW)
            self._event(t, "REN", f"{seller.id} left and re-entered as {a.new_id}")

    def _event(self, t, kind, detail):
        self.events.append(MarketEvent(t, kind, detail))
        log.debug("step %d %s: %s", t, kind, detail)

    # --- transactions ---------------------------------------------------------

    def responders(self, good: str) -> list:
        return [s.id for s in self.sellers.values() if s.active and good in s.offers]

    def _delivered(self, buyer: BuyerAgent, seller: SellerAgent, good: str) -> list:
        offer = seller.offers[good]
        if seller.exit_after_next:
            return [self.scale.terms[0]] * len(offer.ratings)
        mode = self._collusion.get((buyer.id, seller.id))
        if mode == "REC":
            return [self.scale.terms[-1]] * len(offer.ratings)
        if mode == "RET":
            return [self.scale.terms[0]] * len(offer.ratings)
        return seller.profile.deliver(offer.ratings, offer.price, self.scale)

    def run_transaction(self, t: int, buyer: BuyerAgent, good: str) -> TransactionRecord:
        pool = candidate_pool(buyer, self.responders(good), self.rng)
        if not pool:
            raise NoAdmissibleSeller(f"no admissible seller of {good} for {buyer.id}")
        w = buyer.weights_for(good)
        offers = []
        for sid in pool:
            fv = fuzzy_value([self.scale[r] for r in self.sellers[sid].offers[good].ratings], w)
            offers.append(OfferValuation(sid, fv, defuzzify_coa(fv)))
        chosen = argmax_seller(offers)
        seller = self.sellers[chosen]
        f = next(o.crisp for o in offers if o.seller == chosen)
        x = seller.offers[good].price
        v = assess_actual_value([self.scale[r] for r in self._delivered(buyer, seller, good)], w)
        delta = v - f

        policy = buyer.policy
        shared = aggregate_shared(chosen, buyer.id, self.buyers, self._stuffing.get(chosen))
        rec = buyer.records.get(chosen)
        if rec is None:
            rec = ReputationRecord(bootstrap_reputation(shared))
        r_next = update_individual(rec.overall, delta, x, rec.beta, policy.penalty,
                                   policy.value_lambda)
        or_next = combine_overall(r_next, shared, rec.alpha)
        before = buyer.category_of(chosen)
        after = classify(or_next, policy, before, cheated=delta < 0)
        buyer.categories.place(chosen, after)
        buyer.records[chosen] = advance_experience(replace(rec, overall=or_next),
                                                   policy.alpha_rate, policy.beta_rate)
        buyer.histories[good] = advance_delta(buyer.histories[good], w)

        bs = bs_effect_metric(r_next, or_next) if chosen in self._ballots else None
        record = TransactionRecord(t, buyer.id, chosen, good, x, f, v, delta, r_next, shared,
                                   rec.alpha, rec.beta, or_next, after, rec.overall, before, bs)
        self.transcript.append(record)
        seller.sales += 1
        if seller.exit_after_next:
            seller.active = False
            seller.exit_after_next = False
            self._event(t, "EXIT", f"{seller.id} exited after cheating {buyer.id}")
        return record

    def step(self, t: int) -> None:
        self.inject_attacks(t)
        for bid, good in self._demands.get(t, []):
            try:
                self.run_transaction(t, self.buyers[bid], good)
            except NoAdmissibleSeller as exc:
                self._event(t, "NO_SELLER", str(exc))
        for bid in sorted_ids(self.buyers):
            b = self.buyers[bid]
            for sid in sorted_ids(b.records):
                self.series.append(SeriesPoint(t, bid, sid, b.records[sid].overall,
                                               b.category_of(sid)))

    def run(self) -> SimulationResult:
        for t in range(self.config.steps):
            self.step(t)
        return SimulationResult(self.transcript, self.series, self.events, self.buyers,
                                self.sellers, self.seed, self.config.steps)


def run_scenario(config: ScenarioConfig, seed: int | None = None) -> SimulationResult:
    return Market(config, seed).run()
