"""Scenario configuration: data model, YAML loader and validation.

See ``docs/config.md`` in the repository for the full grammar.  All problems
found in a file are collected and reported together, each with its location.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .engine import BuyerPolicy
from .fuzzy import TFN, ImportanceScale, PerformanceScale
from .weights import FuzzyPairwiseMatrix, parse_importance, validate_fpm

ATTACK_KINDS = ("BS", "BM", "VIM", "REN", "SE", "REC_RET")
PROFILE_KINDS = ("honest", "degrade", "value_cheat")


class ConfigError(Exception):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass
class GoodSpec:
    name: str
    attributes: list
    importance: list  # strict upper triangle of linguistic terms
    history_window: int = 100
    delta_rate: float = 0.01


@dataclass
class OfferSpec:
    price: float
    ratings: list


@dataclass
class ProfileSpec:
    kind: str = "honest"
    levels: int = 1       # levels dropped when cheating
    bonus: int = 0        # levels above the offer delivered when honest
    threshold: float | None = None  # value_cheat: cheat at or above this price


@dataclass
class SellerSpec:
    id: str
    offers: dict
    profile: ProfileSpec = field(default_factory=ProfileSpec)


@dataclass
class PriorReputation:
    overall: float
    transactions: int = 1


@dataclass
class HistorySpec:
    delta: float = 0.0
    weights: list = field(default_factory=list)  # list of weight vectors (lists of TFN)


@dataclass
class BuyerSpec:
    id: str
    policy: BuyerPolicy = field(default_factory=BuyerPolicy)
    importance: dict = field(default_factory=dict)
    reputation: dict = field(default_factory=dict)
    history: dict = field(default_factory=dict)


@dataclass
class DemandSpec:
    buyer: str
    good: str
    steps: list


@dataclass
class AttackScript:
    kind: str
    target: str
    start: int = 0
    end: int | None = None
    after_transactions: int = 0
    colluders: list = field(default_factory=list)
    level: float | None = None
    buyer: str | None = None
    mode: str | None = None
    threshold: float | None = None
    levels: int = 1
    new_id: str | None = None


@dataclass
class ScenarioConfig:
    steps: int
    goods: dict
    buyers: dict
    sellers: dict
    schedule: list = field(default_factory=list)
    attacks: list = field(default_factory=list)
    seed: int = 0
    importance_scale: ImportanceScale = field(default_factory=ImportanceScale)
    performance_scale: PerformanceScale = field(default_factory=PerformanceScale)
    name: str = "scenario"


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read: {exc.strerror or exc}"]) from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        raise ConfigError([f"{where}: parse error: {getattr(exc, 'problem', exc)}"]) from None
    return parse_config(raw, source=str(path), name=path.stem)


def parse_config(raw: Any, source: str = "<config>", name: str = "scenario") -> ScenarioConfig:
    p = _Parser(source)
    cfg = p.parse(raw, name)
    if p.errors:
        raise ConfigError(p.errors)
    return cfg


_POLICY_KEYS = {
    "reputed_threshold", "disreputed_threshold", "penalty", "value_lambda",
    "alpha_rate", "beta_rate", "rho",
}


class _Parser:
    def __init__(self, source):
        self.source = source
        self.errors = []

    def err(self, where, msg):
        self.errors.append(f"{self.source}: {where}: {msg}")

    def mapping(self, value, where, required=True):
        if value is None and not required:
            return {}
        if not isinstance(value, dict):
            self.err(where, "expected a mapping")
            return {}
        return value

    def unknown_keys(self, m, allowed, where):
        for k in m:
            if k not in allowed:
                self.err(f"{where}.{k}", "unknown key")

    def number(self, value, where, lo=None, hi=None, integer=False):
        ok = isinstance(value, int) if integer else isinstance(value, (int, float))
        if isinstance(value, bool) or not ok:
            self.err(where, f"expected {'an integer' if integer else 'a number'}, got {value!r}")
            return None
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            self.err(where, f"value {value} outside [{lo}, {hi}]")
            return None
        return value

    def quad(self, value, where):
        if not isinstance(value, (list, tuple)) or len(value) != 4:
            self.err(where, "expected four numbers")
            return None
        nums = [self.number(v, f"{where}[{i}]") for i, v in enumerate(value)]
        if any(n is None for n in nums):
            return None
        try:
            return TFN(*nums)
        except ValueError as exc:
            self.err(where, str(exc))
            return None

    # --- sections -----------------------------------------------------------

    def parse(self, raw, name):
        top = self.mapping(raw, "top level")
        self.unknown_keys(top, {"seed", "steps", "scales", "policy", "goods", "buyers",
                                "sellers", "schedule", "attacks", "name"}, "top level")
        seed = top.get("seed", 0)
        seed = self.number(seed, "seed", integer=True) or 0
        steps = self.number(top.get("steps"), "steps", lo=1, integer=True)
        importance, performance = self.scales(top.get("scales"))
        base_policy = self.policy_fields(self.mapping(top.get("policy"), "policy", False), "policy")
        goods = self.goods(top.get("goods"), importance)
        sellers = self.sellers(top.get("sellers"), goods, performance)
        buyers = self.buyers(top.get("buyers"), base_policy, goods, sellers, importance)
        schedule = self.schedule(top.get("schedule"), buyers, goods, steps)
        attacks = self.attacks(top.get("attacks"), buyers, sellers, steps)
        return ScenarioConfig(
            steps=steps or 1, goods=goods, buyers=buyers, sellers=sellers,
            schedule=schedule, attacks=attacks, seed=seed,
            importance_scale=importance, performance_scale=performance,
            name=str(top.get("name", name)),
        )

    def scales(self, raw):
        m = self.mapping(raw, "scales", required=False)
        self.unknown_keys(m, {"importance", "performance"}, "scales")
        out = []
        for key, cls in (("importance", ImportanceScale), ("performance", PerformanceScale)):
            if key not in m:
                out.append(cls())
                continue
            entries = self.mapping(m[key], f"scales.{key}")
            quads = {t: self.quad(v, f"scales.{key}.{t}") for t, v in entries.items()}
            try:
                out.append(cls({t: q for t, q in quads.items() if q is not None}))
            except ValueError as exc:
                self.err(f"scales.{key}", str(exc))
                out.append(cls())
        return out

    def policy_fields(self, m, where, base=None):
        self.unknown_keys(m, _POLICY_KEYS, where)
        kw = {}
        for k in _POLICY_KEYS - {"rho"}:
            if k in m:
                v = self.number(m[k], f"{where}.{k}")
                if v is not None:
                    kw[k] = v
        if "rho" in m:
            rho = self.mapping(m["rho"], f"{where}.rho")
            self.unknown_keys(rho, {"initial", "minimum", "decay"}, f"{where}.rho")
            for src, dst in (("initial", "rho_initial"), ("minimum", "rho_min"),
                             ("decay", "rho_decay")):
                if src in rho:
                    v = self.number(rho[src], f"{where}.rho.{src}")
                    if v is not None:
                        kw[dst] = v
        merged = dict(base or {})
        merged.update(kw)
        defaults = {f.name: f.default for f in dataclasses.fields(BuyerPolicy)}
        candidate = {**defaults, **merged}
        problems = BuyerPolicy.problems(_Bare(candidate))
        for msg in problems:
            self.err(where, msg)
        return merged

    def goods(self, raw, importance):
        m = self.mapping(raw, "goods")
        if not m:
            self.err("goods", "at least one good is required")
        out = {}
        for gname, spec in m.items():
            where = f"goods.{gname}"
            spec = self.mapping(spec, where)
            self.unknown_keys(spec, {"attributes", "importance", "history_window",
                                     "delta_rate"}, where)
            attrs = spec.get("attributes")
            if not isinstance(attrs, list) or not attrs:
                self.err(f"{where}.attributes", "expected a non-empty list")
                attrs = []
            upper = self.importance(spec.get("importance"), len(attrs), importance,
                                    f"{where}.importance")
            window = self.number(spec.get("history_window", 100), f"{where}.history_window",
                                 lo=1, integer=True) or 100
            rate = self.number(spec.get("delta_rate", 0.01), f"{where}.delta_rate",
                               lo=0, hi=1)
            out[str(gname)] = GoodSpec(str(gname), [str(a) for a in attrs], upper, window,
                                       0.01 if rate is None else rate)
        return out

    def importance(self, raw, n, scale, where):
        if n == 1 and raw in (None, []):
            return []
        if not isinstance(raw, list) or len(raw) != n - 1:
            self.err(where, f"expected {n - 1} upper-triangle rows for {n} attributes")
            return []
        upper = []
        for i, row in enumerate(raw):
            if not isinstance(row, list) or len(row) != n - 1 - i:
                self.err(f"{where}[{i}]", f"expected {n - 1 - i} terms")
                return []
            for j, term in enumerate(row):
                try:
                    parse_importance(str(term), scale)
                except KeyError:
                    self.err(f"{where}[{i}][{j}]", f"unknown importance term {term!r}")
                    return []
            upper.append([str(t) for t in row])
        fpm = FuzzyPairwiseMatrix.from_terms(upper, scale)
        bad = validate_fpm(fpm)
        if bad is not None:
            self.err(where, f"pairwise matrix violation at {bad}")
        return upper

    def sellers(self, raw, goods, performance):
        m = self.mapping(raw, "sellers")
        if not m:
            self.err("sellers", "at least one seller is required")
        out = {}
        for sid, spec in m.items():
            sid = str(sid)
            where = f"sellers.{sid}"
            spec = self.mapping(spec, where)
            self.unknown_keys(spec, {"offers", "profile"}, where)
            offers = {}
            for gname, offer in self.mapping(spec.get("offers"), f"{where}.offers").items():
                ow = f"{where}.offers.{gname}"
                if gname not in goods:
                    self.err(ow, f"undeclared good {gname!r}")
                    continue
                offer = self.mapping(offer, ow)
                self.unknown_keys(offer, {"price", "ratings"}, ow)
                price = self.number(offer.get("price"), f"{ow}.price")
                if price is not None and price <= 0:
                    self.err(f"{ow}.price", "price must be positive")
                ratings = offer.get("ratings")
                n = len(goods[gname].attributes)
                if not isinstance(ratings, list) or len(ratings) != n:
                    self.err(f"{ow}.ratings", f"expected {n} performance terms")
                    continue
                for k, t in enumerate(ratings):
                    if t not in performance:
                        self.err(f"{ow}.ratings[{k}]", f"unknown performance term {t!r}")
                offers[str(gname)] = OfferSpec(price or 1.0, [str(t) for t in ratings])
            out[sid] = SellerSpec(sid, offers, self.profile(spec.get("profile"),
                                                            f"{where}.profile"))
        return out

    def profile(self, raw, where):
        if raw is None:
            return ProfileSpec()
        if isinstance(raw, str):
            raw = {"kind": raw}
        m = self.mapping(raw, where)
        self.unknown_keys(m, {"kind", "levels", "bonus", "threshold"}, where)
        kind = m.get("kind", "honest")
        if kind not in PROFILE_KINDS:
            self.err(f"{where}.kind", f"unknown profile {kind!r}; expected one of {PROFILE_KINDS}")
            kind = "honest"
        levels = self.number(m.get("levels", 1), f"{where}.levels", lo=0, integer=True)
        bonus = self.number(m.get("bonus", 0), f"{where}.bonus", lo=0, integer=True)
        threshold = m.get("threshold")
        if kind == "value_cheat":
            threshold = self.number(threshold, f"{where}.threshold", lo=0)
        return ProfileSpec(kind, levels or 0, bonus or 0, threshold)

    def buyers(self, raw, base_policy, goods, sellers, importance):
        m = self.mapping(raw, "buyers")
        if not m:
            self.err("buyers", "at least one buyer is required")
        out = {}
        for bid, spec in m.items():
            bid = str(bid)
            where = f"buyers.{bid}"
            spec = self.mapping(spec, where, required=False)
            self.unknown_keys(spec, {"policy", "importance", "reputation", "history"}, where)
            merged = self.policy_fields(self.mapping(spec.get("policy"), f"{where}.policy",
                                                     False), f"{where}.policy", base_policy)
            try:
                policy = BuyerPolicy(**merged)
            except Exception:
                policy = BuyerPolicy()
            imp = {}
            for gname, upper in self.mapping(spec.get("importance"), f"{where}.importance",
                                             False).items():
                if gname not in goods:
                    self.err(f"{where}.importance.{gname}", f"undeclared good {gname!r}")
                    continue
                imp[str(gname)] = self.importance(upper, len(goods[gname].attributes),
                                                  importance, f"{where}.importance.{gname}")
            rep = {}
            for sid, prior in self.mapping(spec.get("reputation"), f"{where}.reputation",
                                           False).items():
                rw = f"{where}.reputation.{sid}"
                if str(sid) not in sellers:
                    self.err(rw, f"undeclared seller {sid!r}")
                    continue
                if isinstance(prior, (int, float)) and not isinstance(prior, bool):
                    prior = {"overall": prior}
                prior = self.mapping(prior, rw)
                self.unknown_keys(prior, {"overall", "transactions"}, rw)
                overall = self.number(prior.get("overall"), f"{rw}.overall", lo=0)
                if overall is not None and overall >= 1:
                    self.err(f"{rw}.overall", "reputation must be below 1")
                    overall = None
                count = self.number(prior.get("transactions", 1), f"{rw}.transactions",
                                    lo=1, integer=True)
                if overall is not None and count is not None:
                    rep[str(sid)] = PriorReputation(overall, count)
            hist = {}
            for gname, h in self.mapping(spec.get("history"), f"{where}.history",
                                         False).items():
                hw = f"{where}.history.{gname}"
                if gname not in goods:
                    self.err(hw, f"undeclared good {gname!r}")
                    continue
                h = self.mapping(h, hw)
                self.unknown_keys(h, {"delta", "weights"}, hw)
                delta = self.number(h.get("delta", 0.0), f"{hw}.delta", lo=0, hi=1)
                vectors = []
                n = len(goods[gname].attributes)
                for k, vec in enumerate(h.get("weights") or []):
                    if not isinstance(vec, list) or len(vec) != n:
                        self.err(f"{hw}.weights[{k}]", f"expected {n} fuzzy weights")
                        continue
                    quads = [self.quad(q, f"{hw}.weights[{k}][{i}]") for i, q in enumerate(vec)]
                    if all(q is not None for q in quads):
                        vectors.append(quads)
                hist[str(gname)] = HistorySpec(delta or 0.0, vectors)
            out[bid] = BuyerSpec(bid, policy, imp, rep, hist)
        return out

    def schedule(self, raw, buyers, goods, steps):
        if raw is None:
            return []
        if not isinstance(raw, list):
            self.err("schedule", "expected a list of demands")
            return []
        out = []
        for i, d in enumerate(raw):
            where = f"schedule[{i}]"
            d = self.mapping(d, where)
            self.unknown_keys(d, {"buyer", "good", "steps", "start", "end", "every"}, where)
            buyer, good = str(d.get("buyer")), str(d.get("good"))
            if buyer not in buyers:
                self.err(f"{where}.buyer", f"undeclared buyer {d.get('buyer')!r}")
            if good not in goods:
                self.err(f"{where}.good", f"undeclared good {d.get('good')!r}")
            if "steps" in d:
                if not isinstance(d["steps"], list):
                    self.err(f"{where}.steps", "expected a list of step indices")
                    continue
                idx = [self.number(s, f"{where}.steps", lo=0, integer=True) for s in d["steps"]]
                idx = [s for s in idx if s is not None]
            else:
                start = self.number(d.get("start", 0), f"{where}.start", lo=0, integer=True)
                end = self.number(d.get("end", steps), f"{where}.end", lo=0, integer=True)
                every = self.number(d.get("every", 1), f"{where}.every", lo=1, integer=True)
                if None in (start, end, every):
                    continue
                idx = list(range(start, end, every))
            late = [s for s in idx if steps is not None and s >= steps]
            if late:
                self.err(f"{where}.steps", f"step {late[0]} not below step count {steps}")
            out.append(DemandSpec(buyer, good, sorted(set(idx))))
        return out

    def attacks(self, raw, buyers, sellers, steps):
        if raw is None:
            return []
        if not isinstance(raw, list):
            self.err("attacks", "expected a list of attack scripts")
            return []
        out = []
        new_ids = set()
        allowed = {f.name for f in dataclasses.fields(AttackScript)}
        for i, a in enumerate(raw):
            where = f"attacks[{i}]"
            a = self.mapping(a, where)
            self.unknown_keys(a, allowed, where)
            kind = a.get("kind")
            if kind not in ATTACK_KINDS:
                self.err(f"{where}.kind", f"unknown attack {kind!r}; expected one of {ATTACK_KINDS}")
                continue
            kw = {k: v for k, v in a.items() if k in allowed}
            script = AttackScript(**kw)
            script.target = str(script.target)
            known_sellers = set(sellers) | new_ids
            if script.target not in known_sellers:
                self.err(f"{where}.target", f"undeclared seller {a.get('target')!r}")
            for k in ("start", "after_transactions"):
                self.number(getattr(script, k), f"{where}.{k}", lo=0, integer=True)
            if script.end is not None:
                self.number(script.end, f"{where}.end", lo=0, integer=True)
            if steps is not None and isinstance(script.start, int) and script.start >= steps:
                self.err(f"{where}.start", f"step {script.start} not below step count {steps}")
            if kind in ("BS", "BM"):
                if not script.colluders:
                    self.err(f"{where}.colluders", "ballot attacks need colluding buyers")
                for c in script.colluders:
                    if str(c) not in buyers:
                        self.err(f"{where}.colluders", f"undeclared buyer {c!r}")
                script.colluders = [str(c) for c in script.colluders]
                if script.level is None:
                    script.level = 0.95 if kind == "BS" else 0.0
                if self.number(script.level, f"{where}.level", lo=0) is not None \
                        and script.level >= 1:
                    self.err(f"{where}.level", "stuffed reputation must be below 1")
            elif kind == "REC_RET":
                if str(script.buyer) not in buyers:
                    self.err(f"{where}.buyer", f"undeclared buyer {script.buyer!r}")
                script.buyer = str(script.buyer)
                if script.mode not in ("REC", "RET"):
                    self.err(f"{where}.mode", "mode must be REC or RET")
            elif kind == "VIM":
                self.number(script.threshold, f"{where}.threshold", lo=0)
                self.number(script.levels, f"{where}.levels", lo=1, integer=True)
            elif kind == "REN":
                if not script.new_id:
                    self.err(f"{where}.new_id", "re-entry needs the fresh seller id")
                else:
                    script.new_id = str(script.new_id)
                    if script.new_id in sellers or script.new_id in new_ids \
                            or script.new_id in buyers:
                        self.err(f"{where}.new_id", f"id {script.new_id!r} already in use")
                    new_ids.add(script.new_id)
            out.append(script)
        return out


class _Bare:
    """Attribute bag so policy checks can run without constructing a policy."""

    def __init__(self, values):
        self.__dict__.update(values)

