"""Deterministic ordering of agent identifiers."""

import re

_DIGITS = re.compile(r"(\d+)")


def id_key(agent_id: str) -> tuple:
    """Natural sort key, so ``s2`` orders before ``s10``."""
    parts = _DIGITS.split(agent_id)
    key = tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p)
    return key + ((2, 0, agent_id),)


def sorted_ids(ids) -> list:
    return sorted(ids, key=id_key)
