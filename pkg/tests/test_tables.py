import pytest

from repute.engine import combine_overall
from repute.tables import (
    PUBLISHED_TABLE6,
    ballot_stuffing_config,
    compute,
    format_table,
    simulate_table6_row,
    table1,
    table2,
)


def test_value_tables_fully_checked():
    for cells in (table1(), table2()):
        assert len(cells) == 6 * 2 * 3
        assert all(c.checked for c in cells)


def test_format_marks_unchecked_cells():
    text = format_table("t6", compute("table6"))
    assert "not checked" in text
    assert text.count("\n") == 1 + 5 * 4


def test_stuffing_fixture_shape():
    raw = ballot_stuffing_config(PUBLISHED_TABLE6[0])
    assert raw["attacks"][0]["colluders"] == ["b1", "b2", "b3"]
    assert raw["buyers"]["b4"]["reputation"]["s2"]["transactions"] == 20


def test_row_95_matches_a_lower_experience_factor():
    row = next(r for r in PUBLISHED_TABLE6 if r.transactions == 95)
    rec = simulate_table6_row(row)
    assert rec.alpha == pytest.approx(0.95)
    assert abs(rec.or_next - row.overall) > 0.005
    # with 90 rather than 95 prior transactions the printed value comes out
    assert combine_overall(row.individual, row.shared, 0.90) == pytest.approx(row.overall, abs=5e-4)


def test_effect_shrinks_with_experience():
    effects = [simulate_table6_row(r).bs_effect for r in PUBLISHED_TABLE6]
    assert all(a > b for a, b in zip(effects, effects[1:]))
