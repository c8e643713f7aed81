from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strmine.model import (
    Item,
    ItemSet,
    ModelError,
    Rule,
    canonical_rule_key,
    rule_union_itemset,
)
from conftest import items


def rule(ante: tuple[str, ...], cons: tuple[str, ...]) -> Rule:
    return Rule(antecedent=items(*ante), consequent=items(*cons))


class TestItem:
    def test_render_roundtrip(self):
        it = Item("Weather", "Clear")
        assert it.render() == "Weather:Clear"
        assert Item.parse(it.render()) == it

    def test_value_may_contain_colon(self):
        it = Item.parse("time:12:30")
        assert it.attribute == "time" and it.value == "12:30"

    def test_empty_rejected(self):
        with pytest.raises(ModelError):
            Item(" ", "x")
        with pytest.raises(ModelError):
            Item("a", "")

    def test_whitespace_trimmed(self):
        assert Item(" a ", " b ") == Item("a", "b")


class TestItemSet:
    def test_canonical_order(self):
        s = items("B:2", "A:1", "C:3")
        assert [it.render() for it in s] == ["A:1", "B:2", "C:3"]

    def test_duplicate_attribute_rejected(self):
        with pytest.raises(ModelError):
            items("A:1", "A:2")

    def test_sorting_idempotent(self):
        s = items("B:2", "A:1")
        assert ItemSet.of(s.items) == s

    def test_union_and_subset(self):
        assert items("A:1").union(items("B:2")) == items("A:1", "B:2")
        assert items("A:1").issubset(items("A:1", "B:2"))
        assert not items("C:3").issubset(items("A:1", "B:2"))


class TestRule:
    def test_sides_must_be_disjoint(self):
        with pytest.raises(ModelError):
            rule(("A:1",), ("A:2",))

    def test_sides_must_be_nonempty(self):
        with pytest.raises(ModelError):
            Rule(antecedent=items(), consequent=items("A:1"))


class TestCanonicalRuleKey:
    def test_direct_rendering(self):
        assert canonical_rule_key(rule(("A:1", "B:2"), ("C:3",))) == "A:1,B:2=>C:3"

    def test_order_independent(self):
        assert canonical_rule_key(rule(("B:2", "A:1"), ("C:3",))) == "A:1,B:2=>C:3"

    def test_direction_matters(self):
        assert canonical_rule_key(rule(("A:1",), ("B:2",))) != canonical_rule_key(
            rule(("B:2",), ("A:1",))
        )

    def test_separators_escaped(self):
        tricky = Rule(
            antecedent=ItemSet.of([Item("a,b", "1=2")]),
            consequent=ItemSet.of([Item("c", "3")]),
        )
        key = canonical_rule_key(tricky)
        assert key == "a\\,b:1\\=2=>c:3"

    @given(
        st.lists(
            st.sampled_from(["A:1", "B:2", "C:3", "D:4", "E:5"]),
            min_size=2,
            max_size=5,
            unique=True,
        ),
        st.integers(min_value=1, max_value=4),
        st.randoms(),
    )
    def test_injective_and_order_invariant(self, pool, split, rnd):
        split = min(split, len(pool) - 1)
        ante, cons = pool[:split], pool[split:]
        r1 = rule(tuple(ante), tuple(cons))
        shuffled_a, shuffled_c = list(ante), list(cons)
        rnd.shuffle(shuffled_a)
        rnd.shuffle(shuffled_c)
        r2 = rule(tuple(shuffled_a), tuple(shuffled_c))
        assert canonical_rule_key(r1) == canonical_rule_key(r2)
        if len(ante) == len(cons):
            flipped = rule(tuple(cons), tuple(ante))
            if set(ante) != set(cons):
                assert canonical_rule_key(flipped) != canonical_rule_key(r1)


class TestRuleUnion:
    def test_union(self):
        assert rule_union_itemset(rule(("A:1", "B:2"), ("C:3",))) == items(
            "A:1", "B:2", "C:3"
        )

    def test_placement_invariance(self):
        assert rule_union_itemset(rule(("A:1",), ("B:2", "C:3"))) == rule_union_itemset(
            rule(("A:1", "B:2"), ("C:3",))
        )

    def test_two_item_rule(self):
        assert rule_union_itemset(rule(("A:1",), ("B:2",))) == items("A:1", "B:2")
