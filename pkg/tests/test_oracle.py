"""Oracle accounting, atomicity, and restriction tests."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptf_lab.oracle import DisallowedOrder, Oracle, QueryLedger, QuerySet
from ptf_lab.polynomial import Polynomial, from_roots

F = Fraction


def quad_oracle(**kw):
    # hidden x^2 - 3x + 2
    return Oracle(Polynomial([2, -3, 1]), QuerySet.full(2), **kw)


class TestQuery:
    def test_label_query_counts_one(self):
        o = quad_oracle()
        assert o.query(0, 0) == 1
        assert o.ledger.total == 1
        assert o.ledger.rounds == 1
        assert o.ledger.per_order == {0: 1}

    def test_sign_zero_convention(self):
        # derivative 2x - 3 vanishes at 1.5; answer is +1
        o = Oracle(Polynomial([2.0, -3.0, 1.0]), QuerySet.full(2))
        assert o.query(1.5, 1) == 1
        exact = quad_oracle()
        assert exact.query(F(3, 2), 1) == 1

    def test_disallowed_order(self):
        o = Oracle(Polynomial([0, 0, 1]), QuerySet.label_only(2))
        with pytest.raises(DisallowedOrder):
            o.query(5, 1)
        assert o.ledger.total == 0

    def test_missing_order_query_set(self):
        qs = QuerySet.missing(4, 2)
        assert qs.allowed_orders == frozenset({0, 1, 3})
        o = Oracle(Polynomial([0, 0, 0, 0, 1]), qs)
        with pytest.raises(DisallowedOrder):
            o.query(1, 2)
        o.query(1, 3)  # other orders still fine
        with pytest.raises(DisallowedOrder):
            o.query_batch([(1, 0), (1, 2)])
        with pytest.raises(DisallowedOrder):
            o.full_pattern_query(1)
        assert o.ledger.total == 1


class TestQueryBatch:
    def test_batch_costs_len_but_one_round(self):
        o = quad_oracle()
        answers = o.query_batch([(0, 0), (1, 0), (3, 0)])
        assert answers == [1, 1, 1]
        assert o.ledger.total == 3
        assert o.ledger.rounds == 1

    def test_empty_batch_is_free(self):
        o = quad_oracle()
        assert o.query_batch([]) == []
        assert o.ledger.total == 0
        assert o.ledger.rounds == 0

    def test_bad_order_rejects_whole_batch(self):
        o = Oracle(Polynomial([0, 0, 1]), QuerySet.label_only(2))
        with pytest.raises(DisallowedOrder):
            o.query_batch([(1, 0), (1, 1)])
        assert o.ledger.total == 0
        assert o.ledger.rounds == 0

    def test_vectorized_path_matches_scalar(self):
        hidden = from_roots([0.2, 0.5, 0.9])
        requests = [(x / 40, o) for x in range(40) for o in (0, 1, 2)]
        o1 = Oracle(hidden, QuerySet.full(3))
        big = o1.query_batch(requests)  # 120 requests takes the grouped path
        o2 = Oracle(hidden, QuerySet.full(3))
        small = [o2.query(x, order) for x, order in requests]
        assert big == small


class TestFullPattern:
    def test_costs_d_queries_one_round(self):
        o = quad_oracle()
        assert o.full_pattern_query(-1) == (1, -1)
        assert o.ledger.total == 2
        assert o.ledger.rounds == 1

    def test_repeat_recounts(self):
        o = quad_oracle()
        first = o.full_pattern_query(0)
        second = o.full_pattern_query(0)
        assert first == second
        assert o.ledger.total == 4

    def test_public_leading_sign_appends_constant(self):
        o = quad_oracle(leading_sign_public=True)
        pat = o.full_pattern_query(-1)
        assert len(pat) == 3
        assert pat[2] == 1  # second derivative of x^2-3x+2 is the constant 2

    def test_degree_five_costs_five(self):
        o = Oracle(Polynomial([0, 0, 0, 0, 0, 1]), QuerySet.full(5))
        o.full_pattern_query(2)
        assert o.ledger.total == 5


class TestLedger:
    def test_json_shape(self):
        o = quad_oracle()
        o.query(0, 0)
        o.query(0, 1)
        o.query(1, 1)
        assert o.ledger.to_json() == {
            "total": 3,
            "rounds": 3,
            "per_order": {"0": 1, "1": 2},
        }

    def test_total_equals_per_order_sum(self):
        ledger = QueryLedger()
        ledger.record([0, 0, 1])
        ledger.record([1])
        assert ledger.total == sum(ledger.per_order.values()) == 4
        assert ledger.rounds == 2


@given(
    x=st.fractions(min_value=-4, max_value=4, max_denominator=32),
    order=st.integers(min_value=0, max_value=1),
)
@settings(max_examples=50, deadline=None)
def test_determinism(x, order):
    hidden = from_roots([F(1, 3), F(5, 3)])
    o = Oracle(hidden, QuerySet.full(2))
    assert o.query(x, order) == o.query(x, order)
    assert o.ledger.total == 2


@given(
    sizes=st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=6)
)
@settings(max_examples=50, deadline=None)
def test_ledger_conservation(sizes):
    o = quad_oracle()
    expected = 0
    for k in sizes:
        o.query_batch([(i, i % 2) for i in range(k)])
        expected += k
    assert o.ledger.total == expected
    assert o.ledger.rounds == sum(1 for k in sizes if k > 0)
