from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapcomplete.base_topology import BasePoint
from mapcomplete.errors import InputError
from mapcomplete.metric_mapping import CarrierPoint
from mapcomplete.rationals import frac_ceil
from mapcomplete.tied_cauchy import (
    RegularSeq,
    TiedCauchySeq,
    TyingWitness,
    apartness_witness,
    check_regularity,
    check_tying,
    const_seq,
    gap_interval,
    newton_sqrt_seq,
    table_seq,
)

from oracles import sqrt_interval


def test_const_seq_defaults(sierpinski, by_code):
    x_a = by_code(sierpinski, "x_a")
    s = const_seq(sierpinski, x_a)
    assert s.at(1) == s.at(100) == x_a
    assert s.y == BasePoint("a")
    assert s.tie.index_for(("a",)) == 1
    assert check_regularity(s, 16) == []
    assert check_tying(s, 16) == []


def test_const_seq_rejects_foreign_point(sierpinski):
    with pytest.raises(InputError):
        const_seq(sierpinski, CarrierPoint("nope"))


def test_newton_regularity_depth_32(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    assert check_regularity(s, 32) == []


def test_newton_terms_approach_the_oracle_interval(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    lo, hi = sqrt_interval(Fraction(2))
    for n in (1, 10, 204, 205, 4096):
        x = s.at(n).code
        assert max(abs(x - lo), abs(x - hi)) < Fraction(1, n)


def test_newton_preconditions(unit_interval_identity, sierpinski):
    with pytest.raises(InputError):
        newton_sqrt_seq(unit_interval_identity, Fraction(1, 2))  # a < 1
    with pytest.raises(InputError):
        newton_sqrt_seq(sierpinski, Fraction(2))  # table distance, not abs_diff
    with pytest.raises(InputError):
        # start iterate (a+1)/2 = 3/2 falls outside the carrier (0, 1)
        newton_sqrt_seq(unit_interval_identity, Fraction(2))


def test_harmonic_sequence_is_regular(unit_interval_identity):
    m = unit_interval_identity
    s = TiedCauchySeq(
        m,
        RegularSeq(lambda n: CarrierPoint(Fraction(1, n + 1))),
        BasePoint(Fraction(0)),
        TyingWitness(lambda o: frac_ceil(1 / o.hi)),
    )
    assert check_regularity(s, 64) == []


def test_alternating_sequence_violates_first_at_2_3():
    from mapcomplete.base_topology import FiniteBase
    from mapcomplete.metric_mapping import table_mapping

    base = FiniteBase.of(["a"], [["a"]])
    m = table_mapping(base, {"p0": "a", "p1": "a"}, {("p0", "p1"): Fraction(1)})
    p0, p1 = m.points()
    s = TiedCauchySeq(
        m,
        RegularSeq(lambda n: p1 if n % 2 else p0),
        BasePoint("a"),
        TyingWitness(lambda o: 1),
    )
    report = check_regularity(s, 8)
    assert report
    assert report[0].witness[:2] == (2, 3)


def test_tying_const_on_both_opens(sierpinski, by_code):
    s = const_seq(sierpinski, by_code(sierpinski, "x_a"))
    assert check_tying(s, 12) == []


def test_tying_cross_fiber_claim_holds_on_nested_basis(incomplete_instance, by_code):
    # x_b, x_b, ... declared tied to a: the only basic open around a is
    # {a, b}, and the fiber b lies inside it.
    x_b = by_code(incomplete_instance, "x_b")
    s = const_seq(incomplete_instance, x_b, BasePoint("a"))
    assert check_tying(s, 12) == []


def test_tying_cross_fiber_claim_fails_on_discrete_basis(sierpinski_discrete, by_code):
    x_b = by_code(sierpinski_discrete, "x_b")
    s = const_seq(sierpinski_discrete, x_b, BasePoint("a"))
    report = check_tying(s, 12)
    assert [v.kind for v in report] == ["tying"]


def test_table_seq_tie_scan(sierpinski, by_code):
    x_a, x_b = by_code(sierpinski, "x_a"), by_code(sierpinski, "x_b")
    s = table_seq(sierpinski, [x_b, x_b], x_a)
    assert s.at(1) == x_b and s.at(2) == x_b and s.at(3) == x_a
    # {a} only contains the tail fiber; {a,b} contains everything
    assert s.tie.index_for(("a",)) == 3
    assert s.tie.index_for(("a", "b")) == 1
    assert check_tying(s, 16) == []


def test_table_seq_rejects_irregular_prefix(interval_mapping):
    half = CarrierPoint(Fraction(1, 2))
    far = CarrierPoint(Fraction(5, 2))
    with pytest.raises(InputError):
        table_seq(interval_mapping, [far], half)  # d(at(1), tail) = 2 > 1


def test_table_seq_witness_errors_on_unreachable_open(sierpinski_discrete, by_code):
    x_b = by_code(sierpinski_discrete, "x_b")
    s = table_seq(sierpinski_discrete, [], x_b, BasePoint("a"))
    report = check_tying(s, 8)
    assert [v.kind for v in report] == ["witness"]


def test_tying_on_rational_order_base(unit_interval_identity):
    m = unit_interval_identity
    honest = TiedCauchySeq(
        m,
        RegularSeq(lambda n: CarrierPoint(Fraction(1, n + 1))),
        BasePoint(Fraction(0)),
        TyingWitness(lambda o: frac_ceil(1 / o.hi) + 1),
    )
    assert check_tying(honest, 40) == []
    lying = TiedCauchySeq(m, honest.seq, BasePoint(Fraction(0)), TyingWitness(lambda o: 1))
    report = check_tying(lying, 40)
    assert report and all(v.kind == "tying" for v in report)


def test_memoized_sequences_are_thread_transparent(interval_mapping):
    # Concurrent evaluation of a memoizing term function must agree with
    # sequential evaluation.
    import threading

    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    expected = {n: s.at(n).code for n in range(1, 300, 7)}

    fresh = newton_sqrt_seq(interval_mapping, Fraction(2))
    results: dict[int, object] = {}
    errors: list[BaseException] = []

    def worker(indices):
        try:
            for n in indices:
                results[n] = fresh.at(n).code
        except BaseException as e:  # pragma: no cover - failure reporting
            errors.append(e)

    all_indices = list(range(1, 300, 7))
    threads = [
        threading.Thread(target=worker, args=(all_indices[i::4],)) for i in range(4)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert results == expected


def test_gap_interval_const_pair_formula(sierpinski, by_code):
    x_a, x_b = by_code(sierpinski, "x_a"), by_code(sierpinski, "x_b")
    s, s2 = const_seq(sierpinski, x_a), const_seq(sierpinski, x_b)
    for n in (1, 3, 10):
        lo, hi = gap_interval(s, s2, n)
        d = sierpinski.distance(x_a, x_b)
        assert lo == max(Fraction(0), d - Fraction(2, n))
        assert hi == d + Fraction(2, n)


def test_gap_interval_self_is_small(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    lo, hi = gap_interval(s, s, 25)
    assert lo == 0 and hi <= Fraction(4, 25)


def test_gap_interval_brackets_the_oracle_value(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    c = const_seq(interval_mapping, CarrierPoint(Fraction(3, 2)))
    lo, hi = gap_interval(s, c, 10**7)
    target_lo, target_hi = sqrt_interval(Fraction(2))
    assert lo <= Fraction(3, 2) - target_hi and Fraction(3, 2) - target_lo <= hi
    assert hi - lo <= Fraction(4, 10**7)


def test_gap_interval_rejects_mixed_mappings(sierpinski, interval_mapping, by_code):
    s = const_seq(sierpinski, by_code(sierpinski, "x_a"))
    c = const_seq(interval_mapping, CarrierPoint(Fraction(1)))
    with pytest.raises(InputError):
        gap_interval(s, c, 4)


def test_apartness_const_points_at_distance_one():
    from mapcomplete.base_topology import FiniteBase
    from mapcomplete.metric_mapping import table_mapping

    base = FiniteBase.of(["a"], [["a"]])
    m = table_mapping(base, {"u": "a", "v": "a"}, {("u", "v"): Fraction(1)})
    u, v = m.points()
    bound = apartness_witness(const_seq(m, u), const_seq(m, v), 8)
    assert bound is not None and bound >= Fraction(3, 4)


def test_apartness_self_is_indistinguishable(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    assert apartness_witness(s, s, 64) is None


def test_apartness_newton_vs_three_halves(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    c = const_seq(interval_mapping, CarrierPoint(Fraction(3, 2)))
    bound = apartness_witness(s, c, 100)
    assert bound is not None and bound > Fraction(6, 100)


small_fracs = st.fractions(min_value=Fraction(-1, 2), max_value=Fraction(1, 2), max_denominator=64)

# immutable, safe to share across hypothesis examples
_INTERVAL = None


def _interval():
    global _INTERVAL
    if _INTERVAL is None:
        from mapcomplete.base_topology import EnumeratedBase
        from mapcomplete.metric_mapping import RationalIntervalCarrier, abs_diff_mapping

        _INTERVAL = abs_diff_mapping(
            RationalIntervalCarrier(Fraction(0), Fraction(3)),
            EnumeratedBase.one_point("o"),
        )
    return _INTERVAL


@settings(max_examples=60, deadline=None)
@given(tail=st.fractions(min_value=1, max_value=2, max_denominator=32),
       deltas=st.lists(small_fracs, max_size=6))
def test_gap_intervals_share_a_common_point(tail, deltas):
    # Build a regular table by shrinking offsets: |delta_i| <= 1/(2i)
    m = _interval()
    t = CarrierPoint(tail)
    prefix = [
        CarrierPoint(tail + d / (2 * (i + 1) * (1 + abs(d) * 2)))
        for i, d in enumerate(deltas)
    ]
    s = table_seq(m, prefix, t)
    c = const_seq(m, CarrierPoint(Fraction(1, 2)))
    intervals = [gap_interval(s, c, n) for n in range(1, 12)]
    assert max(lo for lo, _ in intervals) <= min(hi for _, hi in intervals)


def test_apartness_agrees_with_gap(interval_mapping):
    s = newton_sqrt_seq(interval_mapping, Fraction(2))
    c = const_seq(interval_mapping, CarrierPoint(Fraction(3, 2)))
    bound = apartness_witness(s, c, 64)
    assert bound is not None
    n = frac_ceil(8 / bound)
    lo, _ = gap_interval(s, c, n)
    assert lo >= bound / 2
