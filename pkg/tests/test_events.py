import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latticecollapse.events import (
    Event, EventError, FieldConfig, JointEvent, as_joint, complement, config_bits,
    config_index, cylinder, field_value_event, hamming, intersect, refine, time_extent, union,
)

from conftest import all_bits


def members(event, m):
    """Membership table over every config at extent ``m``, decided history by history."""
    return {h for h in all_bits(m) if event.contains(h)}


events_at = st.integers(0, 3).flatmap(
    lambda n: st.sets(st.integers(0, 4 ** n - 1)).map(lambda s: Event(n, s)))


# configurations ------------------------------------------------------------

def test_config_index_bit_order():
    assert config_index("10") == 1
    assert config_index("01") == 2
    assert config_index("0001") == 8
    for i in range(64):
        assert config_index(config_bits(i, 3)) == i


def test_field_config_validation():
    with pytest.raises(EventError):
        FieldConfig("101")
    with pytest.raises(EventError):
        FieldConfig("1a")
    assert FieldConfig("").extent == 0


def test_hamming_examples():
    assert hamming("0110", "0110") == 0
    assert hamming("00", "01") == 1
    with pytest.raises(EventError):
        hamming("00", "0000")


@settings(max_examples=60)
@given(n=st.integers(1, 4), data=st.data())
def test_hamming_symmetric_and_bounded(n, data):
    a = data.draw(st.text("01", min_size=2 * n, max_size=2 * n))
    b = data.draw(st.text("01", min_size=2 * n, max_size=2 * n))
    assert hamming(a, b) == hamming(b, a) <= 2 * n


# cylinders, refinement and extent -----------------------------------------

def test_empty_cylinder_is_omega():
    assert cylinder("") == Event.omega()
    assert time_extent(Event.omega()) == 0


def test_cylinder_membership():
    c = cylinder("10")
    assert c.contains("10") and c.contains("1011")
    assert not c.contains("11") and not c.contains("0000")


def test_refine_omega_gives_four_cylinders():
    r = refine(Event.omega(), 1)
    assert sorted(r.bits()) == ["00", "01", "10", "11"]
    pieces = [cylinder(b) for b in r.bits()]
    for a, b in itertools.combinations(pieces, 2):
        assert a.disjoint(b)


def test_refine_cylinder_one_step():
    r = refine(cylinder("10"), 2)
    assert r.extent == 2
    assert sorted(r.bits()) == ["1000", "1001", "1010", "1011"]
    assert r == cylinder("10")


def test_refine_to_own_extent_is_identity():
    e = Event(2, [3, 7, 11])
    r = refine(e, 2)
    assert r.extent == e.extent and r.configs == e.configs


def test_refine_to_smaller_extent_rejected():
    with pytest.raises(EventError):
        refine(cylinder("0110"), 1)


def test_time_extent_recovered_after_refinement():
    assert time_extent(refine(cylinder("01"), 3)) == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_E_k_time_extent(k):
    E = field_value_event(2 * k)
    assert time_extent(E) == k
    assert members(E, k) == {h for h in all_bits(k) if h[2 * k - 1] == "1"}


def test_E_1_two_cylinders():
    E = field_value_event(2)
    assert E.extent == 1
    assert sorted(E.bits()) == ["01", "11"]


def test_event_extent_limits():
    with pytest.raises(EventError):
        Event(-1, [])
    with pytest.raises(EventError):
        Event(1, [4])


# ring laws by membership -----------------------------------------------

@settings(max_examples=80)
@given(a=events_at, b=events_at)
def test_union_and_intersection_membership(a, b):
    m = max(a.extent, b.extent)
    A, B = members(a, m), members(b, m)
    assert members(union(a, b), m) == A | B
    assert members(intersect(a, b), m) == A & B
    assert members(a - b, m) == A - B
    assert members(complement(a), m) == set(all_bits(m)) - A
    assert a.disjoint(b) == (not (A & B))


@settings(max_examples=60)
@given(a=events_at, b=events_at, c=events_at)
def test_ring_laws(a, b, c):
    assert a | b == b | a
    assert a & b == b & a
    assert (a | b) | c == a | (b | c)
    assert a & (b | c) == (a & b) | (a & c)
    assert ~~a == a
    assert ~(a | b) == ~a & ~b
    assert a | ~a == Event.omega()
    assert (a & ~a).is_empty


@settings(max_examples=60)
@given(a=events_at, m=st.integers(0, 5))
def test_refinement_preserves_equality_and_hash(a, m):
    if m < a.extent:
        return
    r = refine(a, m)
    assert r == a and hash(r) == hash(a)
    assert time_extent(r) == time_extent(a) <= a.extent


def test_empty_event():
    e = Event.empty()
    assert e.is_empty and time_extent(e) == 0
    assert Event(2, []) == e


# text format -----------------------------------------------------------

@settings(max_examples=60)
@given(a=events_at)
def test_text_round_trip(a):
    b = Event.from_text(a.to_text())
    assert b.extent == a.extent and b.configs == a.configs


def test_text_examples():
    assert Event.omega().to_text() == "0;-"
    assert cylinder("10").to_text() == "1;10"
    assert Event.empty().to_text() == "0;"
    assert Event.from_text("2;1000, 0111") == Event(2, [1, 14])
    with pytest.raises(EventError):
        Event.from_text("two;10")


# joint events ----------------------------------------------------------

def test_joint_product_and_refinement():
    J = JointEvent.product(cylinder("10"), Event.omega())
    assert J.extent == 1 and len(J.pairs) == 4
    fine = JointEvent(2, J.pairs_at(2))
    assert fine == J and hash(fine) == hash(J)
    assert len(fine.pairs) == 64


def test_joint_set_algebra():
    A = JointEvent.product(cylinder("00"), cylinder("11"))
    B = JointEvent.product(cylinder("01"), Event.omega())
    assert A.disjoint(B)
    assert len(A.union(B).pairs) == 5
    assert A.intersect(JointEvent.omega()) == A


def test_as_joint():
    J = as_joint((cylinder("10"), cylinder("01")))
    assert J.pairs == frozenset({(1, 2)})
    assert as_joint(J) is J


def test_configs_at_refines():
    e = Event(1, [0, 2])
    np.testing.assert_array_equal(e.configs_at(2), [0, 2, 4, 6, 8, 10, 12, 14])
