import itertools

import pytest
from hypothesis import given, settings, strategies as st

from latticecollapse.geometry import (
    LEFT, RIGHT, GeometryError, LabellingError, LatticeSpec, build_lattice,
    surface_at, validate_labelling, vertex_slots,
)


def lattice(N, depth):
    return build_lattice(LatticeSpec(N, depth))


def test_smallest_lattice():
    g = lattice(1, 1)
    assert len(g.initial_links) == 2
    assert len(g.vertices) == 1
    out = g.outgoing(1)
    assert {l.direction for l in out} == {LEFT, RIGHT}
    s0 = surface_at(g, g.default_labelling, 0)
    s1 = surface_at(g, g.default_labelling, 1)
    assert all(a != b for a, b in zip(s0.links, s1.links))


def test_n2_adjacency_by_hand():
    g = lattice(2, 4)
    # vertex ids: 1=(1,0) 2=(1,1) 3=(2,0) 4=(2,1)
    assert [(v.row, v.column) for v in g.vertices] == [(1, 0), (1, 1), (2, 0), (2, 1)]
    assert [vertex_slots(g, v) for v in (1, 2, 3, 4)] == [(0, 3), (2, 1), (0, 1), (2, 3)]
    assert g.successors(1) == (3, 4)
    assert g.successors(2) == (3, 4)
    for a, b in itertools.product((1, 2), (3, 4)):
        assert g.precedes(a, b)
    assert not g.precedes(1, 2) and not g.precedes(2, 1)
    assert not g.precedes(3, 4) and not g.precedes(4, 3)


def test_n2_every_initial_link_consumed():
    g = lattice(2, 4)
    s = surface_at(g, g.default_labelling, 4)
    assert len(s.links) == 4
    assert not any(l.initial for l in s.links)
    assert {l.source for l in s.links} == {3, 4}


def test_n6_full_row():
    g = lattice(6, 6)
    assert len(g.initial_links) == 12
    assert {v.row for v in g.vertices} == {1}
    s = surface_at(g, g.default_labelling, 6)
    assert not any(l.initial for l in s.links)
    # row 1 vertices are pairwise spacelike
    assert not any(g.precedes(a, b) for a in range(1, 7) for b in range(1, 7))


@pytest.mark.parametrize("N,depth", [(1, 3), (2, 6), (3, 9), (4, 5)])
def test_each_vertex_slots_are_distinct_and_row_is_a_bijection(N, depth):
    g = lattice(N, depth)
    for v in g.vertices:
        left, right = vertex_slots(g, v.id)
        assert left % 2 == 0 and right % 2 == 1
    for row in range(1, depth // N + 1):
        ids = [g.vertex_id(row, c) for c in range(N)]
        slots = [s for vid in ids for s in vertex_slots(g, vid)]
        assert sorted(slots) == list(range(2 * N))


@pytest.mark.parametrize("N,depth", [(1, 4), (2, 8), (3, 7)])
def test_outgoing_takes_slot_of_ingoing_same_direction(N, depth):
    g = lattice(N, depth)
    for v in g.vertices:
        for inc, out in zip(g.ingoing(v.id), g.outgoing(v.id)):
            assert inc.direction == out.direction
            assert g.slot_of(inc) == g.slot_of(out)


def test_initial_link_slots():
    g = lattice(3, 3)
    for k, link in enumerate(g.initial_links):
        assert g.slot_of(link) == k
        assert link.direction == (LEFT if k % 2 == 0 else RIGHT)


@pytest.mark.parametrize("N,depth", [(1, 4), (2, 6), (3, 9)])
def test_causal_order_is_strict_partial_order(N, depth):
    g = lattice(N, depth)
    ids = range(1, depth + 1)
    for a in ids:
        assert not g.precedes(a, a)
        for b in ids:
            if g.precedes(a, b):
                assert not g.precedes(b, a)
                for c in ids:
                    if g.precedes(b, c):
                        assert g.precedes(a, c)


def test_causal_order_matches_successor_closure():
    g = lattice(3, 12)
    for v in g.vertices:
        seen, frontier = set(), list(g.successors(v.id))
        while frontier:
            w = frontier.pop()
            if w not in seen:
                seen.add(w)
                frontier.extend(g.successors(w))
        assert seen == set(g.reach[v.id])


def test_link_order_and_spacelike():
    g = lattice(2, 4)
    lab = g.default_labelling
    l1, l2 = lab.link(g, 1), lab.link(g, 2)
    assert l1.source == 1 and l1.direction == LEFT
    assert l2.source == 1 and l2.direction == RIGHT
    assert g.spacelike(l1, l2)
    # l1 feeds vertex 3, whose outgoing links lie in its future
    l5 = lab.link(g, 5)
    assert g.link_precedes(l1, l5)
    assert not g.link_precedes(l5, l1)
    # initial links precede the outgoing links of the vertex they feed
    assert g.link_precedes(g.initial_links[0], l1)
    assert not g.link_precedes(l1, g.initial_links[0])


def test_labelling_row_major_accepted():
    g = lattice(2, 4)
    assert validate_labelling(g, [1, 2, 3, 4]).order == (1, 2, 3, 4)


def test_labelling_spacelike_swap_accepted():
    g = lattice(2, 4)
    assert validate_labelling(g, [2, 1, 4, 3]).order == (2, 1, 4, 3)


def test_labelling_causal_violation_reports_pair():
    g = lattice(2, 4)
    with pytest.raises(LabellingError) as err:
        validate_labelling(g, [1, 3, 2, 4])
    assert err.value.pair == (2, 3)


@pytest.mark.parametrize("bad", [[1, 2, 3], [1, 1, 2, 3], [0, 1, 2, 3]])
def test_labelling_not_a_permutation(bad):
    with pytest.raises(LabellingError):
        validate_labelling(lattice(2, 4), bad)


def test_surface_zero_is_initial_and_one_replaces_ingoing():
    g = lattice(2, 4)
    lab = g.default_labelling
    s0 = surface_at(g, lab, 0)
    assert s0.links == g.initial_links
    s1 = surface_at(g, lab, 1)
    l1, l2 = lab.link(g, 1), lab.link(g, 2)
    changed = [k for k in range(4) if s0.links[k] != s1.links[k]]
    assert changed == sorted([l1.slot, l2.slot])
    assert s1.links[l1.slot] == l1 and s1.links[l2.slot] == l2


def test_surface_independent_of_spacelike_swap():
    g = lattice(2, 4)
    a = validate_labelling(g, [1, 2, 3, 4])
    b = validate_labelling(g, [2, 1, 3, 4])
    for n in (2, 3, 4):
        assert surface_at(g, a, n).links == surface_at(g, b, n).links
    assert surface_at(g, a, 1).links != surface_at(g, b, 1).links


def test_surface_links_mutually_spacelike():
    g = lattice(3, 9)
    lab = g.default_labelling
    for n in range(10):
        links = surface_at(g, lab, n).links
        for x, y in itertools.combinations(links, 2):
            assert g.spacelike(x, y)


@pytest.mark.parametrize("N,depth", [(0, 1), (2, 0), (-1, 3)])
def test_bad_spec(N, depth):
    with pytest.raises(GeometryError):
        LatticeSpec(N, depth)


def test_surface_index_out_of_range():
    g = lattice(1, 2)
    with pytest.raises(GeometryError):
        surface_at(g, g.default_labelling, 3)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 3), rows=st.integers(1, 3), data=st.data())
def test_random_linear_extensions_accepted(N, rows, data):
    g = lattice(N, N * rows)
    # shuffle within each row: every such order respects causality
    order = []
    for r in range(1, rows + 1):
        ids = [g.vertex_id(r, c) for c in range(N)]
        order += data.draw(st.permutations(ids))
    lab = validate_labelling(g, order)
    assert surface_at(g, lab, len(order)).links == surface_at(g, g.default_labelling, len(order)).links
