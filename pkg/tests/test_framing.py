import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stablimits.chars import Character, Monomial
from stablimits.framing import (
    BlockPartition,
    FramingPoint,
    QuiverFrame,
    active_hyperplanes,
    component_count,
    cyclic_order,
    enumerate_fixed_components,
    framing_report,
    framing_split,
    index_blocks,
    invariant_polarization_split,
    normal_character_crosses_blocks,
    weak_compositions,
)

F = Fraction


def point(*coords):
    return FramingPoint(tuple(F(c) for c in coords))


framing_points = st.lists(
    st.fractions(min_value=-3, max_value=3).map(lambda f: F(f.limit_denominator(6))),
    min_size=1,
    max_size=5,
).map(lambda cs: FramingPoint(tuple(cs)))


def test_active_hyperplanes_examples():
    assert active_hyperplanes(point(0, 1, F(1, 2))) == [(1, 2, -1)]
    p = point(0, 0, 0)
    assert active_hyperplanes(p) == [(1, 2, 0), (1, 3, 0), (2, 3, 0)]
    assert active_hyperplanes(point(0, F(1, 2))) == []


def test_index_blocks_examples():
    assert index_blocks(point(0, 1, F(1, 2))).blocks == ((1, 2), (3,))
    assert index_blocks(point(0, F(1, 2), F(1, 3))).blocks == ((1,), (2,), (3,))
    assert index_blocks(point(0, 0, 0)).blocks == ((1, 2, 3),)


def test_cyclic_order_examples():
    assert cyclic_order(point(0, F(1, 2))) == 2
    assert cyclic_order(point(F(1, 3), F(1, 6))) == 6
    assert cyclic_order(point(2, -1)) == 1


@given(framing_points)
def test_cyclic_order_is_minimal(p):
    b = cyclic_order(p)
    assert all((b * c).denominator == 1 for c in p.coordinates)
    for m in range(1, b):
        assert not all((m * c).denominator == 1 for c in p.coordinates)


@given(framing_points)
def test_block_relation_matches_invariance(p):
    """a_i/a_j is fixed by the cyclic shift iff i and j share a block."""
    blocks = index_blocks(p)
    names = tuple(f"a{i+1}" for i in range(len(p)))
    weight = p.weight(names)
    k = len(p)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if i == j:
                continue
            ratio = Character.monomial(
                Monomial({names[i - 1]: 1, names[j - 1]: -1})
            )
            invariant = not ratio.invariant_part(weight).is_zero
            assert invariant == (not normal_character_crosses_blocks(i, j, blocks))


@given(framing_points, st.integers(0, 10), st.integers(0, 10))
def test_block_refinement_monotonicity(p, pick1, pick2):
    """Moving the point onto an additional hyperplane (keeping all the ones
    it already lies on) can only merge blocks, never split them."""
    blocks = index_blocks(p)
    if len(blocks.blocks) < 2:
        return
    b1 = blocks.blocks[pick1 % len(blocks.blocks)]
    b2 = blocks.blocks[pick2 % len(blocks.blocks)]
    if b1 == b2:
        return
    i, j = b1[0], b2[0]
    # shift the whole block of j so that w_i - w_j becomes an integer; all
    # intra-block differences are preserved, so the old hyperplanes remain
    delta = p.coordinates[i - 1] - p.coordinates[j - 1]
    shift = delta - delta.numerator // delta.denominator
    moved = FramingPoint(
        tuple(
            c + shift if (k + 1) in b2 else c
            for k, c in enumerate(p.coordinates)
        )
    )
    old_active = set(active_hyperplanes(p))
    new_active = set(active_hyperplanes(moved))
    assert old_active <= new_active
    assert index_blocks(p).refines(index_blocks(moved))


def test_weak_compositions_count():
    assert list(weak_compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(weak_compositions(4, 3))) == math.comb(4 + 2, 2)
    assert list(weak_compositions(0, 0)) == [()]


def test_enumerate_fixed_components_single_vertex():
    frame = QuiverFrame((2,), (2,))
    blocks = BlockPartition(((1,), (2,)))
    comps = enumerate_fixed_components(frame, blocks)
    assert [tuple(c[k][0] for k in range(2)) for c in comps] == [(0, 2), (1, 1), (2, 0)]
    assert component_count(frame, blocks) == 3


def test_enumerate_fixed_components_one_block():
    frame = QuiverFrame((2,), (3,))
    blocks = BlockPartition(((1, 2),))
    comps = enumerate_fixed_components(frame, blocks)
    assert comps == [((3,),)]


def test_enumerate_fixed_components_two_vertices():
    frame = QuiverFrame((1, 1), (1, 1))
    blocks = BlockPartition(((1,), (2,)))
    comps = enumerate_fixed_components(frame, blocks)
    assert len(comps) == 4
    assert component_count(frame, blocks) == 4


@given(
    st.lists(st.integers(0, 4), min_size=1, max_size=3),
    st.integers(1, 4),
)
@settings(max_examples=30, deadline=None)
def test_component_count_is_product_of_compositions(dims, block_count):
    r = tuple(1 for _ in dims)
    frame = QuiverFrame(r, tuple(dims))
    total = sum(r)
    if block_count > total:
        block_count = total
    # contiguous blocks over the framing coordinates
    cuts = sorted({1, *range(2, total + 1)})[:block_count]
    blocks = []
    indices = list(range(1, total + 1))
    size = max(1, total // block_count)
    blocks = [tuple(indices[i : i + size]) for i in range(0, total, size)]
    bp = BlockPartition(tuple(blocks))
    comps = enumerate_fixed_components(frame, bp)
    assert len(comps) == component_count(frame, bp)
    expected = 1
    for n in dims:
        expected *= math.comb(n + len(bp.blocks) - 1, len(bp.blocks) - 1)
    assert len(comps) == expected


def test_framing_split():
    frame = QuiverFrame((2, 1), (3, 2))
    blocks = BlockPartition(((1, 3), (2,)))
    assert framing_split(frame, blocks) == [(1, 1), (1, 0)]


def test_invariant_polarization_split_examples():
    P = Character.from_text("1*a1*a2^-1 + 1*a2*a1^-1")
    inv, mov = invariant_polarization_split(P, point(0, F(1, 2)), ("a1", "a2"))
    assert inv.is_zero and mov == P
    inv, mov = invariant_polarization_split(P, point(0, 1), ("a1", "a2"))
    assert inv == P and mov.is_zero
    const = Character.from_text("3")
    inv, mov = invariant_polarization_split(const, point(0, F(1, 2)), ("a1", "a2"))
    assert inv == const and mov.is_zero


def test_framing_report_shape():
    rep = framing_report(QuiverFrame((2,), (2,)), point(0, 1))
    assert rep["blocks"] == [[1, 2]]
    assert rep["cyclic_order"] == 1
    assert rep["component_count"] == 1
    rep = framing_report(None, point(0, F(1, 2)))
    assert "component_count" not in rep


def test_quiver_frame_validation():
    with pytest.raises(ValueError):
        QuiverFrame((1,), (1, 2))
    with pytest.raises(ValueError):
        QuiverFrame((-1,), (1,))
    frame = QuiverFrame((2, 1), (1, 1))
    assert frame.coordinate_vertex(1) == 1
    assert frame.coordinate_vertex(2) == 1
    assert frame.coordinate_vertex(3) == 2
