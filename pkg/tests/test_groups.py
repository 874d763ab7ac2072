import json

import pytest
from hypothesis import given, strategies as st

from campana_lab.errors import NotAGroup, UnknownName
from campana_lab.groups import (
    GroupTable,
    builtin_group,
    builtin_groups_of_order,
    cyclic,
    group_from_cayley,
    group_from_json,
    klein4,
    right_translate,
    sym3,
)


def test_trivial_group():
    G = group_from_cayley([[0]])
    assert G.order == 1
    assert G.identity == 0
    assert G.inverse == (0,)


def test_cyclic_c3_table():
    G = group_from_cayley([[(i + j) % 3 for j in range(3)] for i in range(3)])
    assert G.identity == 0
    assert G.inverse[1] == 2


def test_not_latin_square_rejected():
    with pytest.raises(NotAGroup):
        group_from_cayley([[0, 1], [1, 1]])


def test_latin_square_without_associativity_rejected():
    # order-5 quasigroup: subtraction mod 5 is a Latin square, not a group
    table = [[(i - j) % 5 for j in range(5)] for i in range(5)]
    with pytest.raises(NotAGroup, match="associativity|identity"):
        group_from_cayley(table)


def test_order_cap():
    with pytest.raises(NotAGroup):
        group_from_cayley([[(i + j) % 13 for j in range(13)] for i in range(13)])


def test_builtin_cyclic2():
    G = builtin_group("cyclic(2)")
    assert G.cayley == ((0, 1), (1, 0))


def test_builtin_klein4_all_involutions():
    G = klein4()
    assert G.order == 4
    assert all(G.element_order(g) == 2 for g in range(1, 4))


def test_builtin_sym3_nonabelian():
    G = sym3()
    assert G.order == 6
    assert any(G.mul(a, b) != G.mul(b, a) for a in range(6) for b in range(6))


def test_builtin_unknown_name():
    with pytest.raises(UnknownName):
        builtin_group("quaternion8")


def test_builtin_groups_of_order():
    assert [g.name for g in builtin_groups_of_order(4)] == ["cyclic(4)", "klein4"]
    assert [g.name for g in builtin_groups_of_order(6)] == ["cyclic(6)", "sym3"]


def test_right_translate_c3():
    G = cyclic(3)
    assert right_translate(G, (0, 1), 1) == (1, 2)


def test_right_translate_identity_fixes():
    G = sym3()
    ms = (0, 2, 2, 5)
    assert right_translate(G, ms, G.identity) == ms


def test_right_translate_c2_fixed_class():
    G = cyclic(2)
    assert right_translate(G, (0, 1), 1) == (0, 1)


def test_group_from_json(tmp_path):
    path = tmp_path / "c4.json"
    path.write_text(json.dumps([[(i + j) % 4 for j in range(4)] for i in range(4)]))
    G = group_from_json(path)
    assert G.order == 4
    assert G.name == "c4"


@st.composite
def group_and_multiset(draw):
    G = draw(st.sampled_from([cyclic(2), cyclic(3), cyclic(5), klein4(), sym3()]))
    m = draw(st.integers(1, 5))
    ms = tuple(sorted(draw(st.lists(
        st.integers(0, G.order - 1), min_size=m, max_size=m))))
    g = draw(st.integers(0, G.order - 1))
    return G, ms, g


@given(group_and_multiset())
def test_translate_roundtrip(data):
    G, ms, g = data
    moved = right_translate(G, ms, g)
    assert right_translate(G, moved, G.inverse[g]) == ms


@given(group_and_multiset())
def test_regular_action_is_bijective(data):
    G, _, g = data
    image = {G.cayley[h][g] for h in range(G.order)}
    assert image == set(range(G.order))


@pytest.mark.parametrize("d", [2, 3, 5, 7, 11])
def test_prime_cyclic_element_orders(d):
    G = cyclic(d)
    assert all(G.element_order(g) == d for g in range(1, d))
