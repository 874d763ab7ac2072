import math
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings, strategies as st

from campana_lab.errors import InvalidCombination
from campana_lab.groups import builtin_groups_of_order, cyclic, klein4, sym3
from campana_lab.orbits import (
    MonomialSum,
    all_partitions,
    b_exponent,
    count_s_gm,
    fan_identity_check,
    full_monomial_sum,
    orbit_classes,
    partition_identity_check,
    phi_polynomial,
    reduced_classes,
    weighted_monomial_count,
)


def valid_m_values(d, limit=8):
    if d in (2, 3, 5, 7, 11):
        return [m for m in range(2, limit + 1)]
    return [m for m in range(2, limit + 1) if math.gcd(d, m) == 1]


def test_orbit_classes_c3_m2():
    assert len(orbit_classes(cyclic(3), 2)) == 2


def test_orbit_classes_c2_m2():
    classes = orbit_classes(cyclic(2), 2)
    assert len(classes) == 2
    reps = {c.representative for c in classes}
    assert reps == {(0, 0), (0, 1)}
    sizes = {c.representative: c.orbit_size for c in classes}
    assert sizes[(0, 0)] == 2  # {0,0} ~ {1,1}
    assert sizes[(0, 1)] == 1  # fixed class


def test_singletons_collapse():
    for G in (cyclic(4), klein4(), sym3()):
        assert len(orbit_classes(G, 1)) == 1


def test_reduced_classes_examples():
    assert len(reduced_classes(cyclic(3), 2)) == 2
    assert len(reduced_classes(cyclic(2), 2)) == 1
    assert len(reduced_classes(cyclic(5), 3)) == 7


def test_b_exponent_values():
    for m in range(2, 12):
        assert b_exponent(2, m) == 1
    assert b_exponent(3, 2) == 2
    assert b_exponent(5, 3) == 7


def test_b_exponent_invalid():
    with pytest.raises(InvalidCombination):
        b_exponent(4, 2)


def test_count_s_gm():
    assert count_s_gm(3, 2) == 2
    assert count_s_gm(2, 2) == 2
    with pytest.raises(InvalidCombination):
        count_s_gm(4, 2)


def test_phi_polynomial_examples():
    G2 = cyclic(2)
    cls = {c.representative: c for c in orbit_classes(G2, 2)}
    assert phi_polynomial(G2, cls[(0, 0)]).as_dict() == {(2, 0): 1, (0, 2): 1}
    assert phi_polynomial(G2, cls[(0, 1)]).as_dict() == {(1, 1): 2}
    G3 = cyclic(3)
    cls3 = {c.representative: c for c in orbit_classes(G3, 2)}
    assert phi_polynomial(G3, cls3[(0, 0)]).as_dict() == {
        (2, 0, 0): 1,
        (0, 2, 0): 1,
        (0, 0, 2): 1,
    }


def test_phi_constant_on_orbit():
    from campana_lab.groups import right_translate
    from campana_lab.orbits import OrbitClass

    G = sym3()
    for cls in orbit_classes(G, 3):
        base = phi_polynomial(G, cls)
        for g in range(G.order):
            moved = right_translate(G, cls.representative, g)
            alt = OrbitClass(moved, cls.orbit_size, cls.distinct_support)
            assert phi_polynomial(G, alt) == base


def test_phi_mass_is_d():
    for G in (cyclic(3), klein4(), sym3()):
        for cls in orbit_classes(G, 2):
            assert phi_polynomial(G, cls).total_mass() == G.order


def test_phi_supports_disjoint_when_coprime():
    G = sym3()
    m = 5
    seen = set()
    for cls in orbit_classes(G, m):
        support = {e for e, _ in phi_polynomial(G, cls).coefficients}
        assert not (support & seen)
        seen |= support


def test_partition_identity_c3_m2():
    report = partition_identity_check(cyclic(3), 2)
    assert report.holds
    assert report.defect.is_zero()


def test_partition_identity_c2_m2_correction():
    # d = 2 divides m = 2: correction term x0*x1 appears on the right
    report = partition_identity_check(cyclic(2), 2)
    assert report.holds
    lhs = {}
    for cls in orbit_classes(cyclic(2), 2):
        for e, c in phi_polynomial(cyclic(2), cls).coefficients:
            lhs[e] = lhs.get(e, 0) + c
    assert lhs == {(2, 0): 1, (0, 2): 1, (1, 1): 2}


def test_partition_identity_sym3_m5():
    assert partition_identity_check(sym3(), 5).holds


def test_partition_identity_invalid():
    with pytest.raises(InvalidCombination):
        partition_identity_check(klein4(), 2)


def test_weighted_monomial_count_examples():
    assert weighted_monomial_count(2, 3, (1, 1), (1.0, 1.0)) == 4
    assert weighted_monomial_count(3, 0, (1, 2, 5), (2.0, 3.0, 4.0)) == 1
    assert weighted_monomial_count(1, 3, (2,), (1.0,)) == 0


@given(
    st.integers(1, 4),
    st.integers(0, 8),
    st.data(),
)
def test_weighted_monomial_count_brute_force(r, n, data):
    u = tuple(data.draw(st.lists(st.integers(1, 3), min_size=r, max_size=r)))
    values = tuple(
        complex(data.draw(st.integers(-2, 2)), data.draw(st.integers(-2, 2)))
        for _ in range(r)
    )

    def brute(i, target):
        if i == r:
            return 1.0 if target == 0 else 0.0
        total = 0.0
        a = 0
        while u[i] * a <= target:
            total += values[i] ** a * brute(i + 1, target - u[i] * a)
            a += 1
        return total

    assert weighted_monomial_count(r, n, u, values) == pytest.approx(brute(0, n))


def test_fan_identity_examples():
    assert fan_identity_check([3])
    assert fan_identity_check([1, 1, 1])
    assert fan_identity_check([1, 2])


def test_fan_identity_all_partitions_up_to_8():
    for d in range(1, 9):
        for part in all_partitions(d):
            assert fan_identity_check(part), part


def test_class_counts_match_formulas():
    for d in range(2, 7):
        for G in builtin_groups_of_order(d):
            for m in valid_m_values(d):
                classes = orbit_classes(G, m)
                assert len(classes) == count_s_gm(d, m), (G.name, m)
                assert len(reduced_classes(G, m)) == b_exponent(d, m), (G.name, m)


def test_orbit_sizes_divide_order_and_count_multisets():
    for G in (cyclic(4), sym3()):
        for m in (2, 3):
            classes = orbit_classes(G, m)
            total = 0
            for cls in classes:
                assert G.order % cls.orbit_size == 0
                total += cls.orbit_size
            assert total == math.comb(G.order + m - 1, G.order - 1)


def test_full_monomial_sum_count():
    ms = full_monomial_sum(3, 4)
    assert len(ms.coefficients) == math.comb(6, 2)
    assert all(c == 1 for _, c in ms.coefficients)


def test_monomial_sum_str():
    ms = MonomialSum.from_dict(2, 2, {(1, 1): 2, (2, 0): 1})
    assert "x0" in str(ms)
    assert str(MonomialSum.from_dict(2, 2, {})) == "0"
