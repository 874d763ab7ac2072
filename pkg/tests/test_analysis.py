import cmath
import math

import pytest

from campana_lab.analysis import (
    ConstantEstimate,
    FitReport,
    _cubic_character_table,
    _cubic_l_value,
    constant_estimate,
    dedekind_residue,
    fit_counts,
    kronecker_symbol,
    local_quotient_factor,
)
from campana_lab.errors import InsufficientData, UnsupportedField
from campana_lab.fieldspec import builtin_field
from campana_lab.points import CountRow, CountTable


def synthetic_table(Bs, counts):
    rows = [
        CountRow(X=i + 1, B=B, projective_weak=n, projective_campana=n,
                 vector_mfull=2 * n, elapsed_ms=0)
        for i, (B, n) in enumerate(zip(Bs, counts))
    ]
    return CountTable(rows=rows)


# -- fitting -------------------------------------------------------------------

def test_fit_recovers_pure_power():
    Bs = [2**k for k in range(10, 22)]
    counts = [round(7 * B**0.5) for B in Bs]
    rep = fit_counts(synthetic_table(Bs, counts), m=2, b=1)
    assert abs(rep.slope_est - 0.5) < 1e-4
    assert abs(rep.c_fit - 7) < 0.01
    assert rep.stability < 0.01


def test_fit_recovers_log_power():
    Bs = [2**k for k in range(12, 26)]
    counts = [round(B**0.5 * math.log(B)) for B in Bs]
    rep = fit_counts(synthetic_table(Bs, counts), m=2, b=2)
    assert all(abs(r - 1) < 0.01 for _, r in rep.ratios)
    assert rep.stability < 0.01


def test_fit_planted_constants_three_figures():
    # c * B^(1/3) * log(B)^2 with (m, b) = (3, 3); the log factors push the
    # finite-range log-log slope above the exponent 1/3 by ~2/log(B)
    c = 0.37
    Bs = [2**k for k in range(20, 40, 2)]
    counts = [round(c * B ** (1 / 3) * math.log(B) ** 2) for B in Bs]
    rep = fit_counts(synthetic_table(Bs, counts), m=3, b=3)
    assert abs(rep.c_fit - c) / c < 1e-3
    mid_log_b = math.log(Bs[len(Bs) // 2])
    assert abs(rep.slope_est - (1 / 3 + 2 / mid_log_b)) < 0.02


def test_fit_insufficient_data():
    with pytest.raises(InsufficientData):
        fit_counts(synthetic_table([8, 16, 32], [3, 4, 5]), m=2, b=1)
    with pytest.raises(InsufficientData):
        fit_counts(synthetic_table([100, 110, 120, 130], [3, 4, 5, 6]), m=2, b=1)


def test_fit_campana_column_missing():
    rows = [
        CountRow(X=i, B=4**i, projective_weak=2**i, projective_campana=None,
                 vector_mfull=2**(i + 1), elapsed_ms=0)
        for i in range(1, 8)
    ]
    with pytest.raises(InsufficientData):
        fit_counts(CountTable(rows=rows), m=2, b=1, kind="campana")


# -- residues -------------------------------------------------------------------

def test_kronecker_symbol_tables():
    assert [kronecker_symbol(-4, a) for a in range(1, 9)] == [1, 0, -1, 0, 1, 0, -1, 0]
    assert [kronecker_symbol(-3, a) for a in range(1, 7)] == [1, -1, 0, 1, -1, 0]
    assert [kronecker_symbol(5, a) for a in range(1, 11)] == [1, -1, -1, 1, 0, 1, -1, -1, 1, 0]
    # multiplicativity
    for D in (-4, -3, 5, 8):
        for a in range(1, 30):
            for b in range(1, 30):
                assert kronecker_symbol(D, a * b) == kronecker_symbol(
                    D, a
                ) * kronecker_symbol(D, b)


def leibniz_l_minus4(terms=2_000_000):
    # alternating series oracle for L(1, chi_-4), averaged pair acceleration
    total = 0.0
    sign = 1.0
    for k in range(terms):
        total += sign / (2 * k + 1)
        sign = -sign
    # average consecutive partial sums to kill the alternating tail
    return total + sign / (2 * (terms + 1) - 1) / 2


def test_gaussian_residue_is_pi_over_4():
    res = dedekind_residue(builtin_field("gaussian"))
    assert abs(res - math.pi / 4) < 1e-12
    assert abs(res - leibniz_l_minus4()) < 1e-6


def character_sum_l_minus3(terms=3_000_000):
    # direct partial sums of the chi_-3 series with period-average smoothing
    total = 0.0
    chi = [0, 1, -1]
    for n in range(1, terms):
        total += chi[n % 3] / n
    return total


def test_eisenstein_residue():
    res = dedekind_residue(builtin_field("eisenstein"))
    assert abs(res - math.pi / (3 * math.sqrt(3))) < 1e-12
    assert abs(res - character_sum_l_minus3()) < 1e-6


def test_rational_guard():
    assert dedekind_residue(builtin_field("rational")) == 1.0


def test_real_quadratic_residue_class_number_formula():
    # Q(sqrt 5): h = 1, fundamental unit (1+sqrt5)/2
    res = dedekind_residue(builtin_field("real_quadratic(5)"))
    assert abs(res - 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)) < 1e-9


def test_cubic_l_value_against_log_sine_formula():
    f = 9
    table = _cubic_character_table(f)
    tau = sum(table[a] * cmath.exp(2j * math.pi * a / f) for a in range(f))
    assert abs(abs(tau) - 3.0) < 1e-12
    log_sine = -(tau / f) * sum(
        table[a].conjugate() * math.log(2 * math.sin(math.pi * a / f))
        for a in range(1, f)
        if abs(table[a]) > 0.5
    )
    series = _cubic_l_value(f)
    assert abs(series - log_sine) < 1e-9


def test_cubic_residue_positive_and_stable():
    C = builtin_field("cyclic_cubic_9")
    r1 = dedekind_residue(C, precision=1e-8)
    r2 = dedekind_residue(C, precision=1e-10)
    assert r1 > 0
    assert abs(r1 - r2) < 1e-7


def test_unsupported_field():
    with pytest.raises(UnsupportedField):
        dedekind_residue(builtin_field("cyclotomic_5"))


# -- constant estimate -----------------------------------------------------------

def test_local_factor_closed_form_d2_m2():
    for p in (5, 13, 29, 97):
        x = p**-0.5
        series = local_quotient_factor(2, 1, 2, x)
        closed = ((1 + x) / (1 - x) - 2 * x) * (1 - x * x) ** 2
        assert abs(series - closed) < 1e-12


def test_local_factor_inert_closed_form():
    # weak transform is 1 at inert places; quotient is the b-th power of
    # the vanishing zeta-factor on the d*m grid
    from campana_lab.orbits import b_exponent

    for d, m, p in [(2, 2, 3), (3, 2, 2), (5, 2, 2), (2, 3, 7)]:
        x = p ** (-1.0 / m)
        series = local_quotient_factor(d, d, m, x)
        closed = (1 - x ** (d * m)) ** b_exponent(d, m)
        assert abs(series - closed) < 1e-12


def test_constant_estimate_gaussian():
    G = builtin_field("gaussian")
    est = constant_estimate(G, 2, 2000)
    assert est.value > 0
    assert math.isfinite(est.value)
    assert est.prefactor == 1.0  # m=2, b=1, d=2
    assert 2 in est.skipped_primes
    assert any("archimedean" in c for c in est.caveats)


def test_constant_estimate_stabilizes():
    G = builtin_field("gaussian")
    values = [constant_estimate(G, 2, pm).value for pm in (2000, 4000, 8000)]
    d1 = abs(values[1] - values[0]) / values[0]
    d2 = abs(values[2] - values[1]) / values[1]
    assert d2 < d1


def test_constant_estimate_json():
    est = constant_estimate(builtin_field("eisenstein"), 2, 500)
    d = est.to_json_dict()
    assert set(d) >= {"prefactor", "residue_ratio", "euler_truncation", "p_max",
                      "caveats", "estimate"}
    assert d["estimate"] == pytest.approx(est.value)
