import random
from fractions import Fraction

import pytest

from gwtaut.series import (
    QSeries,
    Truncation,
    Variable,
    VarRegistry,
    format_rational,
    parse_rational,
    ring_ops,
)


def simple_registry():
    return VarRegistry(
        [
            Variable("t", 0, 0, -2),  # x0
            Variable("t", 0, 1, 0),  # x1
            Variable("s", 0, 0, 0),  # s0^0
            Variable("q", 0, 0, -4),
        ]
    )


def ctx(caps=(4, 4, 4, 3), total=None):
    reg = simple_registry()
    return reg, Truncation(caps, total)


def var(reg, tr, kind, a=0, alpha=0):
    return QSeries.variable(reg, tr, kind, a, alpha)


def test_polynomial_identity_in_q():
    reg, tr = ctx(caps=(0, 0, 0, 2))
    one = QSeries.one(reg, tr)
    q = var(reg, tr, "q")
    assert (one + q) * (one - q) == one - q * q


def test_additive_identity():
    reg, tr = ctx()
    f = var(reg, tr, "t", 0, 1) * 3 + QSeries.constant(reg, tr, Fraction(2, 7))
    assert f + QSeries.zero(reg, tr) == f
    assert ring_ops(f, QSeries.zero(reg, tr), "add") == f


def test_truncation_forces_drop():
    reg = simple_registry()
    tr = Truncation((4, 1, 4, 3))  # cap 1 on x1
    x1 = var(reg, tr, "t", 0, 1)
    assert (x1 * x1).is_zero()


def test_mismatched_contexts_rejected():
    reg, tr = ctx()
    other = Truncation((2, 2, 2, 2))
    with pytest.raises(ValueError):
        QSeries.one(reg, tr) + QSeries.one(reg, other)


def test_exp_of_zero():
    reg, tr = ctx()
    assert QSeries.zero(reg, tr).exp() == QSeries.one(reg, tr)


def test_exp_taylor_coefficients():
    reg = simple_registry()
    tr = Truncation((0, 3, 0, 0))
    x1 = var(reg, tr, "t", 0, 1)
    e = x1.exp()
    assert e.coefficient((0, 0, 0, 0)) == 1
    assert e.coefficient((0, 1, 0, 0)) == 1
    assert e.coefficient((0, 2, 0, 0)) == Fraction(1, 2)
    assert e.coefficient((0, 3, 0, 0)) == Fraction(1, 6)


def test_exp_of_sum_cross_coefficient():
    reg, tr = ctx()
    s00 = var(reg, tr, "s", 0, 0)
    x1 = var(reg, tr, "t", 0, 1)
    # multiply out exp(s) * exp(x) by hand: the s*x coefficient is 1
    assert (s00 + x1).exp().coefficient((0, 1, 1, 0)) == 1


def test_exp_needs_zero_constant_term():
    reg, tr = ctx()
    with pytest.raises(ValueError):
        QSeries.one(reg, tr).exp()


def test_coefficient_reads():
    reg, tr = ctx(caps=(0, 0, 0, 2))
    q = var(reg, tr, "q")
    f = QSeries.one(reg, tr) + q * q * 3
    assert f.coefficient((0, 0, 0, 2)) == 3
    assert f.coefficient((0, 0, 0, 1)) == 0


def test_coefficient_outside_truncation_errors():
    reg, tr = ctx(caps=(0, 0, 0, 2))
    f = QSeries.one(reg, tr)
    with pytest.raises(ValueError):
        f.coefficient((0, 0, 0, 3))
    with pytest.raises(ValueError):
        f.coefficient((0, 0, 0))


def test_partial_derivative():
    reg, tr = ctx()
    x0 = var(reg, tr, "t", 0, 0)
    x1 = var(reg, tr, "t", 0, 1)
    f = x0 * x0 * x1 * Fraction(1, 2)
    df = f.partial_derivative("t", 0, 1)
    assert df.coefficient((2, 0, 0, 0)) == Fraction(1, 2)
    assert len(list(df.items())) == 1


def test_q_log_derivative_eigenfunction():
    reg, tr = ctx()
    q = var(reg, tr, "q")
    x1 = var(reg, tr, "t", 0, 1)
    f = q * x1.exp()
    assert f.q_log_derivative() == f


def test_product_rule():
    reg, tr = ctx()
    f = QSeries.one(reg, tr) + var(reg, tr, "q")
    g = var(reg, tr, "t", 0, 0)
    lhs = (f * g).partial_derivative("t", 0, 0)
    window = lhs.trunc  # derivatives shrink the cap of the hit variable
    rhs = f.restrict(window) * g.partial_derivative("t", 0, 0) + g.restrict(
        window
    ) * f.partial_derivative("t", 0, 0)
    assert lhs == rhs


def random_series(reg, tr, rng, nterms=5):
    terms = {}
    for _ in range(nterms):
        exps = tuple(rng.randint(0, c) for c in tr.caps)
        terms[exps] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return QSeries(reg, tr, terms)


def test_ring_axioms_on_random_triples():
    reg, tr = ctx(caps=(2, 2, 2, 2))
    rng = random.Random(7)
    for _ in range(25):
        f, g, h = (random_series(reg, tr, rng) for _ in range(3))
        assert (f + g) + h == f + (g + h)
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h


def test_leibniz_on_random_pairs():
    reg, tr = ctx(caps=(2, 2, 2, 2))
    rng = random.Random(11)
    for _ in range(20):
        f, g = random_series(reg, tr, rng), random_series(reg, tr, rng)
        lhs = (f * g).partial_derivative("s", 0, 0)
        window = lhs.trunc
        rhs = f.restrict(window) * g.partial_derivative("s", 0, 0) + g.restrict(
            window
        ) * f.partial_derivative("s", 0, 0)
        assert lhs == rhs


def test_exp_homomorphism():
    reg, tr = ctx(caps=(2, 2, 2, 2))
    rng = random.Random(13)
    for _ in range(10):
        f = random_series(reg, tr, rng, nterms=3)
        g = random_series(reg, tr, rng, nterms=3)
        zero_const = (0,) * len(reg)
        f = f - QSeries.constant(reg, tr, f.coefficient(zero_const))
        g = g - QSeries.constant(reg, tr, g.coefficient(zero_const))
        assert (f + g).exp() == f.exp() * g.exp()


def test_odd_grading_rejected():
    with pytest.raises(ValueError):
        VarRegistry([Variable("t", 0, 0, -1)])


def test_duplicate_variable_rejected():
    with pytest.raises(ValueError):
        VarRegistry([Variable("t", 0, 0, -2), Variable("t", 0, 0, -2)])


def test_gradings_report():
    reg, tr = ctx()
    x0 = var(reg, tr, "t", 0, 0)
    q = var(reg, tr, "q")
    f = x0 * x0 + q  # gradings -4 and -4
    assert f.gradings() == {-4}


def test_json_round_trip():
    reg, tr = ctx(caps=(2, 2, 2, 2))
    rng = random.Random(17)
    f = random_series(reg, tr, rng)
    assert QSeries.from_json_dict(f.to_json_dict()) == f


def test_rational_formatting():
    assert format_rational(Fraction(-3, 7)) == "-3/7"
    assert parse_rational("-3/7") == Fraction(-3, 7)
    assert parse_rational("5") == 5


def test_restrict_only_tightens():
    reg, tr = ctx(caps=(2, 2, 2, 2))
    f = QSeries.one(reg, tr)
    with pytest.raises(ValueError):
        f.restrict(Truncation((3, 2, 2, 2)))
    g = f.restrict(Truncation((1, 1, 1, 1)))
    assert g.trunc.caps == (1, 1, 1, 1)
