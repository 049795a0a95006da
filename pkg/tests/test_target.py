from fractions import Fraction

import pytest

from gwtaut.target import projective_space, target_from_config


def test_cup_on_p2():
    p2 = projective_space(2)
    assert p2.cup_product(1, 1) == {2: 1}


def test_cup_on_p1_top_truncation():
    p1 = projective_space(1)
    assert p1.cup_product(1, 1) == {}


def test_unit_acts_trivially():
    for r in (1, 2, 4):
        t = projective_space(r)
        for alpha in range(r + 1):
            assert t.cup_product(0, alpha) == {alpha: 1}


def test_pairing_values():
    p1 = projective_space(1)
    assert p1.poincare_pairing(0, 1) == 1
    assert p1.poincare_pairing(0, 0) == 0
    p2 = projective_space(2)
    assert p2.inverse_pairing(1, 1) == 1
    assert p2.inverse_pairing(0, 1) == 0


def test_moduli_dimension():
    p1 = projective_space(1)
    assert p1.moduli_dimension(3, 0) == 1
    for n in range(4):
        for d in range(1, 4):
            assert p1.moduli_dimension(n, d) == -2 + n + 2 * d
    p2 = projective_space(2)
    assert p2.moduli_dimension(0, 1) == 2


def test_moduli_dimension_unstable():
    with pytest.raises(ValueError):
        projective_space(1).moduli_dimension(2, 0)


def test_moduli_dimension_universal_curve():
    p3 = projective_space(3)
    for n in range(3, 6):
        for d in range(3):
            assert p3.moduli_dimension(n + 1, d) == p3.moduli_dimension(n, d) + 1


def test_integral_over_beta():
    assert projective_space(1).integral_over_beta(1, 3) == 3
    assert projective_space(2).integral_over_beta(1, 2) == 2
    with pytest.raises(ValueError):
        projective_space(2).integral_over_beta(0, 2)
    with pytest.raises(ValueError):
        projective_space(2).integral_over_beta(2, 2)


def test_cup_associativity_exhaustive():
    for r in range(1, 7):
        t = projective_space(r)
        for a in range(r + 1):
            for b in range(r + 1):
                for c in range(r + 1):
                    left = {}
                    for nu, coef in t.cup_product(a, b).items():
                        for mu, coef2 in t.cup_product(nu, c).items():
                            left[mu] = left.get(mu, Fraction(0)) + coef * coef2
                    right = {}
                    for nu, coef in t.cup_product(b, c).items():
                        for mu, coef2 in t.cup_product(a, nu).items():
                            right[mu] = right.get(mu, Fraction(0)) + coef * coef2
                    assert left == right


def test_eta_cup_compatibility():
    for r in range(1, 5):
        t = projective_space(r)
        for a in range(r + 1):
            for b in range(r + 1):
                for c in range(r + 1):
                    assert t.triple_integral(a, b, c) == t.triple_integral(b, c, a)


def test_custom_config_round_trip():
    p1 = projective_space(1)
    config = {
        "type": "custom",
        "name": "clone-of-P1",
        "gradings": [0, 2],
        "eta": [[0, 1], [1, 0]],
        "cup": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]],
        "c1_degree": 2,
        "divisor_pairings": [[1, "1/1"]],
        "seeds": [[[], 1, "1/1"]],
    }
    clone = target_from_config(config)
    assert clone.gradings == p1.gradings
    assert clone.eta == p1.eta
    assert clone.cup == p1.cup
    assert clone.is_monogenic
    assert target_from_config({"type": "projective_space", "r": 3}).rank == 4


def test_odd_cohomology_rejected():
    config = {
        "type": "custom",
        "gradings": [0, 1],
        "eta": [[0, 1], [1, 0]],
        "cup": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]],
        "c1_degree": 2,
    }
    with pytest.raises(ValueError):
        target_from_config(config)


def test_degenerate_eta_rejected():
    config = {
        "type": "custom",
        "gradings": [0, 2],
        "eta": [[0, 0], [0, 0]],
        "cup": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]],
        "c1_degree": 2,
    }
    t = target_from_config(config)
    with pytest.raises(ValueError):
        t.inverse_pairing(0, 1)
