from fractions import Fraction

import pytest

from wallcross.curve import (
    CurveClass,
    betti_numbers,
    clear_cache,
    coprime_poincare,
    curve_chi,
    curve_pairing,
    euler_characteristic_check,
    filtration_types,
    iss_delta,
    iss_delta_macdonald,
    iss_gamma,
    iss_gamma_direct,
    reconstruct_delta,
    symmetric_power_poincare,
    top_degree,
)
from wallcross.errors import InputError, NotInConeError
from wallcross.lambda_ring import TruncatedSeries

Z2_MINUS_1 = TruncatedSeries({2: 1, 0: -1})


def one_plus_z(power):
    return TruncatedSeries({0: 1}) if power == 0 else TruncatedSeries({1: 1, 0: 1}) ** power


class TestClasses:
    def test_chi(self):
        g2 = CurveClass(1, 0, 2)
        assert curve_chi(g2, g2) == -1
        assert curve_chi(CurveClass(1, 1, 0), CurveClass(1, 0, 0)) == 0
        assert curve_chi(CurveClass(0, 1, 1), CurveClass(1, 0, 1)) == -1

    def test_pairing_matches_chi(self):
        pairing = curve_pairing(3)
        for x, y in [((1, 0), (2, 5)), ((0, 1), (3, -1)), ((2, 1), (2, 1))]:
            assert pairing(x, y) == curve_chi(CurveClass(*x, 3), CurveClass(*y, 3))

    def test_genus_mismatch(self):
        with pytest.raises(InputError):
            curve_chi(CurveClass(1, 0, 1), CurveClass(1, 0, 2))

    @pytest.mark.parametrize("n, d", [(0, 0), (0, -2), (-1, 3)])
    def test_outside_cone(self, n, d):
        with pytest.raises(NotInConeError):
            CurveClass(n, d, 1)

    def test_negative_genus(self):
        with pytest.raises(InputError):
            CurveClass(1, 0, -1)


class TestDelta:
    """Invariants of all coherent sheaves with torsion removed."""

    def test_rank_one_genus_zero(self):
        expected = TruncatedSeries({-2: 1, -4: 1, -6: 1, -8: 1}, -8)
        assert iss_delta(1, 0, 0, -8) == expected

    @pytest.mark.parametrize("g", [0, 1, 2, 3])
    def test_rank_one(self, g):
        expected = one_plus_z(2 * g).divide_by_polynomial(Z2_MINUS_1, -10)
        assert iss_delta(1, 0, g, -10) == expected

    def test_degree_independent(self):
        assert iss_delta(2, 0, 2, -12) == iss_delta(2, 7, 2, -12)

    def test_rank_two_formula(self):
        numerator = one_plus_z(4) * TruncatedSeries({3: 1, 0: 1}) ** 4
        expected = numerator.divide_by_polynomial(
            Z2_MINUS_1**2 * TruncatedSeries({4: 1, 0: -1}), -12
        )
        assert iss_delta(2, 1, 2, -12) == expected

    @pytest.mark.parametrize("n, g", [(1, 1), (2, 0), (2, 1), (2, 2), (3, 1), (3, 2)])
    def test_symmetric_products(self, n, g):
        assert iss_delta_macdonald(n, g, -12) == iss_delta(n, 0, g, -12)

    def test_symmetric_power(self):
        assert symmetric_power_poincare(0, 2) == TruncatedSeries({0: 1})
        assert symmetric_power_poincare(1, 2) == TruncatedSeries({0: 1, 1: 4, 2: 1})

    def test_bad_rank(self):
        with pytest.raises(InputError):
            iss_delta(0, 1, 1)


class TestGamma:
    """Semistable invariants by the rank recursion."""

    def test_rank_one(self):
        assert iss_gamma(1, 3, 2, -10) == iss_delta(1, 3, 2, -10)

    def test_genus_zero_rank_two_odd(self):
        assert iss_gamma(2, 1, 0, -20).is_zero()

    def test_top_degree(self):
        series = iss_gamma(2, 1, 2, -8)
        assert series.top() == top_degree(2, 2) == 8
        assert series.coefficient(8) == 1

    @pytest.mark.parametrize(
        "n, d, g", [(2, 0, 1), (2, 1, 1), (2, 1, 2), (2, -1, 2), (3, 1, 1), (3, 2, 1), (3, 0, 2)]
    )
    def test_two_paths(self, n, d, g):
        assert iss_gamma(n, d, g, -12) == iss_gamma_direct(n, d, g, -12)

    @pytest.mark.parametrize("n, d, g", [(2, 1, 2), (2, 0, 1), (3, 1, 1)])
    def test_reconstruction(self, n, d, g):
        assert reconstruct_delta(n, d, g, -12) == iss_delta(n, d, g, -12)

    def test_tensor_by_line_bundle(self):
        assert iss_gamma_direct(2, 3, 2, -12) == iss_gamma_direct(2, 1, 2, -12)

    def test_cache(self):
        first = iss_gamma(2, 1, 2, -14)
        clear_cache()
        assert iss_gamma(2, 1, 2, -10) == first.truncate(-10)
        assert iss_gamma(2, 1, 2, -14) == first
        assert iss_gamma(2, 1, 2, -10).agrees_with(first, -10)

    def test_filtration_types_reach_floor(self):
        types = list(filtration_types(2, 1, 2, -12))
        assert types
        for parts, tw2 in types:
            assert sum(n for n, _ in parts) == 2
            assert sum(d for _, d in parts) == 1
            assert tw2 + sum(top_degree(n, 2) for n, _ in parts) >= -12
            assert parts[0][1] * parts[1][0] > parts[1][1] * parts[0][0]


class TestPoincare:
    """Poincare polynomials of coprime moduli spaces."""

    def test_rank_two_genus_two(self):
        poly = coprime_poincare(2, 1, 2)
        assert poly.terms == {0: 1, 2: 1, 3: 4, 4: 1, 6: 1}
        assert betti_numbers(poly) == [1, 0, 1, 4, 1, 0, 1]
        assert euler_characteristic_check(poly) == 0

    def test_rank_one_is_a_point(self):
        assert betti_numbers(coprime_poincare(1, 0, 2)) == [1]

    def test_rank_three(self):
        betti = betti_numbers(coprime_poincare(3, 1, 2))
        assert len(betti) == 17
        assert betti[:3] == [1, 0, 1]
        assert betti == betti[::-1]

    def test_rank_two_genus_three(self):
        betti = betti_numbers(coprime_poincare(2, 1, 3))
        assert len(betti) == 13
        assert betti[:4] == [1, 0, 1, 6]

    def test_not_coprime(self):
        with pytest.raises(InputError):
            coprime_poincare(2, 2, 2)

    def test_guard(self):
        with pytest.raises(InputError):
            coprime_poincare(2, 1, 2, guard=0)

    def test_betti_needs_exact(self):
        with pytest.raises(InputError):
            betti_numbers(TruncatedSeries({0: Fraction(1)}, -2))
