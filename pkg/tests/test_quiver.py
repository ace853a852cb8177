from fractions import Fraction

import pytest

from wallcross.errors import InputError, NotInConeError, OracleGuardError
from wallcross.lambda_ring import eval_at
from wallcross.quiver import (
    QuiverPresentation,
    euler_form,
    ff_count_semistable,
    gl_order,
    iss_semistable,
    iss_semistable_via_wallcross,
    iss_trivial,
    j_semistable,
    moduli_poincare_candidate,
)
from wallcross.stability import parse_stability
from wallcross.utils.finite_field import field, gaussian_binomial_count, subspaces


class TestPresentation:
    def test_presets(self):
        assert QuiverPresentation.preset("kronecker") == QuiverPresentation.kronecker(2)
        assert QuiverPresentation.preset("kronecker-3").arrows == ((0, 1),) * 3
        assert QuiverPresentation.preset("A1") == QuiverPresentation.one_vertex()
        with pytest.raises(InputError):
            QuiverPresentation.preset("jordan")

    def test_json(self):
        quiver = QuiverPresentation.from_json({"vertices": 2, "arrows": [[0, 1]]})
        assert quiver == QuiverPresentation.a2()
        assert QuiverPresentation.from_json(quiver.to_json()) == quiver

    def test_labelled_arrows(self):
        data = {
            "vertices": ["1", "2"],
            "arrows": [{"from": "1", "to": "2"}, {"from": "1", "to": "2"}],
        }
        quiver = QuiverPresentation.from_json(data)
        assert quiver.arrows == ((0, 1), (0, 1))
        assert euler_form(quiver)((1, 0), (0, 1)) == -2
        assert quiver.to_json() == data
        assert QuiverPresentation.from_json(quiver.to_json()) == quiver

    def test_unknown_endpoint(self):
        with pytest.raises(InputError):
            QuiverPresentation.from_json({"vertices": ["1"], "arrows": [{"from": "1", "to": "2"}]})

    def test_duplicate_labels(self):
        with pytest.raises(InputError):
            QuiverPresentation.from_json({"vertices": ["a", "a"], "arrows": []})

    def test_bad_arrow(self):
        with pytest.raises(InputError):
            QuiverPresentation(("0",), ((0, 1),))

    def test_euler_form(self, kronecker):
        chi = euler_form(kronecker)
        assert chi((1, 0), (0, 1)) == -2
        assert chi((0, 1), (1, 0)) == 0
        assert chi((2, 1), (2, 1)) == 4 + 1 - 4


class TestStackCounts:
    """Motives of the full representation stacks."""

    def test_kronecker(self, ell, kronecker):
        assert iss_trivial(kronecker, (1, 1)) == ell**2 / (ell - 1) ** 2

    def test_one_vertex(self, ell, one_vertex):
        assert iss_trivial(one_vertex, (1,)) == 1 / (ell - 1)
        value = iss_trivial(one_vertex, (2,))
        assert value == 1 / (ell * (ell - 1) * (ell**2 - 1))
        assert eval_at(value, 2) == Fraction(1, 6)

    def test_outside_cone(self, kronecker):
        with pytest.raises(NotInConeError):
            iss_trivial(kronecker, (0, 0))
        with pytest.raises(NotInConeError):
            iss_trivial(kronecker, (1,))


class TestSemistable:
    """Semistable invariants by the prefix formula and by wall-crossing."""

    def test_kronecker(self, ell, kronecker, slope_10):
        assert iss_semistable(kronecker, (1, 1), slope_10) == (ell + 1) / (ell - 1)

    def test_three_arrows(self, ell, slope_10):
        quiver = QuiverPresentation.kronecker(3)
        assert iss_semistable(quiver, (1, 1), slope_10) == (ell**3 - 1) / (ell - 1) ** 2

    def test_a2(self, ell, a2, slope_10):
        assert iss_semistable(a2, (1, 1), slope_10) == 1 / (ell - 1)

    def test_vanishing_chamber(self, kronecker, slope_01):
        assert iss_semistable(kronecker, (1, 1), slope_01).is_zero()
        assert iss_semistable_via_wallcross(kronecker, (1, 1), slope_01).is_zero()
        assert ff_count_semistable(kronecker, (1, 1), slope_01, 2) == 0

    def test_trivial_stability(self, kronecker, trivial):
        assert iss_semistable(kronecker, (2, 1), trivial) == iss_trivial(kronecker, (2, 1))

    @pytest.mark.parametrize("alpha", [(1, 1), (2, 1), (1, 2), (2, 2)])
    def test_two_paths(self, kronecker, slope_10, alpha):
        direct = iss_semistable(kronecker, alpha, slope_10)
        assert iss_semistable_via_wallcross(kronecker, alpha, slope_10) == direct

    def test_j(self, ell, kronecker, slope_10):
        assert j_semistable(kronecker, (1, 1), slope_10) == ell + 1
        assert j_semistable(kronecker, (1, 0), slope_10) == 1

    def test_poincare_candidate(self, kronecker, slope_10):
        series = moduli_poincare_candidate(kronecker, (1, 1), slope_10)
        assert series.terms == {2: 1, 0: 1}


class TestOracle:
    """Brute-force finite-field counts agree with the formulas."""

    @pytest.mark.parametrize("q, expected", [(2, 3), (3, 2), (4, Fraction(5, 3))])
    def test_kronecker(self, kronecker, slope_10, q, expected):
        assert ff_count_semistable(kronecker, (1, 1), slope_10, q) == expected

    @pytest.mark.parametrize(
        "preset, alpha, stability",
        [
            ("kronecker", (2, 1), "slope c=1,0"),
            ("kronecker", (1, 2), "slope c=1,0"),
            ("kronecker", (1, 1), "slope c=0,1"),
            ("a2", (1, 1), "slope c=1,0"),
            ("a2", (2, 1), "slope c=1,0 r=1,2"),
            ("one-vertex", (2,), "trivial"),
        ],
    )
    @pytest.mark.parametrize("q", [2, 3])
    def test_matches_formula(self, preset, alpha, stability, q):
        quiver = QuiverPresentation.preset(preset)
        stab = parse_stability(stability)
        expected = eval_at(iss_semistable(quiver, alpha, stab), q)
        assert ff_count_semistable(quiver, alpha, stab, q) == expected

    def test_parallel(self, kronecker, slope_10):
        serial = ff_count_semistable(kronecker, (2, 1), slope_10, 2, jobs=1)
        assert ff_count_semistable(kronecker, (2, 1), slope_10, 2, jobs=3) == serial

    def test_guard(self, kronecker, slope_10):
        with pytest.raises(OracleGuardError):
            ff_count_semistable(kronecker, (1, 1), slope_10, 5)
        with pytest.raises(OracleGuardError):
            ff_count_semistable(kronecker, (3, 2), slope_10, 2)

    def test_gl_order(self):
        assert gl_order(1, 2) == 1
        assert gl_order(2, 2) == 6
        assert gl_order(2, 3) == 48


class TestFiniteField:
    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_field_axioms(self, q):
        F = field(q)
        for a in range(1, q):
            assert any(F.mul(a, b) == 1 for b in range(1, q))
            assert F.add(a, F.neg[a]) == 0
            assert F.mul(a, F.inv[a]) == 1

    def test_not_prime_power(self):
        with pytest.raises(InputError):
            field(6)

    @pytest.mark.parametrize("q, n", [(2, 2), (2, 3), (3, 2), (4, 2)])
    def test_subspace_count(self, q, n):
        total = sum(gaussian_binomial_count(q, n, k) for k in range(n + 1))
        assert len(subspaces(q, n)) == total

    def test_subspace_sizes(self):
        for s in subspaces(3, 2):
            assert len(s.vectors) == 3**s.dim
