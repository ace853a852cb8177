import random
from fractions import Fraction

import pytest

from wallcross.checks import (
    random_datum,
    random_slope,
    s_composition_sum,
    s_extremes_witness,
    u_composition_sum,
)
from wallcross.coefficients import (
    Digraph,
    MultilinearWordSum,
    enumerate_trees,
    inversion_sums,
    lie_membership,
    parse_tree,
    s_coeff,
    s_coeff_alt,
    t_coeff,
    u_coeff,
    u_word_sum,
    v_coeff,
)
from wallcross.errors import InputError, NotATreeError, NotDominantError
from wallcross.stability import ADatum, Poset, enumerate_posets, is_dominant
from wallcross.utils.combinatorics import surjections

FALLING = ADatum.of((1, 0), (0, 1))
RISING = ADatum.of((0, 1), (1, 0))


class TestS:
    """Wall-crossing coefficient S on the Kronecker lattice."""

    def test_trivial_to_slope(self, trivial, slope_10):
        assert s_coeff(FALLING, trivial, slope_10) == -1
        assert s_coeff(RISING, trivial, slope_10) == 0

    def test_between_slopes(self, slope_10, slope_01):
        assert s_coeff(FALLING, slope_10, slope_01) == 1
        assert s_coeff(RISING, slope_10, slope_01) == -1

    def test_single_part(self, slope_10, slope_01):
        assert s_coeff(ADatum.of((1, 1)), slope_10, slope_01) == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_identity_stability(self, seed):
        rng = random.Random(seed)
        tau = random_slope(rng)
        for n in range(1, 4):
            d = random_datum(rng, n)
            assert s_coeff(d, tau, tau) == (1 if n == 1 else 0)

    @pytest.mark.parametrize("seed", range(8))
    def test_alternative_formula(self, seed):
        rng = random.Random(seed)
        d = random_datum(rng, rng.randint(1, 4))
        tau, tau_tilde = random_slope(rng), random_slope(rng)
        assert s_coeff_alt(d, tau, tau_tilde) == s_coeff(d, tau, tau_tilde)

    @pytest.mark.parametrize("seed", range(10))
    def test_nonzero_needs_extreme_parts(self, seed):
        rng = random.Random(50 + seed)
        for _ in range(20):
            d = random_datum(rng, rng.randint(1, 4))
            tau, tau_tilde = random_slope(rng), random_slope(rng)
            if s_coeff(d, tau, tau_tilde):
                assert s_extremes_witness(d, tau, tau_tilde)

    def test_extremes_witness(self, trivial, slope_10):
        assert s_extremes_witness(FALLING, trivial, slope_10)
        assert not s_extremes_witness(RISING, trivial, slope_10)

    @pytest.mark.parametrize("seed", range(8))
    def test_composition(self, seed):
        rng = random.Random(100 + seed)
        d = random_datum(rng, rng.randint(1, 3))
        tau, tau_hat, tau_tilde = (random_slope(rng) for _ in range(3))
        assert s_composition_sum(d, tau, tau_hat, tau_tilde) == s_coeff(d, tau, tau_tilde)


class TestT:
    def test_chain_reduces_to_s(self, trivial, slope_10):
        kappa = list(FALLING.parts)
        assert t_coeff(Poset.chain(2), kappa, ["k"], ["k", "k"], trivial, slope_10) == -1

    def test_antichain_over_antichain(self, trivial, slope_10):
        kappa = list(FALLING.parts)
        assert t_coeff(Poset.antichain(2), kappa, ["a", "b"], ["a", "b"], trivial, slope_10) == 1

    def test_not_dominant(self, trivial, slope_10):
        with pytest.raises(NotDominantError):
            t_coeff(Poset.antichain(2), list(FALLING.parts), ["k"], ["k", "k"], trivial, slope_10)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_identity_stability(self, n, slope_10):
        kappa = [(1, 0), (0, 1), (1, 1)][:n]
        for poset in enumerate_posets(n):
            for m in range(1, n + 1):
                for phi in surjections(n, m):
                    K = list(range(m))
                    if is_dominant(poset, K, phi) is None:
                        continue
                    assert t_coeff(poset, kappa, K, phi, slope_10, slope_10) == (1 if m == n else 0)


class TestU:
    """Coefficient U and its Lie property."""

    def test_between_slopes(self, slope_10, slope_01):
        assert u_coeff(FALLING, slope_10, slope_01) == 1
        assert u_coeff(RISING, slope_10, slope_01) == -1

    def test_trivial_to_slope(self, trivial, slope_10):
        assert u_coeff(FALLING, trivial, slope_10) == Fraction(-1, 2)
        assert u_coeff(RISING, trivial, slope_10) == Fraction(1, 2)

    def test_identity_stability(self, slope_10):
        assert u_coeff(ADatum.of((1, 1)), slope_10, slope_10) == 1
        assert u_coeff(FALLING, slope_10, slope_10) == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_identity_stability_random(self, seed):
        rng = random.Random(150 + seed)
        tau = random_slope(rng)
        for n in range(1, 5):
            assert u_coeff(random_datum(rng, n), tau, tau) == (1 if n == 1 else 0)

    @pytest.mark.parametrize("seed", range(6))
    def test_composition(self, seed):
        rng = random.Random(200 + seed)
        d = random_datum(rng, rng.randint(1, 3))
        tau, tau_hat, tau_tilde = (random_slope(rng) for _ in range(3))
        assert u_composition_sum(d, tau, tau_hat, tau_tilde) == u_coeff(d, tau, tau_tilde)

    @pytest.mark.parametrize("seed", range(6))
    def test_word_sum_is_lie(self, seed):
        rng = random.Random(300 + seed)
        d = random_datum(rng, rng.randint(1, 3))
        tau, tau_tilde = random_slope(rng), random_slope(rng)
        assert lie_membership(u_word_sum(d.parts, tau, tau_tilde))


class TestLieMembership:
    def test_commutator(self):
        assert lie_membership(MultilinearWordSum({("a", "b"): 1, ("b", "a"): -1}))

    def test_single_word(self):
        assert not lie_membership(MultilinearWordSum({("a", "b"): 1}))

    def test_nested_bracket(self):
        # [[a, b], c]
        w = MultilinearWordSum(
            {("a", "b", "c"): 1, ("b", "a", "c"): -1, ("c", "a", "b"): -1, ("c", "b", "a"): 1}
        )
        assert lie_membership(w)

    def test_letters_and_zero(self):
        assert lie_membership(MultilinearWordSum({("a",): 3}))
        assert lie_membership(MultilinearWordSum({}))

    def test_rejects_repeated_letter(self):
        with pytest.raises(InputError):
            lie_membership(MultilinearWordSum({("a", "a"): 1}))


class TestTrees:
    """Tree coefficient V and the tree enumerators."""

    @pytest.mark.parametrize("n, count", [(1, 1), (2, 2), (3, 12), (4, 128)])
    def test_oriented_count(self, n, count):
        assert len(list(enumerate_trees(n, "oriented"))) == count

    @pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 3), (4, 16)])
    def test_increasing_count(self, n, count):
        trees = list(enumerate_trees(n, "increasing"))
        assert len(trees) == count
        assert all(i < j for t in trees for i, j in t.edges)

    def test_all_trees(self):
        assert all(t.is_tree() for t in enumerate_trees(4))

    def test_unknown_mode(self):
        with pytest.raises(InputError):
            list(enumerate_trees(3, "spiral"))

    def test_v_single_edge(self, slope_10, slope_01):
        edge = parse_tree("1>2")
        assert v_coeff(edge, FALLING.parts, slope_10, slope_01) == Fraction(1, 4)
        assert v_coeff(edge, RISING.parts, slope_10, slope_01) == Fraction(-1, 4)

    def test_v_single_vertex(self, slope_10, slope_01):
        assert v_coeff(Digraph(1, ()), [(1, 1)], slope_10, slope_01) == 1

    def test_v_identity_stability(self, slope_10):
        assert v_coeff(parse_tree("1>2"), FALLING.parts, slope_10, slope_10) == 0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_reversing_edges_flips_sign(self, n):
        rng = random.Random(n)
        kappa = random_datum(rng, n).parts
        tau, tau_tilde = random_slope(rng), random_slope(rng)
        for tree in enumerate_trees(n, "increasing"):
            base = v_coeff(tree, kappa, tau, tau_tilde)
            for mask in range(1 << (n - 1)):
                which = [k for k in range(n - 1) if mask >> k & 1]
                sign = (-1) ** len(which)
                assert v_coeff(tree.reversed_edges(which), kappa, tau, tau_tilde) == sign * base

    def test_reversed_single_edge(self, slope_10, slope_01):
        edge = parse_tree("1>2")
        assert edge.reversed_edges([0]) == parse_tree("2>1")
        assert v_coeff(edge.reversed_edges([0]), FALLING.parts, slope_10, slope_01) == Fraction(-1, 4)

    @pytest.mark.parametrize("graph", [Digraph(3, ((0, 1),)), Digraph(2, ((0, 1), (1, 0))), Digraph(3, ((0, 1), (1, 0)))])
    def test_not_a_tree(self, graph, slope_10, slope_01):
        kappa = [(1, 0)] * graph.n
        with pytest.raises(NotATreeError):
            v_coeff(graph, kappa, slope_10, slope_01)

    def test_parse_tree(self):
        assert parse_tree("1>2,3>2") == Digraph(3, ((0, 1), (2, 1)))
        with pytest.raises(InputError):
            parse_tree("1-2")


class TestInversionSums:
    @pytest.mark.parametrize(
        "sizes, expected",
        [((1,), 1), ((1, 1, 1), 1), ((2,), 0), ((2, 1), 0), ((3,), 0), ((1, 3), 0), ((2, 2), 0)],
    )
    def test_sums(self, sizes, expected):
        assert inversion_sums(sizes) == (Fraction(expected), Fraction(expected))
