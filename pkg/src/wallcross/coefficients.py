"""Combinatorial transformation coefficients S, T, U, V and the Lie membership test."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Dict, Iterator, Sequence, Tuple

from wallcross.errors import InputError, NotATreeError, NotDominantError
from wallcross.stability import (
    ADatum,
    Poset,
    WeakStability,
    adata_predicates,
    as_class,
    class_sum,
    is_dominant,
)
from wallcross.utils.combinatorics import (
    compositions,
    factorial_weight,
    labeled_trees,
    split_blocks,
)


@lru_cache(maxsize=None)
def s_coeff(d: ADatum, tau: WeakStability, tau_tilde: WeakStability) -> int:
    """(-1)^r when every gap of d satisfies condition (a) or (b), else 0.

    (a) tau rises weakly across the gap and the tau_tilde split is destabilizing; (b) tau falls strictly and the split is not. r counts gaps of type (a).
    """
    r = 0
    for i in range(1, len(d)):
        rising = tau(d[i - 1]) <= tau(d[i])
        split = tau_tilde(d.prefix(i)) > tau_tilde(d.suffix(i))
        if rising and split:
            r += 1
        elif rising or split:
            return 0
    return -1 if r % 2 else 1


def _blocks_datum(d: ADatum, sizes: Sequence[int]) -> Tuple[ADatum, ...]:
    return tuple(ADatum(block) for block in split_blocks(d.parts, sizes))


def _merged(d: ADatum, sizes: Sequence[int]) -> ADatum:
    return ADatum(tuple(class_sum(block) for block in split_blocks(d.parts, sizes)))


def s_coeff_alt(d: ADatum, tau: WeakStability, tau_tilde: WeakStability) -> int:
    """S as the signed count of tau-reversing blocks grouped into tau_tilde-semistable data."""
    total = 0
    for alpha_sizes in compositions(len(d)):
        blocks = _blocks_datum(d, alpha_sizes)
        if not all(adata_predicates(b, tau).reversing for b in blocks):
            continue
        a = len(alpha_sizes)
        merged = _merged(d, alpha_sizes)
        for beta_sizes in compositions(a):
            nu = _merged(merged, beta_sizes)
            if adata_predicates(nu, tau_tilde).semistable:
                total += (-1) ** (a - len(beta_sizes))
    return total


def t_coeff(
    poset: Poset,
    kappa: Sequence,
    K: Sequence,
    phi: Sequence,
    tau: WeakStability,
    tau_tilde: WeakStability,
) -> int:
    if is_dominant(poset, K, phi) is None:
        raise NotDominantError(f"({poset!r}, K={list(K)}, phi={list(phi)}) is not dominant")
    kappa = [as_class(k) for k in kappa]
    out = 1
    for k in K:
        fiber = [i for i in range(poset.n) if phi[i] == k]
        ordered = poset.sorted_total(fiber)
        out *= s_coeff(ADatum(tuple(kappa[i] for i in ordered)), tau, tau_tilde)
        if out == 0:
            return 0
    return out


@lru_cache(maxsize=None)
def u_coeff(d: ADatum, tau: WeakStability, tau_tilde: WeakStability) -> Fraction:
    n = len(d)
    tilde_total = tau_tilde(d.total())
    total = Fraction(0)
    for psi_sizes in compositions(n):
        lam = _merged(d, psi_sizes)
        blocks = split_blocks(d.parts, psi_sizes)
        if any(tau(k) != tau(lam[b]) for b, block in enumerate(blocks) for k in block):
            continue
        psi_weight = Fraction(1, factorial_weight(psi_sizes))
        for xi_sizes in compositions(len(psi_sizes)):
            mu = _merged(lam, xi_sizes)
            if any(tau_tilde(c) != tilde_total for c in mu):
                continue
            s_product = 1
            for block in _blocks_datum(lam, xi_sizes):
                s_product *= s_coeff(block, tau, tau_tilde)
                if not s_product:
                    break
            if not s_product:
                continue
            l = len(xi_sizes)
            total += s_product * Fraction((-1) ** (l - 1), l) * psi_weight
    return total


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices range(n)."""

    n: int
    edges: Tuple[Tuple[int, int], ...]

    def is_tree(self) -> bool:
        if len(self.edges) != self.n - 1:
            return False
        if any(i == j or not (0 <= i < self.n and 0 <= j < self.n) for i, j in self.edges):
            return False
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        return True

    def order(self) -> Poset:
        return Poset.generated(self.n, self.edges)

    def reversed_edges(self, which: Sequence[int]) -> "Digraph":
        which = set(which)
        return Digraph(
            self.n,
            tuple((j, i) if k in which else (i, j) for k, (i, j) in enumerate(self.edges)),
        )

    def to_json(self):
        return [[i + 1, j + 1] for i, j in self.edges]

    @classmethod
    def from_json(cls, n: int, edges) -> "Digraph":
        return cls(n, tuple((int(i) - 1, int(j) - 1) for i, j in edges))

    def __str__(self):
        return ",".join(f"{i + 1}>{j + 1}" for i, j in self.edges) or "."


def parse_tree(text: str, n: int = None) -> Digraph:
    """Parse '1>2,2>3' (1-based vertices)."""
    edges = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            a, b = chunk.split(">")
            edges.append((int(a) - 1, int(b) - 1))
        except ValueError as e:
            raise InputError(f"malformed edge '{chunk}'") from e
    if n is None:
        n = max([max(e) for e in edges], default=0) + 1
    return Digraph(n, tuple(edges))


def v_coeff(graph: Digraph, kappa: Sequence, tau: WeakStability, tau_tilde: WeakStability) -> Fraction:
    if not graph.is_tree():
        raise NotATreeError(f"{graph} is not a tree")
    if len(kappa) != graph.n:
        raise InputError("kappa must assign a class to every vertex")
    kappa = [as_class(k) for k in kappa]
    n = graph.n
    total = Fraction(0)
    for ext in graph.order().linear_extensions():
        total += u_coeff(ADatum(tuple(kappa[i] for i in ext)), tau, tau_tilde)
    return total / (2 ** (n - 1) * factorial(n))


def enumerate_trees(n: int, mode: str = "oriented") -> Iterator[Digraph]:
    """Labeled trees on range(n): all orientations, or edges from smaller to larger label."""
    if n < 1:
        raise InputError("trees need at least one vertex")
    for edges in labeled_trees(n):
        if mode == "increasing":
            yield Digraph(n, edges)
        elif mode == "oriented":
            for mask in range(1 << len(edges)):
                yield Digraph(
                    n,
                    tuple((j, i) if mask >> k & 1 else (i, j) for k, (i, j) in enumerate(edges)),
                )
        else:
            raise InputError(f"unknown tree mode: {mode}")


class MultilinearWordSum:
    """Rational combination of words, each a permutation of one letter set."""

    def __init__(self, terms: Dict[Tuple, Fraction]):
        self.terms = {tuple(w): Fraction(c) for w, c in terms.items() if c}

    def degree(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    def _check_multilinear(self):
        letters = None
        for w in self.terms:
            if len(set(w)) != len(w):
                raise InputError(f"word {w} repeats a letter")
            if letters is None:
                letters = set(w)
            elif set(w) != letters:
                raise InputError(f"word {w} uses a different letter set")

    def left_bracketing(self) -> "MultilinearWordSum":
        """Linear extension of w1 w2 ... wn -> [...[[w1, w2], w3], ..., wn]."""
        out: Dict[Tuple, Fraction] = {}
        for word, coeff in self.terms.items():
            expansion = {word[:1]: Fraction(1)}
            for letter in word[1:]:
                nxt: Dict[Tuple, Fraction] = {}
                for u, c in expansion.items():
                    nxt[u + (letter,)] = nxt.get(u + (letter,), 0) + c
                    nxt[(letter,) + u] = nxt.get((letter,) + u, 0) - c
                expansion = nxt
            for u, c in expansion.items():
                out[u] = out.get(u, 0) + c * coeff
        return MultilinearWordSum(out)

    def scale(self, c) -> "MultilinearWordSum":
        return MultilinearWordSum({w: v * c for w, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, MultilinearWordSum) and self.terms == other.terms

    def __repr__(self):
        return f"MultilinearWordSum({self.terms})"


def lie_membership(w: MultilinearWordSum) -> bool:
    """Dynkin-Specht-Wever: w is a Lie element iff its left bracketing is n * w."""
    w._check_multilinear()
    if not w.terms:
        return True
    return w.left_bracketing() == w.scale(w.degree())


def u_word_sum(kappa: Sequence, tau: WeakStability, tau_tilde: WeakStability) -> MultilinearWordSum:
    """Sum over orderings of kappa of U(ordering) times the word of the ordering."""
    kappa = [as_class(k) for k in kappa]
    terms = {}
    for perm in permutations(range(len(kappa))):
        terms[perm] = u_coeff(ADatum(tuple(kappa[i] for i in perm)), tau, tau_tilde)
    return MultilinearWordSum(terms)


def s_closed_form_dominant(d: ADatum, tau: WeakStability, tau_tilde: WeakStability) -> int:
    """S(d, tau, tau_tilde) for tau_tilde dominating tau."""
    if not adata_predicates(d, tau).reversing:
        return 0
    target = tau_tilde(d.total())
    return 1 if all(tau_tilde(k) == target for k in d) else 0


def s_closed_form_reverse(d: ADatum, tau_tilde: WeakStability, tau: WeakStability) -> int:
    """S(d, tau_tilde, tau) for tau_tilde dominating tau."""
    n = len(d)
    target = tau_tilde(d.total())
    if any(tau_tilde(k) != target for k in d):
        return 0
    if not all(tau(d.prefix(i)) > tau(d.suffix(i)) for i in range(1, n)):
        return 0
    return (-1) ** (n - 1)


def inversion_sums(phi_sizes: Sequence[int]) -> Tuple[Fraction, Fraction]:
    """Both sums over factorizations phi = xi o psi of monotone surjections.

    phi is given by its block sizes; each sum equals 1 when phi is a bijection and 0 otherwise.
    """
    first = Fraction(0)
    second = Fraction(0)

    def refine(a: int, chosen: Tuple[Tuple[int, ...], ...]):
        nonlocal first, second
        if a == len(phi_sizes):
            xi_sizes = [len(c) for c in chosen]
            psi_sizes = [s for c in chosen for s in c]
            log_psi = Fraction(1)
            for s in psi_sizes:
                log_psi *= Fraction((-1) ** (s - 1), s)
            log_xi = Fraction(1)
            for s in xi_sizes:
                log_xi *= Fraction((-1) ** (s - 1), s)
            first += log_psi / factorial_weight(xi_sizes)
            second += log_xi / factorial_weight(psi_sizes)
            return
        for comp in compositions(phi_sizes[a]):
            refine(a + 1, chosen + (comp,))

    refine(0, ())
    return first, second
