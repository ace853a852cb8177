"""Euler-form-twisted invariant algebra.

Conversions between semistable invariants I_ss and the invariants J, configuration products, and the wall-crossing transforms. All of these are generic over a lattice with a bilinear pairing chi. Decompositions come from an injected enumerator, which maps a class to an iterable of ADatum.
"""

import json
import logging
from fractions import Fraction
from functools import partial
from itertools import product
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Sequence

from wallcross.coefficients import (
    Digraph,
    enumerate_trees,
    s_coeff,
    u_coeff,
    v_coeff,
)
from wallcross.errors import EnumerationError, InputError, MissingInvariantError
from wallcross.lambda_ring import LambdaElement, lambda0_membership, project_omega
from wallcross.stability import (
    ADatum,
    KClass,
    Poset,
    WeakStability,
    as_class,
    enumerate_decompositions,
)

ISS = "ISS"
J = "J"
J_OMEGA = "J_OMEGA"
FLAVORS = (ISS, J, J_OMEGA)

MAX_CONFIG_SIZE = 3

Enumerator = Callable[[KClass], Iterable[ADatum]]


class EulerPairing:
    """Bilinear integer form chi(a, b) = a^T M b over the lattice basis."""

    def __init__(self, matrix: Sequence[Sequence[int]]):
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        self.rank = len(self.matrix)
        if any(len(row) != self.rank for row in self.matrix):
            raise InputError("pairing matrix must be square")

    def __call__(self, a, b) -> int:
        a, b = as_class(a), as_class(b)
        return sum(
            a[i] * self.matrix[i][j] * b[j]
            for i in range(self.rank)
            if a[i]
            for j in range(self.rank)
            if b[j]
        )

    def is_symmetric(self) -> bool:
        return all(
            self.matrix[i][j] == self.matrix[j][i]
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def antisymmetrize(self) -> "AntisymmetrizedPairing":
        return AntisymmetrizedPairing(
            [
                [self.matrix[i][j] - self.matrix[j][i] for j in range(self.rank)]
                for i in range(self.rank)
            ]
        )

    def to_json(self):
        return [list(row) for row in self.matrix]

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class AntisymmetrizedPairing(EulerPairing):
    def __init__(self, matrix):
        super().__init__(matrix)
        for i in range(self.rank):
            for j in range(self.rank):
                if self.matrix[i][j] != -self.matrix[j][i]:
                    raise InputError("pairing is not antisymmetric")


class InvariantTable:
    """Finite map from classes to invariant values.

    Looking up an absent class raises MissingInvariantError; there are no implicit zeros.
    """

    def __init__(self, flavor: str, entries: Mapping):
        if flavor not in FLAVORS:
            raise InputError(f"unknown table flavor: {flavor}")
        self.flavor = flavor
        self.entries: Dict[KClass, object] = {}
        for k, v in entries.items():
            k = as_class(k)
            if flavor == J_OMEGA:
                v = Fraction(v)
            elif not isinstance(v, LambdaElement):
                v = LambdaElement.from_fraction(v)
            if flavor == J and not lambda0_membership(v):
                raise InputError(f"J value {v} at {k} is not in Λ°")
            self.entries[k] = v

    def __getitem__(self, alpha):
        alpha = as_class(alpha)
        try:
            return self.entries[alpha]
        except KeyError:
            raise MissingInvariantError(alpha, self.flavor) from None

    def __contains__(self, alpha):
        return as_class(alpha) in self.entries

    def __len__(self):
        return len(self.entries)

    def classes(self) -> List[KClass]:
        return sorted(self.entries)

    def items(self):
        return [(k, self.entries[k]) for k in self.classes()]

    def __eq__(self, other):
        return (
            isinstance(other, InvariantTable)
            and self.flavor == other.flavor
            and self.entries == other.entries
        )

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor,
            "entries": [
                {
                    "class": k.to_json(),
                    "value": str(v) if self.flavor == J_OMEGA else v.to_json(),
                }
                for k, v in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "InvariantTable":
        try:
            flavor = data["flavor"]
            entries = {}
            for item in data["entries"]:
                value = item["value"]
                if flavor == J_OMEGA:
                    entries[as_class(item["class"])] = Fraction(value)
                elif isinstance(value, dict):
                    entries[as_class(item["class"])] = LambdaElement.from_json(value)
                else:
                    entries[as_class(item["class"])] = LambdaElement.from_fraction(Fraction(value))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed invariant table: {e}") from e
        return cls(flavor, entries)

    @classmethod
    def load(cls, path) -> "InvariantTable":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_json(json.load(f))


def lattice_enumerator(lattice) -> Enumerator:
    return partial(enumerate_decompositions, lattice)


def twist_exponent(chi: EulerPairing, parts: Sequence[KClass]) -> int:
    """-sum_{i<j} chi(k_j, k_i)."""
    return -sum(
        chi(parts[j], parts[i]) for i in range(len(parts)) for j in range(i + 1, len(parts))
    )


def _product(table: InvariantTable, parts: Sequence[KClass]):
    out = table[parts[0]]
    for k in parts[1:]:
        out = out * table[k]
    return out


def _constant_tau(d: ADatum, tau: WeakStability, target) -> bool:
    return all(tau(k) == target for k in d)


_L_MINUS_ONE = LambdaElement.ell_power_minus_one(1)


def j_from_iss(
    alpha,
    tau: WeakStability,
    iss: InvariantTable,
    chi: EulerPairing,
    enumerator: Enumerator,
) -> LambdaElement:
    alpha = as_class(alpha)
    target = tau(alpha)
    total = LambdaElement.zero()
    for d in enumerator(alpha):
        if not _constant_tau(d, tau, target):
            continue
        n = len(d)
        weight = Fraction((-1) ** (n - 1), n)
        total = total + weight * LambdaElement.ell(twist_exponent(chi, d.parts)) * _product(
            iss, d.parts
        )
    return total * _L_MINUS_ONE


def iss_from_j(
    alpha,
    tau: WeakStability,
    j: InvariantTable,
    chi: EulerPairing,
    enumerator: Enumerator,
) -> LambdaElement:
    alpha = as_class(alpha)
    target = tau(alpha)
    total = LambdaElement.zero()
    for d in enumerator(alpha):
        if not _constant_tau(d, tau, target):
            continue
        n = len(d)
        total = total + (
            Fraction(1, factorial(n))
            * _L_MINUS_ONE ** (-n)
            * LambdaElement.ell(twist_exponent(chi, d.parts))
            * _product(j, d.parts)
        )
    return total


def iss_config(poset: Poset, kappa: Sequence, iss: InvariantTable, chi: EulerPairing) -> LambdaElement:
    """l^{-sum_{i != j, i <= j} chi(k_j, k_i)} * prod iss(k_i)."""
    kappa = [as_class(k) for k in kappa]
    if len(kappa) != poset.n:
        raise InputError("kappa must assign a class to every element")
    exponent = -sum(chi(kappa[j], kappa[i]) for i, j in poset.strict_pairs())
    return LambdaElement.ell(exponent) * _product(iss, kappa)


def wallcross_iss(
    alpha,
    tau: WeakStability,
    tau_tilde: WeakStability,
    iss_at_tau: InvariantTable,
    chi: EulerPairing,
    enumerator: Enumerator,
) -> LambdaElement:
    alpha = as_class(alpha)
    total = LambdaElement.zero()
    for d in enumerator(alpha):
        s = s_coeff(d, tau, tau_tilde)
        if not s:
            continue
        total = total + s * LambdaElement.ell(twist_exponent(chi, d.parts)) * _product(
            iss_at_tau, d.parts
        )
    logging.debug(f"wallcross_iss {alpha}: {tau} -> {tau_tilde} = {total}")
    return total


def wallcross_j(
    alpha,
    tau: WeakStability,
    tau_tilde: WeakStability,
    j_at_tau: InvariantTable,
    chi: EulerPairing,
    enumerator: Enumerator,
) -> LambdaElement:
    alpha = as_class(alpha)
    total = LambdaElement.zero()
    for d in enumerator(alpha):
        u = u_coeff(d, tau, tau_tilde)
        if not u:
            continue
        total = total + (
            u
            * _L_MINUS_ONE ** (1 - len(d))
            * LambdaElement.ell(twist_exponent(chi, d.parts))
            * _product(j_at_tau, d.parts)
        )
    logging.debug(f"wallcross_j {alpha}: {tau} -> {tau_tilde} = {total}")
    return total


def _edge_product(graph: Digraph, parts: Sequence[KClass], chi_bar: EulerPairing) -> int:
    out = 1
    for i, j in graph.edges:
        out *= chi_bar(parts[i], parts[j])
        if not out:
            return 0
    return out


def wallcross_j_omega(
    alpha,
    tau: WeakStability,
    tau_tilde: WeakStability,
    j_omega: InvariantTable,
    chi_bar: AntisymmetrizedPairing,
    enumerator: Enumerator,
    mode: str = "oriented",
) -> Fraction:
    """Euler-characteristic level transform as a sum over labeled trees.

    mode 'oriented' sums every orientation of every tree weighted by V; 'increasing' sums trees with edges i -> j, i < j, weighted by U / 2^(n-1).
    """
    if mode not in ("oriented", "increasing"):
        raise InputError(f"unknown tree-sum mode: {mode}")
    if j_omega.flavor != J_OMEGA:
        raise InputError("tree sums need a J_OMEGA table")
    alpha = as_class(alpha)
    total = Fraction(0)
    for d in enumerator(alpha):
        n = len(d)
        scale = None
        if mode == "increasing":
            scale = u_coeff(d, tau, tau_tilde) / 2 ** (n - 1)
            if not scale:
                continue
        values = None
        for graph in enumerate_trees(n, mode):
            edges = _edge_product(graph, d.parts, chi_bar)
            if not edges:
                continue
            weight = scale if scale is not None else v_coeff(graph, d.parts, tau, tau_tilde)
            if not weight:
                continue
            if values is None:
                values = _product(j_omega, d.parts)
            total += weight * edges * values
    return total


def _fiber_poset(K: Poset, chains: Sequence[ADatum]):
    """Poset and kappa on the disjoint union of chains, ordered across fibers by K."""
    elements = [(k, p) for k, chain in enumerate(chains) for p in range(len(chain))]
    rel = set()
    for a, (k, p) in enumerate(elements):
        for b, (k2, p2) in enumerate(elements):
            if (k == k2 and p <= p2) or (k != k2 and K.leq(k, k2)):
                rel.add((a, b))
    kappa = [chains[k][p] for k, p in elements]
    return Poset(len(elements), rel), kappa


def _chain_choices(mu: Sequence[KClass], enumerator: Enumerator) -> Iterator[tuple]:
    return product(*(list(enumerator(m)) for m in mu))


def wallcross_config(
    K: Poset,
    mu: Sequence,
    tau: WeakStability,
    tau_tilde: WeakStability,
    iss_at_tau: InvariantTable,
    chi: EulerPairing,
    enumerator: Enumerator,
) -> LambdaElement:
    """Configuration invariant of (K, K-order, mu) at tau_tilde from tau-level data.

    Sums T(I, kappa, K, phi) * iss_config(I, kappa) over dominant (I, phi) above K; labelings of I cancel the 1/|I|! weight.
    """
    if K.n > MAX_CONFIG_SIZE:
        raise EnumerationError(f"configuration transforms support |K| <= {MAX_CONFIG_SIZE}")
    mu = [as_class(m) for m in mu]
    if len(mu) != K.n:
        raise InputError("mu must assign a class to every element of K")
    total = LambdaElement.zero()
    for chains in _chain_choices(mu, enumerator):
        t = 1
        for chain in chains:
            t *= s_coeff(chain, tau, tau_tilde)
            if not t:
                break
        if not t:
            continue
        poset, kappa = _fiber_poset(K, chains)
        total = total + t * iss_config(poset, kappa, iss_at_tau, chi)
    return total


def support_below(lattice, alpha) -> List[KClass]:
    return lattice.classes_below(as_class(alpha))


def _table_map(fn, classes: Iterable[KClass], flavor: str) -> InvariantTable:
    entries = {}
    for alpha in classes:
        entries[alpha] = fn(alpha)
    return InvariantTable(flavor, entries)


def table_j_from_iss(classes, tau, iss, chi, enumerator) -> InvariantTable:
    return _table_map(lambda a: j_from_iss(a, tau, iss, chi, enumerator), classes, J)


def table_iss_from_j(classes, tau, j, chi, enumerator) -> InvariantTable:
    return _table_map(lambda a: iss_from_j(a, tau, j, chi, enumerator), classes, ISS)


def table_wallcross_iss(classes, tau, tau_tilde, iss, chi, enumerator) -> InvariantTable:
    return _table_map(
        lambda a: wallcross_iss(a, tau, tau_tilde, iss, chi, enumerator), classes, ISS
    )


def table_wallcross_j(classes, tau, tau_tilde, j, chi, enumerator) -> InvariantTable:
    return _table_map(
        lambda a: wallcross_j(a, tau, tau_tilde, j, chi, enumerator), classes, J
    )


def table_project_omega(j: InvariantTable) -> InvariantTable:
    return InvariantTable(J_OMEGA, {k: project_omega(v) for k, v in j.items()})
