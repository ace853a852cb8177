"""Quiver representations: stack counts, slope-semistable invariants and a finite-field oracle."""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import prod
from typing import List, Optional, Sequence, Tuple

from wallcross.engine import (
    ISS,
    EulerPairing,
    InvariantTable,
    j_from_iss,
    lattice_enumerator,
    twist_exponent,
    wallcross_iss,
)
from wallcross.errors import InputError, NotInConeError, OracleGuardError
from wallcross.lambda_ring import LambdaElement, TruncatedSeries, expand_series
from wallcross.stability import (
    KClass,
    QuiverLattice,
    WeakStability,
    as_class,
    prefix_exceeds_total,
)
from wallcross.utils.finite_field import field, subspaces
from wallcross.utils.parallel import parallel_reduce

ORACLE_MAX_DIM = 4
ORACLE_MAX_Q = 4
DEFAULT_FLOOR = -20


def _vertex_index(vertices: Tuple[str, ...], label) -> int:
    try:
        return vertices.index(str(label))
    except ValueError:
        raise InputError(f"arrow endpoint {label!r} is not a vertex") from None


@dataclass(frozen=True)
class QuiverPresentation:
    """Finite quiver; arrows are (begin, end) vertex indices."""

    vertices: Tuple[str, ...]
    arrows: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        n = len(self.vertices)
        if n == 0:
            raise InputError("a quiver needs at least one vertex")
        if len(set(self.vertices)) != n:
            raise InputError(f"vertex labels must be distinct: {list(self.vertices)}")
        for b, e in self.arrows:
            if not (0 <= b < n and 0 <= e < n):
                raise InputError(f"arrow ({b},{e}) leaves the vertex set")

    @property
    def rank(self) -> int:
        return len(self.vertices)

    @property
    def lattice(self) -> QuiverLattice:
        return QuiverLattice(self.rank)

    @classmethod
    def one_vertex(cls) -> "QuiverPresentation":
        return cls(("0",), ())

    @classmethod
    def a2(cls) -> "QuiverPresentation":
        return cls(("0", "1"), ((0, 1),))

    @classmethod
    def kronecker(cls, m: int = 2) -> "QuiverPresentation":
        return cls(("0", "1"), tuple((0, 1) for _ in range(m)))

    @classmethod
    def preset(cls, name: str) -> "QuiverPresentation":
        name = name.strip().lower().replace("_", "-")
        if name in ("one-vertex", "a1"):
            return cls.one_vertex()
        if name == "a2":
            return cls.a2()
        if name.startswith("kronecker"):
            suffix = name[len("kronecker") :].lstrip("-")
            return cls.kronecker(int(suffix) if suffix else 2)
        raise InputError(f"unknown quiver preset: {name}")

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"from": self.vertices[b], "to": self.vertices[e]} for b, e in self.arrows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuiverPresentation":
        """Arrows are {"from": label, "to": label} objects, or [begin, end] index pairs."""
        try:
            vertices = data["vertices"]
            if isinstance(vertices, int):
                vertices = range(vertices)
            vertices = tuple(str(v) for v in vertices)
            arrows = []
            for arrow in data.get("arrows", []):
                if isinstance(arrow, dict):
                    begin = _vertex_index(vertices, arrow["from"])
                    arrows.append((begin, _vertex_index(vertices, arrow["to"])))
                else:
                    b, e = arrow
                    arrows.append((int(b), int(e)))
            return cls(vertices, tuple(arrows))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed quiver: {e}") from e

    @classmethod
    def load(cls, path) -> "QuiverPresentation":
        try:
            with open(path, "r", encoding="utf-8") as f:
                return cls.from_json(json.load(f))
        except json.JSONDecodeError as e:
            raise InputError(f"quiver file {path} is not valid JSON: {e}") from e


def euler_form(quiver: QuiverPresentation) -> EulerPairing:
    """chi(a, b) = sum_v a_v b_v - sum_arrows a_begin b_end."""
    n = quiver.rank
    matrix = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for b, e in quiver.arrows:
        matrix[b][e] -= 1
    return EulerPairing(matrix)


def quiver_enumerator(quiver: QuiverPresentation):
    return lattice_enumerator(quiver.lattice)


def _check_class(quiver: QuiverPresentation, alpha) -> KClass:
    alpha = as_class(alpha)
    if not quiver.lattice.is_positive(alpha):
        raise NotInConeError(f"{alpha} is not a dimension vector of {quiver.rank} vertices")
    return alpha


def gl_order(n: int, q: int) -> int:
    return prod(q**n - q**i for i in range(n))


def iss_trivial(quiver: QuiverPresentation, alpha) -> LambdaElement:
    """Motive of the whole stack of representations: l^(arrows - sum a(a-1)/2) / prod (l^k - 1)."""
    return _iss_trivial(quiver, _check_class(quiver, alpha))


@lru_cache(maxsize=None)
def _iss_trivial(quiver: QuiverPresentation, alpha: KClass) -> LambdaElement:
    exponent = sum(alpha[b] * alpha[e] for b, e in quiver.arrows)
    exponent -= sum(a * (a - 1) // 2 for a in alpha)
    value = LambdaElement.ell(exponent)
    for a in alpha:
        for k in range(1, a + 1):
            value = value / LambdaElement.ell_power_minus_one(k)
    return value


def iss_semistable(quiver: QuiverPresentation, alpha, stability: WeakStability) -> LambdaElement:
    """Sum over decompositions whose proper prefixes all have slope above alpha."""
    return _iss_semistable(quiver, _check_class(quiver, alpha), stability)


@lru_cache(maxsize=None)
def _iss_semistable(
    quiver: QuiverPresentation, alpha: KClass, stability: WeakStability
) -> LambdaElement:
    chi = euler_form(quiver)
    total = LambdaElement.zero()
    for d in quiver_enumerator(quiver)(alpha):
        if not prefix_exceeds_total(d, stability):
            continue
        term = LambdaElement.ell(twist_exponent(chi, d.parts))
        for k in d:
            term = term * iss_trivial(quiver, k)
        total = total + (term if len(d) % 2 else -term)
    logging.debug(f"iss_semistable {alpha} at {stability}: {total}")
    return total


def trivial_table(quiver: QuiverPresentation, alpha) -> InvariantTable:
    alpha = _check_class(quiver, alpha)
    return InvariantTable(
        ISS, {beta: iss_trivial(quiver, beta) for beta in quiver.lattice.classes_below(alpha)}
    )


def semistable_table(
    quiver: QuiverPresentation, alpha, stability: WeakStability
) -> InvariantTable:
    alpha = _check_class(quiver, alpha)
    return InvariantTable(
        ISS,
        {
            beta: iss_semistable(quiver, beta, stability)
            for beta in quiver.lattice.classes_below(alpha)
        },
    )


def iss_semistable_via_wallcross(
    quiver: QuiverPresentation, alpha, stability: WeakStability
) -> LambdaElement:
    alpha = _check_class(quiver, alpha)
    return wallcross_iss(
        alpha,
        WeakStability.trivial(),
        stability,
        trivial_table(quiver, alpha),
        euler_form(quiver),
        quiver_enumerator(quiver),
    )


def j_semistable(quiver: QuiverPresentation, alpha, stability: WeakStability) -> LambdaElement:
    alpha = _check_class(quiver, alpha)
    return j_from_iss(
        alpha,
        stability,
        semistable_table(quiver, alpha, stability),
        euler_form(quiver),
        quiver_enumerator(quiver),
    )


def moduli_poincare_candidate(
    quiver: QuiverPresentation,
    alpha,
    stability: WeakStability,
    floor: int = DEFAULT_FLOOR,
) -> TruncatedSeries:
    """(l - 1) * I_ss expanded in z = sqrt(l); a polynomial for coprime alpha."""
    value = iss_semistable(quiver, alpha, stability) * LambdaElement.ell_power_minus_one(1)
    return expand_series(value, floor)


class _OracleSetup:
    """Per-call tables shared by the worker threads (read-only once built)."""

    def __init__(self, quiver: QuiverPresentation, alpha: KClass, stability: WeakStability, q: int):
        self.F = field(q)
        self.q = q
        self.shapes = [(alpha[e], alpha[b]) for b, e in quiver.arrows]
        self.arrows = quiver.arrows
        self.n_entries = sum(r * c for r, c in self.shapes)
        per_vertex = [subspaces(q, a) for a in alpha]
        self.destabilizing = []
        for choice in product(*per_vertex):
            beta = tuple(s.dim for s in choice)
            if not any(beta) or beta == tuple(alpha):
                continue
            rest = tuple(a - b for a, b in zip(alpha, beta))
            if stability(KClass(beta)) > stability(KClass(rest)):
                self.destabilizing.append(choice)

    def matrices(self, flat: Sequence[int]) -> List[Tuple[Tuple[int, ...], ...]]:
        out = []
        start = 0
        for rows, cols in self.shapes:
            out.append(
                tuple(tuple(flat[start + r * cols : start + (r + 1) * cols]) for r in range(rows))
            )
            start += rows * cols
        return out

    def is_invariant(self, choice, mats) -> bool:
        for (b, e), m in zip(self.arrows, mats):
            target = choice[e]
            for v in choice[b].basis:
                if self.F.mat_vec(m, v) not in target:
                    return False
        return True

    def count(self, prefix: Tuple[int, ...]) -> int:
        semistable = 0
        for rest in product(range(self.q), repeat=self.n_entries - len(prefix)):
            mats = self.matrices(prefix + rest)
            if not any(self.is_invariant(choice, mats) for choice in self.destabilizing):
                semistable += 1
        return semistable


def ff_count_semistable(
    quiver: QuiverPresentation,
    alpha,
    stability: WeakStability,
    q: int,
    jobs: Optional[int] = None,
    max_dim: int = ORACLE_MAX_DIM,
    max_q: int = ORACLE_MAX_Q,
) -> Fraction:
    """Brute-force |semistable representations over GF(q)| / |GL(alpha, q)|."""
    alpha = _check_class(quiver, alpha)
    if sum(alpha) > max_dim or q > max_q:
        raise OracleGuardError(
            f"oracle limited to total dimension <= {max_dim} and q <= {max_q}, "
            f"got {alpha} over GF({q})"
        )
    setup = _OracleSetup(quiver, alpha, stability, q)
    logging.info(
        f"Oracle {alpha} over GF({q}): {q ** setup.n_entries} representations, "
        f"{len(setup.destabilizing)} destabilizing subspace choices"
    )
    split = min(setup.n_entries, 2)
    tasks = list(product(range(q), repeat=split))
    count = parallel_reduce(setup.count, tasks, jobs)
    return Fraction(count, prod(gl_order(a, q) for a in alpha))
