"""Lattice classes, weak stability conditions, A-data and posets."""

import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, total_ordering
from itertools import combinations, permutations, product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from wallcross.errors import EnumerationError, InputError, NotInConeError


@dataclass(frozen=True, order=True)
class KClass:
    coords: Tuple[int, ...]

    @classmethod
    def of(cls, *coords: int) -> "KClass":
        return cls(tuple(int(c) for c in coords))

    def __add__(self, other: "KClass") -> "KClass":
        if len(self.coords) != len(other.coords):
            raise InputError(f"classes {self} and {other} live in different lattices")
        return KClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "KClass") -> "KClass":
        if len(self.coords) != len(other.coords):
            raise InputError(f"classes {self} and {other} live in different lattices")
        return KClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> List[int]:
        return list(self.coords)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def as_class(value) -> KClass:
    if isinstance(value, KClass):
        return value
    if isinstance(value, int):
        return KClass((value,))
    return KClass(tuple(int(c) for c in value))


def class_sum(classes: Iterable[KClass]) -> KClass:
    classes = list(classes)
    if not classes:
        raise InputError("empty class sum")
    total = classes[0]
    for c in classes[1:]:
        total = total + c
    return total


class QuiverLattice:
    """N^rank minus zero; every class has finitely many decompositions."""

    finite_decompositions = True

    def __init__(self, rank: int):
        self.rank = rank

    def is_positive(self, alpha: KClass) -> bool:
        return (
            len(alpha) == self.rank
            and all(c >= 0 for c in alpha)
            and any(c > 0 for c in alpha)
        )

    def classes_below(self, alpha: KClass) -> List[KClass]:
        """Positive classes beta with beta <= alpha coordinatewise, sorted."""
        return [KClass(c) for c in _below(alpha.coords)]

    def __repr__(self):
        return f"QuiverLattice({self.rank})"


@lru_cache(maxsize=None)
def _below(coords: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    out = [c for c in product(*(range(x + 1) for x in coords)) if any(c)]
    return tuple(sorted(out))


class CurveLattice:
    """Classes (n, d) of coherent sheaves on a genus g curve."""

    finite_decompositions = False

    def __init__(self, genus: int):
        self.genus = genus
        self.rank = 2

    def is_positive(self, alpha: KClass) -> bool:
        if len(alpha) != 2:
            return False
        n, d = alpha
        return n > 0 or (n == 0 and d > 0)

    def __repr__(self):
        return f"CurveLattice(g={self.genus})"


@total_ordering
class TauValue:
    """A value of a weak stability condition.

    Values of different variants are never compared. For reduced Hilbert values, support dimension 0 is greater than dimension 1.
    """

    __slots__ = ("variant", "slope", "dim")

    def __init__(self, variant: str, slope: Optional[Fraction] = None, dim: Optional[int] = None):
        self.variant = variant
        self.slope = slope
        self.dim = dim

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def of_slope(cls, slope):
        return cls("slope", Fraction(slope))

    @classmethod
    def reduced_hilbert(cls, dim: int, slope=None):
        return cls("hilbert", None if slope is None else Fraction(slope), dim)

    def _key(self):
        if self.variant == "trivial":
            return ()
        if self.variant == "slope":
            return (self.slope,)
        return (-self.dim, self.slope if self.slope is not None else Fraction(0))

    def _check(self, other):
        if not isinstance(other, TauValue):
            return NotImplemented
        if other.variant != self.variant:
            raise TypeError(f"cannot compare {self} with {other}")
        return other

    def __eq__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        return hash((self.variant, self._key()))

    def __repr__(self):
        if self.variant == "trivial":
            return "Trivial"
        if self.variant == "slope":
            return f"Slope({self.slope})"
        slope = "-" if self.slope is None else str(self.slope)
        return f"ReducedHilbert({self.dim}, {slope})"


@dataclass(frozen=True)
class WeakStability:
    kind: str
    c: Tuple[int, ...] = ()
    r: Tuple[int, ...] = ()
    genus: int = 0
    table: Tuple[Tuple[KClass, Fraction], ...] = field(default=(), compare=True)

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def slope(cls, c: Sequence[int], r: Sequence[int]):
        c, r = tuple(int(x) for x in c), tuple(int(x) for x in r)
        if len(c) != len(r):
            raise InputError(f"slope vectors differ in length: c={c}, r={r}")
        if any(x <= 0 for x in r):
            raise InputError(f"rank vector must be positive on generators: r={r}")
        return cls("slope", c=c, r=r)

    @classmethod
    def curve_gieseker(cls, genus: int):
        return cls("curve_gieseker", genus=int(genus))

    @classmethod
    def curve_purity(cls, genus: int):
        return cls("curve_purity", genus=int(genus))

    @classmethod
    def values(cls, mapping: Dict[KClass, Fraction]):
        table = tuple(sorted((as_class(k), Fraction(v)) for k, v in mapping.items()))
        return cls("values", table=table)

    def __call__(self, alpha: KClass) -> TauValue:
        return tau_of(self, alpha)

    def to_json(self) -> dict:
        if self.kind == "trivial":
            return {"kind": "trivial"}
        if self.kind == "slope":
            return {"kind": "slope", "c": list(self.c), "r": list(self.r)}
        if self.kind == "values":
            return {
                "kind": "values",
                "values": [{"class": k.to_json(), "tau": str(v)} for k, v in self.table],
            }
        return {"kind": self.kind, "genus": self.genus}

    @classmethod
    def from_json(cls, data: dict) -> "WeakStability":
        try:
            kind = data["kind"]
            if kind == "trivial":
                return cls.trivial()
            if kind == "slope":
                return cls.slope(data["c"], data["r"])
            if kind == "curve_gieseker":
                return cls.curve_gieseker(data["genus"])
            if kind == "curve_purity":
                return cls.curve_purity(data["genus"])
            if kind == "values":
                return cls.values(
                    {as_class(v["class"]): Fraction(v["tau"]) for v in data["values"]}
                )
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed stability condition: {e}") from e
        raise InputError(f"unknown stability kind: {kind}")

    def __str__(self):
        if self.kind == "slope":
            return f"slope c={','.join(map(str, self.c))} r={','.join(map(str, self.r))}"
        if self.kind in ("curve_gieseker", "curve_purity"):
            return f"{self.kind.split('_')[1]} g={self.genus}"
        return self.kind


_SPEC_PATTERN = re.compile(r"(\w+)=([-\d,]+)")


def parse_stability(text: str) -> WeakStability:
    """Parse 'trivial', 'slope c=1,0 r=1,1', 'gieseker g=2' or 'purity g=2'."""
    text = text.strip()
    if text.startswith("{"):
        return WeakStability.from_json(json.loads(text))
    head = text.split()[0] if text else ""
    params = dict(_SPEC_PATTERN.findall(text))
    try:
        if head == "trivial":
            return WeakStability.trivial()
        if head == "slope":
            c = [int(x) for x in params["c"].split(",")]
            r = [int(x) for x in params["r"].split(",")] if "r" in params else [1] * len(c)
            return WeakStability.slope(c, r)
        if head in ("gieseker", "curve_gieseker"):
            return WeakStability.curve_gieseker(int(params.get("g", 0)))
        if head in ("purity", "curve_purity"):
            return WeakStability.curve_purity(int(params.get("g", 0)))
    except (KeyError, ValueError) as e:
        raise InputError(f"malformed stability '{text}': {e}") from e
    raise InputError(f"unknown stability '{text}'")


def tau_of(stab: WeakStability, alpha: KClass) -> TauValue:
    alpha = as_class(alpha)
    if stab.kind == "trivial":
        if alpha.is_zero():
            raise NotInConeError(f"{alpha} is not in the positive cone")
        return TauValue.trivial()
    if stab.kind == "slope":
        if len(alpha) != len(stab.r) or any(x < 0 for x in alpha) or alpha.is_zero():
            raise NotInConeError(f"{alpha} is not in the positive cone")
        num = sum(a * b for a, b in zip(stab.c, alpha))
        den = sum(a * b for a, b in zip(stab.r, alpha))
        return TauValue.of_slope(Fraction(num, den))
    if stab.kind in ("curve_gieseker", "curve_purity"):
        if not CurveLattice(stab.genus).is_positive(alpha):
            raise NotInConeError(f"{alpha} is not a class of a nonzero sheaf")
        n, d = alpha
        if stab.kind == "curve_purity":
            return TauValue.reduced_hilbert(0 if n == 0 else 1, 0)
        if n == 0:
            return TauValue.reduced_hilbert(0)
        return TauValue.reduced_hilbert(1, Fraction(d, n) + 1 - stab.genus)
    if stab.kind == "values":
        for k, v in stab.table:
            if k == alpha:
                return TauValue.of_slope(v)
        raise NotInConeError(f"{alpha} has no stability value")
    raise InputError(f"unknown stability kind: {stab.kind}")


def check_weak_seesaw(stab: WeakStability, alpha: KClass, gamma: KClass) -> bool:
    a = tau_of(stab, alpha)
    b = tau_of(stab, as_class(alpha) + as_class(gamma))
    c = tau_of(stab, gamma)
    return (a <= b <= c) or (a >= b >= c)


def dominates(dominant: WeakStability, stab: WeakStability, classes: Iterable[KClass]) -> bool:
    """True when stab(a) <= stab(b) implies dominant(a) <= dominant(b) on the sample."""
    classes = list(classes)
    for a in classes:
        for b in classes:
            if stab(a) <= stab(b) and not dominant(a) <= dominant(b):
                return False
    return True


@dataclass(frozen=True)
class ADatum:
    """A totally ordered tuple of positive classes."""

    parts: Tuple[KClass, ...]

    @classmethod
    def of(cls, *parts) -> "ADatum":
        if not parts:
            raise InputError("A-data needs at least one part")
        return cls(tuple(as_class(p) for p in parts))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def total(self) -> KClass:
        return class_sum(self.parts)

    def subset_sum(self, indices: Iterable[int]) -> KClass:
        return class_sum(self.parts[i] for i in indices)

    def prefix(self, i: int) -> KClass:
        return class_sum(self.parts[:i])

    def suffix(self, i: int) -> KClass:
        return class_sum(self.parts[i:])

    def reordered(self, order: Sequence[int]) -> "ADatum":
        return ADatum(tuple(self.parts[i] for i in order))

    def to_json(self) -> List[List[int]]:
        return [p.to_json() for p in self.parts]

    def __str__(self):
        return "[" + ";".join(str(p) for p in self.parts) + "]"


def parse_parts(text: str) -> ADatum:
    """Parse '[1,0];[0,1]' into an ADatum."""
    try:
        chunks = [c.strip() for c in text.split(";") if c.strip()]
        return ADatum.of(*[[int(x) for x in c.strip("[]() ").split(",")] for c in chunks])
    except ValueError as e:
        raise InputError(f"malformed parts '{text}': {e}") from e


@dataclass(frozen=True)
class ADataPredicates:
    semistable: bool
    reversing: bool


def adata_predicates(d: ADatum, stab: WeakStability) -> ADataPredicates:
    n = len(d)
    semistable = all(stab(d.prefix(i)) <= stab(d.suffix(i)) for i in range(1, n))
    reversing = all(stab(d[i]) > stab(d[i + 1]) for i in range(n - 1))
    return ADataPredicates(semistable, reversing)


def prefix_exceeds_total(d: ADatum, stab: WeakStability) -> bool:
    tau_total = stab(d.total())
    return all(stab(d.prefix(i)) > tau_total for i in range(1, len(d)))


def prefix_exceeds_suffix(d: ADatum, stab: WeakStability) -> bool:
    return all(stab(d.prefix(i)) > stab(d.suffix(i)) for i in range(1, len(d)))


def enumerate_decompositions(lattice, alpha: KClass, n_max: Optional[int] = None) -> Iterator[ADatum]:
    """Every ordered tuple of positive classes summing to alpha, once each."""
    alpha = as_class(alpha)
    if not getattr(lattice, "finite_decompositions", False):
        raise EnumerationError(f"{lattice!r} has classes with infinitely many decompositions")
    if not lattice.is_positive(alpha):
        raise NotInConeError(f"{alpha} is not in the positive cone of {lattice!r}")

    def walk(remaining: KClass, prefix: Tuple[KClass, ...]):
        if n_max is not None and len(prefix) >= n_max:
            return
        for beta in lattice.classes_below(remaining):
            rest = remaining - beta
            if rest.is_zero():
                yield ADatum(prefix + (beta,))
            else:
                yield from walk(rest, prefix + (beta,))

    yield from walk(alpha, ())


class Poset:
    """Partial order on range(n) given by its full relation set of pairs (i, j) with i <= j."""

    def __init__(self, n: int, relation: Iterable[Tuple[int, int]]):
        rel = set(relation) | {(i, i) for i in range(n)}
        for i, j in rel:
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"relation ({i},{j}) outside range({n})")
            if i != j and (j, i) in rel:
                raise InputError(f"relation is not antisymmetric at ({i},{j})")
        for i, j in rel:
            for k in range(n):
                if (j, k) in rel and (i, k) not in rel:
                    raise InputError(f"relation is not transitive at ({i},{j},{k})")
        self.n = n
        self.relation = frozenset(rel)

    @classmethod
    def generated(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "Poset":
        """Reflexive-transitive closure of pairs."""
        rel = set(pairs) | {(i, i) for i in range(n)}
        changed = True
        while changed:
            changed = False
            for i, j in list(rel):
                for k in range(n):
                    if (j, k) in rel and (i, k) not in rel:
                        rel.add((i, k))
                        changed = True
        return cls(n, rel)

    @classmethod
    def chain(cls, n: int) -> "Poset":
        return cls(n, {(i, j) for i in range(n) for j in range(i, n)})

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls(n, ())

    def leq(self, i: int, j: int) -> bool:
        return (i, j) in self.relation

    def is_total(self) -> bool:
        return all(self.leq(i, j) or self.leq(j, i) for i in range(self.n) for j in range(self.n))

    def strict_pairs(self) -> List[Tuple[int, int]]:
        return sorted((i, j) for i, j in self.relation if i != j)

    def restrict(self, elements: Sequence[int]) -> "Poset":
        index = {e: k for k, e in enumerate(elements)}
        return Poset(
            len(elements),
            {(index[i], index[j]) for i, j in self.relation if i in index and j in index},
        )

    def sorted_total(self, elements: Sequence[int]) -> List[int]:
        """Elements of a totally ordered subset, in increasing order."""
        return sorted(elements, key=lambda e: sum(self.leq(x, e) for x in elements))

    def linear_extensions(self) -> List[Tuple[int, ...]]:
        return [
            perm
            for perm in permutations(range(self.n))
            if all(
                not self.leq(perm[b], perm[a])
                for a in range(self.n)
                for b in range(a + 1, self.n)
            )
        ]

    def disjoint_union(self, other: "Poset") -> "Poset":
        shift = self.n
        return Poset(
            self.n + other.n,
            set(self.relation) | {(i + shift, j + shift) for i, j in other.relation},
        )

    def __eq__(self, other):
        return isinstance(other, Poset) and self.n == other.n and self.relation == other.relation

    def __hash__(self):
        return hash((self.n, self.relation))

    def __repr__(self):
        return f"Poset({self.n}, {self.strict_pairs()})"


def parse_order(n: int, text: str) -> Poset:
    """Parse '1<2;2<3' (1-based) into the generated poset on range(n)."""
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            a, b = chunk.split("<")
            pairs.append((int(a) - 1, int(b) - 1))
        except ValueError as e:
            raise InputError(f"malformed order relation '{chunk}'") from e
    return Poset.generated(n, pairs)


def enumerate_posets(n: int) -> Iterator[Poset]:
    """All labeled partial orders on range(n)."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for mask in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if mask >> k & 1}
        if any((j, i) in rel for i, j in rel):
            continue
        if any((i, k) not in rel for i, j in rel for j2, k in rel if j == j2 and i != k):
            continue
        yield Poset(n, rel)


def is_dominant(poset: Poset, K: Sequence, phi: Sequence) -> Optional[Poset]:
    """Induced order on K, or None when (I, poset, K, phi) is not dominant.

    phi[i] is the label in K of element i; the returned poset lives on the positions of K.
    """
    index = {k: pos for pos, k in enumerate(K)}
    if len(index) != len(K):
        raise InputError("K has repeated labels")
    try:
        images = [index[k] for k in phi]
    except KeyError as e:
        raise InputError(f"phi takes value {e} outside K") from e
    if len(phi) != poset.n:
        raise InputError("phi must be defined on every element of I")
    if set(images) != set(range(len(K))):
        raise InputError("phi is not surjective")
    fibers = [[i for i in range(poset.n) if images[i] == k] for k in range(len(K))]
    for fiber in fibers:
        if not poset.restrict(fiber).is_total():
            return None
    rel = set()
    for a, b in combinations(range(len(K)), 2):
        for x, y in ((a, b), (b, a)):
            flags = {poset.leq(i, j) for i in fibers[x] for j in fibers[y]}
            if len(flags) > 1:
                return None
            if flags == {True}:
                rel.add((x, y))
    try:
        return Poset(len(K), rel)
    except InputError:
        logging.debug(f"induced relation {sorted(rel)} is not a partial order")
        return None
