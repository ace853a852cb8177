"""Small finite fields GF(q) with table arithmetic, and subspace enumeration over them."""

from functools import lru_cache
from itertools import combinations, product
from typing import FrozenSet, List, Sequence, Tuple

from sympy import Poly, Symbol, factorint

from wallcross.errors import InputError

Vector = Tuple[int, ...]

_X = Symbol("x")


def _digits(value: int, p: int, e: int) -> List[int]:
    out = []
    for _ in range(e):
        out.append(value % p)
        value //= p
    return out


def _from_digits(digits: Sequence[int], p: int) -> int:
    value = 0
    for d in reversed(digits):
        value = value * p + d
    return value


def _irreducible_modulus(p: int, e: int) -> Poly:
    """First monic irreducible polynomial of degree e over GF(p) in lexicographic order."""
    for tail in product(range(p), repeat=e):
        coeffs = [1] + list(tail)
        f = Poly(coeffs, _X, modulus=p)
        if f.is_irreducible:
            return f
    raise InputError(f"no irreducible polynomial of degree {e} over GF({p})")


class GF:
    """GF(q) with elements encoded as 0..q-1 (base-p digits of the residue polynomial)."""

    def __init__(self, q: int):
        factors = factorint(q)
        if q < 2 or len(factors) != 1:
            raise InputError(f"{q} is not a prime power")
        (p, e), = factors.items()
        self.q = q
        self.p = p
        self.e = e
        self.add_table = [[0] * q for _ in range(q)]
        self.mul_table = [[0] * q for _ in range(q)]
        modulus = _irreducible_modulus(p, e) if e > 1 else None
        for a in range(q):
            da = _digits(a, p, e)
            for b in range(q):
                db = _digits(b, p, e)
                self.add_table[a][b] = _from_digits([(x + y) % p for x, y in zip(da, db)], p)
                if modulus is None:
                    self.mul_table[a][b] = a * b % p
                else:
                    fa = Poly(list(reversed(da)), _X, modulus=p)
                    fb = Poly(list(reversed(db)), _X, modulus=p)
                    prod = (fa * fb).rem(modulus)
                    coeffs = [int(c) % p for c in reversed(prod.all_coeffs())]
                    self.mul_table[a][b] = _from_digits(coeffs + [0] * (e - len(coeffs)), p)
        self.neg = [next(b for b in range(q) if self.add_table[a][b] == 0) for a in range(q)]
        self.inv = [0] + [
            next(b for b in range(1, q) if self.mul_table[a][b] == 1) for a in range(1, q)
        ]

    def __repr__(self):
        return f"GF({self.q})"

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def vec_add(self, u: Vector, v: Vector) -> Vector:
        return tuple(self.add_table[a][b] for a, b in zip(u, v))

    def vec_scale(self, c: int, v: Vector) -> Vector:
        return tuple(self.mul_table[c][a] for a in v)

    def mat_vec(self, matrix: Sequence[Sequence[int]], v: Vector) -> Vector:
        out = []
        for row in matrix:
            acc = 0
            for a, b in zip(row, v):
                if a and b:
                    acc = self.add_table[acc][self.mul_table[a][b]]
            out.append(acc)
        return tuple(out)

    def span(self, rows: Sequence[Vector], n: int) -> FrozenSet[Vector]:
        vectors = {(0,) * n}
        for row in rows:
            vectors = {
                self.vec_add(v, self.vec_scale(c, row)) for v in vectors for c in range(self.q)
            }
        return frozenset(vectors)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)


class Subspace:
    """Subspace of GF(q)^n given by its reduced row echelon basis."""

    __slots__ = ("dim", "basis", "vectors")

    def __init__(self, basis: Tuple[Vector, ...], vectors: FrozenSet[Vector]):
        self.dim = len(basis)
        self.basis = basis
        self.vectors = vectors

    def __contains__(self, v: Vector) -> bool:
        return v in self.vectors

    def __repr__(self):
        return f"Subspace(dim={self.dim}, basis={self.basis})"


@lru_cache(maxsize=None)
def subspaces(q: int, n: int) -> Tuple[Subspace, ...]:
    """Every subspace of GF(q)^n, one per reduced row echelon form."""
    F = field(q)
    out = []
    for k in range(n + 1):
        for pivots in combinations(range(n), k):
            free = [
                (r, c)
                for r, pc in enumerate(pivots)
                for c in range(pc + 1, n)
                if c not in pivots
            ]
            for values in product(range(q), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), v in zip(free, values):
                    rows[r][c] = v
                basis = tuple(tuple(row) for row in rows)
                out.append(Subspace(basis, F.span(basis, n)))
    return tuple(out)


def gaussian_binomial_count(q: int, n: int, k: int) -> int:
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
