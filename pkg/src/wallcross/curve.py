"""Counting invariants of coherent sheaves on a smooth projective curve of genus g.

All series are in z with l = z^2, expanded in descending powers and exact down to a floor. iss_delta is the closed product formula for the stack of all vector bundles; iss_gamma strips the Harder-Narasimhan strata off it rank by rank. coprime_poincare turns the semistable invariant of a coprime class into the Poincare polynomial of the fixed-determinant moduli space.
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Callable, Dict, Iterator, List, Tuple

from wallcross.engine import EulerPairing
from wallcross.errors import InputError, NotInConeError, PrecisionError
from wallcross.lambda_ring import TruncatedSeries
from wallcross.stability import CurveLattice, KClass
from wallcross.utils.combinatorics import compositions

DEFAULT_FLOOR = -20
DEFAULT_GUARD = 8

Part = Tuple[int, int]

_gamma_lock = threading.Lock()
_gamma_cache: Dict[Tuple[int, int, int], TruncatedSeries] = {}


@dataclass(frozen=True)
class CurveClass:
    n: int
    d: int
    g: int

    def __post_init__(self):
        if self.g < 0:
            raise InputError(f"genus must be nonnegative, got {self.g}")
        if not CurveLattice(self.g).is_positive(self.klass):
            raise NotInConeError(f"({self.n},{self.d}) is not the class of a nonzero sheaf")

    @property
    def klass(self) -> KClass:
        return KClass((self.n, self.d))

    def __str__(self):
        return f"({self.n},{self.d}) g={self.g}"


def curve_chi(x: CurveClass, y: CurveClass) -> int:
    """n1 d2 - d1 n2 - (g - 1) n1 n2."""
    if x.g != y.g:
        raise InputError(f"classes live on curves of genus {x.g} and {y.g}")
    return x.n * y.d - x.d * y.n - (x.g - 1) * x.n * y.n


def curve_pairing(g: int) -> EulerPairing:
    """curve_chi as a bilinear form on (n, d) coordinates."""
    return EulerPairing([[-(g - 1), 1], [-1, 0]])


def top_degree(n: int, g: int) -> int:
    """Highest z-exponent of the rank n invariants."""
    return 2 * (g - 1) * n * n


def _one_plus_z_power(k: int, power: int) -> TruncatedSeries:
    """(z^k + 1)^power, exact."""
    return TruncatedSeries({k * j: comb(power, j) for j in range(power + 1)})


def _quotient_series(numerator: TruncatedSeries, ks: List[int], floor: int) -> TruncatedSeries:
    """numerator / prod (z^k - 1) in descending powers, exact down to floor."""
    if numerator.is_zero():
        return TruncatedSeries({}, floor)
    work = floor - numerator.top()
    result = numerator
    for k in ks:
        result = result * TruncatedSeries.geometric(k, work)
    return TruncatedSeries(result.terms, floor)


def _check_rank(n: int, g: int):
    if n < 1:
        raise InputError(f"rank must be positive, got {n}")
    if g < 0:
        raise InputError(f"genus must be nonnegative, got {g}")


def iss_delta(n: int, d: int, g: int, floor: int = DEFAULT_FLOOR) -> TruncatedSeries:
    """prod_{a<=n} (z^{2a-1}+1)^{2g} / (prod_{a<n} (z^{2a}-1)^2 (z^{2n}-1)); d plays no role."""
    _check_rank(n, g)
    return _iss_delta(n, g, floor)


@lru_cache(maxsize=None)
def _iss_delta(n: int, g: int, floor: int) -> TruncatedSeries:
    numerator = TruncatedSeries({0: Fraction(1)})
    for a in range(1, n + 1):
        numerator = numerator * _one_plus_z_power(2 * a - 1, 2 * g)
    ks = [2 * a for a in range(1, n) for _ in range(2)] + [2 * n]
    return _quotient_series(numerator, ks, floor)


def symmetric_power_poincare(m: int, g: int) -> TruncatedSeries:
    """Poincare polynomial of the m-th symmetric power of the curve: t^m in (1+tz)^{2g}/((1-t)(1-tz^2))."""
    terms: Dict[int, int] = {}
    for j in range(min(m, 2 * g) + 1):
        for i in range(m - j + 1):
            terms[j + 2 * i] = terms.get(j + 2 * i, 0) + comb(2 * g, j)
    return TruncatedSeries(terms)


def _weighted_multisets(weights: List[int], budget: int) -> Iterator[Tuple[int, ...]]:
    """Tuples m >= 0 with sum weights[i] * m[i] <= budget."""
    if not weights:
        yield ()
        return
    w = weights[0]
    m = 0
    while w * m <= budget:
        for rest in _weighted_multisets(weights[1:], budget - w * m):
            yield (m,) + rest
        m += 1


def iss_delta_macdonald(n: int, g: int, floor: int = DEFAULT_FLOOR) -> TruncatedSeries:
    """iss_delta rebuilt from the Jacobian and the symmetric powers of the curve.

    (1+z)^{2g}/(z^2-1) * z^{2(n^2-1)(g-1)} * prod_{a=2..n} sum_m P(C^(m)) z^{-2am}.
    """
    _check_rank(n, g)
    a_values = list(range(2, n + 1))
    weights = [2 * a - 2 for a in a_values]
    budget = top_degree(n, g) - floor
    inner = TruncatedSeries()
    base = 2 * (n * n - 1) * (g - 1)
    for ms in _weighted_multisets(weights, budget):
        term = TruncatedSeries.monomial(base - 2 * sum(a * m for a, m in zip(a_values, ms)))
        for m in ms:
            term = term * symmetric_power_poincare(m, g)
        inner = inner + term
    if inner.is_zero():
        return TruncatedSeries({}, floor)
    jacobian = _quotient_series(_one_plus_z_power(1, 2 * g), [2], floor - inner.top())
    return TruncatedSeries((inner * jacobian).terms, floor)


def _twist2(parts: List[Part], g: int) -> int:
    """2 * sum_{i<j} (n_i d_j - d_i n_j + (g-1) n_i n_j)."""
    total = 0
    for i in range(len(parts)):
        ni, di = parts[i]
        for j in range(i + 1, len(parts)):
            nj, dj = parts[j]
            total += ni * dj - di * nj + (g - 1) * ni * nj
    return 2 * total


def _slopes_decrease(parts: List[Part]) -> bool:
    return all(
        parts[i][1] * parts[i + 1][0] > parts[i + 1][1] * parts[i][0]
        for i in range(len(parts) - 1)
    )


def filtration_types(
    n: int, d: int, g: int, floor: int, decreasing: bool = True, min_parts: int = 2
) -> Iterator[Tuple[List[Part], int]]:
    """(parts, 2 * twist) for every rank/degree splitting whose term reaches the floor.

    Every proper prefix (N_i, E_i) lies strictly above the line through (n, d). With heights h_i = n E_i - d N_i >= 1 the twisted top degree is C - (2/n) sum_i h_i (n_i + n_{i+1}), so each h_i is bounded once the floor is fixed. decreasing restricts to strictly decreasing slopes.
    """
    for sizes in compositions(n):
        k = len(sizes)
        if k < min_parts:
            continue
        if k == 1:
            yield [(n, d)], 0
            continue
        cross = sum(sizes[i] * sizes[j] for i in range(k) for j in range(i + 1, k))
        reach = sum(top_degree(s, g) for s in sizes) + 2 * (g - 1) * cross
        budget = n * (reach - floor)
        if budget < 0:
            continue
        prefix_ranks = [sum(sizes[: i + 1]) for i in range(k)]

        def walk(i: int, degrees: List[int], spent: int):
            if i == k - 1:
                parts = [
                    (sizes[j], degrees[j] - (degrees[j - 1] if j else 0))
                    for j in range(k - 1)
                ]
                parts.append((sizes[-1], d - degrees[-1]))
                if decreasing and not _slopes_decrease(parts):
                    return
                tw2 = _twist2(parts, g)
                if tw2 + sum(top_degree(s, g) for s in sizes) >= floor:
                    yield parts, tw2
                return
            weight = 2 * (sizes[i] + sizes[i + 1])
            e = d * prefix_ranks[i] // n + 1
            while True:
                h = n * e - d * prefix_ranks[i]
                if spent + weight * h > budget:
                    break
                yield from walk(i + 1, degrees + [e], spent + weight * h)
                e += 1

        yield from walk(0, [], 0)


def _twisted_product(
    parts: List[Part],
    tw2: int,
    g: int,
    floor: int,
    factor: Callable[[int, int, int, int], TruncatedSeries],
) -> TruncatedSeries:
    tops = [top_degree(ni, g) for ni, _ in parts]
    total_top = sum(tops)
    product = None
    for (ni, di), top in zip(parts, tops):
        series = factor(ni, di, g, floor - tw2 - (total_top - top))
        product = series if product is None else product * series
    return product.shift(tw2)


def iss_gamma(n: int, d: int, g: int, floor: int = DEFAULT_FLOOR) -> TruncatedSeries:
    """Semistable invariant of class (n, d) by the rank recursion.

    Depends on d only modulo n; the deepest series computed so far is kept per (g, n, d mod n).
    """
    _check_rank(n, g)
    key = (g, n, d % n)
    cached = _gamma_cache.get(key)
    if cached is not None and cached.floor <= floor:
        return cached.truncate(floor)

    value = _gamma_recursion(n, d % n, g, floor)

    with _gamma_lock:
        cached = _gamma_cache.get(key)
        if cached is None or cached.floor > floor:
            _gamma_cache[key] = value
    return value


def _gamma_recursion(n: int, d: int, g: int, floor: int) -> TruncatedSeries:
    total = iss_delta(n, d, g, floor)
    count = 0
    for parts, tw2 in filtration_types(n, d, g, floor):
        total = total - _twisted_product(parts, tw2, g, floor, iss_gamma)
        count += 1
    logging.debug(f"iss_gamma ({n},{d}) g={g} floor={floor}: {count} unstable types")
    return total.truncate(floor)


def clear_cache():
    with _gamma_lock:
        _gamma_cache.clear()


def iss_gamma_direct(n: int, d: int, g: int, floor: int = DEFAULT_FLOOR) -> TruncatedSeries:
    """Alternating sum of twisted iss_delta products over splittings with every proper prefix slope above d/n."""
    _check_rank(n, g)
    total = iss_delta(n, d, g, floor)
    for parts, tw2 in filtration_types(n, d, g, floor, decreasing=False):
        term = _twisted_product(parts, tw2, g, floor, iss_delta)
        total = total + (term if len(parts) % 2 else -term)
    return total.truncate(floor)


def reconstruct_delta(n: int, d: int, g: int, floor: int = DEFAULT_FLOOR) -> TruncatedSeries:
    """Sum over all Harder-Narasimhan types of twisted iss_gamma products; equals iss_delta."""
    _check_rank(n, g)
    total = TruncatedSeries({}, floor)
    for parts, tw2 in filtration_types(n, d, g, floor, min_parts=1):
        total = total + _twisted_product(parts, tw2, g, floor, iss_gamma)
    return total.truncate(floor)


def coprime_poincare(n: int, d: int, g: int, guard: int = DEFAULT_GUARD) -> TruncatedSeries:
    """Poincare polynomial of the moduli space of stable bundles of rank n and fixed determinant of degree d.

    (z^2-1) iss_gamma / (z+1)^{2g} is expanded until `guard` coefficients below z^0 are visible; they must vanish.
    """
    _check_rank(n, g)
    if gcd(n, d) != 1:
        raise InputError(f"rank {n} and degree {d} are not coprime")
    if guard < 1:
        raise InputError("guard band must be at least 1")
    floor = 2 * g - 2 - guard
    series = iss_gamma(n, d, g, floor) * TruncatedSeries({2: 1, 0: -1})
    quotient = series.divide_by_polynomial(_one_plus_z_power(1, 2 * g))
    residue = {e: c for e, c in quotient.terms.items() if e < 0}
    if quotient.floor > -guard or residue:
        raise PrecisionError(
            f"({n},{d}) g={g}: nonzero residue {sorted(residue.items())} in guard band {guard}"
        )
    poly = TruncatedSeries({e: c for e, c in quotient.terms.items() if e >= 0})
    degree = 2 * (g - 1) * (n * n - 1)
    coeffs = poly.terms
    if any(c.denominator != 1 for c in coeffs.values()):
        raise PrecisionError(f"({n},{d}) g={g}: non-integral coefficients in {poly}")
    if any(c < 0 for c in coeffs.values()):
        raise PrecisionError(f"({n},{d}) g={g}: negative coefficients in {poly}")
    if coeffs and (max(coeffs) > degree or any(
        coeffs.get(e, 0) != coeffs.get(degree - e, 0) for e in range(degree + 1)
    )):
        raise PrecisionError(f"({n},{d}) g={g}: {poly} is not palindromic of degree {degree}")
    logging.info(f"Poincare polynomial ({n},{d}) g={g}: {poly}")
    return poly


def betti_numbers(poly: TruncatedSeries) -> List[int]:
    """Coefficients of z^0, z^1, ..., z^top."""
    if not poly.is_exact():
        raise InputError("Betti numbers need an exact polynomial")
    if not poly.terms:
        return []
    if min(poly.terms) < 0:
        raise InputError(f"{poly} has negative exponents")
    return [int(poly.coefficient(e)) for e in range(poly.top() + 1)]


def euler_characteristic_check(poly: TruncatedSeries) -> int:
    """Signed sum of Betti numbers, i.e. P(-1)."""
    return sum((-1) ** i * b for i, b in enumerate(betti_numbers(poly)))
