"""Exact coefficient arithmetic.

``LambdaElement`` is an element of Q(l), where l is the class of the affine line. Elements whose reduced denominator is not divisible by (l - 1) form the subring Lambda-zero. ``project_omega`` evaluates such elements at l = 1.

``TruncatedSeries`` holds Laurent series in z, with l = z^2, whose exponents are bounded above. Each series is known exactly down to an explicit floor.
"""

import logging
import operator
from fractions import Fraction
from functools import cached_property
from typing import Dict, Optional, Tuple

from sympy import QQ, Poly, Rational, Symbol, cyclotomic_poly, factor, totient
from sympy.ntheory import divisors

from wallcross.errors import (
    InputError,
    NotSeriesRepresentableError,
    PoleError,
)

ELL = Symbol("ℓ")

OmegaValue = Fraction


def _to_fraction(c) -> Fraction:
    r = Rational(c)
    return Fraction(int(r.p), int(r.q))


def _to_qq(c):
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def _poly(terms: Dict[int, Fraction]) -> Poly:
    data = {(e,): _to_qq(c) for e, c in terms.items() if c}
    if not data:
        return Poly(0, ELL, domain=QQ)
    return Poly.from_dict(data, ELL, domain=QQ)


def _poly_terms(p: Poly) -> Dict[int, Fraction]:
    if p.is_zero:
        return {}
    return {m[0]: _to_fraction(c) for m, c in p.terms()}


def _lowest_degree(p: Poly) -> int:
    return min(m[0] for m, _ in p.terms())


def _shift_down(p: Poly, s: int) -> Poly:
    if s == 0:
        return p
    return _poly({e - s: c for e, c in _poly_terms(p).items()})


def _ell_power_minus_one(k: int) -> Poly:
    return _poly({k: Fraction(1), 0: Fraction(-1)})


def _cyclotomic_order(f: Poly) -> Optional[int]:
    f = f.monic()
    deg = f.degree()
    for d in range(1, 2 * deg * deg + 3):
        if totient(d) != deg:
            continue
        if Poly(cyclotomic_poly(d, ELL), ELL, domain=QQ) == f:
            return d
    return None


class LaurentPolynomial:
    """Finite sum of rational multiples of powers of l."""

    def __init__(self, terms: Optional[Dict[int, Fraction]] = None):
        self.terms = {e: Fraction(c) for e, c in (terms or {}).items() if c}

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out)

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: Dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial(out)

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        return f"LaurentPolynomial({dict(sorted(self.terms.items(), reverse=True))})"

    def to_element(self) -> "LambdaElement":
        if not self.terms:
            return LambdaElement.zero()
        low = min(self.terms)
        num = _poly({e - low: c for e, c in self.terms.items()})
        return LambdaElement(num, lpow=low)


class LambdaElement:
    """Reduced fraction l^lpow * num / den over the rationals.

    Canonical form: den is monic, neither num nor den is divisible by l, and gcd(num, den) = 1. Zero is stored as num = 0, den = 1, lpow = 0.
    """

    def __init__(self, num: Poly, den: Optional[Poly] = None, lpow: int = 0):
        if den is None:
            den = Poly(1, ELL, domain=QQ)
        if den.is_zero:
            raise PoleError("division by zero")
        if num.is_zero:
            self._num = Poly(0, ELL, domain=QQ)
            self._den = Poly(1, ELL, domain=QQ)
            self._lpow = 0
            return
        g = num.gcd(den)
        num = num.exquo(g)
        den = den.exquo(g)
        lc = den.LC()
        num = num.quo_ground(lc)
        den = den.monic()
        s = _lowest_degree(num)
        t = _lowest_degree(den)
        self._num = _shift_down(num, s)
        self._den = _shift_down(den, t)
        self._lpow = lpow + s - t

    @classmethod
    def zero(cls):
        return cls(Poly(0, ELL, domain=QQ))

    @classmethod
    def one(cls):
        return cls.from_fraction(1)

    @classmethod
    def from_fraction(cls, value) -> "LambdaElement":
        return cls(_poly({0: Fraction(value)}))

    @classmethod
    def ell(cls, k: int = 1) -> "LambdaElement":
        return cls(Poly(1, ELL, domain=QQ), lpow=k)

    @classmethod
    def from_terms(cls, terms: Dict[int, Fraction]) -> "LambdaElement":
        return LaurentPolynomial(terms).to_element()

    @classmethod
    def ell_power_minus_one(cls, k: int) -> "LambdaElement":
        """l^k - 1 for k >= 1."""
        return cls(_ell_power_minus_one(k))

    @property
    def lpow(self) -> int:
        return self._lpow

    @property
    def numerator(self) -> Poly:
        return self._num

    @property
    def denominator(self) -> Poly:
        return self._den

    def is_zero(self) -> bool:
        return self._num.is_zero

    @cached_property
    def denominator_factors(self) -> Optional[Tuple[Tuple[int, int], ...]]:
        """Smallest multiset {(k, mult)} with den dividing prod (l^k - 1)^mult.

        None when den has a non-cyclotomic irreducible factor.
        """
        if self._den.degree() == 0:
            return ()
        _, factors = self._den.factor_list()
        orders: Dict[int, int] = {}
        for f, mult in factors:
            d = _cyclotomic_order(f)
            if d is None:
                return None
            orders[d] = orders.get(d, 0) + mult
        chosen: Dict[int, int] = {}
        while orders:
            k = max(orders)
            chosen[k] = chosen.get(k, 0) + 1
            for e in divisors(k):
                if e in orders:
                    orders[e] -= 1
                    if orders[e] == 0:
                        del orders[e]
        return tuple(sorted(chosen.items()))

    def factor_form(self) -> Tuple[LaurentPolynomial, Tuple[Tuple[int, int], ...]]:
        """Return (N, factors) with self = N / prod (l^k - 1)^mult."""
        factors = self.denominator_factors
        if factors is None:
            raise NotSeriesRepresentableError(
                f"denominator of {self} is not a product of (ℓ^k - 1) factors"
            )
        full = Poly(1, ELL, domain=QQ)
        for k, mult in factors:
            full = full * _ell_power_minus_one(k) ** mult
        complement = full.exquo(self._den)
        num = self._num * complement
        return (
            LaurentPolynomial({e + self._lpow: c for e, c in _poly_terms(num).items()}),
            factors,
        )

    def as_expr(self):
        return ELL**self._lpow * self._num.as_expr() / self._den.as_expr()

    def _coerce(self, other) -> "LambdaElement":
        if isinstance(other, LambdaElement):
            return other
        if isinstance(other, (int, Fraction)):
            return LambdaElement.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        low = min(self._lpow, other._lpow)
        den = self._den.lcm(other._den)
        a = self._num * den.exquo(self._den)
        b = other._num * den.exquo(other._den)
        a = a * Poly(ELL ** (self._lpow - low), ELL, domain=QQ)
        b = b * Poly(ELL ** (other._lpow - low), ELL, domain=QQ)
        return LambdaElement(a + b, den, low)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return LambdaElement(-self._num, self._den, self._lpow)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return LambdaElement.zero()
        return LambdaElement(
            self._num * other._num,
            self._den * other._den,
            self._lpow + other._lpow,
        )

    __rmul__ = __mul__

    def inverse(self) -> "LambdaElement":
        if self.is_zero():
            raise PoleError("division by zero")
        return LambdaElement(self._den, self._num, -self._lpow)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = LambdaElement.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return (
            self._lpow == other._lpow
            and self._num == other._num
            and self._den == other._den
        )

    def __hash__(self):
        return hash(
            (self._lpow, tuple(self._num.all_coeffs()), tuple(self._den.all_coeffs()))
        )

    def __repr__(self):
        return f"LambdaElement({self})"

    def __str__(self):
        return str(factor(self.as_expr()))

    def to_json(self) -> dict:
        numer, factors = self.factor_form()
        lpow = min(numer.terms) if numer.terms else 0
        return {
            "num": [
                {"pow": e - lpow, "coeff": str(c)}
                for e, c in sorted(numer.terms.items(), reverse=True)
            ],
            "den": [{"k": k, "mult": m} for k, m in factors],
            "lpow": lpow,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LambdaElement":
        try:
            numer = LambdaElement.from_terms(
                {int(t["pow"]): Fraction(t["coeff"]) for t in data["num"]}
            )
            value = numer * LambdaElement.ell(int(data.get("lpow", 0)))
            for item in data.get("den", []):
                value = value / LambdaElement.ell_power_minus_one(int(item["k"])) ** int(
                    item["mult"]
                )
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed LambdaElement: {e}") from e
        return value


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def ring_arith(x: LambdaElement, y: LambdaElement, op: str) -> LambdaElement:
    try:
        fn = _OPS[op]
    except KeyError:
        raise InputError(f"unknown ring operation: {op}")
    return fn(x, y)


def eval_at(x: LambdaElement, q) -> Fraction:
    q = Fraction(q)
    if q == 0 and x.lpow < 0 and not x.is_zero():
        raise PoleError(f"{x} has a pole at ℓ=0")
    point = Rational(q.numerator, q.denominator)
    den = x.denominator.eval(point)
    if den == 0:
        raise PoleError(f"{x} has a pole at ℓ={q}")
    return _to_fraction(x.numerator.eval(point) / den) * q**x.lpow


def lambda0_membership(x: LambdaElement) -> bool:
    return x.denominator.eval(1) != 0


def project_omega(x: LambdaElement) -> OmegaValue:
    if not lambda0_membership(x):
        raise PoleError(f"{x} is not in Λ°: (ℓ-1) divides its denominator")
    return eval_at(x, 1)


class TruncatedSeries:
    """Laurent series in z with exponents bounded above.

    Coefficients are exact at every exponent >= floor. A floor of None marks an exact (polynomial) value.
    """

    def __init__(self, terms: Optional[Dict[int, Fraction]] = None, floor: Optional[int] = None):
        self.floor = floor
        self.terms = {
            e: Fraction(c)
            for e, c in (terms or {}).items()
            if c and (floor is None or e >= floor)
        }

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "TruncatedSeries":
        return cls({exponent: Fraction(coeff)})

    @classmethod
    def geometric(cls, k: int, floor: int) -> "TruncatedSeries":
        """1/(z^k - 1) = sum_{m >= 1} z^{-km}, k >= 1."""
        terms = {}
        m = 1
        while -k * m >= floor:
            terms[-k * m] = Fraction(1)
            m += 1
        return cls(terms, floor)

    def is_exact(self) -> bool:
        return self.floor is None

    def is_zero(self) -> bool:
        return not self.terms

    def top(self) -> Optional[int]:
        return max(self.terms) if self.terms else None

    def _bound(self) -> int:
        """Upper bound for the exponents of the true value."""
        if self.terms:
            return max(self.terms)
        return self.floor - 1

    def coefficient(self, exponent: int) -> Fraction:
        if self.floor is not None and exponent < self.floor:
            raise PoleError(f"coefficient z^{exponent} lies below floor {self.floor}")
        return self.terms.get(exponent, Fraction(0))

    def truncate(self, floor: int) -> "TruncatedSeries":
        if self.floor is not None and floor < self.floor:
            raise InputError(f"cannot deepen floor {self.floor} to {floor}")
        return TruncatedSeries(self.terms, floor)

    def shift(self, k: int) -> "TruncatedSeries":
        floor = None if self.floor is None else self.floor + k
        return TruncatedSeries({e + k: c for e, c in self.terms.items()}, floor)

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries({e: v * c for e, v in self.terms.items()}, self.floor)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries({0: Fraction(other)})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        floors = [f for f in (self.floor, other.floor) if f is not None]
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return TruncatedSeries(out, max(floors) if floors else None)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_exact() and other.is_exact():
            floor = None
        elif self.is_exact():
            if self.is_zero():
                return TruncatedSeries()
            floor = other.floor + self._bound()
        elif other.is_exact():
            if other.is_zero():
                return TruncatedSeries()
            floor = self.floor + other._bound()
        else:
            floor = max(self.floor + other._bound(), other.floor + self._bound())
        out: Dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if floor is not None and e < floor:
                    continue
                out[e] = out.get(e, 0) + c1 * c2
        return TruncatedSeries(out, floor)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = TruncatedSeries({0: Fraction(1)})
        for _ in range(k):
            result = result * self
        return result

    def divide_by_polynomial(self, divisor: "TruncatedSeries", floor: Optional[int] = None) -> "TruncatedSeries":
        """Expand self / divisor in descending powers of z.

        divisor must be exact and nonzero. The result is exact down to floor(self) - top(divisor), or down to ``floor`` when self is exact.
        """
        if not divisor.is_exact() or divisor.is_zero():
            raise InputError("divisor must be a nonzero polynomial")
        p = divisor.top()
        lead = divisor.terms[p]
        if self.floor is not None:
            target = self.floor - p
            if floor is not None:
                target = max(target, floor)
        elif floor is None:
            raise InputError("a floor is required to divide an exact series")
        else:
            target = floor
        remainder = dict(self.terms)
        quotient: Dict[int, Fraction] = {}
        top = self.top()
        if top is None:
            return TruncatedSeries({}, target)
        for e in range(top - p, target - 1, -1):
            c = remainder.get(e + p, 0)
            if not c:
                continue
            q = c / lead
            quotient[e] = q
            for de, dc in divisor.terms.items():
                remainder[e + de] = remainder.get(e + de, 0) - q * dc
        return TruncatedSeries(quotient, target)

    def agrees_with(self, other: "TruncatedSeries", floor: int) -> bool:
        exps = {e for e in self.terms if e >= floor} | {e for e in other.terms if e >= floor}
        return all(self.terms.get(e, 0) == other.terms.get(e, 0) for e in exps)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.floor == other.floor and self.terms == other.terms

    def __hash__(self):
        return hash((self.floor, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"TruncatedSeries({self}, floor={self.floor})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        text = " + ".join(parts).replace("+ -", "- ")
        if self.floor is not None:
            text += f" + O(z^{self.floor - 1})"
        return text

    def to_json(self) -> dict:
        return {
            "var": "z",
            "floor": self.floor,
            "terms": [
                {"pow": e, "coeff": str(c)}
                for e, c in sorted(self.terms.items(), reverse=True)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        try:
            terms = {int(t["pow"]): Fraction(t["coeff"]) for t in data["terms"]}
            return cls(terms, data.get("floor"))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed series: {e}") from e


def expand_series(x: LambdaElement, floor: int) -> TruncatedSeries:
    """Expand x in descending powers of z = sqrt(l), exact down to floor."""
    if x.is_zero():
        return TruncatedSeries({}, floor)
    factors = x.denominator_factors
    if factors is None:
        logging.debug(f"expanding {x} by long division")
        numer = TruncatedSeries(
            {2 * (e + x.lpow): c for e, c in _poly_terms(x.numerator).items()}
        )
        den = TruncatedSeries({2 * e: c for e, c in _poly_terms(x.denominator).items()})
        return numer.divide_by_polynomial(den, floor)
    laurent, factors = x.factor_form()
    result = TruncatedSeries({2 * e: c for e, c in laurent.terms.items()})
    work = floor - result.top()
    for k, mult in factors:
        for _ in range(mult):
            result = result * TruncatedSeries.geometric(2 * k, work)
    if result.floor is None:
        return result.truncate(floor)
    return TruncatedSeries(result.terms, floor)
