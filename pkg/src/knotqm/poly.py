"""Exact Laurent polynomials in the skein variable A, ratios of them, and
numeric evaluation at a unit-modulus phase.

Coefficients are Python ints, so nothing overflows however many crossings
feed into a bracket.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "LaurentPoly",
    "RationalFunc",
    "NumericParams",
    "A",
    "ONE",
    "ZERO",
    "LOOP",
    "laurent_mul",
    "substitute_mirror",
    "eval_at",
    "rational_normalize",
    "quantum_integer",
    "format_jones",
    "jones_json",
    "DEFAULT_K",
]

DEFAULT_K = 1000.0


class LaurentPoly:
    """Immutable sparse Laurent polynomial ``sum c_e A^e`` with int coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            if not isinstance(e, int) or isinstance(e, bool):
                raise TypeError(f"exponent must be int, got {e!r}")
            c = int(c)
            if c:
                acc[e] = acc.get(e, 0) + c
        self._terms = {e: acc[e] for e in sorted(acc) if acc[e]}
        self._hash = None

    # construction helpers
    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def coerce(cls, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return cls.constant(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")

    # inspection
    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def min_exp(self) -> int:
        return next(iter(self._terms))

    def max_exp(self) -> int:
        return next(reversed(self._terms))

    def coeff(self, e: int) -> int:
        return self._terms.get(e, 0)

    def content(self) -> int:
        g = 0
        for c in self._terms.values():
            g = math.gcd(g, c)
        return g

    # ring operations
    def __add__(self, other):
        if isinstance(other, RationalFunc):
            return NotImplemented
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, RationalFunc):
            return NotImplemented
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalFunc):
            return NotImplemented
        if isinstance(other, int) and not isinstance(other, bool):
            return LaurentPoly({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                k = e1 + e2
                out[k] = out.get(k, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self._terms.items()
            if abs(c) != 1:
                raise ValueError("monomial with non-unit coefficient is not invertible")
            return LaurentPoly({-e * (-n): c ** (-n)})
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, RationalFunc):
            return RationalFunc.coerce(self) / other
        return RationalFunc(self, LaurentPoly.coerce(other))

    def __rtruediv__(self, other):
        return RationalFunc(LaurentPoly.coerce(other), self)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``A^k``."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient when ``other`` divides ``self`` exactly; raises otherwise."""
        q, r = _divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    def mirror(self) -> "LaurentPoly":
        return LaurentPoly({-e: c for e, c in self._terms.items()})

    def evaluate(self, params: "NumericParams | complex") -> complex:
        a = params.A_value if isinstance(params, NumericParams) else complex(params)
        if not self._terms:
            return 0j
        lo = self.min_exp()
        acc = 0j
        for e in range(self.max_exp(), lo - 1, -1):
            acc = acc * a + self._terms.get(e, 0)
        return acc * a ** lo

    def substitute(self, value) -> object:
        """Evaluate at an arbitrary ring element supporting + * and integer powers."""
        total = 0
        for e, c in self._terms.items():
            total = total + c * value ** e
        return total

    # comparison / hashing
    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = LaurentPoly.constant(other)
        if isinstance(other, RationalFunc):
            return other == self
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # serialisation
    def to_json(self, variable: str = "A") -> dict:
        return {"variable": variable, "terms": [[e, str(c)] for e, c in self._terms.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentPoly":
        return cls((int(e), int(c)) for e, c in obj["terms"])

    def __repr__(self):
        return f"LaurentPoly({self._terms!r})"

    def __str__(self):
        return format_poly(self, "A")


ONE = LaurentPoly.constant(1)
ZERO = LaurentPoly()
A = LaurentPoly.monomial(1)
# loop value d = -A^2 - A^-2
LOOP = LaurentPoly({2: -1, -2: -1})


def _divmod(p: LaurentPoly, q: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Integer long division of ``p`` by ``q`` after clearing both to ordinary polynomials.

    The quotient is shifted back so that ``p = q * quot + rem`` holds as Laurent
    polynomials.  Division stops as soon as a leading coefficient does not divide.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return ZERO, ZERO
    plo, qlo = p.min_exp(), q.min_exp()
    rem = {e - plo: c for e, c in p.items()}
    qq = {e - qlo: c for e, c in q.items()}
    qtop = max(qq)
    qlead = qq[qtop]
    quot: dict[int, int] = {}
    while rem:
        top = max(rem)
        if top < qtop or rem[top] % qlead:
            break
        f = rem[top] // qlead
        k = top - qtop
        quot[k] = f
        for e, cq in qq.items():
            v = rem.get(e + k, 0) - f * cq
            if v:
                rem[e + k] = v
            else:
                rem.pop(e + k, None)
    shift = plo - qlo
    return (LaurentPoly({e + shift: c for e, c in quot.items()}),
            LaurentPoly({e + plo: c for e, c in rem.items()}))


def _to_frac_list(p: LaurentPoly) -> list[Fraction]:
    lo = p.min_exp()
    return [Fraction(p.coeff(lo + i)) for i in range(p.max_exp() - lo + 1)]


def _poly_gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Primitive gcd of the ordinary polynomials obtained by clearing A-powers."""
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    a, b = _to_frac_list(p), _to_frac_list(q)  # ascending coefficient lists
    while any(b):
        while b and b[-1] == 0:
            b.pop()
        r = a[:]
        while len(r) >= len(b) and any(r):
            f = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[shift + i] -= f * c
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
        if not b:
            break
    while a and a[-1] == 0:
        a.pop()
    den = 1
    for c in a:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return LaurentPoly({i: c for i, c in enumerate(ints)})


class RationalFunc:
    """Quotient of two Laurent polynomials kept in lowest terms.

    Canonical form: numerator and denominator share no polynomial or integer
    factor, the denominator's lowest exponent is zero and its leading
    coefficient is positive.  Equal values therefore compare equal term by term.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=1, *, _canonical: bool = False):
        num = LaurentPoly.coerce(num)
        den = LaurentPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("RationalFunc with zero denominator")
        if not _canonical:
            num, den = _canonicalise(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def coerce(cls, x) -> "RationalFunc":
        if isinstance(x, RationalFunc):
            return x
        return cls(LaurentPoly.coerce(x), ONE, _canonical=True)

    def is_polynomial(self) -> bool:
        return self.den == ONE

    def as_poly(self) -> LaurentPoly:
        if not self.is_polynomial():
            raise ValueError("rational function has a nontrivial denominator")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, other):
        try:
            o = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RationalFunc(self.num + o.num, self.den)
        return RationalFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-RationalFunc.coerce(other))

    def __rsub__(self, other):
        return RationalFunc.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunc.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFunc.coerce(other) / self

    def mirror(self) -> "RationalFunc":
        return RationalFunc(self.num.mirror(), self.den.mirror())

    def evaluate(self, params) -> complex:
        return self.num.evaluate(params) / self.den.evaluate(params)

    def __eq__(self, other):
        try:
            o = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def to_json(self) -> dict:
        return {"numerator": self.num.to_json(), "denominator": self.den.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalFunc":
        return cls(LaurentPoly.from_json(obj["numerator"]), LaurentPoly.from_json(obj["denominator"]))

    def __repr__(self):
        return f"RationalFunc(({self.num!s}) / ({self.den!s}))"


def _canonicalise(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return ZERO, ONE
    g = _poly_gcd(num, den)
    if g.max_exp() > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    c = math.gcd(num.content(), den.content())
    if c > 1:
        num = LaurentPoly({e: v // c for e, v in num.items()})
        den = LaurentPoly({e: v // c for e, v in den.items()})
    k = den.min_exp()
    num, den = num.shift(-k), den.shift(-k)
    if den.coeff(den.max_exp()) < 0:
        num, den = -num, -den
    return num, den


@dataclass(frozen=True)
class NumericParams:
    """Level ``k`` with the derived phase ``A = exp(i theta)`` and loop value ``d``."""

    k: float
    theta: float
    A_value: complex
    d_value: float

    @classmethod
    def from_k(cls, k: float = DEFAULT_K) -> "NumericParams":
        if k <= -2:
            raise ValueError("k must exceed -2")
        theta = math.pi / (2.0 * (k + 2.0))
        return cls(float(k), theta, cmath.exp(1j * theta), -2.0 * math.cos(math.pi / (k + 2.0)))

    @classmethod
    def from_theta(cls, theta: float) -> "NumericParams":
        if theta <= 0:
            raise ValueError("theta must be positive")
        k = math.pi / (2.0 * theta) - 2.0
        return cls(k, theta, cmath.exp(1j * theta), -2.0 * math.cos(2.0 * theta))

    @property
    def d(self) -> float:
        return self.d_value


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def substitute_mirror(p):
    """A -> 1/A.  Works on LaurentPoly and RationalFunc."""
    return p.mirror()


def eval_at(p, params: NumericParams) -> complex:
    return p.evaluate(params)


def rational_normalize(r: RationalFunc | tuple) -> RationalFunc:
    if isinstance(r, tuple):
        return RationalFunc(*r)
    return RationalFunc(r.num, r.den)


def quantum_integer(n: int) -> LaurentPoly:
    """Chebyshev values ``Delta_n`` in d: Delta_-1 = 0, Delta_0 = 1."""
    if n < -1:
        raise ValueError("n must be >= -1")
    prev, cur = ZERO, ONE
    if n == -1:
        return prev
    for _ in range(n):
        prev, cur = cur, LOOP * cur - prev
    return cur


def format_poly(p: LaurentPoly, var: str = "A", scale: Fraction = Fraction(1)) -> str:
    """Human-readable form in ascending powers; exponents multiplied by ``scale``."""
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.terms):
        c = p.coeff(e)
        ex = Fraction(e) * scale
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if ex == 0:
            body = str(mag)
        else:
            exs = str(ex.numerator) if ex.denominator == 1 else f"({ex})"
            pw = var if ex == 1 else f"{var}^{exs}"
            body = pw if mag == 1 else f"{mag}*{pw}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _jones_exponents(p: LaurentPoly) -> tuple[LaurentPoly, bool]:
    """Map A^e to q^(-e/4); returns the q-exponent polynomial and whether it is integral."""
    integral = all(e % 4 == 0 for e in p.terms)
    if integral:
        return LaurentPoly({-e // 4: c for e, c in p.items()}), True
    return LaurentPoly({-e: c for e, c in p.items()}), False


def format_jones(p: LaurentPoly) -> str:
    """Jones polynomial in q; quarter powers only when the input needs them."""
    q, integral = _jones_exponents(p)
    if integral:
        return format_poly(q, "q")
    return format_poly(q, "q", Fraction(1, 4))


def jones_json(p: LaurentPoly) -> dict:
    q, integral = _jones_exponents(p)
    return q.to_json("q" if integral else "q^(1/4)")


Scalar = Union[LaurentPoly, RationalFunc, int]
