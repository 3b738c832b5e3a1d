"""
Semifield backends for Y-seeds.

All three element types support +, *, / and integer powers, so the
mutation rules are written once and run in any backend:

    trop    Laurent monomials, addition is the minimum of exponents
    posrat  exact positive rationals (fractions.Fraction)
    ratfun  subtraction free rational functions in the initial y's (sympy Poly over ZZ)
"""
import random
from dataclasses import dataclass
from fractions import Fraction

import sympy
from sympy import Poly, ZZ

from yrun import utils
from yrun.utils import ResourceError

BACKENDS = ("trop", "posrat", "ratfun")

# Random points for the equality pre-screen.
_rng = random.Random(utils.SEED)


@dataclass(frozen=True)
class TropicalElem:
    """
    The monomial prod y_g^e_g over a fixed generator tuple.
    """
    gens: tuple
    exps: tuple

    def _check(self, other):
        if isinstance(other, int):
            # Only the unit 1 enters the mutation rule.
            if other != 1:
                raise ValueError(f"integer {other} is not in the tropical semifield")
            return TropicalElem(self.gens, (0,) * len(self.gens))
        if self.gens != other.gens:
            raise ValueError("mismatched generator sets")
        return other

    def __add__(self, other):
        other = self._check(other)
        return TropicalElem(self.gens, tuple(map(min, self.exps, other.exps)))

    __radd__ = __add__

    def __mul__(self, other):
        other = self._check(other)
        return TropicalElem(self.gens, tuple(a + b for a, b in zip(self.exps, other.exps)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        return TropicalElem(self.gens, tuple(a - b for a, b in zip(self.exps, other.exps)))

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, k):
        return TropicalElem(self.gens, tuple(a * k for a in self.exps))

    def is_positive(self):
        return all(a >= 0 for a in self.exps)

    def is_negative(self):
        return all(a <= 0 for a in self.exps)

    def __str__(self):
        parts = [f"{g}^{e}" if e != 1 else f"{g}" for g, e in zip(self.gens, self.exps) if e]
        return "*".join(parts) or "1"


def trop_add(a, b):
    """
    Tropical sum, the componentwise minimum of exponent vectors.
    """
    return a + b


def posrat(value):
    """
    An exact positive rational.
    """
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"not positive: {value}")
    return value


class RatFun:
    """
    Quotient num/den of integer polynomials in the generators.
    """
    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=None):
        den = num.one if den is None else den
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        reduce = utils.REDUCE if reduce is None else reduce
        if reduce:
            num, den = num.cancel(den, include=True)
        if den.LC() < 0:
            num, den = -num, -den
        if num.length() + den.length() > utils.TERM_CAP:
            raise ResourceError(f"rational function exceeds {utils.TERM_CAP} monomials")
        self.num = num
        self.den = den

    def _lift(self, other):
        if isinstance(other, RatFun):
            return other
        return RatFun(self.num.one * int(other), self.num.one, reduce=False)

    def __add__(self, other):
        other = self._lift(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __mul__(self, other):
        other = self._lift(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k):
        if k < 0:
            return RatFun(self.den ** -k, self.num ** -k)
        return RatFun(self.num ** k, self.den ** k)

    @property
    def gens(self):
        return self.num.gens

    def evaluate(self, values):
        """
        Value at a point given as a sequence aligned with the generators.
        """
        return _poly_value(self.num, values) / _poly_value(self.den, values)

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            other = self._lift(other)
        return ratfun_equal(self, other)

    __hash__ = None

    def __str__(self):
        num, den = self.num.as_expr(), self.den.as_expr()
        if den == 1:
            return str(num)
        return f"({num})/({den})"

    __repr__ = __str__


def _poly_value(poly, values):
    total = Fraction(0)
    for monom, coeff in poly.terms():
        term = Fraction(int(coeff))
        for value, e in zip(values, monom):
            if e:
                term *= value ** e
        total += term
    return total


def random_point(size, rng=None, top=9):
    rng = rng or _rng
    return [Fraction(rng.randint(1, top), rng.randint(1, top)) for _ in range(size)]


def ratfun_equal(a, b, screen=None):
    """
    Exact equality by cross-multiplication, optionally pre-screened at random positive points.
    """
    if a.gens != b.gens:
        raise ValueError("mismatched generator sets")
    screen = utils.SCREEN if screen is None else screen
    for _ in range(screen):
        point = random_point(len(a.gens))
        if a.evaluate(point) != b.evaluate(point):
            return False
    return a.num * b.den == b.num * a.den


def semifield_eval(expr, assignment):
    """
    Image of a rational function under the homomorphism sending each generator to a positive rational.

    The assignment maps generator names (or sympy symbols) to values.
    """
    values = []
    for gen in expr.gens:
        key = gen if gen in assignment else str(gen)
        if key not in assignment:
            raise ValueError(f"no value for generator {gen}")
        values.append(posrat(assignment[key]))
    return expr.evaluate(values)


class Backend:
    """
    Generators of a semifield over named vertices.
    """
    name = None

    def __init__(self, names):
        self.names = tuple(names)

    def generators(self):
        raise NotImplementedError


class TropicalBackend(Backend):
    name = "trop"

    def generators(self):
        size = len(self.names)
        unit = lambda k: tuple(int(k == m) for m in range(size))
        return [TropicalElem(self.names, unit(k)) for k in range(size)]


class PosRatBackend(Backend):
    name = "posrat"

    def __init__(self, names, values=None, rng=None):
        super().__init__(names)
        values = values if values is not None else random_point(len(self.names), rng=rng)
        self.values = [posrat(x) for x in values]

    def generators(self):
        return list(self.values)


class RatFunBackend(Backend):
    name = "ratfun"

    def __init__(self, names):
        super().__init__(names)
        self.symbols = sympy.symbols([f"y{k}" for k in range(len(self.names))])

    def generators(self):
        polys = [Poly(sym, *self.symbols, domain=ZZ) for sym in self.symbols]
        return [RatFun(p, reduce=False) for p in polys]


def make_backend(name, names, values=None, rng=None):
    """
    Backend by name: trop, posrat or ratfun.
    """
    if name == "trop":
        return TropicalBackend(names)
    if name == "posrat":
        return PosRatBackend(names, values=values, rng=rng)
    if name == "ratfun":
        return RatFunBackend(names)
    raise ValueError(f"unknown backend: {name} (choose from {', '.join(BACKENDS)})")
