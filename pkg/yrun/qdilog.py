"""
Quantum dilogarithm products along reddening sequences.

Series live in the quantum torus over the initial vertices with

    x^a x^b = s^<a,b> x^(a+b),    s = q^(1/2),    <a,b> = -a^T B b

and are truncated at a total degree D. The quantum dilogarithm is fixed by

    Psi(q y) = (1 + s y) Psi(y),   Psi(0) = 1

so that Psi(y) = sum_k s^k y^k / ((q - 1)(q^2 - 1)...(q^k - 1)).

A coefficient at total degree d is stored as its numerator over the common
denominator prod_{m <= d} (q^m - 1)^floor(d/m), an integer Laurent
polynomial in s. Equal series have equal numerators.
"""
from dataclasses import dataclass
from functools import lru_cache

import plac

from yrun import presets, seed as seeds, utils, ysystem
from yrun.polymat import ONE, ZPoly
from yrun.utils import logger, PropertyError, ValidationError


@dataclass(frozen=True)
class SkewForm:
    """
    The pairing <a,b> = -a^T B b of the initial exchange matrix.
    """
    vertices: tuple
    b: tuple

    def __call__(self, first, second):
        size = len(self.vertices)
        total = 0
        for i in range(size):
            if not first[i]:
                continue
            for j in range(size):
                if second[j]:
                    total += first[i] * self.b[i][j] * second[j]
        return -total


@lru_cache(maxsize=None)
def _cyclotomic(m):
    # s^(2m) - 1
    return ZPoly({2 * m: 1, 0: -1})


@lru_cache(maxsize=None)
def _power_product(exponents):
    result = ONE
    for m, e in exponents:
        for _ in range(e):
            result = result * _cyclotomic(m)
    return result


@lru_cache(maxsize=None)
def denominator(d):
    """
    The common denominator of the coefficients at total degree d.
    """
    return _power_product(tuple((m, d // m) for m in range(1, d + 1)))


@lru_cache(maxsize=None)
def _rescale(d1, d2):
    # denominator(d1 + d2) / (denominator(d1) denominator(d2)), a polynomial.
    d = d1 + d2
    exponents = tuple((m, d // m - d1 // m - d2 // m) for m in range(1, d + 1))
    return _power_product(exponents)


class TorusSeries:
    """
    A truncated series in the nonnegative cone of the quantum torus.
    """

    def __init__(self, form, degree, terms=None):
        self.form = form
        self.degree = degree
        self.terms = {}
        for vec, num in (terms or {}).items():
            vec = tuple(int(x) for x in vec)
            if any(x < 0 for x in vec):
                raise ValidationError(f"negative exponent vector: {vec}")
            if sum(vec) <= degree and num:
                self.terms[vec] = num

    @classmethod
    def unit(cls, form, degree):
        zero = (0,) * len(form.vertices)
        return cls(form, degree, {zero: ONE})

    @classmethod
    def monomial(cls, form, degree, vec, coeff=ONE):
        """
        The monomial coeff x^vec, the coefficient taken as is (no denominator).
        """
        return cls(form, degree, {tuple(vec): coeff * denominator(sum(vec))})

    def _check(self, other):
        if other.form != self.form:
            raise ValidationError("series over different skew forms")
        if other.degree != self.degree:
            raise ValidationError(f"truncation degrees differ: {self.degree} vs {other.degree}")

    def __mul__(self, other):
        self._check(other)
        found = {}
        for a, ca in self.terms.items():
            da = sum(a)
            for b, cb in other.terms.items():
                db = sum(b)
                if da + db > self.degree:
                    continue
                vec = tuple(x + y for x, y in zip(a, b))
                twist = ZPoly.monomial(self.form(a, b))
                value = ca * cb * _rescale(da, db) * twist
                found[vec] = found.get(vec, ZPoly()) + value
        return TorusSeries(self.form, self.degree, found)

    def __eq__(self, other):
        if not isinstance(other, TorusSeries):
            return NotImplemented
        return self.form == other.form and self.degree == other.degree and self.terms == other.terms

    __hash__ = None

    def coefficient(self, vec):
        """
        Numerator and denominator of the coefficient at vec.
        """
        vec = tuple(vec)
        return self.terms.get(vec, ZPoly()), denominator(sum(vec))

    def first_difference(self, other):
        """
        The lowest monomial where two series disagree, None when equal.
        """
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        for vec in sorted(keys, key=lambda v: (sum(v), v)):
            if self.terms.get(vec, ZPoly()) != other.terms.get(vec, ZPoly()):
                return vec
        return None

    def __len__(self):
        return len(self.terms)

    def lines(self):
        """
        One text line per monomial, lowest degree first.
        """
        for vec in sorted(self.terms, key=lambda v: (sum(v), v)):
            name = "*".join(f"x{seeds.vertex_name(w)}^{e}" for w, e in zip(self.form.vertices, vec) if e) or "1"
            yield f"{name}\t({self.terms[vec]}) / D{sum(vec)}"


def dilog_factor(form, beta, sign, degree):
    """
    Psi(x^beta) for sign = 1 and its inverse for sign = -1, truncated at the degree.
    """
    beta = tuple(int(x) for x in beta)
    if any(x < 0 for x in beta):
        raise ValidationError(f"dilogarithm exponent must be nonnegative: {beta}")
    if not any(beta):
        raise ValidationError("dilogarithm exponent must be nonzero")
    if sign not in (1, -1):
        raise ValidationError(f"sign must be 1 or -1, got {sign}")

    width = sum(beta)
    terms = {}
    k = 0
    while k * width <= degree:
        d = k * width
        # Numerator of s^k / prod_{m<=k} (s^2m - 1) over the denominator at degree d.
        exponents = tuple((m, d // m - (1 if m <= k else 0)) for m in range(1, d + 1))
        if sign > 0:
            top = ZPoly.monomial(k)
        else:
            top = ZPoly.monomial(k * k, (-1) ** k)
        terms[tuple(k * x for x in beta)] = top * _power_product(exponents)
        k += 1

    return TorusSeries(form, degree, terms)


@dataclass(frozen=True)
class Mutation:
    """
    One mutation of a sequence: the vertex and the signed c-vector it carries.
    """
    vertex: tuple
    sign: int
    c_vector: tuple

    @property
    def beta(self):
        return tuple(self.sign * x for x in self.c_vector)


def _front_order(quiver, reverse_front):
    return tuple(reversed(quiver.front)) if reverse_front else quiver.front


def mutation_sequence(quiver, steps, reverse_front=False):
    """
    Flattened mutations of |steps| evolution steps, forward for positive steps.

    Returns the mutations and the final tropical seed.
    """
    current = ysystem.initial_seed(quiver, "trop")
    order = _front_order(quiver, reverse_front)
    found = []

    for _ in range(abs(steps)):
        if steps < 0:
            current = seeds.apply_permutation(current, quiver.nu_inverse)
        for k in order:
            c = current.value(k).exps
            if all(x >= 0 for x in c):
                sign = 1
            elif all(x <= 0 for x in c):
                sign = -1
            else:
                raise PropertyError(f"c-vector of {seeds.vertex_name(k)} is not sign coherent: {list(c)}")
            found.append(Mutation(vertex=k, sign=sign, c_vector=tuple(c)))
            current = seeds.mutate(current, k)
        if steps > 0:
            current = seeds.apply_permutation(current, quiver.nu_map)

    return found, current


def dt_invariant(quiver, steps, degree, reverse_front=False):
    """
    The ordered product of Psi(x^(e c))^e over the mutations of the sequence.
    """
    if degree < 1:
        raise ValidationError(f"degree must be positive, got {degree}")

    form = SkewForm(vertices=quiver.vertices, b=quiver.b)
    sequence, last = mutation_sequence(quiver, steps, reverse_front=reverse_front)

    if steps and not seeds.c_matrix(last).is_red():
        raise ValidationError(f"{abs(steps)} {utils.plural('step', abs(steps), end='s')} do not reach a red seed")

    result = TorusSeries.unit(form, degree)
    for mut in utils.progress(sequence, desc="dilogarithms"):
        result = result * dilog_factor(form, mut.beta, mut.sign, degree)

    logger.debug(f"product of {len(sequence)} factors has {len(result)} terms")

    return result


@dataclass(frozen=True)
class IdentityResult:
    h_plus: int
    h_minus: int
    degree: int
    forward: TorusSeries
    backward: TorusSeries

    @property
    def difference(self):
        return self.forward.first_difference(self.backward)

    @property
    def holds(self):
        return self.difference is None


def compare(pair, degree, reverse_front=False):
    """
    Both sides of the identity along the reddening sequences of a pair.
    """
    quiver = pair if isinstance(pair, ysystem.QuiverData) else ysystem.build(pair)
    red = ysystem.find_reddening(quiver)
    if red.h_plus is None or red.h_minus is None:
        raise ValidationError("the pair is not reddening in both directions")

    forward = dt_invariant(quiver, red.h_plus, degree, reverse_front=reverse_front)
    backward = dt_invariant(quiver, -red.h_minus, degree, reverse_front=reverse_front)

    return IdentityResult(h_plus=red.h_plus, h_minus=red.h_minus, degree=degree,
                          forward=forward, backward=backward)


def identity_check(pair, degree):
    """
    True when the forward and backward products agree below the degree.
    """
    return compare(pair, degree).holds


def sequence_lines(sequence):
    for mut in sequence:
        sign = "+" if mut.sign > 0 else "-"
        yield f"{seeds.vertex_name(mut.vertex)}\t{sign}\t{list(mut.c_vector)}"


@plac.pos('pair', "preset name or pair file")
@plac.opt('degree', "truncation degree", abbrev='d', type=int)
@plac.flg('reverse_front', "mutate the front in reverse order", abbrev='r')
@plac.flg('show', "print the mutation sequences", abbrev='s')
def run(pair, degree=6, reverse_front=False, show=False):
    """
    Checks the quantum dilogarithm identity along both reddening sequences.
    """
    value = presets.resolve(pair)
    quiver = ysystem.build(value)
    result = compare(quiver, degree, reverse_front=reverse_front)

    if show:
        for name, steps in (("forward", result.h_plus), ("backward", -result.h_minus)):
            sequence, _ = mutation_sequence(quiver, steps, reverse_front=reverse_front)
            print(f"# {name} {abs(steps)} {utils.plural('step', abs(steps), end='s')}")
            for line in sequence_lines(sequence):
                print(line)

    print(f"h+={result.h_plus}\th-={result.h_minus}\tdegree={degree}\tterms={len(result.forward)}")

    vec = result.difference
    if vec is not None:
        left, den = result.forward.coefficient(vec)
        right, _ = result.backward.coefficient(vec)
        print(f"first difference at {list(vec)}: ({left}) vs ({right}) over {den}")
        raise PropertyError("quantum dilogarithm identity fails")

    print("identity holds")
