"""
Nahm sums of finite type pairs.

    f_{K,B,C}(q) = sum_{n >= 0} q^(n^T K n / 2 + B^T n + C) / prod_i (q)_{n_i}

with K = A+(1)^-1 A-(1). Exponents are exact rationals over a common
denominator, never floating point.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import pandas as pd
import plac
import sympy

from yrun import polymat, presets, utils
from yrun.utils import logger, ResourceError, ValidationError

# Largest coordinate (box) or total size (shell) of the summation range.
N_MAX = 200

STRATEGIES = ("box", "shell")

# The expansions leave out the q^C prefactor.
SERIES_FORM = "f_{K,0,0} = q^-C f_{K,0,C}"


@dataclass(frozen=True)
class QMat:
    """
    A square matrix of exact rationals.
    """
    rows: tuple

    @classmethod
    def create(cls, rows):
        return cls(rows=tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def size(self):
        return len(self.rows)

    def sympy(self):
        return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in self.rows])

    @classmethod
    def from_sympy(cls, mat):
        return cls.create([[Fraction(int(x.p), int(x.q)) for x in mat.row(k)] for k in range(mat.rows)])

    def is_symmetric(self):
        return all(self.rows[i][j] == self.rows[j][i] for i in range(self.size) for j in range(self.size))

    def minors(self):
        """
        The leading principal minors.
        """
        mat = self.sympy()
        return [Fraction(str(mat[:k, :k].det())) for k in range(1, self.size + 1)]

    def is_positive_definite(self):
        return self.is_symmetric() and all(x > 0 for x in self.minors())

    def det(self):
        return Fraction(str(self.sympy().det()))

    def trace(self):
        return sum(self.rows[k][k] for k in range(self.size))

    def inverse(self):
        if self.det() == 0:
            raise ValidationError("singular matrix")
        return QMat.from_sympy(self.sympy().inv())

    def text(self):
        return [[utils.fraction_text(x) for x in row] for row in self.rows]


def compute_K(pair):
    """
    K = A+(1)^-1 A-(1).
    """
    plus, minus = polymat.eval_at_one(pair)
    left = sympy.Matrix(plus)
    if left.det() == 0:
        raise ValidationError("A+(1) is singular")
    return QMat.from_sympy(left.inv() * sympy.Matrix(minus))


class QSeries:
    """
    Series sum c_k q^(k/den) keeping the exponents below the order.
    """

    def __init__(self, den, order, coeffs=None):
        self.den = int(den)
        self.order = order
        self.limit = Fraction(order) * self.den
        self.coeffs = {}
        for k, c in (coeffs or {}).items():
            if c and k < self.limit:
                self.coeffs[int(k)] = c

    def rescale(self, den):
        """
        The same series over a multiple of the denominator.
        """
        if den % self.den:
            raise ValueError(f"{den} is not a multiple of {self.den}")
        factor = den // self.den
        return QSeries(den, self.order, {k * factor: c for k, c in self.coeffs.items()})

    def _align(self, other):
        den = self.den * other.den // math.gcd(self.den, other.den)
        order = min(self.order, other.order)
        first, second = self.rescale(den), other.rescale(den)
        return QSeries(den, order, first.coeffs), QSeries(den, order, second.coeffs)

    def __add__(self, other):
        first, second = self._align(other)
        found = dict(first.coeffs)
        for k, c in second.coeffs.items():
            found[k] = found.get(k, 0) + c
        return QSeries(first.den, first.order, found)

    def __mul__(self, other):
        first, second = self._align(other)
        found = {}
        for a, ca in first.coeffs.items():
            for b, cb in second.coeffs.items():
                if a + b < first.limit:
                    found[a + b] = found.get(a + b, 0) + ca * cb
        return QSeries(first.den, first.order, found)

    def shift(self, exponent):
        """
        Multiplication by q^exponent.
        """
        exponent = Fraction(exponent)
        den = self.den * exponent.denominator // math.gcd(self.den, exponent.denominator)
        base = self.rescale(den)
        step = int(exponent * den)
        return QSeries(den, self.order, {k + step: c for k, c in base.coeffs.items()})

    def coefficient(self, exponent):
        scaled = Fraction(exponent) * self.den
        if scaled.denominator != 1:
            return 0
        return self.coeffs.get(int(scaled), 0)

    def items(self):
        """
        (exponent, coefficient) pairs in increasing exponent order.
        """
        for k in sorted(self.coeffs):
            yield Fraction(k, self.den), self.coeffs[k]

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        first, second = self._align(other)
        return first.coeffs == second.coeffs

    __hash__ = None

    def __str__(self):
        words = [f"{c}q^{utils.fraction_text(e)}" for e, c in self.items()]
        return " + ".join(words) or "0"


def _partition_counts(parts, order):
    counts = [0] * max(order, 0)
    if counts:
        counts[0] = 1
    for m in parts:
        for k in range(m, order):
            counts[k] += counts[k - m]
    return counts


def pochhammer_inverse(n, order):
    """
    1/(q)_n below q^order: partitions into parts at most n.
    """
    if n < 0:
        raise ValidationError(f"negative index: {n}")
    counts = _partition_counts(range(1, n + 1), order)
    return QSeries(1, order, dict(enumerate(counts)))


def rr_product(residues, order, modulus=5):
    """
    prod over n = residue mod modulus of 1/(1 - q^n), below q^order.
    """
    parts = [m for m in range(1, order) if m % modulus in residues]
    return QSeries(1, order, dict(enumerate(_partition_counts(parts, order))))


def _common_denominator(K, B, C):
    values = [K.rows[i][i] / 2 for i in range(K.size)]
    values += [K.rows[i][j] for i in range(K.size) for j in range(K.size) if i != j]
    values += list(B) + [C]
    den = 1
    for x in values:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def _quadratic(K, B, C, n):
    size = K.size
    total = C
    for i in range(size):
        total += B[i] * n[i]
        for j in range(size):
            total += K.rows[i][j] * n[i] * n[j] / 2
    return total


def _growth(K):
    """
    A lower bound of the least eigenvalue: det / trace^(r - 1).
    """
    return K.det() / K.trace() ** (K.size - 1)


def box_points(K, B, C, order, n_max=N_MAX):
    """
    Lattice points with exponent below the order, from a certified box.
    """
    mu = _growth(K)
    beta = sum(max(-x, 0) for x in B)

    # Past m >= beta/mu the bound mu t^2/2 - beta t + C grows.
    m = max(0, math.ceil(beta / mu))
    while mu * m * m / 2 - beta * m + C < order:
        m += 1
        if m > n_max + 1:
            raise ResourceError(f"summation box exceeds {n_max}")

    logger.debug(f"box of side {m}")

    for n in product(range(m), repeat=K.size):
        if _quadratic(K, B, C, n) < order:
            yield n


def _compositions(total, size):
    if size == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, size - 1):
            yield (head,) + tail


def shell_points(K, B, C, order, n_max=N_MAX):
    """
    Lattice points with exponent below the order, shell by shell of n_1 + ... + n_r.
    """
    mu = _growth(K)
    beta = max([max(-x, 0) for x in B] + [Fraction(0)])
    size = K.size

    k = 0
    while True:
        bound = mu * k * k / (2 * size) - beta * k + C
        if k * mu >= beta * size and bound >= order:
            break
        if k > n_max:
            raise ResourceError(f"summation shells exceed {n_max}")
        for n in _compositions(k, size):
            if _quadratic(K, B, C, n) < order:
                yield n
        k += 1

    logger.debug(f"stopped at shell {k}")


def nahm_expand(K, B=None, C=0, order=10, n_max=N_MAX, strategy="box"):
    """
    The Nahm sum f_{K,B,C} below q^order.
    """
    if not isinstance(K, QMat):
        K = QMat.create(K)
    B = tuple(Fraction(x) for x in (B if B is not None else [0] * K.size))
    C = Fraction(C)

    if len(B) != K.size:
        raise ValidationError(f"B has {len(B)} entries, expected {K.size}")
    if not K.is_positive_definite():
        raise ValidationError("K is not symmetric positive definite")
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy: {strategy} (choose from {', '.join(STRATEGIES)})")

    den = _common_denominator(K, B, C)
    walk = box_points if strategy == "box" else shell_points

    total = QSeries(den, order)
    cache = {}
    for n in utils.progress(walk(K, B, C, order, n_max=n_max), desc=f"{strategy} enumeration"):
        term = QSeries(den, order, {0: 1}).shift(_quadratic(K, B, C, n))
        for x in n:
            if x not in cache:
                cache[x] = pochhammer_inverse(x, order)
            term = term * cache[x]
        total = total + term

    return total


def rogers_ramanujan(order=30):
    """
    Both identities below q^order: (name, sum side, product side).
    """
    two = QMat.create([[2]])
    return [
        ("G", nahm_expand(two, [0], 0, order), rr_product({1, 4}, order)),
        ("H", nahm_expand(two, [1], 0, order), rr_product({2, 3}, order)),
    ]


@dataclass(frozen=True)
class NahmRow:
    name: str
    K: QMat
    symmetric: bool
    positive_definite: bool
    minus_24c: Fraction
    reference: str
    series: QSeries


def nahm_row(name, pair, order=10, strategy="box"):
    K = compute_K(pair)
    definite = K.is_positive_definite()
    series = nahm_expand(K, order=order, strategy=strategy) if definite else None
    return NahmRow(
        name=name, K=K, symmetric=K.is_symmetric(), positive_definite=definite,
        minus_24c=presets.NAHM_CONSTANTS.get(name), reference=presets.NAHM_REFERENCES.get(name, ""),
        series=series,
    )


def table2_report(order=10, strategy="box"):
    """
    K, its checks and the expansion of f_{K,0,0} for the finite type pairs and their opposites.
    """
    rows = []
    for row in presets.FINITE_TYPE:
        for suffix in ("", "op"):
            name = f"table1:{row}{suffix}"
            rows.append(nahm_row(name, presets.PRESETS[name], order=order, strategy=strategy))
    return rows


def row_json(row):
    data = dict(
        name=row.name, K=row.K.text(), symmetric=row.symmetric,
        positive_definite=row.positive_definite, reference=row.reference,
    )
    if row.minus_24c is not None:
        data["minus_24C"] = row.minus_24c
        data["C"] = -row.minus_24c / 24
    if row.series is not None:
        data["series"] = [[utils.fraction_text(e), c] for e, c in row.series.items()]
        data["series_form"] = SERIES_FORM
    return data


def series_frame(series, name="coefficient"):
    return pd.DataFrame(
        [(utils.fraction_text(e), c) for e, c in series.items()],
        columns=["exponent", name],
    )


def summary_frame(rows):
    def fmt(K):
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in K.text()) + "]"
    data = [(r.name, fmt(r.K), r.symmetric, r.positive_definite,
             utils.fraction_text(r.minus_24c) if r.minus_24c is not None else "", r.reference)
            for r in rows]
    return pd.DataFrame(data, columns=["pair", "K", "symmetric", "pos_def", "-24C", "identity"])


@plac.pos('pair', "preset name or pair file")
@plac.opt('order', "expand below q^order", abbrev='o', type=int)
@plac.opt('strategy', "lattice enumeration: box or shell", abbrev='s', choices=STRATEGIES)
@plac.opt('nmax', "summation cap", abbrev='n', type=int)
@plac.flg('table', "report every finite type pair and its opposite", abbrev='t')
@plac.flg('against_product', "compare the rank one sums with their mod 5 products", abbrev='a')
@plac.flg('json_', "produce JSON output", abbrev='j')
def run(pair='', order=10, strategy="box", nmax=N_MAX, table=False, against_product=False, json_=False):
    """
    Nahm sum data: K = A+(1)^-1 A-(1) and the q-expansion of f_{K,0,0}.
    """
    if against_product:
        failed = []
        for name, left, right in rogers_ramanujan(order):
            verdict = "equal" if left == right else "DIFFERENT"
            print(f"{name}\torder={order}\t{verdict}")
            if left != right:
                failed.append(name)
        if failed:
            raise utils.PropertyError(f"sum and product differ: {', '.join(failed)}")
        return

    if table:
        rows = table2_report(order=order, strategy=strategy)
        if json_:
            print(utils.dumps(dict(schema=utils.SCHEMA_VERSION, rows=[row_json(r) for r in rows])))
        else:
            print(summary_frame(rows).to_string(index=False))
        return

    if not pair:
        raise ValidationError("a pair is required (or use --table or --against-product)")

    value = presets.resolve(pair)
    K = compute_K(value)
    if not K.is_positive_definite():
        raise utils.PropertyError("K is not symmetric positive definite")

    row = NahmRow(name=pair, K=K, symmetric=True, positive_definite=True,
                  minus_24c=presets.NAHM_CONSTANTS.get(pair), reference=presets.NAHM_REFERENCES.get(pair, ""),
                  series=nahm_expand(K, order=order, n_max=nmax, strategy=strategy))

    if json_:
        print(utils.dumps(dict(schema=utils.SCHEMA_VERSION, **row_json(row))))
        return

    print(summary_frame([row]).to_string(index=False))
    print()
    print(f"# series: {SERIES_FORM}")
    print(series_frame(row.series).to_string(index=False))
