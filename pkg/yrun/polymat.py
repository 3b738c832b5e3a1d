"""
Integer polynomials in z, the Y-datum (r, n) and the matrix pair A+(z), A-(z).

    A+(z) = N0(z) - N+(z)
    A-(z) = N0(z) - N-(z)

where N0(z) = diag(1 + z^r_i) and N+, N- carry the positive and negative parts of n_ij;p.
"""
import json
import math
from dataclasses import dataclass
from functools import reduce
from itertools import product

import networkx as nx

from yrun.utils import ValidationError


class ZPoly:
    """
    Sparse Laurent polynomial in z with integer coefficients.
    """
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        terms = terms or {}
        self.terms = {int(e): int(c) for e, c in terms.items() if c}
        self._hash = None

    @classmethod
    def monomial(cls, exp, coeff=1):
        return cls({exp: coeff})

    @classmethod
    def constant(cls, value):
        return cls({0: value})

    @classmethod
    def from_pairs(cls, pairs):
        """
        Builds a polynomial from [[exp, coeff], ...] lists.
        """
        terms = {}
        for exp, coeff in pairs:
            terms[exp] = terms.get(exp, 0) + coeff
        return cls(terms)

    def to_pairs(self):
        return [[e, c] for e, c in sorted(self.terms.items())]

    def coefficient(self, exp):
        return self.terms.get(exp, 0)

    def degree(self):
        return max(self.terms) if self.terms else None

    def low_degree(self):
        return min(self.terms) if self.terms else None

    def at_one(self):
        return sum(self.terms.values())

    def substitute_inverse(self):
        """
        The substitution z -> 1/z.
        """
        return ZPoly({-e: c for e, c in self.terms.items()})

    def stretch(self, g):
        """
        The substitution z -> z^g.
        """
        return ZPoly({e * g: c for e, c in self.terms.items()})

    def shrink(self, g):
        """
        The substitution z^g -> z, every exponent must be a multiple of g.
        """
        if any(e % g for e in self.terms):
            raise ValueError(f"exponents of {self} are not multiples of {g}")
        return ZPoly({e // g: c for e, c in self.terms.items()})

    def _lift(self, other):
        return other if isinstance(other, ZPoly) else ZPoly.constant(other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return ZPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return ZPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        terms = {}
        for (e1, c1), (e2, c2) in product(self.terms.items(), other.terms.items()):
            terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return ZPoly(terms)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = ZPoly.constant(other)
        if not isinstance(other, ZPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self):
        if not self.terms:
            return "0"
        text = ""
        for exp, coeff in sorted(self.terms.items()):
            sign = "-" if coeff < 0 else "+"
            size = abs(coeff)
            if exp == 0:
                word = f"{size}"
            else:
                power = "z" if exp == 1 else f"z^{exp}"
                word = power if size == 1 else f"{size}{power}"
            if not text:
                text = word if sign == "+" else f"-{word}"
            else:
                text = f"{text} {sign} {word}"
        return text

    def __repr__(self):
        return f"ZPoly({self})"


ZERO = ZPoly()
ONE = ZPoly.constant(1)


def z_integer(n, r):
    """
    The z-integer [n]_r = 1 + z^r + ... + z^r(n-1).
    """
    if n < 0 or r < 1:
        raise ValueError(f"invalid z-integer [{n}]_{r}")
    return ZPoly({r * k: 1 for k in range(n)})


@dataclass(frozen=True)
class YDatum:
    """
    The pair (r, n): labels, r_i per label, and the nonzero n_ij;p as a sorted tuple.
    """
    labels: tuple
    r: tuple
    n: tuple

    @classmethod
    def create(cls, labels, r, n=None):
        """
        Builds a datum from a label list, r as a list or mapping, and n as a mapping (i, j, p) -> value.
        """
        labels = tuple(str(x) for x in labels)
        if isinstance(r, dict):
            missing = [x for x in labels if x not in r]
            if missing:
                raise ValidationError(f"r is missing labels: {missing}")
            r = [r[x] for x in labels]
        r = tuple(int(x) for x in r)
        n = n or {}
        order = {x: k for k, x in enumerate(labels)}
        items = []
        for (i, j, p), v in n.items():
            i, j = str(i), str(j)
            if i not in order or j not in order:
                raise ValidationError(f"unknown label in n at ({i},{j},{p})")
            if v:
                items.append(((i, j, int(p)), int(v)))
        items.sort(key=lambda x: (order[x[0][0]], order[x[0][1]], x[0][2]))
        return cls(labels=labels, r=r, n=tuple(items))

    def coefficients(self):
        return dict(self.n)

    def r_of(self, label):
        return self.r[self.labels.index(label)]


def violations(datum):
    """
    Lists every violated condition of a datum.
    """
    found = []

    if len(set(datum.labels)) != len(datum.labels):
        found.append("index labels must be unique")

    for label, size in zip(datum.labels, datum.r):
        if size < 1:
            found.append(f"r must be positive at {label}")

    for (i, j, p), v in datum.n:
        size = datum.r_of(i)
        if not 0 < p < size:
            found.append(f"Eq-Y1 violation at ({i},{j},{p}): need 0 < p < r_{i}={size}")

    return found


def check_datum(datum):
    """
    Raises a validation error naming the violated conditions.
    """
    found = violations(datum)
    if found:
        raise ValidationError("; ".join(found))


@dataclass(frozen=True)
class MatrixPair:
    """
    The matrices A+(z) and A-(z) over a shared label set.
    """
    labels: tuple
    plus: tuple
    minus: tuple

    @property
    def rank(self):
        return len(self.labels)

    @property
    def r(self):
        return tuple(self.plus[k][k].degree() for k in range(self.rank))

    def __str__(self):
        def fmt(mat):
            rows = ["[" + ", ".join(str(x) for x in row) + "]" for row in mat]
            return "[" + ", ".join(rows) + "]"
        return f"A+ = {fmt(self.plus)}\nA- = {fmt(self.minus)}"


def as_matrix(rows):
    """
    Freezes nested lists of polynomials or integers.
    """
    return tuple(tuple(x if isinstance(x, ZPoly) else ZPoly.constant(x) for x in row) for row in rows)


def ydatum_to_matrices(datum):
    """
    Builds A+(z) and A-(z) from (r, n).
    """
    check_datum(datum)

    size = len(datum.labels)
    index = {x: k for k, x in enumerate(datum.labels)}

    plus = [[ZERO] * size for _ in range(size)]
    minus = [[ZERO] * size for _ in range(size)]

    for k, width in enumerate(datum.r):
        plus[k][k] = minus[k][k] = ZPoly({0: 1, width: 1})

    for (i, j, p), v in datum.n:
        a, b = index[i], index[j]
        if v > 0:
            plus[a][b] = plus[a][b] - ZPoly.monomial(p, v)
        else:
            minus[a][b] = minus[a][b] - ZPoly.monomial(p, -v)

    return MatrixPair(labels=datum.labels, plus=as_matrix(plus), minus=as_matrix(minus))


def _diagonal_size(poly, label, side):
    top = poly.degree()
    if top is None or top < 1 or poly.coefficient(top) != 1 or poly.coefficient(0) != 1:
        raise ValidationError(f"diagonal of A{side} at {label} is not 1 + z^r minus lower terms: {poly}")
    return top


def matrices_to_ydatum(pair):
    """
    Recovers (r, n) from A+(z) and A-(z).
    """
    size = len(pair.labels)
    for name, mat in (("A+", pair.plus), ("A-", pair.minus)):
        if len(mat) != size or any(len(row) != size for row in mat):
            raise ValidationError(f"{name} must be a {size}x{size} matrix")

    r = []
    for k, label in enumerate(pair.labels):
        r_plus = _diagonal_size(pair.plus[k][k], label, "+")
        r_minus = _diagonal_size(pair.minus[k][k], label, "-")
        if r_plus != r_minus:
            raise ValidationError(f"diagonals of A+ and A- imply different r at {label}: {r_plus} vs {r_minus}")
        r.append(r_plus)

    n = {}
    for a, b in product(range(size), repeat=2):
        i, j = pair.labels[a], pair.labels[b]
        base = ZPoly({0: 1, r[a]: 1}) if a == b else ZERO
        upper = base - pair.plus[a][b]
        lower = base - pair.minus[a][b]
        for sign, poly in ((1, upper), (-1, lower)):
            for p, c in poly.terms.items():
                if c < 0:
                    raise ValidationError(f"N{'+' if sign > 0 else '-'} has a negative coefficient at ({i},{j},{p})")
                if not 0 < p < r[a]:
                    raise ValidationError(f"Eq-Y1 violation at ({i},{j},{p}): need 0 < p < r_{i}={r[a]}")
                if (i, j, p) in n:
                    raise ValidationError(f"N+ and N- overlap at ({i},{j},{p})")
                n[(i, j, p)] = sign * c

    return YDatum.create(labels=pair.labels, r=r, n=n)


def matmul(left, right):
    size = len(left)
    return [[reduce(lambda x, y: x + y, (left[i][k] * right[k][j] for k in range(size)), ZERO)
             for j in range(size)] for i in range(size)]


def mirror(mat):
    """
    The transpose of M(1/z).
    """
    size = len(mat)
    return [[mat[j][i].substitute_inverse() for j in range(size)] for i in range(size)]


def symplectic_defect(pair):
    """
    The Laurent matrix A+(z) A-(1/z)^T - A-(z) A+(1/z)^T.
    """
    left = matmul(pair.plus, mirror(pair.minus))
    right = matmul(pair.minus, mirror(pair.plus))
    size = pair.rank
    return [[left[i][j] - right[i][j] for j in range(size)] for i in range(size)]


def check_symplectic(pair):
    """
    True when A+(z) A-(1/z)^T = A-(z) A+(1/z)^T holds exactly.
    """
    return not any(x for row in symplectic_defect(pair) for x in row)


def eval_at_one(pair):
    """
    Integer matrices A+(1) and A-(1).
    """
    plus = tuple(tuple(x.at_one() for x in row) for row in pair.plus)
    minus = tuple(tuple(x.at_one() for x in row) for row in pair.minus)
    return plus, minus


def opposite(pair):
    return MatrixPair(labels=pair.labels, plus=pair.minus, minus=pair.plus)


def permute(pair, order):
    """
    Reorders the indices, order lists the labels in their new positions.
    """
    order = [str(x) for x in order]
    if sorted(order) != sorted(pair.labels):
        raise ValidationError(f"not a permutation of {list(pair.labels)}: {order}")
    idx = [pair.labels.index(x) for x in order]
    plus = tuple(tuple(pair.plus[a][b] for b in idx) for a in idx)
    minus = tuple(tuple(pair.minus[a][b] for b in idx) for a in idx)
    return MatrixPair(labels=tuple(order), plus=plus, minus=minus)


def relabel(pair, labels):
    """
    Renames the indices keeping their order.
    """
    labels = tuple(str(x) for x in labels)
    if len(labels) != pair.rank:
        raise ValidationError(f"expected {pair.rank} labels, got {len(labels)}")
    return MatrixPair(labels=labels, plus=pair.plus, minus=pair.minus)


def direct_sum(first, second):
    """
    Block diagonal pair over the disjoint union of the index sets.
    """
    common = set(first.labels) & set(second.labels)
    if common:
        raise ValidationError(f"index sets overlap: {sorted(common)}")

    size1, size2 = first.rank, second.rank
    size = size1 + size2

    def block(m1, m2):
        rows = [[ZERO] * size for _ in range(size)]
        for a, b in product(range(size1), repeat=2):
            rows[a][b] = m1[a][b]
        for a, b in product(range(size2), repeat=2):
            rows[size1 + a][size1 + b] = m2[a][b]
        return as_matrix(rows)

    return MatrixPair(labels=first.labels + second.labels,
                      plus=block(first.plus, second.plus), minus=block(first.minus, second.minus))


def index_graph(pair):
    """
    Undirected graph on the labels joined where A+ or A- has a nonzero off-diagonal entry.
    """
    graph = nx.Graph()
    graph.add_nodes_from(pair.labels)
    for a, b in product(range(pair.rank), repeat=2):
        if a != b and (pair.plus[a][b] or pair.minus[a][b]):
            graph.add_edge(pair.labels[a], pair.labels[b])
    return graph


def is_decomposable(pair):
    return pair.rank > 1 and not nx.is_connected(index_graph(pair))


def split(pair):
    """
    The indecomposable summands, in label order.
    """
    graph = index_graph(pair)
    parts = []
    for comp in nx.connected_components(graph):
        order = [x for x in pair.labels if x in comp]
        parts.append(order)
    parts.sort(key=lambda x: pair.labels.index(x[0]))
    return [permute_subset(pair, order) for order in parts]


def permute_subset(pair, order):
    idx = [pair.labels.index(x) for x in order]
    plus = tuple(tuple(pair.plus[a][b] for b in idx) for a in idx)
    minus = tuple(tuple(pair.minus[a][b] for b in idx) for a in idx)
    return MatrixPair(labels=tuple(order), plus=plus, minus=minus)


def primitive_reduce(pair):
    """
    Substitutes z^g -> z where g divides every r_i and every exponent of N+ and N-.
    """
    datum = matrices_to_ydatum(pair)
    values = list(datum.r) + [p for (_, _, p), _ in datum.n]
    g = reduce(math.gcd, values, 0)
    if g <= 1:
        return pair
    plus = tuple(tuple(x.shrink(g) for x in row) for row in pair.plus)
    minus = tuple(tuple(x.shrink(g) for x in row) for row in pair.minus)
    return MatrixPair(labels=pair.labels, plus=plus, minus=minus)


def datum_json(datum):
    """
    The canonical JSON object of a datum.
    """
    n = [dict(i=i, j=j, p=p, v=v) for (i, j, p), v in datum.n]
    return {"I": list(datum.labels), "r": dict(zip(datum.labels, datum.r)), "n": n}


def matrices_json(pair):
    """
    Coefficient lists [[exp, coeff], ...] per matrix entry.
    """
    def conv(mat):
        return [[x.to_pairs() for x in row] for row in mat]
    return {"I": list(pair.labels), "A_plus": conv(pair.plus), "A_minus": conv(pair.minus)}


def dump_pair(pair):
    """
    Canonical JSON text of a pair.
    """
    return json.dumps(datum_json(matrices_to_ydatum(pair)), sort_keys=True)


def _field(obj, key, path, kind):
    if key not in obj:
        raise ValidationError(f"{path}: missing field '{key}'")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ValidationError(f"{path}.{key}: expected integer, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise ValidationError(f"{path}.{key}: expected list")
    if kind is dict and not isinstance(value, dict):
        raise ValidationError(f"{path}.{key}: expected object")
    return value


def parse_pair(obj):
    """
    Builds a pair from the canonical JSON object or from the coefficient list form.
    """
    if not isinstance(obj, dict):
        raise ValidationError("top level: expected a JSON object")

    labels = [str(x) for x in _field(obj, "I", "top level", list)]

    if "A_plus" in obj:
        def conv(key):
            rows = _field(obj, key, "top level", list)
            try:
                return as_matrix([[ZPoly.from_pairs(cell) for cell in row] for row in rows])
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{key}: malformed coefficient list ({exc})")
        pair = MatrixPair(labels=tuple(labels), plus=conv("A_plus"), minus=conv("A_minus"))
        matrices_to_ydatum(pair)
        return pair

    r = _field(obj, "r", "top level", dict)
    for label in labels:
        _field(r, label, "r", int)
    n = {}
    for k, item in enumerate(_field(obj, "n", "top level", list)):
        path = f"n[{k}]"
        if not isinstance(item, dict):
            raise ValidationError(f"{path}: expected object")
        i, j = str(_field(item, "i", path, None)), str(_field(item, "j", path, None))
        p, v = _field(item, "p", path, int), _field(item, "v", path, int)
        key = (i, j, p)
        if key in n:
            raise ValidationError(f"{path}: duplicate entry for ({i},{j},{p})")
        n[key] = v

    datum = YDatum.create(labels=labels, r=r, n=n)
    return ydatum_to_matrices(datum)


def load_pair(text):
    """
    Parses JSON text into a pair with located diagnostics.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return parse_pair(obj)
