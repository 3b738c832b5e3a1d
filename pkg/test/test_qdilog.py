import random

import pytest
import sympy

from yrun import presets, qdilog, ysystem
from yrun.polymat import ZPoly
from yrun.qdilog import SkewForm, TorusSeries
from yrun.utils import PropertyError, ValidationError

A2 = SkewForm(vertices=("a", "b"), b=((0, 1), (-1, 0)))

FORM3 = SkewForm(vertices=("a", "b", "c"), b=((0, 1, -2), (-1, 0, 1), (2, -1, 0)))

RANK1 = SkewForm(vertices=("a",), b=((0,),))


def test_skew_form():
    assert A2((1, 0), (0, 1)) == -1
    assert A2((0, 1), (1, 0)) == 1
    assert A2((1, 1), (1, 1)) == 0


def test_denominator():
    expected = ZPoly({2: 1, 0: -1}) * ZPoly({2: 1, 0: -1}) * ZPoly({4: 1, 0: -1})
    assert qdilog.denominator(2) == expected
    assert qdilog.denominator(0) == 1


def test_inverse_factor():
    for beta in [(1, 0), (0, 1), (1, 1), (2, 1)]:
        left = qdilog.dilog_factor(A2, beta, 1, 6)
        right = qdilog.dilog_factor(A2, beta, -1, 6)
        assert left * right == TorusSeries.unit(A2, 6)
        assert right * left == TorusSeries.unit(A2, 6)


def test_factor_coefficients():
    psi = qdilog.dilog_factor(A2, (1, 0), 1, 3)
    num, den = psi.coefficient((1, 0))
    # s / (s^2 - 1)
    assert num == ZPoly.monomial(1)
    assert den == ZPoly({2: 1, 0: -1})


def test_noncommuting_product():
    x = TorusSeries.monomial(A2, 4, (1, 0))
    y = TorusSeries.monomial(A2, 4, (0, 1))
    xy, yx = x * y, y * x
    assert xy.coefficient((1, 1))[0] == ZPoly.monomial(-1) * qdilog.denominator(2)
    assert yx.coefficient((1, 1))[0] == ZPoly.monomial(1) * qdilog.denominator(2)
    assert xy != yx


def test_pentagon():
    # Psi(x2) Psi(x1) = Psi(x1) Psi(x12) Psi(x2) when x2 x1 = q x1 x2.
    x1, x2 = (1, 0), (0, 1)
    deg = 6
    psi = lambda beta: qdilog.dilog_factor(A2, beta, 1, deg)
    left = psi(x2) * psi(x1)
    right = psi(x1) * psi((1, 1)) * psi(x2)
    assert left == right


def test_dilog_factor_errors():
    with pytest.raises(ValidationError):
        qdilog.dilog_factor(A2, (0, 0), 1, 4)
    with pytest.raises(ValidationError):
        qdilog.dilog_factor(A2, (1, -1), 1, 4)
    with pytest.raises(ValidationError):
        qdilog.dilog_factor(A2, (1, 0), 2, 4)


def test_degree_mismatch():
    with pytest.raises(ValidationError, match="degrees differ"):
        TorusSeries.unit(A2, 3) * TorusSeries.unit(A2, 4)


def test_mutation_sequence(row1):
    quiver = ysystem.build(row1)
    found, last = qdilog.mutation_sequence(quiver, 3)
    assert len(found) == 6
    assert found[0].sign == 1
    assert found[0].beta == (1, 0, 0, 0)
    empty, _ = qdilog.mutation_sequence(quiver, 0)
    assert empty == []


def test_not_red(row1):
    quiver = ysystem.build(row1)
    with pytest.raises(ValidationError, match="red"):
        qdilog.dt_invariant(quiver, 1, 4)


@pytest.mark.parametrize("row", ["1", "4", "6"])
def test_identity_holds(row):
    result = qdilog.compare(presets.FINITE_TYPE[row], 6)
    assert result.holds
    assert (result.h_plus, result.h_minus) == presets.REDDENING[row]


def test_identity_row1_degree8(row1):
    assert qdilog.identity_check(row1, 8)


def test_front_order(row1):
    quiver = ysystem.build(row1)
    first = qdilog.dt_invariant(quiver, 3, 6)
    second = qdilog.dt_invariant(quiver, 3, 6, reverse_front=True)
    assert first == second


def test_run_reports(capsys):
    qdilog.run("table1:1", degree=4)
    out = capsys.readouterr().out
    assert out.startswith("h+=3\th-=2\tdegree=4")
    assert out.strip().endswith("identity holds")


@pytest.mark.parametrize("row, degree", [("2", 4), ("3", 4), ("5", 6)])
def test_identity_larger_rows(row, degree):
    assert qdilog.identity_check(presets.FINITE_TYPE[row], degree)


def _random_series(rng, form, degree):
    terms = {}
    for _ in range(3):
        vec = tuple(rng.randint(0, 2) for _ in form.vertices)
        if sum(vec) <= degree:
            terms[vec] = ZPoly({rng.randint(-2, 2): rng.choice([-3, -1, 1, 2])})
    return TorusSeries(form, degree, terms)


def test_product_is_associative():
    rng = random.Random(17)
    for _ in range(20):
        a, b, c = (_random_series(rng, FORM3, 5) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_commutation_rule():
    # x^a x^b = q^<a,b> x^b x^a
    rng = random.Random(19)
    for _ in range(20):
        a = tuple(rng.randint(0, 2) for _ in range(3))
        b = tuple(rng.randint(0, 2) for _ in range(3))
        x, y = TorusSeries.monomial(FORM3, 8, a), TorusSeries.monomial(FORM3, 8, b)
        twist = TorusSeries.monomial(FORM3, 8, (0, 0, 0), ZPoly.monomial(2 * FORM3(a, b)))
        assert x * y == twist * (y * x)


def _divides(den, num):
    s = sympy.Symbol("s")
    low = min(num.terms)
    top = sympy.Poly(sum(c * s ** (e - low) for e, c in num.terms.items()), s)
    bottom = sympy.Poly(sum(c * s ** e for e, c in den.terms.items()), s)
    return top.rem(bottom).is_zero


@pytest.mark.parametrize("beta, gamma", [((1, 0), (0, 1)), ((1, 0), (0, 2)), ((0, 1), (1, 0)), ((1, 1), (0, 1))])
def test_conjugation_is_integral(beta, gamma):
    # Psi(y) x^g Psi(y)^-1 = x^g times a series in y with coefficients in Z[s, 1/s].
    deg = 6
    psi = qdilog.dilog_factor(A2, beta, 1, deg)
    inv = qdilog.dilog_factor(A2, beta, -1, deg)
    result = psi * TorusSeries.monomial(A2, deg, gamma) * inv
    assert result.terms
    for vec, num in result.terms.items():
        diff = tuple(v - g for v, g in zip(vec, gamma))
        k = sum(diff) // sum(beta)
        assert diff == tuple(k * x for x in beta)
        assert _divides(qdilog.denominator(sum(vec)), num), vec


def test_functional_equation():
    # Psi(q y) = (1 + s y) Psi(y) fixes every coefficient of Psi and of its inverse.
    deg = 8
    psi = qdilog.dilog_factor(RANK1, (1,), 1, deg)
    inv = qdilog.dilog_factor(RANK1, (1,), -1, deg)
    for k in range(1, deg + 1):
        num, den = psi.coefficient((k,))
        prev, prev_den = psi.coefficient((k - 1,))
        # (q^k - 1) c_k = s c_(k-1)
        assert num * ZPoly({2 * k: 1, 0: -1}) * prev_den == ZPoly.monomial(1) * prev * den
        num, den = inv.coefficient((k,))
        prev, prev_den = inv.coefficient((k - 1,))
        # (1 - q^k) d_k = s q^(k-1) d_(k-1)
        assert num * ZPoly({2 * k: -1, 0: 1}) * prev_den == ZPoly.monomial(2 * k - 1) * prev * den
