import json

import pytest

from yrun import polymat, presets
from yrun.polymat import MatrixPair, YDatum, ZPoly, z_integer
from yrun.utils import ValidationError


def test_zpoly_arithmetic():
    z = ZPoly.monomial(1)
    assert (1 + z) * (1 - z) == ZPoly({0: 1, 2: -1})
    assert (z - z) == 0
    assert not (z - z)
    assert (z * z).degree() == 2
    assert ZPoly({-1: 2, 3: 1}).low_degree() == -1


def test_zpoly_text():
    assert str(ZPoly({0: 1, 2: -3})) == "1 - 3z^2"
    assert str(ZPoly({1: -1})) == "-z"
    assert str(ZPoly()) == "0"


def test_zpoly_substitutions():
    p = ZPoly({0: 1, 2: -1, 4: 1})
    assert p.substitute_inverse() == ZPoly({0: 1, -2: -1, -4: 1})
    assert p.shrink(2) == ZPoly({0: 1, 1: -1, 2: 1})
    assert p.shrink(2).stretch(2) == p
    with pytest.raises(ValueError):
        ZPoly({1: 1}).shrink(2)


def test_z_integer():
    assert z_integer(3, 2) == ZPoly({0: 1, 2: 1, 4: 1})
    assert z_integer(0, 2) == 0
    with pytest.raises(ValueError):
        z_integer(-1, 1)


def test_datum_to_matrices(row1):
    datum = YDatum.create(labels=["1", "2"], r={"1": 2, "2": 2}, n={("1", "2", 1): 1, ("2", "1", 1): 1})
    assert polymat.ydatum_to_matrices(datum) == row1
    assert polymat.matrices_to_ydatum(row1) == datum


def test_negative_coefficients_go_to_minus():
    pair = presets.FINITE_TYPE["2"]
    datum = polymat.matrices_to_ydatum(pair)
    assert datum.coefficients()[("2", "1", 3)] == -1
    assert datum.coefficients()[("2", "1", 5)] == 1
    assert datum.r == (2, 6)


def test_support_violation():
    datum = YDatum.create(labels=["1"], r=[2], n={("1", "1", 2): 1})
    found = polymat.violations(datum)
    assert found == ["Eq-Y1 violation at (1,1,2): need 0 < p < r_1=2"]
    with pytest.raises(ValidationError):
        polymat.ydatum_to_matrices(datum)


def test_missing_r():
    with pytest.raises(ValidationError, match="missing"):
        YDatum.create(labels=["1", "2"], r={"1": 2})


def test_presets_are_symplectic():
    for name, pair in presets.PRESETS.items():
        assert polymat.check_symplectic(pair), name


def test_not_symplectic(broken):
    assert not polymat.check_symplectic(broken)
    defect = polymat.symplectic_defect(broken)
    assert defect[0][1] == ZPoly({-1: 1, -3: 1})


def test_opposite(row1):
    op = polymat.opposite(presets.FINITE_TYPE["2"])
    assert polymat.opposite(op) == presets.FINITE_TYPE["2"]
    assert op.plus == presets.FINITE_TYPE["2"].minus


def test_eval_at_one():
    plus, minus = polymat.eval_at_one(presets.FINITE_TYPE["3"])
    assert plus == ((2, -1), (-3, 2))
    assert minus == ((2, 0), (-2, 2))


def test_permute(row1):
    pair = presets.FINITE_TYPE["5"]
    moved = polymat.permute(pair, ["2", "1"])
    assert moved.labels == ("2", "1")
    assert moved.r == (3, 2)
    assert polymat.check_symplectic(moved)
    with pytest.raises(ValidationError):
        polymat.permute(pair, ["1", "3"])


def test_direct_sum_and_split():
    zero = presets.ZERO
    other = polymat.relabel(zero, ["2"])
    total = polymat.direct_sum(zero, other)
    assert total.rank == 2
    assert polymat.is_decomposable(total)
    assert polymat.check_symplectic(total)
    parts = polymat.split(total)
    assert [p.labels for p in parts] == [("1",), ("2",)]
    with pytest.raises(ValidationError):
        polymat.direct_sum(zero, zero)


def test_indecomposable(row1):
    assert not polymat.is_decomposable(row1)


def test_primitive_reduce(row1):
    stretched = MatrixPair(
        labels=row1.labels,
        plus=tuple(tuple(x.stretch(2) for x in row) for row in row1.plus),
        minus=tuple(tuple(x.stretch(2) for x in row) for row in row1.minus),
    )
    assert stretched.r == (4, 4)
    assert polymat.primitive_reduce(stretched) == row1
    assert polymat.primitive_reduce(row1) == row1


def test_canonical_json(row1):
    data = polymat.datum_json(polymat.matrices_to_ydatum(row1))
    assert data == {
        "I": ["1", "2"],
        "r": {"1": 2, "2": 2},
        "n": [dict(i="1", j="2", p=1, v=1), dict(i="2", j="1", p=1, v=1)],
    }
    assert polymat.load_pair(json.dumps(data)) == row1


def test_coefficient_list_form():
    pair = presets.FINITE_TYPE["4"]
    text = json.dumps(polymat.matrices_json(pair))
    assert polymat.load_pair(text) == pair


def test_load_errors():
    with pytest.raises(ValidationError, match="line 1"):
        polymat.load_pair("{ nope")
    with pytest.raises(ValidationError, match="missing field 'r'"):
        polymat.load_pair('{"I": ["1"], "n": []}')
    with pytest.raises(ValidationError, match="expected integer"):
        polymat.load_pair('{"I": ["1"], "r": {"1": "2"}, "n": []}')
    dup = '{"I": ["1"], "r": {"1": 3}, "n": [{"i": "1", "j": "1", "p": 1, "v": 1}, {"i": "1", "j": "1", "p": 1, "v": 2}]}'
    with pytest.raises(ValidationError, match="duplicate"):
        polymat.load_pair(dup)


def test_bad_diagonal():
    pair = presets._pair(plus=[[{0: 1, 1: -1}]], minus=[[{0: 1, 1: 1}]], labels=("1",))
    with pytest.raises(ValidationError, match="diagonal"):
        polymat.matrices_to_ydatum(pair)


def _off_diagonal_perturbations(pair):
    # Shifting n_ij;p (i != j) by delta leaves a nonzero term in the (i,j) entry of the defect.
    datum = polymat.matrices_to_ydatum(pair)
    base = datum.coefficients()
    for i, j in [("1", "2"), ("2", "1")]:
        for p in range(1, datum.r_of(i)):
            for delta in (1, -1, 2, -2):
                n = dict(base)
                n[(i, j, p)] = n.get((i, j, p), 0) + delta
                yield (i, j, p, delta), polymat.ydatum_to_matrices(YDatum.create(datum.labels, datum.r, n))


def test_off_diagonal_perturbations_break_symplecticity():
    rejected = 0
    for row in sorted(presets.FINITE_TYPE):
        for key, pair in _off_diagonal_perturbations(presets.FINITE_TYPE[row]):
            assert not polymat.check_symplectic(pair), (row, key)
            rejected += 1
    assert rejected >= 100


def test_diagonal_perturbation_can_stay_symplectic(row1):
    # n_11;1 = 1 keeps row 1 symplectic.
    datum = polymat.matrices_to_ydatum(row1)
    n = datum.coefficients()
    n[("1", "1", 1)] = 1
    pair = polymat.ydatum_to_matrices(YDatum.create(datum.labels, datum.r, n))
    assert polymat.check_symplectic(pair)
