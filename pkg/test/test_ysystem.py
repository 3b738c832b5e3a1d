import random
from fractions import Fraction

import pytest

from yrun import classifier, polymat, presets, seed as seeds, ysystem
from yrun.utils import PropertyError, ValidationError

ROWS = sorted(presets.FINITE_TYPE)


@pytest.mark.parametrize("row", ROWS)
def test_arrows(row):
    quiver = ysystem.build(presets.FINITE_TYPE[row])
    found = quiver.arrows()
    assert all(m == 1 for _, _, m in found)
    assert {(v, w) for v, w, _ in found} == set(presets.ARROWS[row])


def test_vertices_and_front(row1):
    quiver = ysystem.build(row1)
    assert quiver.vertices == (("1", 0), ("1", 1), ("2", 0), ("2", 1))
    assert quiver.front == (("1", 0), ("2", 0))
    assert quiver.nu_map[("1", 0)] == ("1", 1)
    assert quiver.nu_map[("1", 1)] == ("1", 0)


def test_build_rejects_non_symplectic(broken):
    with pytest.raises(PropertyError):
        ysystem.build(broken)


@pytest.mark.parametrize("row", ROWS)
def test_reddening(row):
    red = ysystem.find_reddening(presets.FINITE_TYPE[row])
    assert (red.h_plus, red.h_minus) == presets.REDDENING[row]


def test_reddening_permutations(row1):
    sigma, sigma_ = ysystem.permutation_at_reddening(row1)
    quiver = ysystem.build(row1)
    assert set(sigma) == set(quiver.vertices)
    assert set(sigma.values()) == set(quiver.vertices)
    assert set(sigma_.values()) == set(quiver.vertices)


@pytest.mark.parametrize("row", ROWS)
def test_opposite_swaps_reddening(row):
    red = ysystem.find_reddening(polymat.opposite(presets.FINITE_TYPE[row]))
    assert (red.h_minus, red.h_plus) == presets.REDDENING[row]


@pytest.mark.parametrize("name", ["table1:1", "table1:6", "zero"])
def test_red_seeds_invert_a_permutation(name):
    quiver = ysystem.build(presets.resolve(name))
    red = ysystem.find_reddening(quiver)
    sigma, sigma_ = ysystem.permutation_at_reddening(quiver)
    for move, count, perm in ((ysystem.step, red.h_plus, sigma), (ysystem.unstep, red.h_minus, sigma_)):
        current = ysystem.initial_seed(quiver, "trop")
        for _ in range(count):
            current = move(quiver, current)
        for v in quiver.vertices:
            assert current.value(v).exps == tuple(-int(w == perm[v]) for w in quiver.vertices)


def test_red_permutations_of_row6_and_zero():
    red = ysystem.find_reddening(presets.FINITE_TYPE["6"])
    assert (red.h_plus, red.h_minus) == (5, 2)
    sigma, sigma_ = ysystem.permutation_at_reddening(presets.ZERO)
    assert all(v == w for v, w in sigma.items())
    assert all(v == w for v, w in sigma_.items())


def test_zero_pair():
    red = ysystem.find_reddening(presets.ZERO)
    assert (red.h_plus, red.h_minus) == (1, 1)
    found = ysystem.find_period(presets.ZERO)
    assert (found.omega, found.tropical, found.bound) == (2, 2, 8)


def test_step_and_unstep_are_inverse(row1):
    quiver = ysystem.build(row1)
    start = ysystem.initial_seed(quiver, "posrat", values=[1, 2, 3, 4])
    forward = ysystem.step(quiver, start)
    assert ysystem.unstep(quiver, forward) == start
    backward = ysystem.unstep(quiver, start)
    assert ysystem.step(quiver, backward) == start


@pytest.mark.parametrize("row", ["1", "4", "6"])
def test_y_system_holds(row):
    pair = presets.FINITE_TYPE[row]
    quiver = ysystem.build(pair)
    start = ysystem.initial_seed(quiver, "ratfun")
    trace = ysystem.evolve(quiver, start, 6)
    Y = ysystem.extract_Y(trace)
    assert ysystem.check_y_system(pair, Y)


def test_y_system_posrat_backward():
    pair = presets.FINITE_TYPE["5"]
    quiver = ysystem.build(pair)
    values = [Fraction(k + 1, 2) for k in range(len(quiver.vertices))]
    start = ysystem.initial_seed(quiver, "posrat", values=values)
    trace = ysystem.evolve(quiver, start, -8)
    assert list(trace.window) == list(range(-8, 1))
    Y = ysystem.extract_Y(trace)
    assert ysystem.check_y_system(pair, Y)


def test_y_system_detects_wrong_values(row1):
    quiver = ysystem.build(row1)
    start = ysystem.initial_seed(quiver, "posrat", values=[1, 2, 3, 4])
    Y = ysystem.extract_Y(ysystem.evolve(quiver, start, 5))
    Y[("1", 4)] = Y[("1", 4)] + 1
    assert not ysystem.check_y_system(row1, Y)


def test_y_system_window_too_small(row1):
    quiver = ysystem.build(row1)
    start = ysystem.initial_seed(quiver, "posrat", values=[1, 2, 3, 4])
    Y = ysystem.extract_Y(ysystem.evolve(quiver, start, 1))
    with pytest.raises(ValidationError):
        ysystem.check_y_system(row1, Y)


def test_multiplicative_form(row1):
    quiver = ysystem.build(row1)
    start = ysystem.initial_seed(quiver, "posrat", values=[1, 2, 3, 4])
    Y = ysystem.extract_Y(ysystem.evolve(quiver, start, 6))
    plus, minus = ysystem.normalize_multiplicative(Y)
    assert all(plus[k] + minus[k] == 1 for k in Y)
    assert ysystem.denormalize(plus, minus) == Y
    assert ysystem.check_multiplicative(row1, plus, minus)


def test_period_of_row1(row1):
    red = ysystem.find_reddening(row1)
    found = ysystem.find_period(row1)
    assert found.confirmed
    assert found.omega % found.tropical == 0
    assert found.omega <= 4 * (red.h_plus + red.h_minus)


def test_period_bound_too_small(row1):
    found = ysystem.find_period(row1, u_max=1)
    assert not found.confirmed


@pytest.mark.parametrize("row", ROWS)
def test_cluster_types(row):
    dec = ysystem.decompose_slices(presets.FINITE_TYPE[row])
    assert set(ysystem.component_types(dec)) == {presets.CLUSTER_TYPES[row]}


def test_slices_of_row1(row1):
    dec = ysystem.decompose_slices(row1)
    assert dec.t == 2
    assert len(dec.cycles) == 1
    assert dec.cycles[0].mutated == ((("1", 0),), (("2", 0),))


def test_slices_of_row2():
    dec = ysystem.decompose_slices(presets.FINITE_TYPE["2"])
    assert dec.t == 2
    assert len(dec.cycles) == 1
    assert [len(comp) for comp in dec.components] == [4, 4]


def test_slices_of_row4():
    dec = ysystem.decompose_slices(presets.FINITE_TYPE["4"])
    assert dec.t == 1
    assert len(dec.components[0]) == 4


def test_slices_equivalent(row1):
    assert ysystem.slices_equivalent(presets.SLICE_EXAMPLE, row1)
    assert not ysystem.slices_equivalent(presets.FINITE_TYPE["4"], row1)


def test_decomposable_slices():
    pair = polymat.direct_sum(presets.ZERO, polymat.relabel(presets.ZERO, ["2"]))
    with pytest.raises(ValidationError, match="decomposable"):
        ysystem.decompose_slices(pair)


def test_cluster_type_names():
    line = ((0, 1, 0), (-1, 0, 1), (0, -1, 0))
    assert ysystem.cluster_type(("a", "b", "c"), line) == "A3"
    kronecker = ((0, 2), (-2, 0))
    assert ysystem.cluster_type(("a", "b"), kronecker) is None


def test_to_dot(row1):
    text = ysystem.to_dot(ysystem.build(row1))
    assert text.startswith("digraph quiver {")
    assert '"(1,0)" [shape=box];' in text
    assert '"(1,0)" -> "(2,1)";' in text


# Rows whose rational function evolution takes long.
HEAVY = {"2", "3"}


def _marked(rows):
    return [pytest.param(row, marks=pytest.mark.slow) if row in HEAVY else row for row in rows]


@pytest.mark.parametrize("row", _marked(ROWS))
def test_universal_solution(row):
    pair = presets.FINITE_TYPE[row]
    quiver = ysystem.build(pair)
    steps = 2 * max(pair.r) + 4
    trace = ysystem.evolve(quiver, ysystem.initial_seed(quiver, "ratfun"), steps)
    assert ysystem.check_y_system(pair, ysystem.extract_Y(trace))


# Least periods of the universal solution, each equal to its tropical period.
PERIODS = {"1": 10, "4": 12, "5": 8, "6": 7}


@pytest.mark.parametrize("row", _marked(sorted(PERIODS)))
def test_period_values(row):
    found = ysystem.find_period(presets.FINITE_TYPE[row])
    assert (found.omega, found.tropical) == (PERIODS[row], PERIODS[row])


@pytest.mark.parametrize("row", _marked(ROWS))
def test_periods(row):
    pair = presets.FINITE_TYPE[row]
    quiver = ysystem.build(pair)
    h_plus, h_minus = presets.REDDENING[row]
    found = ysystem.find_period(quiver)
    assert found.confirmed
    assert found.omega <= 4 * (h_plus + h_minus)
    # Y-seeds and their C-matrices share the period.
    assert found.omega == found.tropical

    omega = found.omega
    rng = random.Random(7)
    for _ in range(5):
        start = ysystem.initial_seed(quiver, "posrat", rng=rng)
        Y = ysystem.extract_Y(ysystem.evolve(quiver, start, 2 * omega))
        assert all(Y[(i, u + omega)] == Y[(i, u)] for (i, u) in Y if u <= omega)


@pytest.mark.parametrize("row", ROWS)
def test_sign_coherence_until_reddening(row):
    quiver = ysystem.build(presets.FINITE_TYPE[row])
    current = ysystem.initial_seed(quiver, "trop")
    for _ in range(presets.REDDENING[row][0]):
        for v in quiver.front:
            current = seeds.mutate(current, v)
            assert seeds.c_matrix(current).sign_coherent()
        current = seeds.apply_permutation(current, quiver.nu_map)
        assert current.b == quiver.b
    assert seeds.c_matrix(current).is_red()


def test_lifted_pairs_build():
    # Every symplectic pair from the lift search gives a quiver with nu(mu_front(B)) = B.
    found = 0
    for fam in classifier.FAMILIES:
        for pair in classifier.lift_search(fam.shape, r_max=5):
            quiver = ysystem.build(pair)
            assert ysystem.step(quiver, ysystem.initial_seed(quiver, "trop")).b == quiver.b
            found += 1
    assert found > 10


def test_random_family_members_build():
    rng = random.Random(11)
    pool = [
        (fam, base, a, swapped, flipped)
        for fam in classifier.FAMILIES
        for base, a in fam.parameters(12)
        for swapped in (False, True)
        for flipped in (False, True)
    ]
    for fam, base, a, swapped, flipped in rng.sample(pool, 200):
        pair = fam.build(base, a)
        if swapped:
            pair = polymat.permute(pair, tuple(reversed(pair.labels)))
        if flipped:
            pair = polymat.opposite(pair)
        quiver = ysystem.build(pair)
        assert len(quiver.vertices) == sum(pair.r)
        assert ysystem.step(quiver, ysystem.initial_seed(quiver, "trop")).b == quiver.b
