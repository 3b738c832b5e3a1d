"""
Classification of the rank two pairs of finite type.

The pipeline runs in four stages:

    pair_search     integer pairs A+(1), A-(1) passing positivity, the
                    symplectic property at z = 1 and the ban rules
    lift_to_z       bounded search for the polynomial pairs over each
                    candidate, grouped into parametrized families
    canonicalize    index permutation, sign change and change of slices
    classify        the distinct classes with their reddening lengths
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from itertools import combinations_with_replacement, product

import plac

from yrun import polymat, presets, utils, ysystem
from yrun.polymat import MatrixPair, ZPoly, as_matrix, z_integer
from yrun.utils import logger, PropertyError, ResourceError, ValidationError

# Largest off-diagonal entry tried by the integer search.
SEARCH_TOP = 8

# Default bound on r_i for the lift search.
R_MAX = 12

# Largest number of row configurations tried for one row and one r.
ROW_CAP = 200000

CANONICAL_LABELS = ("1", "2")


def _freeze(mat):
    return tuple(tuple(int(x) for x in row) for row in mat)


def _swap(mat):
    return ((mat[1][1], mat[1][0]), (mat[0][1], mat[0][0]))


def _det(mat):
    return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]


def _offsum(mat):
    return abs(mat[0][1]) + abs(mat[1][0])


@dataclass(frozen=True)
class CandidatePair1:
    """
    The integer matrices A+(1) and A-(1); violation names a ban rule when one applies.
    """
    plus: tuple
    minus: tuple
    violation: str = None

    @classmethod
    def create(cls, plus, minus, violation=None):
        return cls(plus=_freeze(plus), minus=_freeze(minus), violation=violation)

    def key(self):
        """
        The order that picks one representative per orbit.
        """
        flat = lambda m: tuple(x for row in m for x in row)
        return (
            _offsum(self.minus) - _offsum(self.plus),
            abs(self.plus[0][1]) - abs(self.plus[1][0]),
            -self.plus[0][0],
            flat(self.plus), flat(self.minus),
        )

    def orbit(self):
        """
        Images under index swap and sign change, with the transformation (swapped, flipped).
        """
        for swapped, flipped in product((False, True), repeat=2):
            plus, minus = self.plus, self.minus
            if swapped:
                plus, minus = _swap(plus), _swap(minus)
            if flipped:
                plus, minus = minus, plus
            yield (swapped, flipped), CandidatePair1(plus=plus, minus=minus, violation=self.violation)

    def canonical(self):
        return min((c for _, c in self.orbit()), key=CandidatePair1.key)

    def __str__(self):
        return f"A+(1)={[list(r) for r in self.plus]} A-(1)={[list(r) for r in self.minus]}"


def positivity_filter(A):
    """
    Positive trace and determinant.
    """
    return A[0][0] + A[1][1] > 0 and _det(A) > 0


def common_positive_vector(*matrices):
    """
    True when some v = (1, t) with t > 0 has v A > 0 for every matrix.
    """
    lo, hi = Fraction(0), None
    for A in matrices:
        for j in range(2):
            head, tail = A[0][j], A[1][j]
            if tail > 0:
                lo = max(lo, Fraction(-head, tail))
            elif tail < 0:
                bound = Fraction(head, -tail)
                hi = bound if hi is None else min(hi, bound)
            elif head <= 0:
                return False
    return hi is None or lo < hi


def symplectic_at_one(plus, minus):
    """
    A+(1) A-(1)^T is symmetric.
    """
    left = plus[0][0] * minus[1][0] + plus[0][1] * minus[1][1]
    right = plus[1][0] * minus[0][0] + plus[1][1] * minus[0][1]
    return left == right


def _row_violation(d, a, e, b):
    # One row: A+(1) starts (d, -a), A-(1) starts (e, -b).
    if d == 1 and e == 1:
        if a == 1 and b == 1:
            return "both rows (1, -1)"
        if a == 0 or b == 0:
            return "row (1, 0) against a row (1, *)"
        return None
    if a % 2 and b % 2:
        return "odd off-diagonal entries against diagonal 2"
    return None


def ban_check(candidate):
    """
    The ban rule that excludes a candidate, None when no rule applies.
    """
    plus, minus = candidate.plus, candidate.minus
    for i, j in ((0, 1), (1, 0)):
        found = _row_violation(plus[i][i], -plus[i][j], minus[i][i], -minus[i][j])
        if found:
            return f"row {i + 1}: {found}"
    for i, j in ((0, 1), (1, 0)):
        if plus[i][j] == 0 and minus[i][j] == 0:
            return f"triangular: entry ({i + 1},{j + 1}) vanishes in both"
    return None


def _integer_matrices(top):
    for d1, d2 in product((1, 2), repeat=2):
        for x, y in product(range(top + 1), repeat=2):
            A = ((d1, -x), (-y, d2))
            if positivity_filter(A):
                yield A


def pair_search(ban=True, top=SEARCH_TOP):
    """
    Candidates A+(1), A-(1) up to index swap and sign change.

    With ban off, the candidates a ban rule excludes are kept and carry the rule.
    """
    mats = list(_integer_matrices(top))
    found = {}
    for plus, minus in product(mats, repeat=2):
        if not symplectic_at_one(plus, minus):
            continue
        if not common_positive_vector(plus, minus):
            continue
        if not (plus[0][1] or plus[1][0] or minus[0][1] or minus[1][0]):
            # Both diagonal, the pair decomposes.
            continue
        candidate = CandidatePair1.create(plus, minus)
        violation = ban_check(candidate)
        if violation and ban:
            continue
        canon = candidate.canonical()
        found[canon.key()] = CandidatePair1(plus=canon.plus, minus=canon.minus, violation=violation)

    result = [found[k] for k in sorted(found)]
    logger.info(f"pair search kept {len(result)} {utils.plural('candidate', len(result), end='s')}")
    return result


def _binomial(r):
    return ZPoly({0: 1, r: 1})


def chain_pair(n, r, a):
    """
    r = (r, (2n - 1) r) with A+ off-diagonals z^a and z^(r-a)[n]_2r.
    """
    r2 = (2 * n - 1) * r
    plus = [
        [_binomial(r), ZPoly.monomial(a, -1)],
        [-(ZPoly.monomial(r - a) * z_integer(n, 2 * r)), _binomial(r2)],
    ]
    minus = [
        [_binomial(r), 0],
        [-(ZPoly.monomial(2 * r - a) * z_integer(n - 1, 2 * r)), _binomial(r2)],
    ]
    return MatrixPair(labels=CANONICAL_LABELS, plus=as_matrix(plus), minus=as_matrix(minus))


def square_pair(c, a):
    """
    r = (2c, 2c) with A- = diag(1 + z^2c - z^c).
    """
    diag = ZPoly({0: 1, c: -1, 2 * c: 1})
    plus = [[_binomial(2 * c), ZPoly.monomial(a, -1)], [ZPoly.monomial(2 * c - a, -1), _binomial(2 * c)]]
    minus = [[diag, 0], [0, diag]]
    return MatrixPair(labels=CANONICAL_LABELS, plus=as_matrix(plus), minus=as_matrix(minus))


def mixed_pair(c, a):
    """
    r = (2c, 3c).
    """
    plus = [
        [_binomial(2 * c), ZPoly.monomial(a, -1)],
        [ZPoly({2 * c - a: -1, 3 * c - a: -1}), _binomial(3 * c)],
    ]
    minus = [[ZPoly({0: 1, c: -1, 2 * c: 1}), 0], [0, _binomial(3 * c)]]
    return MatrixPair(labels=CANONICAL_LABELS, plus=as_matrix(plus), minus=as_matrix(minus))


def tilted_pair(c, a):
    """
    r = (2c, 2c) with A+ diagonal 1 + z^2c - z^c at the second index.
    """
    plus = [
        [_binomial(2 * c), ZPoly.monomial(a, -1)],
        [ZPoly.monomial(2 * c - a, -1), ZPoly({0: 1, c: -1, 2 * c: 1})],
    ]
    minus = [[_binomial(2 * c), 0], [0, _binomial(2 * c)]]
    return MatrixPair(labels=CANONICAL_LABELS, plus=as_matrix(plus), minus=as_matrix(minus))


@dataclass(frozen=True)
class LiftFamily:
    """
    Pairs builder(base, a) with r = (m1 base, m2 base) and 0 < a < r_1.
    """
    name: str
    shape: CandidatePair1
    builder: object
    factors: tuple
    instances: tuple = ()

    def base_of(self, r):
        m1, m2 = self.factors
        if r[0] % m1 or r[0] // m1 < 1:
            return None
        base = r[0] // m1
        return base if r[1] == m2 * base else None

    def parameters(self, r_max):
        """
        Every (base, a) with both r_i at most r_max.
        """
        m1, m2 = self.factors
        base = 1
        while max(m1, m2) * base <= r_max:
            for a in range(1, m1 * base):
                yield base, a
            base += 1

    def build(self, base, a):
        return self.builder(base, a)

    def match(self, pair):
        """
        The parameters (base, a) of a pair in this family, None otherwise.
        """
        base = self.base_of(pair.r)
        if base is None:
            return None
        corner = pair.plus[0][1].terms
        if len(corner) != 1:
            return None
        (a, coeff), = corner.items()
        if coeff != -1 or not 0 < a < pair.r[0]:
            return None
        built = self.build(base, a)
        if built.plus == pair.plus and built.minus == pair.minus:
            return base, a
        return None

    def verify(self, r_max):
        """
        Parameters in the grid whose pair is not symplectic or has the wrong value at z = 1.
        """
        failed = []
        for base, a in self.parameters(r_max):
            pair = self.build(base, a)
            at_one = CandidatePair1.create(*polymat.eval_at_one(pair))
            if not polymat.check_symplectic(pair) or (at_one.plus, at_one.minus) != (self.shape.plus, self.shape.minus):
                failed.append((base, a))
        return failed

    def with_instances(self, instances):
        return LiftFamily(name=self.name, shape=self.shape, builder=self.builder,
                          factors=self.factors, instances=tuple(instances))


def _shape(plus, minus):
    return CandidatePair1.create(plus, minus)


FAMILIES = (
    LiftFamily("chain-1", _shape(((2, -1), (-1, 2)), ((2, 0), (0, 2))), partial(chain_pair, 1), (1, 1)),
    LiftFamily("chain-2", _shape(((2, -1), (-2, 2)), ((2, 0), (-1, 2))), partial(chain_pair, 2), (1, 3)),
    LiftFamily("chain-3", _shape(((2, -1), (-3, 2)), ((2, 0), (-2, 2))), partial(chain_pair, 3), (1, 5)),
    LiftFamily("square", _shape(((2, -1), (-1, 2)), ((1, 0), (0, 1))), square_pair, (2, 2)),
    LiftFamily("mixed", _shape(((2, -1), (-2, 2)), ((1, 0), (0, 2))), mixed_pair, (2, 3)),
    LiftFamily("tilted", _shape(((2, -1), (-1, 1)), ((2, 0), (0, 2))), tilted_pair, (2, 2)),
)


def family_for(candidate):
    for fam in FAMILIES:
        if (fam.shape.plus, fam.shape.minus) == (candidate.plus, candidate.minus):
            return fam
    return None


def _multisets(size, r):
    return combinations_with_replacement(range(1, r), size)


def _poly(exps):
    terms = {}
    for e in exps:
        terms[e] = terms.get(e, 0) + 1
    return ZPoly(terms)


def row_configurations(candidate, i, r):
    """
    Rows i of A+(z), A-(z) with the given values at z = 1 whose diagonal symplectic entry vanishes.

    Each row is a pair of tuples (A+_ii, A+_ij), (A-_ii, A-_ij).
    """
    j = 1 - i
    plus, minus = candidate.plus, candidate.minus
    sizes = (2 - plus[i][i], -plus[i][j], 2 - minus[i][i], -minus[i][j])
    if any(x < 0 for x in sizes):
        return []

    choices = [list(_multisets(size, r)) for size in sizes]
    total = 1
    for c in choices:
        total *= len(c)
    if total > ROW_CAP:
        raise ResourceError(f"{total} row configurations for row {i + 1} at r={r} exceed {ROW_CAP}")

    found = []
    for pd, po, md, mo in product(*choices):
        if set(pd) & set(md) or set(po) & set(mo):
            continue
        row_plus = (_binomial(r) - _poly(pd), -_poly(po))
        row_minus = (_binomial(r) - _poly(md), -_poly(mo))
        value = sum((p * m.substitute_inverse() for p, m in zip(row_plus, row_minus)), ZPoly())
        if value == value.substitute_inverse():
            found.append((row_plus, row_minus))
    return found


def _assemble(first, second):
    (p0, m0), (p1, m1) = first, second
    plus = [[p0[0], p0[1]], [p1[1], p1[0]]]
    minus = [[m0[0], m0[1]], [m1[1], m1[0]]]
    return MatrixPair(labels=CANONICAL_LABELS, plus=as_matrix(plus), minus=as_matrix(minus))


def lift_search(candidate, r_max=R_MAX):
    """
    Every symplectic pair over the candidate with r_1, r_2 at most r_max.
    """
    rows = [{r: row_configurations(candidate, i, r) for r in range(1, r_max + 1)} for i in range(2)]
    found = []
    for r1, r2 in product(range(1, r_max + 1), repeat=2):
        for first, second in product(rows[0][r1], rows[1][r2]):
            pair = _assemble(first, second)
            if polymat.check_symplectic(pair):
                found.append(pair)
    return found


def lift_to_z(candidate, r_max=R_MAX):
    """
    The families of polynomial pairs over a candidate, with the instances the search found.

    Pairs outside the known families end up in a family named 'unmatched'.
    """
    pairs = lift_search(candidate, r_max=r_max)
    family = family_for(candidate)

    matched, rest = [], []
    for pair in pairs:
        params = family.match(pair) if family else None
        if params is None:
            rest.append(pair)
        else:
            matched.append(params)

    result = []
    if matched:
        result.append(family.with_instances(sorted(matched)))
    if rest:
        logger.info(f"{len(rest)} lifts of {candidate} outside the known families")
        result.append(LiftFamily(name="unmatched", shape=candidate, builder=None, factors=None,
                                 instances=tuple(sorted(rest, key=pair_key))))
    return result


def pair_key(pair):
    """
    Total order on pairs: sum of r, r, canonical text.
    """
    return sum(pair.r), pair.r, polymat.dump_pair(pair)


def _transform(pair, swapped, flipped):
    if swapped:
        pair = polymat.permute(pair, tuple(reversed(pair.labels)))
    if flipped:
        pair = polymat.opposite(pair)
    return polymat.relabel(pair, CANONICAL_LABELS)


def _shape_of(pair):
    return CandidatePair1.create(*polymat.eval_at_one(pair))


def canonical_form(pair):
    """
    The canonical representative and whether a sign change was used to reach it.
    """
    if pair.rank != 2:
        raise ValidationError(f"the classification covers rank 2, got rank {pair.rank}")
    if polymat.is_decomposable(pair):
        raise ValidationError("pair is decomposable, split it first")
    if not polymat.check_symplectic(pair):
        raise PropertyError("symplectic property fails")

    # Orientations reaching the least integer shape.
    options = []
    for swapped, flipped in product((False, True), repeat=2):
        moved = polymat.primitive_reduce(_transform(pair, swapped, flipped))
        options.append((_shape_of(moved).key(), flipped, moved))
    best = min(key for key, _, _ in options)
    options = [(flipped, moved) for key, flipped, moved in options if key == best]

    family = family_for(_shape_of(options[0][1]))
    if family is not None:
        top = sum(options[0][1].r)
        pool = []
        for base, a in family.parameters(top):
            member = family.build(base, a)
            if sum(member.r) <= top:
                pool.append(member)
        pool.sort(key=pair_key)
        for member in pool:
            for flipped, moved in options:
                if member.plus == moved.plus and member.minus == moved.minus:
                    return member, flipped
                if ysystem.slices_equivalent(moved, member):
                    return member, flipped

    flipped, moved = min(options, key=lambda x: pair_key(x[1]))
    return moved, flipped


def canonicalize(pair):
    """
    The canonical representative under index permutation, sign change and change of slices.
    """
    return canonical_form(pair)[0]


@dataclass
class ClassRow:
    """
    One class of the classification.
    """
    pair: MatrixPair
    row: str = None
    h_plus: int = None
    h_minus: int = None
    tropical_period: int = None
    families: list = field(default_factory=list)
    members: int = 0


def _row_of(pair):
    text = polymat.dump_pair(pair)
    for row, ref in presets.FINITE_TYPE.items():
        if polymat.dump_pair(ref) == text:
            return row
    return None


def _lift_job(candidate, r_max):
    try:
        return candidate, lift_to_z(candidate, r_max=r_max), None
    except ResourceError as exc:
        if not candidate.violation:
            raise
        return candidate, [], str(exc)


@dataclass
class Classification:
    r_max: int
    ban: bool
    candidates: list
    lifts: dict
    skipped: dict
    classes: list


def classify(r_max=R_MAX, ban=True, jobs=1):
    """
    The finite type classes: search, lift, canonicalize and measure the reddening.
    """
    candidates = pair_search(ban=ban)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_lift_job, candidates, [r_max] * len(candidates)))
    else:
        results = [_lift_job(c, r_max) for c in utils.progress(candidates, desc="lift search")]

    lifts, skipped = {}, {}
    for candidate, families, reason in results:
        lifts[candidate] = families
        if reason:
            skipped[candidate] = reason

    cache, classes = {}, {}
    for candidate in candidates:
        for fam in lifts[candidate]:
            if fam.builder is None:
                members = list(fam.instances)
            else:
                members = [fam.build(base, a) for base, a in fam.instances]
            for member in utils.progress(members, desc=fam.name):
                reduced = polymat.primitive_reduce(member)
                text = polymat.dump_pair(reduced)
                if text not in cache:
                    cache[text] = canonicalize(reduced)
                canon = cache[text]
                key = polymat.dump_pair(canon)
                entry = classes.setdefault(key, ClassRow(pair=canon))
                entry.members += 1
                if fam.name not in entry.families:
                    entry.families.append(fam.name)

    rows = sorted(classes.values(), key=lambda x: pair_key(x.pair))
    for entry in rows:
        quiver = ysystem.build(entry.pair)
        red = ysystem.find_reddening(quiver)
        entry.h_plus, entry.h_minus = red.h_plus, red.h_minus
        entry.tropical_period = ysystem.tropical_period(quiver)
        entry.row = _row_of(entry.pair)

    logger.info(f"{len(rows)} {utils.plural('class', len(rows))} from {len(candidates)} candidates")

    return Classification(r_max=r_max, ban=ban, candidates=candidates, lifts=lifts,
                          skipped=skipped, classes=rows)


def golden_mismatches(result):
    """
    Differences between the classes and the reference rows.
    """
    found = []
    rows = {entry.row: entry for entry in result.classes if entry.row}
    for row in presets.FINITE_TYPE:
        entry = rows.get(row)
        if entry is None:
            found.append(f"row {row} missing")
        elif (entry.h_plus, entry.h_minus) != presets.REDDENING[row]:
            found.append(f"row {row}: h=({entry.h_plus},{entry.h_minus}) expected {presets.REDDENING[row]}")
    for entry in result.classes:
        if entry.row is None:
            found.append(f"unexpected class r={list(entry.pair.r)}")
    return found


def result_json(result):
    cands = []
    for c in result.candidates:
        fams = result.lifts.get(c, [])
        cands.append(dict(
            A_plus_1=[list(r) for r in c.plus], A_minus_1=[list(r) for r in c.minus],
            banned=c.violation, skipped=result.skipped.get(c),
            lifts={f.name: len(f.instances) for f in fams},
        ))
    classes = []
    for entry in result.classes:
        classes.append(dict(
            row=entry.row, r=list(entry.pair.r), h_plus=entry.h_plus, h_minus=entry.h_minus,
            tropical_period=entry.tropical_period, families=entry.families, members=entry.members,
            pair=polymat.datum_json(polymat.matrices_to_ydatum(entry.pair)),
        ))
    return dict(schema=utils.SCHEMA_VERSION, r_max=result.r_max, ban=result.ban,
                candidates=cands, classes=classes)


def table_lines(result):
    yield "row\tr\th+\th-\tperiod\tfamilies\tA+ / A-"
    for entry in result.classes:
        r = ",".join(str(x) for x in entry.pair.r)
        plus = "; ".join(", ".join(str(x) for x in row) for row in entry.pair.plus)
        minus = "; ".join(", ".join(str(x) for x in row) for row in entry.pair.minus)
        yield (f"{entry.row or '-'}\t{r}\t{entry.h_plus}\t{entry.h_minus}\t{entry.tropical_period}\t"
               f"{','.join(entry.families)}\t[{plus}] / [{minus}]")


@plac.opt('rmax', "largest r_i in the lift search", abbrev='r', type=int)
@plac.opt('jobs', "number of worker processes", abbrev='j', type=int)
@plac.flg('no_ban', "keep the candidates the ban rules exclude", abbrev='n')
@plac.flg('golden', "compare with the reference rows", abbrev='g')
@plac.flg('candidates', "list the integer candidates only", abbrev='c')
@plac.flg('json_', "produce JSON output", abbrev='J')
def run(rmax=R_MAX, jobs=1, no_ban=False, golden=False, candidates=False, json_=False):
    """
    Classifies the rank two pairs of finite type.
    """
    ban = not no_ban

    if candidates:
        for c in pair_search(ban=ban):
            flag = f"\tbanned: {c.violation}" if c.violation else ""
            print(f"{c}{flag}")
        return

    result = classify(r_max=rmax, ban=ban, jobs=jobs)

    if json_:
        print(utils.dumps(result_json(result)))
    else:
        for line in table_lines(result):
            print(line)
        extra = [c for c in result.candidates if c.violation]
        for c in extra:
            lifted = sum(len(f.instances) for f in result.lifts.get(c, []))
            note = result.skipped.get(c, f"{lifted} lifts")
            print(f"# banned {c}: {c.violation} ({note})")

    if golden:
        found = golden_mismatches(result)
        for msg in found:
            logger.error(msg)
        if found:
            raise PropertyError("classification differs from the reference rows")
        print("# matches the reference rows")
