"""
Named matrix pairs and the reference data attached to them.

The six pairs of finite type (up to index permutation, sign change and change
of slices), their opposites, the 1 + z^3 slice example and the trivial rank
one pair. Every pair can be used wherever a pair file is accepted.
"""
import os
from fractions import Fraction

from yrun.polymat import MatrixPair, ZPoly, as_matrix, load_pair, opposite
from yrun.utils import ValidationError

LABELS = ("1", "2")


def _poly(terms):
    return ZPoly(terms) if isinstance(terms, dict) else ZPoly.constant(terms)


def _pair(plus, minus, labels=LABELS):
    conv = lambda mat: as_matrix([[_poly(x) for x in row] for row in mat])
    return MatrixPair(labels=tuple(labels), plus=conv(plus), minus=conv(minus))


# The finite type pairs, keyed by row.
FINITE_TYPE = {
    "1": _pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1}, {0: 1, 2: 1}]],
        minus=[[{0: 1, 2: 1}, 0], [0, {0: 1, 2: 1}]],
    ),
    "2": _pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1, 5: -1}, {0: 1, 6: 1}]],
        minus=[[{0: 1, 2: 1}, 0], [{3: -1}, {0: 1, 6: 1}]],
    ),
    "3": _pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1, 5: -1, 9: -1}, {0: 1, 10: 1}]],
        minus=[[{0: 1, 2: 1}, 0], [{3: -1, 7: -1}, {0: 1, 10: 1}]],
    ),
    "4": _pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1}, {0: 1, 2: 1}]],
        minus=[[{0: 1, 1: -1, 2: 1}, 0], [0, {0: 1, 1: -1, 2: 1}]],
    ),
    "5": _pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1, 2: -1}, {0: 1, 3: 1}]],
        minus=[[{0: 1, 1: -1, 2: 1}, 0], [0, {0: 1, 3: 1}]],
    ),
    "6": _pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1}, {0: 1, 1: -1, 2: 1}]],
        minus=[[{0: 1, 2: 1}, 0], [0, {0: 1, 2: 1}]],
    ),
}

# Reddening lengths (h+, h-) per row.
REDDENING = {
    "1": (3, 2),
    "2": (8, 6),
    "3": (18, 10),
    "4": (3, 3),
    "5": (5, 3),
    "6": (5, 2),
}

# Cluster type of a connected component of the quiver.
CLUSTER_TYPES = {
    "1": "A2",
    "2": "A4",
    "3": "E6",
    "4": "D4",
    "5": "A5",
    "6": "A4",
}

# Arrows (source, target) of the quivers, vertices written as (label, phase).
ARROWS = {
    "1": [
        (("1", 0), ("2", 1)),
        (("2", 0), ("1", 1)),
    ],
    "2": [
        (("1", 0), ("2", 1)), (("2", 3), ("1", 0)), (("1", 0), ("2", 5)), (("2", 1), ("2", 3)),
        (("2", 0), ("1", 1)), (("1", 1), ("2", 2)), (("2", 4), ("1", 1)), (("2", 2), ("2", 4)),
    ],
    "3": [
        (("1", 0), ("2", 1)), (("2", 3), ("1", 0)), (("1", 0), ("2", 5)), (("2", 7), ("1", 0)),
        (("1", 0), ("2", 9)), (("2", 1), ("2", 3)), (("2", 1), ("2", 7)), (("2", 5), ("2", 7)),
        (("2", 0), ("1", 1)), (("1", 1), ("2", 2)), (("2", 4), ("1", 1)), (("1", 1), ("2", 6)),
        (("2", 8), ("1", 1)), (("2", 2), ("2", 4)), (("2", 2), ("2", 8)), (("2", 6), ("2", 8)),
    ],
    # An oriented 4-cycle.
    "4": [
        (("1", 0), ("2", 1)), (("2", 1), ("2", 0)), (("2", 0), ("1", 1)), (("1", 1), ("1", 0)),
    ],
    "5": [
        (("2", 0), ("1", 1)), (("1", 1), ("1", 0)), (("1", 0), ("2", 2)), (("1", 0), ("2", 1)),
        (("2", 1), ("1", 1)),
    ],
    "6": [
        (("1", 0), ("2", 1)), (("2", 0), ("2", 1)), (("2", 0), ("1", 1)),
    ],
}

# The constant -24C of the Nahm sum, keyed by preset name.
NAHM_CONSTANTS = {
    "table1:1": Fraction(4, 5),
    "table1:1op": Fraction(6, 5),
    "table1:2": Fraction(5, 7),
    "table1:2op": Fraction(9, 7),
    "table1:3": Fraction(4, 7),
    "table1:3op": Fraction(10, 7),
    "table1:4": Fraction(1),
    "table1:4op": Fraction(1),
    "table1:5": Fraction(3, 4),
    "table1:5op": Fraction(5, 4),
    "table1:6": Fraction(4, 7),
    "table1:6op": Fraction(10, 7),
}

# Where the Rogers-Ramanujan type identity for each Nahm sum was proved.
NAHM_REFERENCES = {
    "table1:1": "Cherednik-Feigin",
    "table1:1op": "Vlasenko-Zwegers",
    "table1:2": "Wang",
    "table1:2op": "Wang",
    "table1:3": "Andrews",
    "table1:3op": "Wang",
    "table1:4": "Zagier",
    "table1:4op": "Zagier",
    "table1:5": "Wang",
    "table1:5op": "Calinescu-Milas-Penn",
    "table1:6": "Andrews",
    "table1:6op": "Wang",
}

# The slices of row 1 merged into one: r = (3, 3).
SLICE_EXAMPLE = _pair(
    plus=[[{0: 1, 3: 1}, {2: -1}], [{1: -1}, {0: 1, 3: 1}]],
    minus=[[{0: 1, 3: 1}, 0], [0, {0: 1, 3: 1}]],
)

# One index without interaction: Y(u) Y(u - 1) = 1.
ZERO = _pair(plus=[[{0: 1, 1: 1}]], minus=[[{0: 1, 1: 1}]], labels=("1",))


def _build():
    found = {}
    for row, pair in FINITE_TYPE.items():
        found[f"table1:{row}"] = pair
        found[f"table1:{row}op"] = opposite(pair)
    found["slice:1"] = SLICE_EXAMPLE
    found["zero"] = ZERO
    return found


PRESETS = _build()


def row_of(name):
    """
    The finite type row of a preset name, None for other names.
    """
    if not name.startswith("table1:"):
        return None
    row = name.split(":", 1)[1]
    if row.endswith("op"):
        row = row[:-2]
    return row if row in FINITE_TYPE else None


def resolve(name):
    """
    A pair from a preset name or a JSON file path.
    """
    if name in PRESETS:
        return PRESETS[name]

    if not os.path.isfile(name):
        choices = ", ".join(PRESETS)
        raise ValidationError(f"not a preset or a file: {name} (presets: {choices})")

    with open(name) as stream:
        return load_pair(stream.read())
