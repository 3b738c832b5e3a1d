"""
Y-seeds (B, y) and their mutations.

    B'_ij = -B_ij                                    if i = k or j = k
    B'_ij = B_ij + [-B_ik]+ B_kj + B_ik [B_kj]+      otherwise

    y'_k = 1/y_k
    y'_i = y_i * y_k^[B_ki]+ * (1 + y_k)^-B_ki       for i != k
"""
from dataclasses import dataclass

import numpy as np

from yrun.semifield import TropicalElem
from yrun.utils import PropertyError, ValidationError


def vertex_name(vertex):
    """
    Formats an (index, phase) vertex as (i,p).
    """
    if isinstance(vertex, tuple):
        return "(" + ",".join(str(x) for x in vertex) + ")"
    return str(vertex)


def freeze(matrix):
    return tuple(tuple(int(x) for x in row) for row in matrix)


def mutate_matrix(matrix, k):
    """
    Matrix mutation at the position k.
    """
    b = np.array(matrix, dtype=object)
    col, row = b[:, k], b[k, :]
    pos = lambda x: np.array([max(v, 0) for v in x], dtype=object)
    bp = b + np.outer(pos(-col), row) + np.outer(col, pos(row))
    bp[k, :] = -b[k, :]
    bp[:, k] = -b[:, k]
    return bp


def is_skew(matrix):
    b = np.array(matrix, dtype=object)
    return bool((b == -b.T).all())


@dataclass(frozen=True)
class YSeed:
    """
    An exchange matrix over a vertex tuple together with one y-value per vertex.
    """
    vertices: tuple
    b: tuple
    y: tuple

    def index(self, vertex):
        try:
            return self.vertices.index(vertex)
        except ValueError:
            raise ValidationError(f"unknown vertex: {vertex_name(vertex)}")

    def value(self, vertex):
        return self.y[self.index(vertex)]

    def entry(self, v, w):
        return self.b[self.index(v)][self.index(w)]

    def matrix(self):
        return np.array(self.b, dtype=object)


def mutate(seed, k):
    """
    The mutation at the vertex k, a new seed.
    """
    idx = seed.index(k)
    column = [row[idx] for row in seed.b]

    bp = mutate_matrix(seed.b, idx)
    if not is_skew(bp):
        raise PropertyError(f"mutation at {vertex_name(k)} broke skew-symmetry")

    yk = seed.y[idx]
    values = []
    for pos, yi in enumerate(seed.y):
        if pos == idx:
            values.append(1 / yk)
            continue
        bki = -column[pos]
        if bki == 0:
            values.append(yi)
        else:
            values.append(yi * yk ** max(bki, 0) * (1 + yk) ** (-bki))

    return YSeed(vertices=seed.vertices, b=freeze(bp), y=tuple(values))


def mutate_set(seed, vertices):
    """
    Mutates at pairwise non adjacent vertices, in any order.
    """
    vertices = list(vertices)
    for a, v in enumerate(vertices):
        for w in vertices[a + 1:]:
            if seed.entry(v, w) != 0:
                raise ValidationError(f"vertices {vertex_name(v)} and {vertex_name(w)} are adjacent")
    for v in vertices:
        seed = mutate(seed, v)
    return seed


def apply_permutation(seed, nu):
    """
    Relabels by a bijection: B'_nu(i)nu(j) = B_ij and y'_nu(i) = y_i.
    """
    nu = dict(nu)
    if set(nu) != set(seed.vertices) or set(nu.values()) != set(seed.vertices):
        raise ValidationError("not a bijection on the vertex set")

    pos = [seed.index(nu[v]) for v in seed.vertices]
    size = len(seed.vertices)
    b = [[0] * size for _ in range(size)]
    y = [None] * size
    for a in range(size):
        y[pos[a]] = seed.y[a]
        for c in range(size):
            b[pos[a]][pos[c]] = seed.b[a][c]

    return YSeed(vertices=seed.vertices, b=freeze(b), y=tuple(y))


def inverse_map(nu):
    return {w: v for v, w in nu.items()}


@dataclass(frozen=True)
class CMatrixView:
    """
    Rows are the exponent vectors (c-vectors) of the tropical y-values.
    """
    vertices: tuple
    rows: tuple

    def row(self, vertex):
        return self.rows[self.vertices.index(vertex)]

    def sign_coherent(self):
        return all(all(x >= 0 for x in row) or all(x <= 0 for x in row) for row in self.rows)

    def is_red(self):
        return all(x <= 0 for row in self.rows for x in row)

    def minus_permutation(self):
        """
        The map v -> w when row v is -e_w for every v, otherwise None.
        """
        sigma = {}
        for v, row in zip(self.vertices, self.rows):
            hits = [k for k, x in enumerate(row) if x]
            if len(hits) != 1 or row[hits[0]] != -1:
                return None
            sigma[v] = self.vertices[hits[0]]
        if len(set(sigma.values())) != len(sigma):
            return None
        return sigma


def c_matrix(seed):
    """
    The C-matrix of a tropical seed over the initial vertices.
    """
    if not all(isinstance(x, TropicalElem) for x in seed.y):
        raise ValidationError("the C-matrix needs a tropical seed")
    if any(x.gens != seed.vertices for x in seed.y):
        raise ValidationError("tropical generators differ from the vertex set")
    return CMatrixView(vertices=seed.vertices, rows=tuple(x.exps for x in seed.y))


def arrows(vertices, matrix):
    """
    Arrows (v, w, multiplicity) for every positive entry B_vw.
    """
    found = []
    for a, v in enumerate(vertices):
        for c, w in enumerate(vertices):
            if matrix[a][c] > 0:
                found.append((v, w, int(matrix[a][c])))
    return found


def arrow_lines(vertices, matrix):
    """
    Arrow list as text lines: (i,p) -> (j,q) x1
    """
    return [f"{vertex_name(v)} -> {vertex_name(w)} x{m}" for v, w, m in arrows(vertices, matrix)]


def seed_json(seed):
    """
    Seed dump with the vertex order of the seed.
    """
    return {
        "vertices": [vertex_name(v) for v in seed.vertices],
        "B": [list(row) for row in seed.b],
        "y": [str(x) for x in seed.y],
    }
