"""
From a matrix pair to cluster dynamics.

The vertices are R = {(i, p) : 0 <= p < r_i}, the exchange matrix is

    B_(i,p)(j,q) = -n_ij;p-q + n_ji;q-p
                   + sum_k sum_{v=0..min(p,q)} (n+_ik;p-v n-_jk;q-v - n-_ik;p-v n+_jk;q-v)

the permutation is nu(i, p) = (i, p - 1) with nu(i, 0) = (i, r_i - 1) and the
front is {(i, 0)}. One step of the evolution is y(u+1) = nu(mu_front(y(u))),
and Y_i(u) = y_(i,0)(u) solves

    Y_i(u) Y_i(u - r_i) = prod_j prod_p Y_j(u - p)^[n_ij;p]+ (1 + Y_j(u - p))^-n_ij;p
"""
from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import permutations

import networkx as nx
from networkx.algorithms import isomorphism

from yrun import polymat, seed as seeds
from yrun.semifield import make_backend, RatFun
from yrun.seed import YSeed, vertex_name
from yrun.utils import logger, progress, PropertyError, ResourceError, ValidationError

# Default search bound when nothing better is known.
SEARCH_BOUND = 200

# Largest mutation class explored when naming a cluster type.
CLASS_CAP = 5000


@dataclass(frozen=True)
class QuiverData:
    """
    Vertex set, exchange matrix, permutation and mutation front of a pair.
    """
    pair: polymat.MatrixPair
    vertices: tuple
    b: tuple
    nu: tuple
    front: tuple

    @property
    def nu_map(self):
        return dict(zip(self.vertices, self.nu))

    @property
    def nu_inverse(self):
        return {w: v for v, w in zip(self.vertices, self.nu)}

    def entry(self, v, w):
        return self.b[self.vertices.index(v)][self.vertices.index(w)]

    def arrows(self):
        return seeds.arrows(self.vertices, self.b)


def _split_coefficients(datum):
    plus, minus = defaultdict(int), defaultdict(int)
    for key, v in datum.n:
        if v > 0:
            plus[key] = v
        else:
            minus[key] = -v
    return plus, minus


def exchange_matrix(datum):
    """
    The exchange matrix B over R from (r, n).
    """
    signed = dict(datum.n)
    plus, minus = _split_coefficients(datum)
    vertices = [(i, p) for i, size in zip(datum.labels, datum.r) for p in range(size)]

    def n(i, j, p):
        return signed.get((i, j, p), 0) if p >= 0 else 0

    def entry(i, p, j, q):
        value = -n(i, j, p - q) + n(j, i, q - p)
        for k in datum.labels:
            for v in range(min(p, q) + 1):
                value += plus[(i, k, p - v)] * minus[(j, k, q - v)]
                value -= minus[(i, k, p - v)] * plus[(j, k, q - v)]
        return value

    b = [[entry(i, p, j, q) for (j, q) in vertices] for (i, p) in vertices]
    return tuple(vertices), seeds.freeze(b)


def build(pair):
    """
    The quiver data (R, B, nu, front) of a symplectic pair.
    """
    datum = polymat.matrices_to_ydatum(pair)
    if not polymat.check_symplectic(pair):
        raise PropertyError("symplectic property fails")

    vertices, b = exchange_matrix(datum)
    r = dict(zip(datum.labels, datum.r))
    nu = tuple((i, p - 1) if p > 0 else (i, r[i] - 1) for (i, p) in vertices)
    front = tuple(v for v in vertices if v[1] == 0)

    quiver = QuiverData(pair=pair, vertices=vertices, b=b, nu=nu, front=front)

    if not seeds.is_skew(b):
        raise PropertyError("internal inconsistency: B is not skew-symmetric")

    # Mutating the front then relabeling must give B back.
    trial = YSeed(vertices=vertices, b=b, y=(None,) * len(vertices))
    try:
        trial = _mutate_matrix_only(trial, front)
    except ValidationError:
        raise PropertyError("internal inconsistency: the front has adjacent vertices")
    trial = seeds.apply_permutation(trial, quiver.nu_map)
    if trial.b != b:
        raise PropertyError("internal inconsistency: nu(mu_front(B)) differs from B")

    logger.debug(f"built quiver with {len(vertices)} vertices and {len(quiver.arrows())} arrows")

    return quiver


def _mutate_matrix_only(seed, vertices):
    for a, v in enumerate(vertices):
        for w in vertices[a + 1:]:
            if seed.entry(v, w):
                raise ValidationError(f"vertices {vertex_name(v)} and {vertex_name(w)} are adjacent")
    b = seed.b
    for v in vertices:
        b = seeds.freeze(seeds.mutate_matrix(b, seed.vertices.index(v)))
    return YSeed(vertices=seed.vertices, b=b, y=seed.y)


def initial_seed(quiver, backend="trop", values=None, rng=None):
    """
    The seed (B, y) with generators of the chosen semifield.
    """
    field_ = make_backend(backend, quiver.vertices, values=values, rng=rng)
    return YSeed(vertices=quiver.vertices, b=quiver.b, y=tuple(field_.generators()))


def step(quiver, seed):
    """
    One step forward: nu after mutating the front.
    """
    if seed.b != quiver.b:
        raise ValidationError("seed exchange matrix differs from the quiver")
    seed = seeds.mutate_set(seed, quiver.front)
    seed = seeds.apply_permutation(seed, quiver.nu_map)
    if seed.b != quiver.b:
        raise PropertyError("internal inconsistency: step changed the exchange matrix")
    return seed


def unstep(quiver, seed):
    """
    One step backward: mutating the front after undoing nu.
    """
    if seed.b != quiver.b:
        raise ValidationError("seed exchange matrix differs from the quiver")
    seed = seeds.apply_permutation(seed, quiver.nu_inverse)
    return seeds.mutate_set(seed, quiver.front)


@dataclass
class EvolutionTrace:
    """
    Seeds y(u) for u = start, start + 1, ...
    """
    backend: str
    start: int
    seeds: list = field(default_factory=list)

    @property
    def window(self):
        return range(self.start, self.start + len(self.seeds))

    def at(self, u):
        return self.seeds[u - self.start]


def evolve(quiver, seed, steps, backend=None):
    """
    Runs the evolution for a signed number of steps starting at u = 0.
    """
    backend = backend or _backend_of(seed)
    move = step if steps >= 0 else unstep
    chain = [seed]
    for _ in progress(range(abs(steps)), desc="evolve"):
        chain.append(move(quiver, chain[-1]))
    if steps < 0:
        chain.reverse()
    return EvolutionTrace(backend=backend, start=min(0, steps), seeds=chain)


def _backend_of(seed):
    sample = seed.y[0] if seed.y else None
    if isinstance(sample, RatFun):
        return "ratfun"
    if hasattr(sample, "exps"):
        return "trop"
    return "posrat"


def extract_Y(trace):
    """
    Y_i(u) = y_(i,0)(u) over the window of the trace.
    """
    if not trace.seeds:
        raise ValidationError("empty trace")
    first = trace.seeds[0]
    labels = [v[0] for v in first.vertices if v[1] == 0]
    found = {}
    for u in trace.window:
        current = trace.at(u)
        for i in labels:
            found[(i, u)] = current.value((i, 0))
    return found


def _window(Y):
    times = sorted({u for (_, u) in Y})
    return times[0], times[-1]


def _same(a, b):
    return a == b


def check_y_system(pair, Y, window=None):
    """
    True when the family Y satisfies the Y-system at every (i, u) the window allows.
    """
    datum = polymat.matrices_to_ydatum(pair)
    lo, hi = window or _window(Y)
    rows = defaultdict(list)
    for (i, j, p), v in datum.n:
        rows[i].append((j, p, v))

    checked = 0
    for i, size in zip(datum.labels, datum.r):
        for u in range(lo + size, hi + 1):
            left = Y[(i, u)] * Y[(i, u - size)]
            right = left ** 0
            for j, p, v in rows[i]:
                value = Y[(j, u - p)]
                right = right * value ** max(v, 0) * (1 + value) ** (-v)
            checked += 1
            if not _same(left, right):
                logger.debug(f"Y-system fails at ({i},{u})")
                return False

    if not checked:
        raise ValidationError(f"window {lo}..{hi} is too small for r = {list(datum.r)}")

    return True


def normalize_multiplicative(Y):
    """
    The normalized pair P+ = Y/(1+Y), P- = 1/(1+Y).
    """
    plus = {key: value / (1 + value) for key, value in Y.items()}
    minus = {key: 1 / (1 + value) for key, value in Y.items()}
    return plus, minus


def denormalize(plus, minus):
    return {key: plus[key] / minus[key] for key in plus}


def check_multiplicative(pair, plus, minus, window=None):
    """
    True when prod P+_j(u-p)^a+_ij;p = prod P-_j(u-p)^a-_ij;p wherever the window allows.
    """
    lo, hi = window or _window(plus)
    size = pair.rank
    checked = 0
    for a in range(size):
        i = pair.labels[a]
        reach = pair.plus[a][a].degree()
        for u in range(lo + reach, hi + 1):
            sides = []
            for mat, values in ((pair.plus, plus), (pair.minus, minus)):
                total = 1
                for c in range(size):
                    j = pair.labels[c]
                    for p, coeff in mat[a][c].terms.items():
                        total = total * values[(j, u - p)] ** coeff
                sides.append(total)
            checked += 1
            if not _same(*sides):
                return False
    if not checked:
        raise ValidationError(f"window {lo}..{hi} is too small")
    return True


@dataclass(frozen=True)
class Reddening:
    h_plus: object = None
    h_minus: object = None


def _first_red(quiver, move, u_max):
    current = initial_seed(quiver, "trop")
    for u in range(1, u_max + 1):
        current = move(quiver, current)
        if seeds.c_matrix(current).is_red():
            return u, current
    return None, None


def find_reddening(pair, u_max=SEARCH_BOUND):
    """
    The least u with all tropical exponents of y(u) (resp. y(-u)) nonpositive.
    """
    quiver = pair if isinstance(pair, QuiverData) else build(pair)
    h_plus, _ = _first_red(quiver, step, u_max)
    h_minus, _ = _first_red(quiver, unstep, u_max)
    return Reddening(h_plus=h_plus, h_minus=h_minus)


def permutation_at_reddening(pair, u_max=SEARCH_BOUND):
    """
    Bijections sigma, sigma' with y_v(h+) = 1/y_sigma(v) and y_v(-h-) = 1/y_sigma'(v) in the tropical semifield.
    """
    quiver = pair if isinstance(pair, QuiverData) else build(pair)
    found = []
    for move, name in ((step, "h+"), (unstep, "h-")):
        u, current = _first_red(quiver, move, u_max)
        if u is None:
            raise ValidationError(f"no reddening within {u_max} steps ({name})")
        sigma = seeds.c_matrix(current).minus_permutation()
        if sigma is None:
            raise PropertyError(f"C-matrix at {name}={u} is not minus a permutation matrix")
        found.append(sigma)
    return tuple(found)


@dataclass(frozen=True)
class Period:
    omega: object = None
    tropical: object = None
    bound: int = 0

    @property
    def confirmed(self):
        return self.omega is not None


def _same_seed(first, second):
    return all(_same(a, b) for a, b in zip(first.y, second.y))


def tropical_period(quiver, u_max=SEARCH_BOUND):
    """
    The least u with y(u) = y(0) in the tropical semifield, None within u_max.
    """
    start = initial_seed(quiver, "trop")
    current = start
    for u in range(1, u_max + 1):
        current = step(quiver, current)
        if current.y == start.y:
            return u
    return None


def find_period(pair, u_max=None):
    """
    The least period of the universal solution within u_max.

    The tropical period comes first, the rational function backend then
    confirms one of its multiples exactly.
    """
    quiver = pair if isinstance(pair, QuiverData) else build(pair)

    if u_max is None:
        red = find_reddening(quiver)
        if red.h_plus is None or red.h_minus is None:
            raise ValidationError("no reddening found, a search bound is required")
        u_max = 4 * (red.h_plus + red.h_minus)

    tropical = tropical_period(quiver, u_max)
    if tropical is None:
        return Period(bound=u_max)

    start = initial_seed(quiver, "ratfun")
    current = start
    for u in progress(range(1, u_max + 1), desc="period"):
        current = step(quiver, current)
        if u % tropical == 0 and _same_seed(current, start):
            return Period(omega=u, tropical=tropical, bound=u_max)

    logger.info(f"tropical period {tropical} not confirmed within {u_max} steps")
    return Period(tropical=tropical, bound=u_max)


def to_dot(quiver, name="quiver"):
    """
    Graphviz text of the quiver, front vertices drawn as boxes.
    """
    lines = [f"digraph {name} {{"]
    for v in quiver.vertices:
        shape = "box" if v in quiver.front else "ellipse"
        lines.append(f'  "{vertex_name(v)}" [shape={shape}];')
    for v, w, m in quiver.arrows():
        label = f' [label="{m}"]' if m > 1 else ""
        lines.append(f'  "{vertex_name(v)}" -> "{vertex_name(w)}"{label};')
    lines.append("}")
    return "\n".join(lines)


def _digraph(vertices, matrix, subset=None):
    subset = set(vertices) if subset is None else set(subset)
    graph = nx.DiGraph()
    graph.add_nodes_from(v for v in vertices if v in subset)
    for v, w, m in seeds.arrows(vertices, matrix):
        if v in subset and w in subset:
            graph.add_edge(v, w, mult=m)
    return graph


def _restrict(vertices, matrix, subset):
    idx = [vertices.index(v) for v in subset]
    return tuple(subset), seeds.freeze([[matrix[a][c] for c in idx] for a in idx])


def _mutate_at(vertices, matrix, chosen):
    for v in chosen:
        matrix = seeds.freeze(seeds.mutate_matrix(matrix, vertices.index(v)))
    return matrix


@dataclass(frozen=True)
class SliceCycle:
    """
    A nu-cycle of components C_0 -> C_1 -> ... -> C_0 with the front part mutated in each.
    """
    components: tuple
    mutated: tuple


@dataclass(frozen=True)
class SliceDecomposition:
    quiver: QuiverData
    cycles: tuple

    @property
    def components(self):
        return [comp for cycle in self.cycles for comp in cycle.components]

    @property
    def t(self):
        return len(self.components)


def decompose_slices(pair):
    """
    Connected components of the quiver and the cyclic chain nu carries them along.
    """
    if polymat.is_decomposable(pair):
        raise ValidationError("pair is decomposable, split it first")

    quiver = build(pair)
    graph = nx.Graph()
    graph.add_nodes_from(quiver.vertices)
    graph.add_edges_from((v, w) for v, w, _ in quiver.arrows())

    order = {v: k for k, v in enumerate(quiver.vertices)}
    comps = [tuple(sorted(c, key=order.get)) for c in nx.connected_components(graph)]
    owner = {v: k for k, comp in enumerate(comps) for v in comp}
    nu = quiver.nu_map

    seen, cycles = set(), []
    starts = sorted(range(len(comps)), key=lambda k: _start_key(comps[k], quiver.front, order))
    for first in starts:
        if first in seen:
            continue
        members, mutated, current = [], [], first
        while current not in seen:
            seen.add(current)
            comp = comps[current]
            members.append(comp)
            mutated.append(tuple(v for v in quiver.front if v in comp))
            image = {nu[v] for v in comp}
            target = owner[next(iter(image))]
            if set(comps[target]) != image:
                raise PropertyError("internal inconsistency: nu does not map components to components")
            current = target
        if current != first:
            raise PropertyError("internal inconsistency: components do not close into a cycle")
        cycles.append(SliceCycle(components=tuple(members), mutated=tuple(mutated)))

    return SliceDecomposition(quiver=quiver, cycles=tuple(cycles))


def _start_key(comp, front, order):
    hits = [order[v] for v in comp if v in front]
    return (0, min(hits)) if hits else (1, min(order[v] for v in comp))


@dataclass(frozen=True)
class CycleSignature:
    """
    A slice cycle seen from its first component: base quiver, mutation blocks and monodromy.
    """
    vertices: tuple
    b: tuple
    blocks: tuple
    monodromy: tuple


def _transport(decomposition, cycle):
    """
    Steps of the cycle pulled back to the labels of its first component.
    """
    quiver = decomposition.quiver
    inverse = quiver.nu_inverse
    nu = quiver.nu_map
    base = cycle.components[0]

    sets = []
    for k, chosen in enumerate(cycle.mutated):
        pulled = list(chosen)
        for _ in range(k):
            pulled = [inverse[v] for v in pulled]
        sets.append(tuple(pulled))

    images = {}
    for v in base:
        w = v
        for _ in range(len(cycle.components)):
            w = nu[w]
        images[v] = w

    vertices, b = _restrict(quiver.vertices, quiver.b, base)
    return vertices, b, sets, images


def _normal_blocks(vertices, b, sets):
    """
    Groups commuting mutations into maximal blocks, each moved as early as it may go.
    """
    blocks = []
    for chosen in sets:
        for v in chosen:
            target = len(blocks)
            matrix = b
            states = [b]
            for block in blocks:
                matrix = _mutate_at(vertices, matrix, block)
                states.append(matrix)
            while target > 0:
                before = states[target - 1]
                block = blocks[target - 1]
                if v in block or any(before[vertices.index(v)][vertices.index(w)] for w in block):
                    break
                target -= 1
            if target == len(blocks):
                blocks.append((v,))
            else:
                blocks[target] = blocks[target] + (v,)
    return [tuple(sorted(block, key=vertices.index)) for block in blocks]


def cycle_signatures(decomposition, cycle):
    """
    Signatures of every rotation of a cycle.
    """
    vertices, b, sets, images = _transport(decomposition, cycle)
    steps = [s for s in sets if s]
    monodromy = tuple(images[v] for v in vertices)

    if not steps:
        return [CycleSignature(vertices=vertices, b=b, blocks=(), monodromy=monodromy)]

    inverse = {w: v for v, w in images.items()}
    found = []
    for shift in range(len(steps)):
        # Base quiver after the first shift steps, later steps wrap through the monodromy.
        base = b
        for chosen in steps[:shift]:
            base = _mutate_at(vertices, base, chosen)
        window = steps[shift:] + [tuple(inverse[v] for v in chosen) for chosen in steps[:shift]]
        blocks = _normal_blocks(vertices, base, window)
        found.append(CycleSignature(vertices=vertices, b=base, blocks=tuple(blocks), monodromy=monodromy))
    return found


def _marked_graph(sig):
    graph = _digraph(sig.vertices, sig.b)
    for v in sig.vertices:
        graph.nodes[v]["marks"] = tuple(v in block for block in sig.blocks)
    return graph


def signatures_match(first, second):
    """
    True when a quiver isomorphism carries blocks to blocks and intertwines the monodromies.
    """
    if len(first.vertices) != len(second.vertices) or len(first.blocks) != len(second.blocks):
        return False

    g1, g2 = _marked_graph(first), _marked_graph(second)
    matcher = isomorphism.DiGraphMatcher(
        g1, g2,
        node_match=lambda a, b: a["marks"] == b["marks"],
        edge_match=lambda a, b: a["mult"] == b["mult"],
    )
    pi1 = dict(zip(first.vertices, first.monodromy))
    pi2 = dict(zip(second.vertices, second.monodromy))
    for phi in matcher.isomorphisms_iter():
        if all(phi[pi1[v]] == pi2[phi[v]] for v in first.vertices):
            return True
    return False


def _cycles_match(dec1, cyc1, dec2, cyc2):
    target = cycle_signatures(dec2, cyc2)[0]
    return any(signatures_match(sig, target) for sig in cycle_signatures(dec1, cyc1))


def slices_equivalent(first, second):
    """
    True when both pairs give the same cyclic sequences of component mutations up to relabeling.
    """
    dec1, dec2 = decompose_slices(first), decompose_slices(second)
    if len(dec1.cycles) != len(dec2.cycles):
        return False

    # Matches every cycle of the first with a distinct cycle of the second.
    for order in permutations(range(len(dec2.cycles))):
        pairs = zip(dec1.cycles, (dec2.cycles[k] for k in order))
        if all(_cycles_match(dec1, c1, dec2, c2) for c1, c2 in pairs):
            return True
    return False


def _tree_type(graph):
    size = graph.number_of_nodes()
    if size == 1:
        return "A1"
    if not nx.is_tree(graph):
        return None
    degrees = dict(graph.degree())
    branch = [v for v, d in degrees.items() if d >= 3]
    if not branch:
        return f"A{size}"
    if len(branch) > 1 or degrees[branch[0]] > 3:
        return None
    center = branch[0]
    rest = graph.copy()
    rest.remove_node(center)
    arms = sorted(len(c) for c in nx.connected_components(rest))
    if arms[0] == 1 and arms[1] == 1:
        return f"D{size}"
    if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
        return f"E{size}"
    return None


def cluster_type(vertices, matrix, cap=CLASS_CAP):
    """
    Dynkin type of a connected quiver by exploring its mutation class, None for infinite type.
    """
    vertices = tuple(vertices)
    start = seeds.freeze(matrix)
    found = defaultdict(list)
    queue, named = deque([start]), None

    def remember(b):
        graph = _digraph(vertices, b)
        key = nx.weisfeiler_lehman_graph_hash(graph, edge_attr="mult")
        for other in found[key]:
            if nx.is_isomorphic(graph, other, edge_match=lambda x, y: x["mult"] == y["mult"]):
                return False
        found[key].append(graph)
        return True

    remember(start)
    total = 1
    while queue:
        b = queue.popleft()
        if any(abs(x) > 1 for row in b for x in row):
            return None
        if named is None:
            undirected = nx.Graph(_digraph(vertices, b))
            named = _tree_type(undirected)
        for k in range(len(vertices)):
            nb = seeds.freeze(seeds.mutate_matrix(b, k))
            if remember(nb):
                total += 1
                if total > cap:
                    raise ResourceError(f"mutation class exceeds {cap} quivers")
                queue.append(nb)

    return named


def component_types(decomposition):
    """
    Cluster types of the components, in cycle order.
    """
    quiver = decomposition.quiver
    found = []
    for comp in decomposition.components:
        vertices, b = _restrict(quiver.vertices, quiver.b, comp)
        found.append(cluster_type(vertices, b))
    return found
