"""
Subcommands over a single pair: validate, report, evolve, reddening and period.

A pair is a preset name (see yrun.presets) or a JSON file.
"""
import random

import pandas as pd
import plac

from yrun import nahm, polymat, presets, qdilog, utils, ysystem
from yrun.seed import arrow_lines, vertex_name
from yrun.semifield import BACKENDS
from yrun.utils import logger, PropertyError, ResourceError, ValidationError


def validate_pair(name):
    """
    The pair behind a name once it parses and is symplectic.
    """
    pair = presets.resolve(name)
    if not polymat.check_symplectic(pair):
        raise PropertyError("symplectic property fails")
    return pair


@plac.pos('pair', "preset name or pair file")
def validate(pair):
    """
    Checks that a pair is a valid symplectic Y-datum.
    """
    value = validate_pair(pair)
    datum = polymat.matrices_to_ydatum(value)
    r = ",".join(f"{i}:{x}" for i, x in zip(datum.labels, datum.r))
    print(f"valid\tr={r}\tterms={len(datum.n)}")


def build_report(name, degree=4, period=True, dilog=True):
    """
    Everything the engine knows about one pair, as a JSON ready dictionary.
    """
    pair = validate_pair(name)
    quiver = ysystem.build(pair)
    red = ysystem.find_reddening(quiver)

    data = dict(
        schema=utils.SCHEMA_VERSION,
        pair=polymat.datum_json(polymat.matrices_to_ydatum(pair)),
        matrices=polymat.matrices_json(pair),
        quiver=dict(
            vertices=[vertex_name(v) for v in quiver.vertices],
            front=[vertex_name(v) for v in quiver.front],
            arrows=arrow_lines(quiver.vertices, quiver.b),
        ),
        h_plus=red.h_plus,
        h_minus=red.h_minus,
    )

    op = ysystem.find_reddening(polymat.opposite(pair))
    data["h_op"] = [op.h_plus, op.h_minus]

    if not polymat.is_decomposable(pair):
        dec = ysystem.decompose_slices(pair)
        data["components"] = dec.t
        try:
            data["cluster_types"] = ysystem.component_types(dec)
        except ResourceError as exc:
            logger.info(f"cluster types skipped: {exc}")
            data["cluster_types"] = None

    try:
        K = nahm.compute_K(pair)
        data["K"] = K.text()
        data["K_symmetric"] = K.is_symmetric()
        data["K_positive_definite"] = K.is_positive_definite()
    except ValidationError as exc:
        data["K"] = None
        logger.info(f"K skipped: {exc}")

    if name in presets.NAHM_CONSTANTS:
        data["minus_24C"] = presets.NAHM_CONSTANTS[name]

    if period and red.h_plus is not None and red.h_minus is not None:
        found = ysystem.find_period(quiver)
        data["period"] = found.omega
        data["tropical_period"] = found.tropical

    if dilog and red.h_plus is not None and red.h_minus is not None:
        result = qdilog.compare(quiver, degree)
        data["qdilog"] = dict(degree=degree, holds=result.holds,
                              difference=list(result.difference) if result.difference else None)

    return data


@plac.pos('pair', "preset name or pair file")
@plac.opt('degree', "truncation degree of the dilogarithm check", abbrev='d', type=int)
@plac.flg('no_period', "skip the exact period search", abbrev='P')
@plac.flg('no_qdilog', "skip the quantum dilogarithm check", abbrev='Q')
@plac.flg('dot', "print the quiver in Graphviz format", abbrev='D')
def report(pair, degree=4, no_period=False, no_qdilog=False, dot=False):
    """
    Produces the JSON report of a pair: quiver, reddening, period, K and identities.
    """
    if dot:
        print(ysystem.to_dot(ysystem.build(validate_pair(pair))))
        return
    data = build_report(pair, degree=degree, period=not no_period, dilog=not no_qdilog)
    print(utils.dumps(data))


@plac.pos('pair', "preset name or pair file")
@plac.opt('steps', "number of steps, negative for backward", abbrev='s', type=int)
@plac.opt('backend', "semifield: trop, posrat or ratfun", abbrev='b', choices=BACKENDS)
@plac.flg('check', "check the Y-system over the computed window", abbrev='c')
@plac.flg('json_', "produce JSON output", abbrev='j')
def evolve(pair, steps=6, backend="trop", check=False, json_=False):
    """
    Prints Y_i(u) along the evolution.
    """
    value = validate_pair(pair)
    quiver = ysystem.build(value)
    rng = random.Random(utils.SEED)
    start = ysystem.initial_seed(quiver, backend, rng=rng)
    trace = ysystem.evolve(quiver, start, steps, backend=backend)
    Y = ysystem.extract_Y(trace)

    labels = list(value.labels)
    if json_:
        rows = [dict(u=u, **{i: str(Y[(i, u)]) for i in labels}) for u in trace.window]
        print(utils.dumps(dict(schema=utils.SCHEMA_VERSION, backend=backend, Y=rows)))
    else:
        table = pd.DataFrame([[u] + [str(Y[(i, u)]) for i in labels] for u in trace.window],
                             columns=["u"] + [f"Y_{i}" for i in labels])
        print(table.to_string(index=False))

    if check:
        if not ysystem.check_y_system(value, Y):
            raise PropertyError("the values do not satisfy the Y-system")
        print("# Y-system holds")


@plac.pos('pair', "preset name or pair file")
@plac.opt('umax', "search bound", abbrev='u', type=int)
def reddening(pair, umax=ysystem.SEARCH_BOUND):
    """
    Finds the reddening lengths h+ and h- and the permutations they induce.
    """
    value = validate_pair(pair)
    quiver = ysystem.build(value)
    red = ysystem.find_reddening(quiver, u_max=umax)
    print(f"h+={red.h_plus}\th-={red.h_minus}")
    if red.h_plus is None or red.h_minus is None:
        raise ResourceError(f"no reddening within {umax} steps")
    sigma, sigma_ = ysystem.permutation_at_reddening(quiver, u_max=umax)
    for name, perm in (("sigma+", sigma), ("sigma-", sigma_)):
        text = " ".join(f"{vertex_name(v)}->{vertex_name(w)}" for v, w in perm.items())
        print(f"{name}\t{text}")


@plac.pos('pair', "preset name or pair file")
@plac.opt('umax', "search bound, defaults to 4(h+ + h-)", abbrev='u', type=int)
def period(pair, umax=0):
    """
    Finds the period of the universal solution.
    """
    value = validate_pair(pair)
    found = ysystem.find_period(value, u_max=umax or None)
    print(f"period={found.omega}\ttropical={found.tropical}\tbound={found.bound}")
    if not found.confirmed:
        raise ResourceError(f"no period confirmed within {found.bound} steps")
