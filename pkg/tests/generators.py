"""Seeded random input builders shared across the test modules.

Everything takes an explicit random.Random so failures reproduce from
the module-level seeds in each test file.  Update sequences are kept
valid by dry-running each candidate against the naive oracle engine,
never against the engines under test.
"""

import random

from quadvc.ast import (
    Add, And, BasicPattern, Bound, Clear, Copy, Create, DeleteInsertWhere,
    DeleteWhere, Drop, Equals, Filter, GraphBlock, InsertWhere, Join, Load,
    Move, Not, Opt, Or, Select, TripleBlock, TriplePattern, Union, Var,
)
from quadvc.model import DEFAULT, Dataset, Iri, Literal, Triple

from oracle import NaiveUpdateError, naive_apply_update

ATOMS = [Iri(f"urn:x:{c}") for c in "abcde"] + [
    Literal("1"), Literal("2"),
    Literal("hello", language="en"),
    Literal("3", datatype="urn:t:int"),
]
GRAPH_NAMES = [Iri("urn:g1"), Iri("urn:g2"), Iri("urn:g3")]
VARS = [Var("x"), Var("y"), Var("z"), Var("w")]


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def atom_pool(rng: random.Random, size: int = 8) -> list:
    return rng.sample(ATOMS, min(size, len(ATOMS)))


def random_triple(rng, pool) -> Triple:
    return Triple(rng.choice(pool), rng.choice(pool), rng.choice(pool))


def random_dataset(rng, pool, max_triples: int = 12, max_named: int = 3) -> Dataset:
    names = rng.sample(GRAPH_NAMES, rng.randint(0, max_named))
    named = {g: set() for g in names}  # drawing no triples leaves it defined but empty
    default = set()
    for _ in range(rng.randint(0, max_triples)):
        slot = rng.randint(0, len(names))
        t = random_triple(rng, pool)
        if slot == 0:
            default.add(t)
        else:
            named[names[slot - 1]].add(t)
    return Dataset(frozenset(default), {g: frozenset(ts) for g, ts in named.items()})


# -- patterns -----------------------------------------------------------

def random_term(rng, pool, vars, p_var: float = 0.45):
    if vars and rng.random() < p_var:
        return rng.choice(vars)
    return rng.choice(pool)


def random_triple_pattern(rng, pool, vars) -> TriplePattern:
    return TriplePattern(random_term(rng, pool, vars),
                         random_term(rng, pool, vars),
                         random_term(rng, pool, vars))


def random_basic(rng, pool, vars, max_blocks: int = 2) -> BasicPattern:
    """Triple/GRAPH block mix; at most three distinct variables so the
    oracle's enumeration stays cheap."""
    vars = rng.sample(vars, min(3, len(vars)))
    blocks = []
    for _ in range(rng.randint(1, max_blocks)):
        triples = tuple(random_triple_pattern(rng, pool, vars)
                        for _ in range(rng.randint(1, 2)))
        if rng.random() < 0.45:
            if vars and rng.random() < 0.3:
                name = rng.choice(vars)
            else:
                name = rng.choice(GRAPH_NAMES)
            if rng.random() < 0.15:
                triples = ()  # empty GRAPH block: pure definedness test
            blocks.append(GraphBlock(name, triples))
        else:
            blocks.append(TripleBlock(triples))
    return BasicPattern(tuple(blocks))


def random_condition(rng, vars, pool, depth: int = 2):
    if depth == 0 or rng.random() < 0.5:
        if vars and rng.random() < 0.4:
            return Bound(rng.choice(vars))
        return Equals(random_term(rng, pool, vars, 0.6),
                      random_term(rng, pool, vars, 0.6))
    pick = rng.random()
    if pick < 0.35:
        return And(random_condition(rng, vars, pool, depth - 1),
                   random_condition(rng, vars, pool, depth - 1))
    if pick < 0.7:
        return Or(random_condition(rng, vars, pool, depth - 1),
                  random_condition(rng, vars, pool, depth - 1))
    return Not(random_condition(rng, vars, pool, depth - 1))


def random_pattern(rng, pool, depth: int = 3):
    if depth == 0 or rng.random() < 0.4:
        return random_basic(rng, pool, VARS)
    pick = rng.random()
    if pick < 0.3:
        return Join(random_pattern(rng, pool, depth - 1),
                    random_pattern(rng, pool, depth - 1))
    if pick < 0.55:
        return Union(random_pattern(rng, pool, depth - 1),
                     random_pattern(rng, pool, depth - 1))
    if pick < 0.8:
        return Opt(random_pattern(rng, pool, depth - 1),
                   random_pattern(rng, pool, depth - 1))
    inner = random_pattern(rng, pool, depth - 1)
    return Filter(inner, random_condition(rng, VARS, pool))


def random_select(rng, pool, depth: int = 3) -> Select:
    where = random_pattern(rng, pool, depth)
    k = rng.randint(1, len(VARS))
    return Select(tuple(rng.sample(VARS, k)), where)


# -- updates ------------------------------------------------------------

def _ground_template(rng, pool, target, n: int) -> BasicPattern:
    triples = tuple(TriplePattern(rng.choice(pool), rng.choice(pool), rng.choice(pool))
                    for _ in range(n))
    if target is DEFAULT:
        return BasicPattern((TripleBlock(triples),))
    return BasicPattern((GraphBlock(target, triples),))


def _triples_template(target, triples) -> BasicPattern:
    tps = tuple(TriplePattern(t.subject, t.predicate, t.object) for t in triples)
    if target is DEFAULT:
        return BasicPattern((TripleBlock(tps),))
    return BasicPattern((GraphBlock(target, tps),))


def _var_template(target, p, swap: bool = False) -> BasicPattern:
    x, y = Var("x"), Var("y")
    tp = TriplePattern(y, p, x) if swap else TriplePattern(x, p, y)
    if target is DEFAULT:
        return BasicPattern((TripleBlock((tp,)),))
    return BasicPattern((GraphBlock(target, (tp,)),))


def _read_pattern(source, p) -> BasicPattern:
    x, y = Var("x"), Var("y")
    tp = TriplePattern(x, p, y)
    if source is DEFAULT:
        return BasicPattern((TripleBlock((tp,)),))
    return BasicPattern((GraphBlock(source, (tp,)),))


def _existing_triples(state: Dataset, target, rng, k: int) -> list:
    content = state.default if target is DEFAULT else state.named.get(target, frozenset())
    if not content:
        return []
    return rng.sample(sorted(content, key=repr), min(k, len(content)))


def _candidate_update(rng, pool, state: Dataset):
    targets = GRAPH_NAMES + [DEFAULT]
    target = rng.choice(targets)
    named_only = rng.choice(GRAPH_NAMES)
    preds = [a for a in pool if isinstance(a, Iri)] or [Iri("urn:x:p")]
    verb = rng.random()
    if verb < 0.08:
        return Create(named_only)
    if verb < 0.14:
        return Drop(named_only)
    if verb < 0.22:
        return Clear(target)
    if verb < 0.30:
        return rng.choice([Load, Add])(rng.choice(targets), target)
    if verb < 0.38:
        src = rng.choice(targets)
        if rng.random() < 0.5:
            u: object = Copy(src, target)
        else:
            if src is DEFAULT:
                src = named_only
            u = Move(src, target)
        if (src == target and target is not DEFAULT
                and target not in state.named):
            # a self-copy of an untracked graph is a valid update but has
            # no chain to append its provenance record to; substitute
            return Create(target)
        return u
    # deletes on an undefined graph are no-ops to the update engine but
    # unrecordable (no chain), so retarget them at the default graph
    delete_target = target
    if delete_target is not DEFAULT and delete_target not in state.named:
        delete_target = DEFAULT
    if verb < 0.56:
        return InsertWhere(_ground_template(rng, pool, target, rng.randint(1, 2)),
                           BasicPattern())
    if verb < 0.68:
        picked = _existing_triples(state, delete_target, rng, rng.randint(1, 2))
        if not picked:
            picked = [random_triple(rng, pool)]
        return DeleteWhere(_triples_template(delete_target, picked), BasicPattern())
    if verb < 0.80:
        p = rng.choice(preds)
        source = rng.choice(targets)
        if target is not DEFAULT and target not in state.named:
            # an insert that lands no triples must not address an
            # undefined graph: the engine leaves it undefined while the
            # history layer would still open a chain for it
            content = (state.default if source is DEFAULT
                       else state.named.get(source, frozenset()))
            if not any(t.predicate == p for t in content):
                return InsertWhere(_ground_template(rng, pool, target, 1),
                                   BasicPattern())
        return InsertWhere(_var_template(target, p), _read_pattern(source, p))
    if verb < 0.90:
        return DeleteWhere(_var_template(delete_target, rng.choice(preds)),
                           _read_pattern(rng.choice(targets), rng.choice(preds)))
    p = rng.choice(preds)
    return DeleteInsertWhere(_var_template(delete_target, p),
                             _var_template(delete_target, p, swap=True),
                             _read_pattern(delete_target, p))


def random_update_sequence(rng, pool, length: int, initial: Dataset = Dataset()):
    """`length` updates that all succeed, checked by dry-running the
    oracle.  Returns (updates, oracle snapshots including the initial)."""
    updates = []
    snaps = [initial]
    while len(updates) < length:
        for _ in range(30):
            u = _candidate_update(rng, pool, snaps[-1])
            try:
                after = naive_apply_update(u, snaps[-1])
            except NaiveUpdateError:
                continue
            break
        else:
            u = InsertWhere(_ground_template(rng, pool, DEFAULT, 1), BasicPattern())
            after = naive_apply_update(u, snaps[-1])
        updates.append(u)
        snaps.append(after)
    return updates, snaps
