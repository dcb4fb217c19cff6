"""Pattern, condition and query evaluation.

A pattern denotes a set of valuations.  For a basic pattern the
denotation is exact-domain: every valuation binds precisely the
pattern's variables, and its instantiation of the pattern must be
contained in the dataset (so a GRAPH block only matches inside a graph
that is actually defined).  Operator patterns combine those sets with
join, union and left join over the compatibility relation.

Conditions are three-valued with false <= error <= true; conjunction is
meet, disjunction is join, negation swaps true and false and fixes
error.  FILTER keeps a row only when its condition is exactly true.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Mapping

from .ast import (
    And, BasicPattern, Bound, Condition, Construct, Equals, Filter, GraphBlock,
    Join, Not, Opt, Or, Pattern, Query, Select, TermPattern, TriplePattern,
    TripleBlock, Union, Var, basic_vars,
)
from .model import Atom, Dataset, Triple


class Truth3(IntEnum):
    FALSE = 0
    ERROR = 1
    TRUE = 2


def truth_and(a: Truth3, b: Truth3) -> Truth3:
    return Truth3(min(a, b))


def truth_or(a: Truth3, b: Truth3) -> Truth3:
    return Truth3(max(a, b))


def truth_not(a: Truth3) -> Truth3:
    if a is Truth3.ERROR:
        return Truth3.ERROR
    return Truth3.FALSE if a is Truth3.TRUE else Truth3.TRUE


class UnboundVariable(Exception):
    """Raised when instantiation meets a variable the valuation misses."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable ?{name}")


@dataclass(frozen=True)
class Valuation:
    """An immutable partial map from variable names to atoms.

    The map is lifted over atoms: resolving an atom returns the atom
    itself, as if every atom were implicitly bound to itself.  Bindings
    are kept name-sorted, so equal valuations compare and hash equal.
    """

    bindings: tuple = ()

    @staticmethod
    def of(mapping: Mapping) -> "Valuation":
        items = []
        for k, v in mapping.items():
            name = k.name if isinstance(k, Var) else k
            items.append((name, v))
        items.sort(key=lambda kv: kv[0])
        return Valuation(tuple(items))

    def domain(self) -> frozenset:
        return frozenset(name for name, _ in self.bindings)

    def get(self, var) -> Atom | None:
        name = var.name if isinstance(var, Var) else var
        for n, a in self.bindings:
            if n == name:
                return a
        return None

    def resolve(self, term: TermPattern) -> Atom | None:
        """Lifted lookup: atoms map to themselves, variables to their
        binding or None."""
        if isinstance(term, Var):
            return self.get(term.name)
        return term

    def compatible(self, other: "Valuation") -> bool:
        mine = dict(self.bindings)
        return all(n not in mine or mine[n] == a for n, a in other.bindings)

    def merge(self, other: "Valuation") -> "Valuation":
        merged = dict(self.bindings)
        merged.update(other.bindings)
        return Valuation.of(merged)

    def restrict(self, names: Iterable) -> "Valuation":
        keep = {n.name if isinstance(n, Var) else n for n in names}
        return Valuation(tuple((n, a) for n, a in self.bindings if n in keep))

    def as_dict(self) -> dict:
        return dict(self.bindings)


EMPTY_VALUATION = Valuation()

ValuationSet = frozenset  # of Valuation


def join(a: ValuationSet, b: ValuationSet) -> ValuationSet:
    out = set()
    for m1 in a:
        for m2 in b:
            if m1.compatible(m2):
                out.add(m1.merge(m2))
    return frozenset(out)


def union(a: ValuationSet, b: ValuationSet) -> ValuationSet:
    return a | b


def difference(a: ValuationSet, b: ValuationSet) -> ValuationSet:
    """Valuations of `a` compatible with nothing in `b`."""
    return frozenset(m1 for m1 in a if not any(m1.compatible(m2) for m2 in b))


def left_join(a: ValuationSet, b: ValuationSet) -> ValuationSet:
    return join(a, b) | difference(a, b)


# -- conditions ---------------------------------------------------------

def eval_condition(r: Condition, m: Valuation) -> Truth3:
    if isinstance(r, Bound):
        return Truth3.TRUE if m.get(r.var.name) is not None else Truth3.FALSE
    if isinstance(r, Equals):
        left = m.resolve(r.left)
        right = m.resolve(r.right)
        if left is None or right is None:
            return Truth3.ERROR
        return Truth3.TRUE if left == right else Truth3.FALSE
    if isinstance(r, And):
        return truth_and(eval_condition(r.left, m), eval_condition(r.right, m))
    if isinstance(r, Or):
        return truth_or(eval_condition(r.left, m), eval_condition(r.right, m))
    if isinstance(r, Not):
        return truth_not(eval_condition(r.operand, m))
    raise TypeError(f"not a condition: {r!r}")


# -- instantiation ------------------------------------------------------

def _ground_triple(m: Valuation, tp: TriplePattern) -> Triple:
    parts = []
    for term in (tp.subject, tp.predicate, tp.object):
        a = m.resolve(term)
        if a is None:
            raise UnboundVariable(term.name)
        parts.append(a)
    return Triple(*parts)


def instantiate(m: Valuation, c: BasicPattern) -> Dataset:
    """Apply a valuation to a basic pattern, producing a concrete
    dataset.  Triple blocks land in the default graph; each GRAPH block
    becomes a named-graph entry keyed by the resolved name.  Raises
    UnboundVariable when the valuation misses a variable."""
    out = Dataset()
    for block in c.blocks:
        triples = frozenset(_ground_triple(m, tp) for tp in block.triples)
        if isinstance(block, TripleBlock):
            part = Dataset(triples)
        else:
            name = m.resolve(block.name)
            if name is None:
                raise UnboundVariable(block.name.name)
            part = Dataset(frozenset(), {name: triples})
        out = out.union(part)
    return out


# -- pattern evaluation -------------------------------------------------

def _match_triple(tp: TriplePattern, t: Triple, bound: dict) -> dict | None:
    ext = None
    for term, atom in ((tp.subject, t.subject), (tp.predicate, t.predicate), (tp.object, t.object)):
        if isinstance(term, Var):
            seen = (ext or bound).get(term.name)
            if seen is None:
                if ext is None:
                    ext = dict(bound)
                ext[term.name] = atom
            elif seen != atom:
                return None
        elif term != atom:
            return None
    return ext if ext is not None else bound


def _match_block(triples, graph, solutions: list) -> list:
    for tp in triples:
        solutions = [ext for m in solutions for t in graph
                     if (ext := _match_triple(tp, t, m)) is not None]
        if not solutions:
            break
    return solutions


def _eval_basic(c: BasicPattern, d: Dataset) -> ValuationSet:
    solutions: list[dict] = [{}]
    for block in c.blocks:
        if isinstance(block, TripleBlock):
            solutions = _match_block(block.triples, d.default, solutions)
        else:
            next_solutions = []
            for m in solutions:
                name = block.name
                if isinstance(name, Var):
                    bound = m.get(name.name)
                    candidates = [bound] if bound is not None else list(d.named)
                else:
                    candidates = [name]
                for g in candidates:
                    if g not in d.named:
                        continue
                    seed = m
                    if isinstance(name, Var) and name.name not in m:
                        seed = dict(m)
                        seed[name.name] = g
                    next_solutions.extend(_match_block(block.triples, d.named[g], [seed]))
            solutions = next_solutions
        if not solutions:
            break
    return frozenset(Valuation.of(m) for m in solutions)


def eval_pattern(p: Pattern, d: Dataset) -> ValuationSet:
    if isinstance(p, BasicPattern):
        return _eval_basic(p, d)
    if isinstance(p, Join):
        return join(eval_pattern(p.left, d), eval_pattern(p.right, d))
    if isinstance(p, Union):
        return union(eval_pattern(p.left, d), eval_pattern(p.right, d))
    if isinstance(p, Opt):
        return left_join(eval_pattern(p.left, d), eval_pattern(p.right, d))
    if isinstance(p, Filter):
        return frozenset(m for m in eval_pattern(p.pattern, d)
                         if eval_condition(p.condition, m) is Truth3.TRUE)
    raise TypeError(f"not a pattern: {p!r}")


# -- queries ------------------------------------------------------------

def eval_select(q: Select, d: Dataset) -> ValuationSet:
    return frozenset(m.restrict(q.variables) for m in eval_pattern(q.where, d))


def eval_construct(template: BasicPattern, where: Pattern, d: Dataset) -> Dataset:
    """Union of template instantiations over the WHERE matches.
    Valuations that leave a template variable unbound are skipped."""
    needed = frozenset(v.name for v in basic_vars(template))
    out = Dataset()
    for m in eval_pattern(where, d):
        if needed <= m.domain():
            out = out.union(instantiate(m, template))
    return out


def eval_query(q: Query, d: Dataset):
    """SELECT gives a valuation set, CONSTRUCT a dataset."""
    if isinstance(q, Select):
        return eval_select(q, d)
    if isinstance(q, Construct):
        return eval_construct(q.template, q.where, d)
    raise TypeError(f"not a query: {q!r}")
