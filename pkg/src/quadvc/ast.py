"""Abstract syntax for the query and update language.

The pattern layer mirrors the evaluation algebra.  A basic pattern is a
flat run of triple blocks (matched against the default graph) and GRAPH
blocks (matched against one named graph); no other operator may appear
inside a GRAPH block.  Whole patterns combine through join, UNION,
OPTIONAL and FILTER nodes.

Updates come in ten forms: three template/WHERE forms and seven graph
management verbs.  INSERT DATA and DELETE DATA are surface sugar only;
the parser lowers them to InsertWhere/DeleteWhere with an empty WHERE.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Atom, GraphName, Iri


@dataclass(frozen=True)
class Var:
    name: str


TermPattern = Atom | Var


@dataclass(frozen=True)
class TriplePattern:
    subject: TermPattern
    predicate: TermPattern
    object: TermPattern


@dataclass(frozen=True)
class TripleBlock:
    """Triple patterns matched against the default graph."""

    triples: tuple[TriplePattern, ...]


@dataclass(frozen=True)
class GraphBlock:
    """Triple patterns matched against the named graph `name` denotes.

    `name` may be a variable; it then ranges over defined named-graph
    names, never over DEFAULT.  An empty block is legal and acts as a
    definedness test for the name.
    """

    name: TermPattern
    triples: tuple[TriplePattern, ...]


Block = TripleBlock | GraphBlock


@dataclass(frozen=True)
class BasicPattern:
    """An ordered run of blocks.  The empty run is the unit pattern: it
    matches exactly the empty valuation."""

    blocks: tuple[Block, ...] = ()


# -- filter conditions --------------------------------------------------

@dataclass(frozen=True)
class Bound:
    var: Var


@dataclass(frozen=True)
class Equals:
    left: TermPattern
    right: TermPattern


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Not:
    operand: "Condition"


Condition = Bound | Equals | And | Or | Not


# -- pattern operators --------------------------------------------------

@dataclass(frozen=True)
class Join:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Union:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Opt:
    """Left pattern optionally extended by the right one."""

    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Filter:
    pattern: "Pattern"
    condition: Condition


Pattern = BasicPattern | Join | Union | Opt | Filter


# -- queries ------------------------------------------------------------

@dataclass(frozen=True)
class Select:
    variables: tuple[Var, ...]
    where: Pattern

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("SELECT variable list must be duplicate-free")


@dataclass(frozen=True)
class Construct:
    template: BasicPattern
    where: Pattern


Query = Select | Construct


# -- updates ------------------------------------------------------------

@dataclass(frozen=True)
class InsertWhere:
    template: BasicPattern
    where: Pattern


@dataclass(frozen=True)
class DeleteWhere:
    template: BasicPattern
    where: Pattern


@dataclass(frozen=True)
class DeleteInsertWhere:
    delete_template: BasicPattern
    insert_template: BasicPattern
    where: Pattern


@dataclass(frozen=True)
class Load:
    source: GraphName
    target: GraphName


@dataclass(frozen=True)
class Clear:
    graph: GraphName


@dataclass(frozen=True)
class Create:
    graph: Iri


@dataclass(frozen=True)
class Drop:
    graph: Iri


@dataclass(frozen=True)
class Copy:
    source: GraphName
    target: GraphName


@dataclass(frozen=True)
class Move:
    source: GraphName
    target: GraphName


@dataclass(frozen=True)
class Add:
    source: GraphName
    target: GraphName


Update = (
    InsertWhere | DeleteWhere | DeleteInsertWhere
    | Load | Clear | Create | Drop | Copy | Move | Add
)


# -- variable collection ------------------------------------------------

def term_vars(term: TermPattern) -> frozenset:
    return frozenset((term,)) if isinstance(term, Var) else frozenset()


def triple_vars(tp: TriplePattern) -> frozenset:
    return term_vars(tp.subject) | term_vars(tp.predicate) | term_vars(tp.object)


def block_vars(block: Block) -> frozenset:
    out = frozenset()
    if isinstance(block, GraphBlock):
        out |= term_vars(block.name)
    for tp in block.triples:
        out |= triple_vars(tp)
    return out


def basic_vars(c: BasicPattern) -> frozenset:
    out = frozenset()
    for block in c.blocks:
        out |= block_vars(block)
    return out


def pattern_vars(p: Pattern) -> frozenset:
    if isinstance(p, BasicPattern):
        return basic_vars(p)
    if isinstance(p, (Join, Union, Opt)):
        return pattern_vars(p.left) | pattern_vars(p.right)
    if isinstance(p, Filter):
        return pattern_vars(p.pattern)
    raise TypeError(f"not a pattern: {p!r}")


def condition_vars(r: Condition) -> frozenset:
    if isinstance(r, Bound):
        return frozenset((r.var,))
    if isinstance(r, Equals):
        return term_vars(r.left) | term_vars(r.right)
    if isinstance(r, (And, Or)):
        return condition_vars(r.left) | condition_vars(r.right)
    if isinstance(r, Not):
        return condition_vars(r.operand)
    raise TypeError(f"not a condition: {r!r}")


def is_ground(c: BasicPattern) -> bool:
    return not basic_vars(c)
