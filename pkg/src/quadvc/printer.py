"""Canonical text rendering for ASTs and query results.

The printer and parser agree: parsing a printed query or update yields
the original AST.  Printed patterns are fully braced, so no precedence
bookkeeping is needed, and ground-template updates with an empty WHERE
print in their DATA sugar form.
"""

from __future__ import annotations

from .ast import (
    Add, And, BasicPattern, Bound, Clear, Condition, Construct, Copy, Create,
    DeleteInsertWhere, DeleteWhere, Drop, Equals, Filter, GraphBlock, InsertWhere,
    Join, Load, Move, Not, Opt, Or, Pattern, Query, Select, TermPattern,
    TriplePattern, TripleBlock, Union, Update, Var, is_ground,
)
from .model import DEFAULT, GraphName
from .nquads import format_atom


def format_term(t: TermPattern) -> str:
    if isinstance(t, Var):
        return f"?{t.name}"
    return format_atom(t)


def format_triple_pattern(tp: TriplePattern) -> str:
    return f"{format_term(tp.subject)} {format_term(tp.predicate)} {format_term(tp.object)}"


def _block(b) -> str:
    if isinstance(b, TripleBlock):
        return " . ".join(format_triple_pattern(tp) for tp in b.triples)
    inner = " . ".join(format_triple_pattern(tp) for tp in b.triples)
    return f"GRAPH {format_term(b.name)} {{ {inner} }}" if inner else f"GRAPH {format_term(b.name)} {{ }}"


def _basic_body(c: BasicPattern) -> str:
    return " . ".join(_block(b) for b in c.blocks)


def _unit(p: Pattern) -> str:
    body = _pattern_body(p)
    return f"{{ {body} }}" if body else "{ }"


def _pattern_body(p: Pattern) -> str:
    if isinstance(p, BasicPattern):
        return _basic_body(p)
    if isinstance(p, Join):
        return f"{_unit(p.left)} {_unit(p.right)}"
    if isinstance(p, Union):
        return f"{_unit(p.left)} UNION {_unit(p.right)}"
    if isinstance(p, Opt):
        return f"{_unit(p.left)} OPTIONAL {_unit(p.right)}"
    if isinstance(p, Filter):
        return f"{_unit(p.pattern)} FILTER ({format_condition(p.condition)})"
    raise TypeError(f"not a pattern: {p!r}")


def format_condition(c: Condition) -> str:
    if isinstance(c, Bound):
        return f"BOUND(?{c.var.name})"
    if isinstance(c, Equals):
        return f"{format_term(c.left)} = {format_term(c.right)}"
    if isinstance(c, And):
        return f"({format_condition(c.left)} && {format_condition(c.right)})"
    if isinstance(c, Or):
        return f"({format_condition(c.left)} || {format_condition(c.right)})"
    if isinstance(c, Not):
        return f"(! {format_condition(c.operand)})"
    raise TypeError(f"not a condition: {c!r}")


def _template(c: BasicPattern) -> str:
    body = _basic_body(c)
    return f"{{ {body} }}" if body else "{ }"


def format_query(q: Query) -> str:
    if isinstance(q, Select):
        vars_ = " ".join(f"?{v.name}" for v in q.variables)
        return f"SELECT {vars_} WHERE {_unit(q.where)}"
    if isinstance(q, Construct):
        return f"CONSTRUCT {_template(q.template)} WHERE {_unit(q.where)}"
    raise TypeError(f"not a query: {q!r}")


def _graph_ref(g: GraphName) -> str:
    return "DEFAULT" if g is DEFAULT else f"GRAPH {format_atom(g)}"


def format_update(u: Update) -> str:
    if isinstance(u, InsertWhere):
        if u.where == BasicPattern() and is_ground(u.template):
            return f"INSERT DATA {_template(u.template)}"
        return f"INSERT {_template(u.template)} WHERE {_unit(u.where)}"
    if isinstance(u, DeleteWhere):
        if u.where == BasicPattern() and is_ground(u.template):
            return f"DELETE DATA {_template(u.template)}"
        return f"DELETE {_template(u.template)} WHERE {_unit(u.where)}"
    if isinstance(u, DeleteInsertWhere):
        return (f"DELETE {_template(u.delete_template)} "
                f"INSERT {_template(u.insert_template)} WHERE {_unit(u.where)}")
    if isinstance(u, Load):
        src = "DEFAULT" if u.source is DEFAULT else format_atom(u.source)
        dst = "DEFAULT" if u.target is DEFAULT else f"GRAPH {format_atom(u.target)}"
        return f"LOAD {src} INTO {dst}"
    if isinstance(u, Clear):
        return f"CLEAR {_graph_ref(u.graph)}"
    if isinstance(u, Create):
        return f"CREATE GRAPH {format_atom(u.graph)}"
    if isinstance(u, Drop):
        return f"DROP GRAPH {format_atom(u.graph)}"
    if isinstance(u, Copy):
        return f"COPY {_graph_ref(u.source)} TO {_graph_ref(u.target)}"
    if isinstance(u, Move):
        return f"MOVE {_graph_ref(u.source)} TO {_graph_ref(u.target)}"
    if isinstance(u, Add):
        return f"ADD {_graph_ref(u.source)} TO {_graph_ref(u.target)}"
    raise TypeError(f"not an update: {u!r}")


def format_select_rows(variables, valuations) -> str:
    """Tab-separated table: header of variables, one sorted row per
    valuation, unbound cells empty."""
    header = "\t".join(f"?{v.name}" for v in variables)
    rows = []
    for m in valuations:
        cells = []
        for v in variables:
            a = m.get(v.name)
            cells.append(format_atom(a) if a is not None else "")
        rows.append("\t".join(cells))
    rows.sort()
    return "\n".join([header] + rows) + "\n"
