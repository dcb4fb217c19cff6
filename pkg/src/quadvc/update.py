"""Update application over datasets.

Each update maps a dataset to a new dataset; the input is never touched,
so a failed update leaves no trace.  Template forms evaluate their WHERE
clause against the incoming dataset only: in the combined delete/insert
form both templates see the original state, so DELETE {x p y} INSERT
{y p x} WHERE {x p y} swaps rather than destroys.

Missing graphs are errors, never silent no-ops, with two exceptions that
follow from the dataset algebra itself: inserting into an undefined
named graph defines it, and deleting from one leaves it undefined.
COPY and MOVE with identical source and target change nothing at all,
whatever the dataset looks like.
"""

from __future__ import annotations

from .algebra import eval_construct
from .ast import (
    Add, Clear, Copy, Create, DeleteInsertWhere, DeleteWhere, Drop, InsertWhere,
    Load, Move, Update,
)
from .model import DEFAULT, Dataset, GraphName
from .nquads import format_atom


def _show(name: GraphName) -> str:
    return "the default graph" if name is DEFAULT else format_atom(name)


class UpdateError(Exception):
    pass


class CreateExists(UpdateError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"graph already exists: {_show(name)}")


class GraphUndefined(UpdateError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"graph is not defined: {_show(name)}")


def _require_defined(d: Dataset, *names: GraphName):
    for name in names:
        if not d.defined(name):
            raise GraphUndefined(name)


def apply_update(u: Update, d: Dataset) -> Dataset:
    if isinstance(u, InsertWhere):
        return d.union(eval_construct(u.template, u.where, d))

    if isinstance(u, DeleteWhere):
        return d.difference(eval_construct(u.template, u.where, d))

    if isinstance(u, DeleteInsertWhere):
        deleted = eval_construct(u.delete_template, u.where, d)
        inserted = eval_construct(u.insert_template, u.where, d)
        return d.difference(deleted).union(inserted)

    if isinstance(u, (Load, Add)):
        _require_defined(d, u.source, u.target)
        merged = d.graph(u.source) | d.graph(u.target)
        return d.with_graph(u.target, merged)

    if isinstance(u, Clear):
        _require_defined(d, u.graph)
        return d.with_graph(u.graph, frozenset())

    if isinstance(u, Create):
        if d.defined(u.graph):
            raise CreateExists(u.graph)
        return d.with_graph(u.graph, frozenset())

    if isinstance(u, Drop):
        _require_defined(d, u.graph)
        return d.without_graph(u.graph)

    if isinstance(u, Copy):
        if u.source == u.target:
            return d
        _require_defined(d, u.source, u.target)
        return d.with_graph(u.target, d.graph(u.source))

    if isinstance(u, Move):
        if u.source == u.target:
            return d
        _require_defined(d, u.source, u.target)
        if u.source is DEFAULT:
            raise UpdateError("MOVE from the default graph is not supported; "
                              "the default graph cannot be undefined")
        return d.with_graph(u.target, d.graph(u.source)).without_graph(u.source)

    raise TypeError(f"not an update: {u!r}")
