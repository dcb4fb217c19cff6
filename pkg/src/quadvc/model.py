"""Ground RDF data model: atoms, triples, graphs, datasets.

A dataset couples one anonymous default graph with a partial map from
graph names to graphs.  "Defined as empty" and "not defined" are distinct
states; that distinction is what makes CREATE, DROP and CLEAR observable.

Atoms are deliberately uniform: a literal may sit in any triple position
and may even name a graph (the latter only through this API, never
through the concrete syntax).  All values are immutable, and the dataset
algebra returns new values instead of mutating its arguments, so shared
snapshots are safe to hand out across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Iri:
    """An absolute IRI.  Equality is plain string equality."""

    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("IRI must be a non-empty string")

    def __repr__(self):
        return f"Iri({self.value!r})"


@dataclass(frozen=True)
class Literal:
    """A literal: lexical form plus at most one of datatype or language tag.

    Equality is structural on all three fields.  No value-space
    normalization happens anywhere: "1"^^xsd:integer and "01"^^xsd:integer
    are different atoms.
    """

    lexical: str
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise ValueError("literal cannot carry both a datatype and a language tag")


Atom = Iri | Literal


@dataclass(frozen=True)
class Triple:
    """A ground triple.  Any atom may occupy any position."""

    subject: Atom
    predicate: Atom
    object: Atom


Graph = frozenset  # of Triple


class _DefaultGraph:
    """Sentinel naming the anonymous default graph; distinct from every atom."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DEFAULT"


DEFAULT = _DefaultGraph()

# A graph name is the DEFAULT sentinel or an atom.  Named-graph keys are
# atoms only; DEFAULT is never a key of the named map.
GraphName = _DefaultGraph | Atom


def _as_graph(triples: Iterable[Triple]) -> Graph:
    return triples if isinstance(triples, frozenset) else frozenset(triples)


@dataclass(frozen=True)
class Dataset:
    """A default graph plus a partial map from names to graphs.

    The named map's key set is the set of *defined* graph names.  A key
    mapped to the empty graph is defined-but-empty, which is not the same
    state as the key being absent.
    """

    default: Graph = frozenset()
    named: Mapping[Atom, Graph] = field(default_factory=dict)

    @staticmethod
    def of(default: Iterable[Triple] = (), named: Mapping[Atom, Iterable[Triple]] | None = None) -> "Dataset":
        return Dataset(_as_graph(default), {g: _as_graph(ts) for g, ts in (named or {}).items()})

    def graph(self, name: GraphName) -> Graph | None:
        """The graph bound to `name`, or None when the name is undefined."""
        if name is DEFAULT:
            return self.default
        return self.named.get(name)

    def defined(self, name: GraphName) -> bool:
        return name is DEFAULT or name in self.named

    def names(self) -> frozenset:
        """The set of defined named-graph names."""
        return frozenset(self.named)

    def union(self, other: "Dataset") -> "Dataset":
        """Componentwise union.  A name defined on either side is defined
        in the result."""
        named = dict(self.named)
        for g, triples in other.named.items():
            named[g] = named.get(g, frozenset()) | triples
        return Dataset(self.default | other.default, named)

    def difference(self, other: "Dataset") -> "Dataset":
        """Componentwise difference.  Definedness follows the left side:
        a name undefined here stays undefined, a name defined here stays
        defined even when its graph becomes empty."""
        named = {
            g: (triples - other.named[g]) if g in other.named else triples
            for g, triples in self.named.items()
        }
        return Dataset(self.default - other.default, named)

    def issubset(self, other: "Dataset") -> bool:
        """True iff merging self into other changes nothing."""
        return self.union(other) == other

    def restrict(self, keep: Iterable[GraphName]) -> "Dataset":
        """Empty out every graph whose name is not in `keep`, keeping the
        definedness of all names intact.  The default graph is kept only
        when DEFAULT itself is in `keep`."""
        keep = set(keep)
        default = self.default if DEFAULT in keep else frozenset()
        named = {g: (t if g in keep else frozenset()) for g, t in self.named.items()}
        return Dataset(default, named)

    def with_graph(self, name: GraphName, triples: Iterable[Triple]) -> "Dataset":
        """Functional update: bind `name` to exactly `triples`, defining
        the name if it was undefined."""
        if name is DEFAULT:
            return Dataset(_as_graph(triples), dict(self.named))
        named = dict(self.named)
        named[name] = _as_graph(triples)
        return Dataset(self.default, named)

    def without_graph(self, name: GraphName) -> "Dataset":
        """Functional update: make `name` undefined.  The default graph
        cannot be undefined."""
        if name is DEFAULT:
            raise ValueError("the default graph cannot be undefined")
        if name not in self.named:
            raise KeyError(name)
        named = dict(self.named)
        del named[name]
        return Dataset(self.default, named)

    def atoms(self) -> frozenset:
        """Every atom occurring in the dataset, graph names included."""
        out = set()
        for t in self.default:
            out.update((t.subject, t.predicate, t.object))
        for g, triples in self.named.items():
            out.add(g)
            for t in triples:
                out.update((t.subject, t.predicate, t.object))
        return frozenset(out)

    def triple_count(self) -> int:
        return len(self.default) + sum(len(ts) for ts in self.named.values())
