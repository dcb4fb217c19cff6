"""Version chains, update records and state reconstruction.

Every tracked graph `g` carries a chain of immutable version graphs
`g#_v0, g#_v1, ...` described by records in the reserved named graph
`urn:upd:prov`.  Update `k` on a chain is the node `g#_uk`; it points at
its input and output versions, its verb (`upd:type`), the graphs it
consulted (`upd:source`), for insert/delete the delta graph `g#_dk`
(`upd:data`), and a metadata node `g#_mk` carrying user, timestamp and
the verbatim update text.  `(g, upd:current, g_vi)` marks the live
version; retiring that one triple on each update is the only deletion
ever made in the provenance graph, everything else only grows.

Verb shapes:

* CREATE writes a fresh chain segment: version 0 (or the next free
  index after a DROP, leaving a visible gap), no input edge.
* DROP retires the current pointer and records input only; the version
  graphs survive.
* CLEAR, LOAD, ADD, COPY and MOVE advance the chain by one version.
  Copy-style verbs record one `upd:source`: the consulted graph's
  current version.  MOVE also appends a drop record to the source's own
  chain, sharing the target record's metadata node.
* INSERT/DELETE WHERE evaluate against the pre-state, write the
  affected triples into the data graph, then advance the chain; their
  sources are the graphs the WHERE clause actually consulted.  The
  combined delete+insert form writes a delete record then an insert
  record around one shared metadata node, both evaluated against the
  original pre-state.
* An INSERT into a graph that does not exist yet (including the first
  update ever to touch the default graph, tracked under
  `urn:upd:default`) is preceded by an implicit create record that
  opens the chain, again sharing the metadata node.

Version graphs are materialized according to the snapshot policy
(`snapshot_due`); versions without a stored graph are rebuilt by
replaying records forward from the nearest stored ancestor, using data
graphs when present and re-parsing the recorded update text otherwise.
The live graph itself always serves the current version.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping

from .algebra import Valuation, eval_construct, eval_pattern
from .ast import (
    Add, BasicPattern, Clear, Construct, Copy, Create, DeleteInsertWhere,
    DeleteWhere, Drop, Filter, GraphBlock, InsertWhere, Join, Load, Move, Opt,
    Pattern, Query, Select, TripleBlock, TriplePattern, Union, Update, Var,
)
from .model import DEFAULT, Atom, Dataset, Graph, GraphName, Iri, Literal, Triple
from .nquads import format_atom
from .parser import deterministic_skolems, parse_update
from .update import GraphUndefined, apply_update
from .vocab import (
    CURRENT, DATA, DEFAULT_GRAPH_IRI, INPUT, META, OUTPUT, PREV_VERSION,
    PROV_GRAPH, SOURCE, TEXT, TIME, TYPE, TYPE_ADD, TYPE_CLEAR, TYPE_COPY,
    TYPE_CREATE, TYPE_DELETE, TYPE_DROP, TYPE_INSERT, TYPE_LOAD, TYPE_MOVE,
    UPD_NS, UPDATE_TYPES, USER, VERSION, XSD_DATETIME,
)


class ProvenanceError(Exception):
    pass


class ProvTargetViolation(ProvenanceError):
    """A user update addressed the provenance graph or a minted name."""


class StaticTargetError(ProvenanceError):
    """A template does not address a single statically known graph."""


class MintCollision(ProvenanceError):
    """A minted IRI would collide with an existing graph name."""


class NoCurrentVersion(ProvenanceError):
    def __init__(self, g):
        self.graph = g
        super().__init__(f"no current version: {graph_base(g)}")


class BrokenChain(ProvenanceError):
    """A record or link needed for reconstruction is missing."""


class ReplayMismatch(ProvenanceError):
    """Replay disagrees with a stored snapshot; the store is corrupt."""


@dataclass(frozen=True)
class UpdateMeta:
    """Metadata attached to one applied update statement."""

    user: Atom
    time: datetime
    text: str
    extra: tuple = ()  # extra (property, value) pairs for the meta node


@dataclass(frozen=True)
class ProvStore:
    """Immutable store state: one dataset holding user graphs, the
    provenance graph and all materialized version/data graphs, plus the
    per-chain next record index."""

    dataset: Dataset = field(default_factory=Dataset)
    counters: Mapping[GraphName, int] = field(default_factory=dict)


# -- naming -------------------------------------------------------------

_MINTED_RE = re.compile(r"^(.+)#_([vudm])([0-9]+)$")


def graph_base(g: GraphName) -> str:
    if g is DEFAULT:
        return DEFAULT_GRAPH_IRI.value
    if isinstance(g, Iri):
        return g.value
    raise ProvTargetViolation(f"literal graph names cannot be tracked: {g!r}")


def _chain_subject(g: GraphName) -> Iri:
    return DEFAULT_GRAPH_IRI if g is DEFAULT else g


def version_iri(g: GraphName, i: int) -> Iri:
    return Iri(f"{graph_base(g)}#_v{i}")


def update_iri(g: GraphName, i: int) -> Iri:
    return Iri(f"{graph_base(g)}#_u{i}")


def data_iri(g: GraphName, i: int) -> Iri:
    return Iri(f"{graph_base(g)}#_d{i}")


def meta_iri(g: GraphName, i: int) -> Iri:
    return Iri(f"{graph_base(g)}#_m{i}")


def parse_minted(value: str) -> tuple[str, str, int] | None:
    """Split a minted IRI into (base, kind, index); None when the IRI
    does not use the reserved suffix."""
    m = _MINTED_RE.match(value)
    if not m:
        return None
    return m.group(1), m.group(2), int(m.group(3))


def _base_to_name(base: str) -> GraphName:
    return DEFAULT if base == DEFAULT_GRAPH_IRI.value else Iri(base)


def _check_user_graph(name: GraphName):
    if name is DEFAULT:
        return
    if not isinstance(name, Iri):
        raise ProvTargetViolation(f"literal graph names cannot be updated here: {name!r}")
    if name == PROV_GRAPH:
        raise ProvTargetViolation("the provenance graph is not a legal update target")
    if name == DEFAULT_GRAPH_IRI:
        raise ProvTargetViolation(f"{name.value} is reserved for tracking the default graph")
    if parse_minted(name.value):
        raise ProvTargetViolation(f"{name.value} uses the reserved version-name suffix")


# -- time and replay seeds ----------------------------------------------

def format_time(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def time_literal(dt: datetime) -> Literal:
    return Literal(format_time(dt), datatype=XSD_DATETIME)


def update_seed(time_lexical: str, user: Atom, text: str) -> str:
    """Skolemization seed: recoverable from recorded metadata, so text
    replay re-creates the same skolem IRIs the original parse minted."""
    raw = "\x00".join((time_lexical, format_atom(user), text))
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()


def meta_seed(meta: UpdateMeta) -> str:
    return update_seed(format_time(meta.time), meta.user, meta.text)


# -- snapshot policy ----------------------------------------------------

def snapshot_due(index: int, interval: int | None) -> bool:
    """Materialize version `index`?  `interval=None` keeps only chain
    starts; the live graph always covers the current version."""
    if interval is not None and interval < 1:
        raise ValueError("snapshot interval must be >= 1 (or None)")
    return index == 0 or (interval is not None and index % interval == 0)


# -- chain reads --------------------------------------------------------

def _prov_triples(d: Dataset) -> Graph:
    got = d.graph(PROV_GRAPH)
    return got if got is not None else frozenset()


def _current_in(d: Dataset, g: GraphName) -> tuple[int, Iri] | None:
    subj = _chain_subject(g)
    hits = [t.object for t in _prov_triples(d) if t.subject == subj and t.predicate == CURRENT]
    if not hits:
        return None
    if len(hits) > 1:
        raise ProvenanceError(f"multiple current versions recorded for {graph_base(g)}")
    v = hits[0]
    parsed = parse_minted(v.value) if isinstance(v, Iri) else None
    if parsed is None or parsed[1] != "v" or parsed[0] != graph_base(g):
        raise BrokenChain(f"malformed current version {v!r} for {graph_base(g)}")
    return parsed[2], v


def current_version(g: GraphName, s: ProvStore) -> tuple[int, Iri]:
    got = _current_in(s.dataset, g)
    if got is None:
        raise NoCurrentVersion(g)
    return got


def new_versions_between(old: ProvStore, new: ProvStore) -> list[Iri]:
    """Version IRIs minted between two store states, in chain order."""
    added = _prov_triples(new.dataset) - _prov_triples(old.dataset)
    fresh = {t.object for t in added if t.predicate == VERSION and isinstance(t.object, Iri)}
    keyed = []
    for v in fresh:
        parsed = parse_minted(v.value)
        if parsed and parsed[1] == "v":
            keyed.append(((parsed[0], parsed[2]), v))
    return [v for _, v in sorted(keyed)]


# -- sources ------------------------------------------------------------

def names_for(m: Valuation, c: BasicPattern) -> frozenset:
    """Graph names a basic pattern touches under one valuation: DEFAULT
    for each triple block, the resolved name for each GRAPH block."""
    out = set()
    for block in c.blocks:
        if isinstance(block, TripleBlock):
            out.add(DEFAULT)
        else:
            name = m.resolve(block.name)
            if name is None:
                raise ProvenanceError(f"valuation does not cover graph variable ?{block.name.name}")
            out.add(name)
    return frozenset(out)


def pattern_sources(p: Pattern, d: Dataset) -> frozenset:
    """The graphs consulted when evaluating `p` against `d`: for a basic
    pattern, the union of names over its actual matches (empty when
    nothing matches); operators take the union of both sides and FILTER
    passes through."""
    if isinstance(p, BasicPattern):
        out = set()
        for m in eval_pattern(p, d):
            out |= names_for(m, p)
        return frozenset(out)
    if isinstance(p, (Join, Union, Opt)):
        return pattern_sources(p.left, d) | pattern_sources(p.right, d)
    if isinstance(p, Filter):
        return pattern_sources(p.pattern, d)
    raise TypeError(f"not a pattern: {p!r}")


def query_sources(q: Query, d: Dataset) -> frozenset:
    if isinstance(q, Select):
        return pattern_sources(q.where, d)
    if isinstance(q, Construct):
        return pattern_sources(q.where, d)
    raise TypeError(f"not a query: {q!r}")


# -- applying updates with provenance -----------------------------------

def _static_target(template: BasicPattern) -> GraphName:
    if len(template.blocks) != 1:
        raise StaticTargetError("update template must address exactly one graph")
    block = template.blocks[0]
    if isinstance(block, TripleBlock):
        return DEFAULT
    if isinstance(block.name, Var):
        raise StaticTargetError("template graph name must be a constant, not a variable")
    return block.name


def _ground_block(target: GraphName, triples: Iterable[Triple]) -> BasicPattern:
    tps = tuple(TriplePattern(t.subject, t.predicate, t.object) for t in triples)
    if target is DEFAULT:
        return BasicPattern((TripleBlock(tps),))
    return BasicPattern((GraphBlock(target, tps),))


class _Tx:
    """Working state for one user update; committed only on success."""

    def __init__(self, store: ProvStore, meta: UpdateMeta, interval, keep_data: bool):
        self.dataset = store.dataset
        self.counters = dict(store.counters)
        self.meta = meta
        self.interval = interval
        self.keep_data = keep_data
        self.meta_node: Iri | None = None

    def run(self, primitive: Update):
        self.dataset = apply_update(primitive, self.dataset)

    def prov_add(self, triples: Iterable[Triple]):
        self.run(InsertWhere(_ground_block(PROV_GRAPH, triples), BasicPattern()))

    def prov_del(self, triples: Iterable[Triple]):
        self.run(DeleteWhere(_ground_block(PROV_GRAPH, triples), BasicPattern()))

    def current(self, g: GraphName) -> tuple[int, Iri]:
        got = _current_in(self.dataset, g)
        if got is None:
            raise NoCurrentVersion(g)
        return got

    def check_mint(self, iri: Iri):
        if iri == PROV_GRAPH or iri in self.dataset.named:
            raise MintCollision(f"minted name collides with an existing graph: {iri.value}")

    def meta_for(self, g: GraphName, i: int) -> Iri:
        """Mint the metadata node on first use; later records of the
        same statement share it."""
        if self.meta_node is None:
            m = meta_iri(g, i)
            self.meta_node = m
            triples = [Triple(m, USER, self.meta.user),
                       Triple(m, TIME, time_literal(self.meta.time)),
                       Triple(m, TEXT, Literal(self.meta.text))]
            triples += [Triple(m, p, o) for p, o in self.meta.extra]
            self.prov_add(triples)
        return self.meta_node


def _record_create(tx: _Tx, g: GraphName):
    i = tx.counters.get(g, 0)
    subj = _chain_subject(g)
    v = version_iri(g, i)
    u = update_iri(g, i)
    tx.check_mint(v)
    if g is not DEFAULT:
        tx.run(Create(g))
    tx.run(Create(v))
    if g is DEFAULT and tx.dataset.default:
        # first record ever for the default graph: snapshot what is there
        tx.run(Load(DEFAULT, v))
    m = tx.meta_for(g, i)
    tx.prov_add([Triple(subj, VERSION, v), Triple(subj, CURRENT, v),
                 Triple(u, TYPE, TYPE_CREATE), Triple(u, OUTPUT, v), Triple(u, META, m)])
    tx.counters[g] = i + 1


def _record_drop(tx: _Tx, g: GraphName):
    _, cv = tx.current(g)
    i = tx.counters.get(g, 0)
    u = update_iri(g, i)
    m = tx.meta_for(g, i)
    tx.prov_del([Triple(_chain_subject(g), CURRENT, cv)])
    tx.prov_add([Triple(u, TYPE, TYPE_DROP), Triple(u, INPUT, cv), Triple(u, META, m)])
    tx.counters[g] = i + 1


def _advance(tx: _Tx, g: GraphName, type_iri: Iri, *, source_refs=(), data_node: Iri | None = None):
    """Seal the target's new state as the next version and write the
    update record around it."""
    _, cv = tx.current(g)
    i = tx.counters.get(g, 0)
    subj = _chain_subject(g)
    v = version_iri(g, i)
    u = update_iri(g, i)
    tx.check_mint(v)
    if snapshot_due(i, tx.interval):
        tx.run(Create(v))
        tx.run(Load(g, v))
    m = tx.meta_for(g, i)
    tx.prov_del([Triple(subj, CURRENT, cv)])
    triples = [Triple(subj, VERSION, v), Triple(subj, CURRENT, v),
               Triple(cv, VERSION, v), Triple(v, PREV_VERSION, cv),
               Triple(u, TYPE, type_iri), Triple(u, INPUT, cv),
               Triple(u, OUTPUT, v), Triple(u, META, m)]
    for ref in source_refs:
        triples.append(Triple(u, SOURCE, ref))
    if data_node is not None:
        triples.append(Triple(u, DATA, data_node))
    tx.prov_add(triples)
    tx.counters[g] = i + 1


def _ensure_chain(tx: _Tx, g: GraphName):
    """Open the default graph's chain lazily; named graphs get chains
    through CREATE (explicit or implicit)."""
    if g is DEFAULT and _current_in(tx.dataset, g) is None:
        _record_create(tx, g)


def _source_ref_in(d: Dataset, name: GraphName) -> Atom:
    """How a consulted graph is recorded: its current version when it
    has a chain, otherwise the raw name (DEFAULT as urn:upd:default)."""
    got = _current_in(d, name)
    if got is not None:
        return got[1]
    if name is DEFAULT:
        return DEFAULT_GRAPH_IRI
    return name


def _do_copylike(tx: _Tx, u: Update):
    src, dst = u.source, u.target
    _check_user_graph(dst)
    if isinstance(u, Move):
        _check_user_graph(src)
    type_iri = {Load: TYPE_LOAD, Add: TYPE_ADD, Copy: TYPE_COPY, Move: TYPE_MOVE}[type(u)]
    _ensure_chain(tx, dst)
    ref = _source_ref_in(tx.dataset, src)
    tx.run(u)
    _advance(tx, dst, type_iri, source_refs=[ref])
    if isinstance(u, Move) and src != dst:
        _record_drop(tx, src)


def _do_write(tx: _Tx, template: BasicPattern, where: Pattern, *, insert: bool,
              eval_dataset: Dataset | None = None):
    g = _static_target(template)
    _check_user_graph(g)
    d_eval = eval_dataset if eval_dataset is not None else tx.dataset
    sources = pattern_sources(where, d_eval)
    refs = [_source_ref_in(d_eval, s) for s in sources]
    built = eval_construct(template, where, d_eval)
    content = built.default if g is DEFAULT else (built.graph(g) or frozenset())

    if g is not DEFAULT and not tx.dataset.defined(g):
        if not insert:
            raise GraphUndefined(g)
        _record_create(tx, g)  # inserting into a new graph opens its chain
    _ensure_chain(tx, g)

    i = tx.counters.get(g, 0)
    d_node = data_iri(g, i)
    if tx.keep_data:
        tx.check_mint(d_node)
        tx.run(Create(d_node))
        if content:
            tx.run(InsertWhere(_ground_block(d_node, content), BasicPattern()))
    if content:
        tpl = _ground_block(g, content)
        tx.run(InsertWhere(tpl, BasicPattern()) if insert else DeleteWhere(tpl, BasicPattern()))
    _advance(tx, g, TYPE_INSERT if insert else TYPE_DELETE,
             source_refs=refs, data_node=d_node)


def apply_with_provenance(u: Update, meta: UpdateMeta, s: ProvStore, *,
                          snapshot_interval: int | None = 1,
                          materialize_data_graphs: bool = True) -> ProvStore:
    """Apply one user update, recording its provenance.  Returns the new
    store state; on any error the incoming state is untouched."""
    if snapshot_interval is not None and snapshot_interval < 1:
        raise ValueError("snapshot_interval must be >= 1 (or None)")
    tx = _Tx(s, meta, snapshot_interval, materialize_data_graphs)

    if isinstance(u, Create):
        _check_user_graph(u.graph)
        _record_create(tx, u.graph)
    elif isinstance(u, Drop):
        _check_user_graph(u.graph)
        tx.run(u)
        _record_drop(tx, u.graph)
    elif isinstance(u, Clear):
        _check_user_graph(u.graph)
        _ensure_chain(tx, u.graph)
        tx.run(u)
        _advance(tx, u.graph, TYPE_CLEAR)
    elif isinstance(u, (Load, Add, Copy, Move)):
        _do_copylike(tx, u)
    elif isinstance(u, InsertWhere):
        _do_write(tx, u.template, u.where, insert=True)
    elif isinstance(u, DeleteWhere):
        _do_write(tx, u.template, u.where, insert=False)
    elif isinstance(u, DeleteInsertWhere):
        gd = _static_target(u.delete_template)
        gi = _static_target(u.insert_template)
        if gd != gi:
            raise StaticTargetError("delete and insert templates must address the same graph")
        d_pre = tx.dataset
        _do_write(tx, u.delete_template, u.where, insert=False, eval_dataset=d_pre)
        _do_write(tx, u.insert_template, u.where, insert=True, eval_dataset=d_pre)
    else:
        raise TypeError(f"not an update: {u!r}")

    return ProvStore(tx.dataset, tx.counters)


# -- reconstruction -----------------------------------------------------

class _ProvIndex:
    def __init__(self, prov: Graph):
        self.by_sp: dict = {}
        for t in prov:
            self.by_sp.setdefault((t.subject, t.predicate), []).append(t.object)

    def objects(self, s, p) -> list:
        return self.by_sp.get((s, p), [])

    def one(self, s, p) -> Atom | None:
        got = self.objects(s, p)
        return got[0] if len(got) == 1 else None


def _record_type(idx: _ProvIndex, g: GraphName, k: int) -> Iri | None:
    t = idx.one(update_iri(g, k), TYPE)
    return t if isinstance(t, Iri) else None


def reconstruct(g: GraphName, index: int, s: ProvStore, *, validate: bool = False) -> Graph:
    """The triples of version `index` of graph `g`.  Stored snapshots
    are returned directly; other versions are replayed from the nearest
    stored ancestor.  With `validate=True`, a stored snapshot at `index`
    is replayed anyway and compared, raising ReplayMismatch on
    disagreement."""
    prov = _prov_triples(s.dataset)
    idx = _ProvIndex(prov)
    subj = _chain_subject(g)
    target_v = version_iri(g, index)
    if Triple(subj, VERSION, target_v) not in prov:
        raise BrokenChain(f"no version {index} recorded for {graph_base(g)}")
    stored = s.dataset.named.get(target_v)
    if stored is not None and not validate:
        return stored

    pending = []
    j = index
    while True:
        vj = version_iri(g, j)
        got = s.dataset.named.get(vj)
        if got is not None and not (validate and j == index):
            content = got
            break
        t = _record_type(idx, g, j)
        if t is None:
            raise BrokenChain(f"missing or ambiguous update record {j} for {graph_base(g)}")
        if t == TYPE_CREATE:
            content = frozenset()
            break
        if j == 0 or Triple(vj, PREV_VERSION, version_iri(g, j - 1)) not in prov:
            raise BrokenChain(f"version chain broken below version {j} of {graph_base(g)}")
        pending.append(j)
        j -= 1

    for k in reversed(pending):
        content = _replay_step(g, k, content, s, idx)
    if validate and stored is not None and content != stored:
        raise ReplayMismatch(
            f"replayed version {index} of {graph_base(g)} disagrees with its stored snapshot")
    return content


def _resolve_ref(ref: Atom, g: GraphName, k: int, prev: Graph, s: ProvStore):
    """A recorded source reference as (graph name, content at record
    time).  `prev` short-circuits the replayed graph's own input."""
    if isinstance(ref, Iri):
        parsed = parse_minted(ref.value)
        if parsed and parsed[1] == "v":
            base, _, j = parsed
            name = _base_to_name(base)
            if name == g and j == k - 1:
                return name, prev
            return name, reconstruct(name, j, s)
        if ref == DEFAULT_GRAPH_IRI:
            return DEFAULT, frozenset()  # untracked default graph was empty
        if ref == PROV_GRAPH:
            raise BrokenChain(
                "cannot replay an update that consulted the provenance graph itself; "
                "its data graph is required")
        stored = s.dataset.named.get(ref)
        if stored is not None:
            return ref, stored  # an immutable graph read under its raw name
    raise BrokenChain(f"cannot resolve recorded source {ref!r} for replay")


def _replay_from_text(u_node: Iri, g: GraphName, k: int, prev: Graph,
                      s: ProvStore, idx: _ProvIndex, *, insert: bool) -> Graph:
    m = idx.one(u_node, META)
    if m is None:
        raise BrokenChain(f"update record {u_node.value} has no metadata")
    text = idx.one(m, TEXT)
    user = idx.one(m, USER)
    time_lit = idx.one(m, TIME)
    if not isinstance(text, Literal) or user is None or not isinstance(time_lit, Literal):
        raise BrokenChain(f"incomplete metadata at {m}")
    seed = update_seed(time_lit.lexical, user, text.lexical)
    parsed = parse_update(text.lexical, skolem=deterministic_skolems(seed))
    if isinstance(parsed, InsertWhere) and insert:
        template, where = parsed.template, parsed.where
    elif isinstance(parsed, DeleteWhere) and not insert:
        template, where = parsed.template, parsed.where
    elif isinstance(parsed, DeleteInsertWhere):
        template = parsed.insert_template if insert else parsed.delete_template
        where = parsed.where
    else:
        raise BrokenChain(f"recorded text does not match the record type at {u_node.value}")

    # Rebuild only the consulted graphs; restricting evaluation to the
    # recorded sources yields the same matches the original update saw.
    temp = Dataset()
    for ref in idx.objects(u_node, SOURCE):
        name, content = _resolve_ref(ref, g, k, prev, s)
        temp = temp.with_graph(name, content)
    built = eval_construct(template, where, temp)
    delta = built.default if g is DEFAULT else (built.graph(g) or frozenset())
    return (prev | delta) if insert else (prev - delta)


def _replay_step(g: GraphName, k: int, prev: Graph, s: ProvStore, idx: _ProvIndex) -> Graph:
    u_node = update_iri(g, k)
    t = _record_type(idx, g, k)
    if t is None:
        raise BrokenChain(f"missing or ambiguous update record {k} for {graph_base(g)}")
    if t == TYPE_CLEAR:
        return frozenset()
    if t in (TYPE_LOAD, TYPE_ADD, TYPE_COPY, TYPE_MOVE):
        refs = idx.objects(u_node, SOURCE)
        if len(refs) != 1:
            raise BrokenChain(f"record {u_node.value} needs exactly one source")
        _, content = _resolve_ref(refs[0], g, k, prev, s)
        return (prev | content) if t in (TYPE_LOAD, TYPE_ADD) else content
    if t in (TYPE_INSERT, TYPE_DELETE):
        d_edge = idx.one(u_node, DATA)
        if not isinstance(d_edge, Iri):
            raise BrokenChain(f"record {u_node.value} has no data graph edge")
        stored = s.dataset.named.get(d_edge)
        if stored is not None:
            return (prev | stored) if t == TYPE_INSERT else (prev - stored)
        return _replay_from_text(u_node, g, k, prev, s, idx, insert=(t == TYPE_INSERT))
    raise BrokenChain(f"unexpected record type {t!r} inside the chain of {graph_base(g)}")


# -- history and integrity ----------------------------------------------

@dataclass(frozen=True)
class HistoryEntry:
    index: int
    verb: str
    user: Atom
    time: str
    text: str


def history_log(g: GraphName, s: ProvStore) -> list[HistoryEntry]:
    """All records on g's chain, oldest first, with their metadata."""
    base = graph_base(g)
    prov = _prov_triples(s.dataset)
    idx = _ProvIndex(prov)
    entries = []
    seen = set()
    for t in prov:
        if t.predicate != TYPE or not isinstance(t.subject, Iri):
            continue
        parsed = parse_minted(t.subject.value)
        if parsed is None or parsed[1] != "u" or parsed[0] != base:
            continue
        k = parsed[2]
        if k in seen:
            raise BrokenChain(f"duplicate record index {k} for {base}")
        seen.add(k)
        verb_iri = idx.one(t.subject, TYPE)
        if verb_iri not in UPDATE_TYPES:
            raise BrokenChain(f"record {t.subject.value} has no single valid type")
        m = idx.one(t.subject, META)
        if m is None:
            raise BrokenChain(f"record {t.subject.value} has no metadata node")
        text = idx.one(m, TEXT)
        user = idx.one(m, USER)
        time_lit = idx.one(m, TIME)
        if not isinstance(text, Literal) or user is None or not isinstance(time_lit, Literal):
            raise BrokenChain(f"incomplete metadata at {m}")
        entries.append(HistoryEntry(k, verb_iri.value.removeprefix(UPD_NS),
                                    user, time_lit.lexical, text.lexical))
    entries.sort(key=lambda e: e.index)
    return entries


def recompute_counters(d: Dataset) -> dict:
    """Next record index per chain, recovered from minted IRIs in the
    provenance graph."""
    highest: dict = {}
    for t in _prov_triples(d):
        for node in (t.subject, t.object):
            if isinstance(node, Iri):
                parsed = parse_minted(node.value)
                if parsed:
                    name = _base_to_name(parsed[0])
                    if parsed[2] > highest.get(name, -1):
                        highest[name] = parsed[2]
    return {g: i + 1 for g, i in highest.items()}


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    detail: str


def verify_history(s: ProvStore) -> list[Violation]:
    """Structural integrity report over the provenance graph; empty
    when every chain is well formed."""
    prov = _prov_triples(s.dataset)
    idx = _ProvIndex(prov)
    out: list[Violation] = []

    def flag(rule, subject, detail):
        out.append(Violation(rule, subject, detail))

    def minted(node, kind):
        if not isinstance(node, Iri):
            return None
        parsed = parse_minted(node.value)
        return parsed if parsed and parsed[1] == kind else None

    current_by_subject: dict = {}
    version_nodes: set = set()
    update_nodes: set = set()
    for t in prov:
        if t.predicate == CURRENT:
            current_by_subject.setdefault(t.subject, []).append(t.object)
        if t.predicate == VERSION and minted(t.object, "v"):
            version_nodes.add(t.object)
        if t.predicate == TYPE and isinstance(t.subject, Iri):
            update_nodes.add(t.subject)

    # exactly one current per live chain, none for dropped graphs
    for subj, versions in current_by_subject.items():
        if len(versions) > 1:
            flag("single-current", format_atom(subj), f"{len(versions)} current versions recorded")
        for v in versions:
            if not minted(v, "v"):
                flag("single-current", format_atom(subj), f"current points at non-version {format_atom(v)}")
            elif Triple(subj, VERSION, v) not in prov:
                flag("single-current", format_atom(subj), f"current version {format_atom(v)} lacks a version edge")
        if subj != DEFAULT_GRAPH_IRI and isinstance(subj, Iri) and subj not in s.dataset.named:
            flag("single-current", format_atom(subj), "current version recorded for an undefined graph")
    for g in s.dataset.named:
        if isinstance(g, Iri) and not parse_minted(g.value) and g != PROV_GRAPH:
            if idx.objects(g, VERSION) and g not in current_by_subject:
                flag("single-current", format_atom(g), "live tracked graph has no current version")

    # chain shape: linear, paired, strictly increasing
    for v in version_nodes:
        prevs = idx.objects(v, PREV_VERSION)
        if len(prevs) > 1:
            flag("chain-linear", format_atom(v), f"{len(prevs)} prevVersion edges")
        here = minted(v, "v")
        for p in prevs:
            if Triple(p, VERSION, v) not in prov:
                flag("chain-pairing", format_atom(v), f"prevVersion to {format_atom(p)} lacks the forward edge")
            before = minted(p, "v")
            if here and before:
                if before[0] != here[0]:
                    flag("chain-base", format_atom(v), "prevVersion crosses between chains")
                elif before[2] >= here[2]:
                    flag("chain-order", format_atom(v), "version indexes do not increase")
        producers = [u for u in update_nodes if v in idx.objects(u, OUTPUT)]
        if len(producers) != 1:
            flag("version-producer", format_atom(v), f"{len(producers)} records output this version")
        elif idx.one(producers[0], TYPE) == TYPE_CREATE:
            if prevs:
                flag("chain-pairing", format_atom(v), "created version has a prevVersion edge")
        elif not prevs:
            flag("chain-pairing", format_atom(v), "non-created version has no prevVersion edge")
    for a in version_nodes:
        succs = [o for o in idx.objects(a, VERSION) if minted(o, "v")]
        if len(succs) > 1:
            flag("chain-linear", format_atom(a), f"{len(succs)} successor versions")
        for b in succs:
            if Triple(b, PREV_VERSION, a) not in prov:
                flag("chain-pairing", format_atom(a), f"version edge to {format_atom(b)} lacks the backlink")

    # record shape
    for u in sorted(update_nodes, key=lambda n: n.value):
        label = format_atom(u)
        types = idx.objects(u, TYPE)
        if len(types) != 1 or types[0] not in UPDATE_TYPES:
            flag("record-type", label, "record needs exactly one known update type")
            continue
        verb = types[0]
        metas = idx.objects(u, META)
        if len(metas) != 1:
            flag("record-meta", label, f"{len(metas)} metadata edges")
        else:
            m = metas[0]
            for pred, what in ((TEXT, "text"), (USER, "user"), (TIME, "time")):
                if len(idx.objects(m, pred)) != 1:
                    flag("meta-complete", format_atom(m), f"metadata lacks exactly one {what}")
        inputs = idx.objects(u, INPUT)
        outputs = idx.objects(u, OUTPUT)
        if verb == TYPE_CREATE:
            if inputs:
                flag("record-input", label, "create records take no input")
        elif len(inputs) != 1:
            flag("record-input", label, f"{len(inputs)} input versions")
        if verb == TYPE_DROP:
            if outputs:
                flag("record-output", label, "drop records produce no output")
        elif len(outputs) != 1:
            flag("record-output", label, f"{len(outputs)} output versions")
        if verb in (TYPE_INSERT, TYPE_DELETE) and len(idx.objects(u, DATA)) != 1:
            flag("record-data", label, "insert/delete records need exactly one data edge")

    return out
