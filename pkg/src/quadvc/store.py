"""Durable store: one dataset file plus an append-only commit log.

Layout under the store root:

* ``config``   key=value settings fixed at init time
* ``state.nq`` the whole dataset (user graphs, provenance, snapshots)
* ``log``      one JSON object per applied update: seq, time, user,
  update text, and the sha256 of the state file after the commit
* ``.lock``    advisory file lock serializing writers

A commit writes the new state to a temp file, renames it over
``state.nq``, then appends the log line.  ``open`` cross-checks the log
tail digest against the state file, so a torn commit or any out-of-band
edit surfaces as :class:`CorruptStoreError`.  ``verify`` goes further:
structural provenance checks, snapshot-policy coverage, reconstruction
of every live graph, and a full replay of the log comparing the state
digest after every step.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from .algebra import eval_query
from .model import DEFAULT, Atom, Dataset, GraphName, Iri
from .nquads import ParseError, format_atom, parse_atom, parse_dataset, serialize_dataset
from .parser import deterministic_skolems, parse_query, parse_update
from .provenance import (
    HistoryEntry, ProvenanceError, ProvStore, UpdateMeta,
    apply_with_provenance, current_version, format_time, history_log,
    new_versions_between, parse_minted, reconstruct, recompute_counters,
    snapshot_due, update_seed, verify_history,
)
from .vocab import CURRENT, DATA, DEFAULT_GRAPH_IRI, PROV_GRAPH, TYPE, TYPE_CREATE, VERSION

STATE_FILE = "state.nq"
LOG_FILE = "log"
CONFIG_FILE = "config"
LOCK_FILE = ".lock"
LOCK_TIMEOUT = 10.0
DEFAULT_USER = Iri("urn:user:anonymous")


class CorruptStoreError(Exception):
    pass


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_time(text: str) -> datetime:
    return datetime.fromisoformat(text.replace("Z", "+00:00"))


@dataclass(frozen=True)
class StoreConfig:
    snapshot_interval: int | None = 1
    materialize_data_graphs: bool = True


@dataclass(frozen=True)
class CommitLogEntry:
    seq: int
    time: str
    user: str  # term syntax, e.g. <urn:user:alice>
    text: str
    digest: str


def _dump_config(c: StoreConfig) -> str:
    interval = "none" if c.snapshot_interval is None else str(c.snapshot_interval)
    data = "true" if c.materialize_data_graphs else "false"
    return f"snapshot_interval={interval}\nmaterialize_data_graphs={data}\n"


def _load_config(text: str) -> StoreConfig:
    fields = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CorruptStoreError(f"bad config line: {line!r}")
        fields[key.strip()] = value.strip()
    try:
        raw = fields["snapshot_interval"]
        interval = None if raw == "none" else int(raw)
        data = {"true": True, "false": False}[fields["materialize_data_graphs"]]
    except (KeyError, ValueError):
        raise CorruptStoreError("config is missing or malformed") from None
    if interval is not None and interval < 1:
        raise CorruptStoreError("snapshot_interval must be >= 1 or none")
    return StoreConfig(interval, data)


def _parse_log(text: str) -> list[CommitLogEntry]:
    entries = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            entries.append(CommitLogEntry(int(raw["seq"]), str(raw["time"]),
                                          str(raw["user"]), str(raw["text"]),
                                          str(raw["digest"])))
        except (ValueError, KeyError, TypeError):
            raise CorruptStoreError(f"log line {n} is malformed") from None
    return entries


def _write_atomic(path: Path, text: str):
    tmp = path.parent / (path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


class Store:
    """A versioned dataset on disk.  Use :meth:`init` or :meth:`open`."""

    def __init__(self, root: Path, config: StoreConfig, state: ProvStore,
                 entries: list[CommitLogEntry], state_digest: str):
        self.root = root
        self.config = config
        self.state = state
        self.entries = entries
        self._state_digest = state_digest

    @property
    def dataset(self) -> Dataset:
        return self.state.dataset

    @classmethod
    def init(cls, root, *, snapshot_interval: int | None = 1,
             materialize_data_graphs: bool = True) -> "Store":
        root = Path(root)
        for name in (CONFIG_FILE, STATE_FILE, LOG_FILE):
            if (root / name).exists():
                raise FileExistsError(f"a store already exists at {root}")
        config = StoreConfig(snapshot_interval, materialize_data_graphs)
        root.mkdir(parents=True, exist_ok=True)
        _write_atomic(root / CONFIG_FILE, _dump_config(config))
        _write_atomic(root / STATE_FILE, "")
        _write_atomic(root / LOG_FILE, "")
        return cls(root, config, ProvStore(), [], digest_text(""))

    @classmethod
    def open(cls, root) -> "Store":
        root = Path(root)
        try:
            config = _load_config((root / CONFIG_FILE).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise CorruptStoreError(f"no store at {root}") from None
        try:
            state_text = (root / STATE_FILE).read_text(encoding="utf-8")
            log_text = (root / LOG_FILE).read_text(encoding="utf-8")
        except FileNotFoundError as e:
            raise CorruptStoreError(f"store file missing: {e.filename}") from None
        entries = _parse_log(log_text)
        for i, e in enumerate(entries):
            if e.seq != i + 1:
                raise CorruptStoreError(f"log sequence broken at entry {i + 1} (seq {e.seq})")
        digest = digest_text(state_text)
        expected = entries[-1].digest if entries else digest_text("")
        if digest != expected:
            raise CorruptStoreError("state file does not match the last committed digest")
        try:
            dataset = parse_dataset(state_text)
        except ParseError as e:
            raise CorruptStoreError(f"state file unparseable: {e}") from None
        return cls(root, config, ProvStore(dataset, recompute_counters(dataset)),
                   entries, digest)

    # -- reads ----------------------------------------------------------

    def query(self, text: str):
        """Evaluate a query over the full dataset, provenance included."""
        return eval_query(parse_query(text), self.dataset)

    def history(self, g: GraphName) -> list[HistoryEntry]:
        return history_log(g, self.state)

    def reconstruct(self, g: GraphName, index: int | None = None, *,
                    validate: bool = False):
        """Triples of version `index` of `g`; current version when
        `index` is None."""
        if index is None:
            index = current_version(g, self.state)[0]
        return reconstruct(g, index, self.state, validate=validate)

    # -- writes ---------------------------------------------------------

    def apply(self, text: str, *, user: Atom = DEFAULT_USER,
              time: datetime | None = None) -> list[Iri]:
        """Parse and apply one update statement; returns the version
        IRIs it minted, in chain order."""
        when = time if time is not None else datetime.now(timezone.utc)
        with FileLock(str(self.root / LOCK_FILE), timeout=LOCK_TIMEOUT):
            self._refresh()
            time_lex = format_time(when)
            seed = update_seed(time_lex, user, text)
            u = parse_update(text, skolem=deterministic_skolems(seed))
            meta = UpdateMeta(user=user, time=when, text=text)
            new_state = apply_with_provenance(
                u, meta, self.state,
                snapshot_interval=self.config.snapshot_interval,
                materialize_data_graphs=self.config.materialize_data_graphs)
            minted = new_versions_between(self.state, new_state)
            self._commit(new_state, time_lex, user, text)
        return minted

    def _refresh(self):
        """Pick up commits another process made since we loaded."""
        try:
            on_disk = digest_text((self.root / STATE_FILE).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise CorruptStoreError("state file missing") from None
        if on_disk != self._state_digest:
            fresh = Store.open(self.root)
            self.config = fresh.config
            self.state = fresh.state
            self.entries = fresh.entries
            self._state_digest = fresh._state_digest

    def _commit(self, new_state: ProvStore, time_lex: str, user: Atom, text: str):
        state_text = serialize_dataset(new_state.dataset)
        digest = digest_text(state_text)
        _write_atomic(self.root / STATE_FILE, state_text)
        entry = CommitLogEntry(len(self.entries) + 1, time_lex, format_atom(user),
                               text, digest)
        with open(self.root / LOG_FILE, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"seq": entry.seq, "time": entry.time,
                                 "user": entry.user, "text": entry.text,
                                 "digest": entry.digest}) + "\n")
        self.state = new_state
        self.entries.append(entry)
        self._state_digest = digest

    # -- integrity ------------------------------------------------------

    def verify(self) -> list[str]:
        """Full integrity report; an empty list means the store checks
        out.  Never raises for store damage, it reports instead."""
        problems: list[str] = []
        try:
            state_text = (self.root / STATE_FILE).read_text(encoding="utf-8")
            log_text = (self.root / LOG_FILE).read_text(encoding="utf-8")
        except OSError as e:
            return [f"store file unreadable: {e}"]
        try:
            entries = _parse_log(log_text)
        except CorruptStoreError as e:
            return [str(e)]
        for i, e in enumerate(entries):
            if e.seq != i + 1:
                problems.append(f"log sequence broken at entry {i + 1} (seq {e.seq})")
        expected = entries[-1].digest if entries else digest_text("")
        if digest_text(state_text) != expected:
            problems.append("state file does not match the last committed digest")
        try:
            dataset = parse_dataset(state_text)
        except ParseError as e:
            problems.append(f"state file unparseable: {e}")
            return problems
        store = ProvStore(dataset, recompute_counters(dataset))

        for v in verify_history(store):
            problems.append(f"{v.rule}: {v.subject}: {v.detail}")
        problems.extend(self._check_materialization(store))
        problems.extend(self._check_live_graphs(store))
        problems.extend(self._replay_log(entries))
        return problems

    def _check_materialization(self, store: ProvStore) -> list[str]:
        """Every version the snapshot policy promises must be stored;
        same for data graphs when the config keeps them."""
        problems = []
        prov = store.dataset.graph(PROV_GRAPH) or frozenset()
        created = set()
        for t in prov:
            if t.predicate == TYPE and t.object == TYPE_CREATE and isinstance(t.subject, Iri):
                parsed = parse_minted(t.subject.value)
                if parsed and parsed[1] == "u":
                    created.add((parsed[0], parsed[2]))
        for t in prov:
            if t.predicate == VERSION and isinstance(t.object, Iri):
                subj_minted = isinstance(t.subject, Iri) and parse_minted(t.subject.value)
                if subj_minted:
                    continue  # version-to-version edge, not a chain edge
                parsed = parse_minted(t.object.value)
                if not parsed or parsed[1] != "v":
                    continue
                base, _, i = parsed
                due = snapshot_due(i, self.config.snapshot_interval) or (base, i) in created
                if due and t.object not in store.dataset.named:
                    problems.append(f"snapshot-policy: {format_atom(t.object)}: "
                                    f"promised snapshot is not stored")
            if (t.predicate == DATA and self.config.materialize_data_graphs
                    and isinstance(t.object, Iri) and t.object not in store.dataset.named):
                problems.append(f"snapshot-policy: {format_atom(t.object)}: "
                                f"recorded data graph is not stored")
        return problems

    def _check_live_graphs(self, store: ProvStore) -> list[str]:
        """Each live chain's recorded current version must reconstruct
        to exactly the live graph's content."""
        problems = []
        prov = store.dataset.graph(PROV_GRAPH) or frozenset()
        for t in prov:
            if t.predicate != CURRENT:
                continue
            name: GraphName = DEFAULT if t.subject == DEFAULT_GRAPH_IRI else t.subject
            live = (store.dataset.default if name is DEFAULT
                    else store.dataset.graph(name))
            if live is None:
                continue  # structural check already flags this
            parsed = parse_minted(t.object.value) if isinstance(t.object, Iri) else None
            if not parsed or parsed[1] != "v":
                continue
            try:
                content = reconstruct(name, parsed[2], store, validate=True)
            except ProvenanceError as e:
                problems.append(f"reconstruction: {format_atom(t.object)}: {e}")
                continue
            if content != live:
                problems.append(f"reconstruction: {format_atom(t.object)}: "
                                f"current version disagrees with the live graph")
        return problems

    def _replay_log(self, entries: list[CommitLogEntry]) -> list[str]:
        replayed = ProvStore()
        for e in entries:
            try:
                user = parse_atom(e.user)
                u = parse_update(e.text, skolem=deterministic_skolems(
                    update_seed(e.time, user, e.text)))
                meta = UpdateMeta(user=user, time=parse_time(e.time), text=e.text)
                replayed = apply_with_provenance(
                    u, meta, replayed,
                    snapshot_interval=self.config.snapshot_interval,
                    materialize_data_graphs=self.config.materialize_data_graphs)
            except Exception as ex:
                return [f"log-replay: entry {e.seq}: replay failed: {ex}"]
            if digest_text(serialize_dataset(replayed.dataset)) != e.digest:
                return [f"log-replay: entry {e.seq}: replayed state diverges from the log digest"]
        return []
