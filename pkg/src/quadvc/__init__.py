"""Versioned RDF quad store with queryable update provenance."""

from .algebra import (
    Truth3, Valuation, eval_condition, eval_construct, eval_pattern,
    eval_query, eval_select, instantiate,
)
from .model import DEFAULT, Atom, Dataset, Graph, GraphName, Iri, Literal, Triple
from .nquads import ParseError, parse_dataset, serialize_dataset
from .parser import deterministic_skolems, parse_query, parse_update
from .printer import format_query, format_select_rows, format_update
from .provenance import (
    BrokenChain, HistoryEntry, MintCollision, NoCurrentVersion,
    ProvenanceError, ProvStore, ProvTargetViolation, ReplayMismatch,
    StaticTargetError, UpdateMeta, Violation, apply_with_provenance,
    current_version, history_log, pattern_sources, query_sources,
    reconstruct, snapshot_due, verify_history,
)
from .store import CorruptStoreError, Store, StoreConfig
from .update import CreateExists, GraphUndefined, UpdateError, apply_update

__version__ = "0.1.0"
