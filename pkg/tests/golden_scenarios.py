"""Shared scenario table for the provenance-record golden files.

Each scenario is a short session ending with the featured verb.  The
golden file holds the full provenance graph after the last statement,
serialized as sorted triple lines, produced under a fixed user and a
clock that ticks one second per statement.  Regenerate with::

    python3 tests/make_goldens.py

and review the diff before committing.
"""

from datetime import datetime, timedelta, timezone
from pathlib import Path

from quadvc.model import Iri
from quadvc.nquads import serialize_graph
from quadvc.store import Store
from quadvc.vocab import PROV_GRAPH

GOLDEN_DIR = Path(__file__).parent / "goldens"
USER = "<urn:user:alice>"
T0 = datetime(2026, 1, 1, 12, 0, 0, tzinfo=timezone.utc)

_CREATE = "CREATE GRAPH <urn:g>"
_INSERT = "INSERT DATA { GRAPH <urn:g> { <urn:s> <urn:p> <urn:o> } }"
_CREATE_H = "CREATE GRAPH <urn:h>"

SCENARIOS = {
    "create": [_CREATE],
    "insert_data": [_CREATE, _INSERT],
    "insert_where": [
        "INSERT DATA { <urn:s> <urn:p> <urn:o> }",
        _CREATE,
        "INSERT { GRAPH <urn:g> { ?s <urn:q> ?o } } WHERE { ?s <urn:p> ?o . }",
    ],
    "delete_data": [
        _CREATE, _INSERT,
        "DELETE DATA { GRAPH <urn:g> { <urn:s> <urn:p> <urn:o> } }",
    ],
    "delete_where": [
        _CREATE, _INSERT,
        "DELETE { GRAPH <urn:g> { ?s <urn:p> ?o } } "
        "WHERE { GRAPH <urn:g> { ?s <urn:p> ?o . } }",
    ],
    "delete_insert": [
        _CREATE, _INSERT,
        "DELETE { GRAPH <urn:g> { ?s <urn:p> ?o } } "
        "INSERT { GRAPH <urn:g> { ?o <urn:p> ?s } } "
        "WHERE { GRAPH <urn:g> { ?s <urn:p> ?o . } }",
    ],
    "clear": [_CREATE, _INSERT, "CLEAR GRAPH <urn:g>"],
    "drop": [_CREATE, _INSERT, "DROP GRAPH <urn:g>"],
    "load": [_CREATE, _INSERT, "LOAD GRAPH <urn:g>"],
    "add": [_CREATE, _INSERT, _CREATE_H, "ADD GRAPH <urn:g> TO GRAPH <urn:h>"],
    "copy": [_CREATE, _INSERT, _CREATE_H, "COPY GRAPH <urn:g> TO GRAPH <urn:h>"],
    "move": [_CREATE, _INSERT, _CREATE_H, "MOVE GRAPH <urn:g> TO GRAPH <urn:h>"],
}


def run_scenario(statements, root) -> str:
    """The provenance graph after the session, as text."""
    store = Store.init(root)
    for i, text in enumerate(statements):
        store.apply(text, user=Iri("urn:user:alice"),
                    time=T0 + timedelta(seconds=i))
    return serialize_graph(store.dataset.graph(PROV_GRAPH) or frozenset())
