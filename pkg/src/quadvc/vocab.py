"""IRI constants for the update-provenance vocabulary.

Record-level properties live under `urn:upd:vocab#`.  Each one
specializes a W3C PROV-O property (or rdfs:seeAlso for the metadata
link), so the records can be projected into plain PROV by replacing
every property with its supertype.

The provenance records themselves are stored in the reserved named
graph `urn:upd:prov`.  The anonymous default graph, which has no IRI of
its own, is tracked under the stand-in `urn:upd:default`.
"""

from __future__ import annotations

from .model import Iri

UPD_NS = "urn:upd:vocab#"

INPUT = Iri(UPD_NS + "input")
OUTPUT = Iri(UPD_NS + "output")
DATA = Iri(UPD_NS + "data")
VERSION = Iri(UPD_NS + "version")
PREV_VERSION = Iri(UPD_NS + "prevVersion")
TYPE = Iri(UPD_NS + "type")
CURRENT = Iri(UPD_NS + "current")
SOURCE = Iri(UPD_NS + "source")
META = Iri(UPD_NS + "meta")
USER = Iri(UPD_NS + "user")
TEXT = Iri(UPD_NS + "text")
TIME = Iri(UPD_NS + "time")

TYPE_INSERT = Iri(UPD_NS + "insert")
TYPE_DELETE = Iri(UPD_NS + "delete")
TYPE_LOAD = Iri(UPD_NS + "load")
TYPE_CLEAR = Iri(UPD_NS + "clear")
TYPE_CREATE = Iri(UPD_NS + "create")
TYPE_DROP = Iri(UPD_NS + "drop")
TYPE_COPY = Iri(UPD_NS + "copy")
TYPE_MOVE = Iri(UPD_NS + "move")
TYPE_ADD = Iri(UPD_NS + "add")

UPDATE_TYPES = frozenset((
    TYPE_INSERT, TYPE_DELETE, TYPE_LOAD, TYPE_CLEAR, TYPE_CREATE,
    TYPE_DROP, TYPE_COPY, TYPE_MOVE, TYPE_ADD,
))

PROV_GRAPH = Iri("urn:upd:prov")
DEFAULT_GRAPH_IRI = Iri("urn:upd:default")

PROV_NS = "http://www.w3.org/ns/prov#"
RDFS_SEEALSO = Iri("http://www.w3.org/2000/01/rdf-schema#seeAlso")
XSD_DATETIME = "http://www.w3.org/2001/XMLSchema#dateTime"

# Each record property's PROV-O supertype.
PROV_SUPERTYPE = {
    INPUT: Iri(PROV_NS + "wasUsedBy"),
    OUTPUT: Iri(PROV_NS + "generated"),
    DATA: Iri(PROV_NS + "wasUsedBy"),
    VERSION: Iri(PROV_NS + "hadRevision"),
    PREV_VERSION: Iri(PROV_NS + "wasRevisionOf"),
    TYPE: Iri(PROV_NS + "type"),
    CURRENT: Iri(PROV_NS + "hadRevision"),
    SOURCE: Iri(PROV_NS + "wasUsedBy"),
    META: RDFS_SEEALSO,
    USER: Iri(PROV_NS + "wasAttributedTo"),
    TEXT: Iri(PROV_NS + "value"),
    TIME: Iri(PROV_NS + "atTime"),
}
