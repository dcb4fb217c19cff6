"""Line-oriented dataset text format.

One triple per line: `<s> <p> <o> .` for the default graph and
`<s> <p> <o> <g> .` for a named graph.  Output is canonical: default
graph first, then named graphs in term order, triples in term order
within each graph.  Equal datasets therefore always serialize to
identical bytes, and parse(serialize(d)) == d.

Our triples are more liberal than classic N-Quads: any term, literals
included, may occupy any of the four positions.  The parser accepts
blank-node labels (`_:x`) and replaces them with fresh `urn:skolem:` IRIs,
one per label per document.
"""

from __future__ import annotations

import uuid

from .model import Atom, Dataset, Iri, Literal, Triple

SKOLEM_PREFIX = "urn:skolem:"


class ParseError(ValueError):
    """Syntax error in query, update or dataset text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


def fresh_skolem() -> Iri:
    return Iri(SKOLEM_PREFIX + str(uuid.uuid4()))


def seeded_skolem(seed: str, label: str) -> Iri:
    """Deterministic skolem IRI for replay: same seed and label, same IRI."""
    ns = uuid.uuid5(uuid.NAMESPACE_URL, SKOLEM_PREFIX)
    return Iri(SKOLEM_PREFIX + str(uuid.uuid5(ns, seed + "\x00" + label)))


# -- escaping -----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def escape_string(s: str) -> str:
    out = []
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


# -- canonical term output ----------------------------------------------

def format_atom(a: Atom) -> str:
    if isinstance(a, Iri):
        return f"<{a.value}>"
    out = '"' + escape_string(a.lexical) + '"'
    if a.language is not None:
        out += "@" + a.language
    elif a.datatype is not None:
        out += "^^<" + a.datatype + ">"
    return out


def atom_key(a: Atom):
    if isinstance(a, Iri):
        return (0, a.value, "", "")
    return (1, a.lexical, a.datatype or "", a.language or "")


def triple_key(t: Triple):
    return (atom_key(t.subject), atom_key(t.predicate), atom_key(t.object))


def format_triple(t: Triple) -> str:
    return f"{format_atom(t.subject)} {format_atom(t.predicate)} {format_atom(t.object)} ."


def serialize_graph(triples) -> str:
    """Canonical triple lines for one graph (no graph label column)."""
    lines = [format_triple(t) for t in sorted(triples, key=triple_key)]
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_dataset(d: Dataset) -> str:
    """Canonical dataset text: default-graph triples, then named graphs
    in name order.  A named graph with no triples is kept as a line
    holding just its name, since a quad line cannot say "this graph
    exists and is empty" and that distinction matters here."""
    lines = [format_triple(t) for t in sorted(d.default, key=triple_key)]
    for g in sorted(d.named, key=atom_key):
        label = format_atom(g)
        triples = sorted(d.named[g], key=triple_key)
        if not triples:
            lines.append(f"{label} .")
        for t in triples:
            lines.append(f"{format_atom(t.subject)} {format_atom(t.predicate)} {format_atom(t.object)} {label} .")
    return "\n".join(lines) + ("\n" if lines else "")


# -- parsing ------------------------------------------------------------

class _LineScanner:
    """Term scanner over one line of dataset text."""

    def __init__(self, text: str, line_no: int):
        self.text = text
        self.pos = 0
        self.line_no = line_no

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line_no, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_dot(self):
        self.skip_ws()
        if self.peek() != ".":
            raise self.error("expected '.' at end of statement")
        self.pos += 1

    def read_iri_body(self) -> str:
        # caller consumed '<'
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == ">":
                value = self.text[start:self.pos]
                self.pos += 1
                if not value:
                    raise self.error("empty IRI")
                return value
            if ch in " \t<\"{}|^`":
                raise self.error(f"illegal character {ch!r} in IRI")
            self.pos += 1
        raise self.error("unterminated IRI")

    def read_string_body(self) -> str:
        # caller consumed the opening quote
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == '"':
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                if self.pos >= len(self.text):
                    break
                esc = self.text[self.pos]
                if esc in _UNESCAPES:
                    out.append(_UNESCAPES[esc])
                    self.pos += 1
                elif esc == "u":
                    hexed = self.text[self.pos + 1:self.pos + 5]
                    if len(hexed) != 4:
                        raise self.error("truncated \\u escape")
                    try:
                        out.append(chr(int(hexed, 16)))
                    except ValueError:
                        raise self.error(f"bad \\u escape {hexed!r}") from None
                    self.pos += 5
                else:
                    raise self.error(f"unknown escape \\{esc}")
            else:
                out.append(ch)
                self.pos += 1
        raise self.error("unterminated string literal")

    def read_word(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-"):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a name")
        return self.text[start:self.pos]

    def read_term(self, skolems) -> Atom:
        ch = self.peek()
        if ch == "<":
            self.pos += 1
            return Iri(self.read_iri_body())
        if ch == '"':
            self.pos += 1
            lexical = self.read_string_body()
            if self.pos < len(self.text) and self.text[self.pos] == "@":
                self.pos += 1
                return Literal(lexical, language=self.read_word())
            if self.text[self.pos:self.pos + 2] == "^^":
                self.pos += 2
                if self.peek() != "<":
                    raise self.error("expected <iri> after ^^")
                self.pos += 1
                return Literal(lexical, datatype=self.read_iri_body())
            return Literal(lexical)
        if ch == "_" and self.text[self.pos:self.pos + 2] == "_:":
            self.pos += 2
            label = self.read_word()
            if label not in skolems:
                skolems[label] = fresh_skolem()
            return skolems[label]
        if not ch:
            raise self.error("unexpected end of line")
        raise self.error(f"unexpected character {ch!r}")


def parse_atom(text: str) -> Atom:
    """Parse one term in dataset syntax, e.g. `<urn:a>` or `"x"@en`."""
    sc = _LineScanner(text, 1)
    atom = sc.read_term({})
    if not sc.at_end():
        raise sc.error("trailing text after term")
    return atom


def parse_dataset(text: str) -> Dataset:
    """Parse dataset text.  Blank lines and `#` comment lines are
    ignored.  A line holding a single term declares that named graph
    with no triples.  Blank-node labels are skolemized once per
    document."""
    default = set()
    named: dict[Atom, set] = {}
    skolems: dict[str, Iri] = {}
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sc = _LineScanner(raw, line_no)
        terms = [sc.read_term(skolems)]
        while sc.peek() != "." and not sc.at_end():
            terms.append(sc.read_term(skolems))
            if len(terms) > 4:
                raise sc.error("too many terms on one line")
        sc.take_dot()
        if not sc.at_end():
            raise sc.error("trailing text after '.'")
        if len(terms) == 1:
            named.setdefault(terms[0], set())
        elif len(terms) == 2:
            raise sc.error("a statement needs subject, predicate and object")
        elif len(terms) == 3:
            default.add(Triple(*terms))
        else:
            named.setdefault(terms[3], set()).add(Triple(terms[0], terms[1], terms[2]))
    return Dataset(frozenset(default), {g: frozenset(ts) for g, ts in named.items()})
