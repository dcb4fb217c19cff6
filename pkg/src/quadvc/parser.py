"""Parser for the query and update language.

Keywords are case-insensitive.  The surface grammar, roughly:

    query  := prologue ( SELECT var+ WHERE group
                       | CONSTRUCT '{' template '}' WHERE group )
    update := prologue ( INSERT DATA '{' template '}'
                       | INSERT '{' template '}' WHERE group
                       | DELETE DATA '{' template '}'
                       | DELETE '{' template '}' [INSERT '{' template '}'] WHERE group
                       | LOAD ref [INTO ref] | CLEAR ref
                       | CREATE GRAPH iri | DROP GRAPH iri
                       | COPY ref TO ref | MOVE ref TO ref | ADD ref TO ref )
    group  := '{' body '}'
    ref    := [GRAPH] iri | DEFAULT

Inside a group body, runs of triple patterns and GRAPH blocks fuse into
one basic pattern; braced subgroups, UNION, OPTIONAL and FILTER combine
whole patterns, with FILTER applying to the entire group.  GRAPH blocks
admit only triple patterns: nesting any operator inside GRAPH is a parse
error by design.

PREFIX declarations are handled by a purely lexical pre-pass that
rewrites prefixed-name tokens into full IRI tokens before parsing
begins.  Blank-node labels are replaced at parse time by fresh
`urn:skolem:` IRIs, one IRI per label per statement; pass a `skolem`
factory to make that substitution deterministic (the store does, so
that replaying logged text reproduces identical states).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .ast import (
    Add, And, BasicPattern, Bound, Clear, Condition, Construct, Copy, Create,
    DeleteInsertWhere, DeleteWhere, Drop, Equals, Filter, GraphBlock, InsertWhere,
    Join, Load, Move, Not, Opt, Or, Pattern, Query, Select, TriplePattern,
    TripleBlock, Union, Update, Var, is_ground,
)
from .model import DEFAULT, GraphName, Iri, Literal
from .nquads import ParseError, fresh_skolem, seeded_skolem

__all__ = ["ParseError", "parse_query", "parse_update", "deterministic_skolems"]


def deterministic_skolems(seed: str) -> Callable[[str], Iri]:
    """Skolem factory that derives the IRI from the seed and the label."""
    return lambda label: seeded_skolem(seed, label)


# -- tokens -------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str
    value: object
    line: int
    col: int


_PUNCT = {"{": "LBRACE", "}": "RBRACE", "(": "LPAREN", ")": "RPAREN",
          ".": "DOT", "=": "EQ", "!": "BANG"}

_WORD_START = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_"


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek_char(self, off: int = 0) -> str:
        i = self.pos + off
        return self.text[i] if i < len(self.text) else ""

    def _word(self) -> str:
        start = self.pos
        while self._peek_char() and (self._peek_char().isalnum() or self._peek_char() in "_-"):
            self._advance()
        return self.text[start:self.pos]

    def _iri_body(self) -> str:
        # opening '<' consumed
        start = self.pos
        while self._peek_char():
            ch = self._peek_char()
            if ch == ">":
                value = self.text[start:self.pos]
                self._advance()
                if not value:
                    raise self._error("empty IRI")
                return value
            if ch in ' \t\n<"{}|^`':
                raise self._error(f"illegal character {ch!r} in IRI")
            self._advance()
        raise self._error("unterminated IRI")

    def _string_body(self) -> str:
        # opening '"' consumed
        out = []
        while self._peek_char():
            ch = self._peek_char()
            if ch == '"':
                self._advance()
                return "".join(out)
            if ch == "\n":
                raise self._error("newline in string literal (use \\n)")
            if ch == "\\":
                esc = self._peek_char(1)
                if esc in ('"', "\\"):
                    out.append(esc)
                    self._advance(2)
                elif esc == "n":
                    out.append("\n")
                    self._advance(2)
                elif esc == "r":
                    out.append("\r")
                    self._advance(2)
                elif esc == "t":
                    out.append("\t")
                    self._advance(2)
                elif esc == "u":
                    hexed = self.text[self.pos + 2:self.pos + 6]
                    if len(hexed) != 4:
                        raise self._error("truncated \\u escape")
                    try:
                        out.append(chr(int(hexed, 16)))
                    except ValueError:
                        raise self._error(f"bad \\u escape {hexed!r}") from None
                    self._advance(6)
                else:
                    raise self._error(f"unknown escape \\{esc}")
            else:
                out.append(ch)
                self._advance()
        raise self._error("unterminated string literal")

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            while self._peek_char() and self._peek_char() in " \t\r\n":
                self._advance()
            if self._peek_char() == "#":
                while self._peek_char() and self._peek_char() != "\n":
                    self._advance()
                continue
            line, col = self.line, self.col
            ch = self._peek_char()
            if not ch:
                out.append(_Token("EOF", None, line, col))
                return out
            if ch == "<":
                self._advance()
                out.append(_Token("IRI", self._iri_body(), line, col))
            elif ch == "?":
                self._advance()
                name = self._word()
                if not name:
                    raise self._error("expected variable name after '?'")
                out.append(_Token("VAR", name, line, col))
            elif ch == '"':
                self._advance()
                lexical = self._string_body()
                if self._peek_char() == "@":
                    self._advance()
                    tag = self._word()
                    if not tag:
                        raise self._error("expected language tag after '@'")
                    out.append(_Token("LITERAL", Literal(lexical, language=tag), line, col))
                elif self._peek_char() == "^" and self._peek_char(1) == "^":
                    self._advance(2)
                    if self._peek_char() == "<":
                        self._advance()
                        out.append(_Token("LITERAL", Literal(lexical, datatype=self._iri_body()), line, col))
                    elif self._peek_char() in _WORD_START or self._peek_char() == ":":
                        # datatype as prefixed name, resolved by the prefix pass
                        prefix = self._word()
                        if self._peek_char() != ":":
                            raise self._error("expected ':' in prefixed datatype name")
                        self._advance()
                        local = self._word()
                        out.append(_Token("PNAMELIT", (lexical, prefix, local), line, col))
                    else:
                        raise self._error("expected datatype IRI after '^^'")
                else:
                    out.append(_Token("LITERAL", Literal(lexical), line, col))
            elif ch == "_" and self._peek_char(1) == ":":
                self._advance(2)
                label = self._word()
                if not label:
                    raise self._error("expected blank node label after '_:'")
                out.append(_Token("BLANK", label, line, col))
            elif ch == "&" and self._peek_char(1) == "&":
                self._advance(2)
                out.append(_Token("ANDAND", "&&", line, col))
            elif ch == "|" and self._peek_char(1) == "|":
                self._advance(2)
                out.append(_Token("OROR", "||", line, col))
            elif ch in _PUNCT:
                self._advance()
                out.append(_Token(_PUNCT[ch], ch, line, col))
            elif ch in _WORD_START or ch == ":":
                word = self._word() if ch != ":" else ""
                if self._peek_char() == ":":
                    self._advance()
                    local = self._word()
                    out.append(_Token("PNAME", (word, local), line, col))
                else:
                    out.append(_Token("WORD", word, line, col))
            else:
                raise self._error(f"unexpected character {ch!r}")


def _expand_prefixes(tokens: list[_Token]) -> list[_Token]:
    """Consume leading PREFIX declarations, then rewrite prefixed-name
    tokens into plain IRI tokens.  Purely lexical."""
    prefixes: dict[str, str] = {}
    i = 0
    while (tokens[i].kind == "WORD" and str(tokens[i].value).upper() == "PREFIX"):
        decl = tokens[i + 1]
        if decl.kind != "PNAME" or decl.value[1] != "":
            raise ParseError("expected 'name:' after PREFIX", decl.line, decl.col)
        iri_tok = tokens[i + 2]
        if iri_tok.kind != "IRI":
            raise ParseError("expected <iri> in PREFIX declaration", iri_tok.line, iri_tok.col)
        prefixes[decl.value[0]] = iri_tok.value
        i += 3

    def resolve(tok: _Token, prefix: str, local: str) -> str:
        if prefix not in prefixes:
            raise ParseError(f"unknown prefix {prefix + ':'!r}", tok.line, tok.col)
        return prefixes[prefix] + local

    out = []
    for tok in tokens[i:]:
        if tok.kind == "PNAME":
            out.append(_Token("IRI", resolve(tok, *tok.value), tok.line, tok.col))
        elif tok.kind == "PNAMELIT":
            lexical, prefix, local = tok.value
            out.append(_Token("LITERAL", Literal(lexical, datatype=resolve(tok, prefix, local)),
                              tok.line, tok.col))
        else:
            out.append(tok)
    return out


# -- recursive descent --------------------------------------------------

_TERM_KINDS = ("IRI", "LITERAL", "VAR", "BLANK")
_NESTED_WORDS = ("GRAPH", "OPTIONAL", "FILTER", "UNION")


class _Parser:
    def __init__(self, tokens: list[_Token], skolem: Callable[[str], Iri] | None):
        self.tokens = tokens
        self.pos = 0
        self._skolem = skolem or (lambda label: fresh_skolem())
        self._skolem_memo: dict[str, Iri] = {}

    # token plumbing

    def peek(self, off: int = 0) -> _Token:
        i = min(self.pos + off, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> _Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.error(f"expected {what}")
        return self.next()

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "WORD" and str(tok.value).upper() in words

    def expect_word(self, word: str):
        if not self.at_word(word):
            raise self.error(f"expected {word}")
        self.next()

    def at_term(self, off: int = 0) -> bool:
        return self.peek(off).kind in _TERM_KINDS

    def skip_dots(self):
        while self.peek().kind == "DOT":
            self.next()

    # terms

    def term(self):
        tok = self.next()
        if tok.kind == "IRI":
            return Iri(tok.value)
        if tok.kind == "LITERAL":
            return tok.value
        if tok.kind == "VAR":
            return Var(tok.value)
        if tok.kind == "BLANK":
            label = tok.value
            if label not in self._skolem_memo:
                self._skolem_memo[label] = self._skolem(label)
            return self._skolem_memo[label]
        raise self.error("expected a term", tok)

    def graph_term(self):
        tok = self.peek()
        if tok.kind == "IRI":
            self.next()
            return Iri(tok.value)
        if tok.kind == "VAR":
            self.next()
            return Var(tok.value)
        raise self.error("graph name must be an IRI or a variable")

    def triple(self) -> TriplePattern:
        return TriplePattern(self.term(), self.term(), self.term())

    def triples_run(self) -> list[TriplePattern]:
        out = [self.triple()]
        while True:
            if self.peek().kind == "DOT":
                if self.at_term(1):
                    self.next()
                    out.append(self.triple())
                    continue
                break
            if self.at_term():
                raise self.error("expected '.' between triple patterns")
            break
        return out

    # patterns

    def group(self) -> Pattern:
        self.expect("LBRACE", "'{'")
        acc: Pattern | None = None
        run: list = []
        filters: list[Condition] = []

        def flush() -> Pattern | None:
            nonlocal acc, run
            if run:
                bp = BasicPattern(tuple(run))
                acc = bp if acc is None else Join(acc, bp)
                run = []
            return acc

        def attach(sub: Pattern):
            nonlocal acc
            flush()
            acc = sub if acc is None else Join(acc, sub)

        while True:
            self.skip_dots()
            tok = self.peek()
            if tok.kind == "RBRACE":
                self.next()
                break
            if tok.kind == "EOF":
                raise self.error("unexpected end of input inside '{...}'")
            if tok.kind == "LBRACE":
                attach(self.union_tail(self.group()))
            elif self.at_word("OPTIONAL"):
                self.next()
                sub = self.group()
                left = flush()
                acc = Opt(left if left is not None else BasicPattern(), sub)
                run = []
            elif self.at_word("FILTER"):
                self.next()
                self.expect("LPAREN", "'(' after FILTER")
                filters.append(self.condition())
                self.expect("RPAREN", "')'")
            elif self.at_word("GRAPH"):
                gb_tok = self.peek()
                self.next()
                gb = self.graph_block()
                if self.at_word("UNION"):
                    attach(self.union_tail(BasicPattern((gb,))))
                else:
                    run.append(gb)
                del gb_tok
            elif self.at_word("UNION"):
                raise self.error("UNION operand must be a braced group or GRAPH block")
            elif self.at_term():
                tb = TripleBlock(tuple(self.triples_run()))
                if run and isinstance(run[-1], TripleBlock):
                    run[-1] = TripleBlock(run[-1].triples + tb.triples)
                else:
                    run.append(tb)
            else:
                raise self.error("expected a pattern element or '}'")

        out = flush()
        if out is None:
            out = BasicPattern()
        for cond in filters:
            out = Filter(out, cond)
        return out

    def union_tail(self, left: Pattern) -> Pattern:
        while self.at_word("UNION"):
            self.next()
            tok = self.peek()
            if tok.kind == "LBRACE":
                right: Pattern = self.group()
            elif self.at_word("GRAPH"):
                self.next()
                right = BasicPattern((self.graph_block(),))
            else:
                raise self.error("UNION operand must be a braced group or GRAPH block")
            left = Union(left, right)
        return left

    def graph_block(self) -> GraphBlock:
        # GRAPH keyword already consumed
        name = self.graph_term()
        self.expect("LBRACE", "'{' after graph name")
        triples: list[TriplePattern] = []
        while True:
            self.skip_dots()
            tok = self.peek()
            if tok.kind == "RBRACE":
                self.next()
                break
            if tok.kind == "LBRACE" or (tok.kind == "WORD" and str(tok.value).upper() in _NESTED_WORDS):
                raise self.error(
                    "GRAPH blocks may contain only triple patterns; "
                    "GRAPH, OPTIONAL, FILTER, UNION and subgroups cannot nest inside GRAPH")
            if not self.at_term():
                raise self.error("expected a triple pattern or '}'")
            triples.extend(self.triples_run())
        return GraphBlock(name, tuple(triples))

    def template(self) -> BasicPattern:
        """Braced basic pattern: triple runs and GRAPH blocks only."""
        self.expect("LBRACE", "'{'")
        blocks: list = []
        while True:
            self.skip_dots()
            tok = self.peek()
            if tok.kind == "RBRACE":
                self.next()
                break
            if self.at_word("GRAPH"):
                self.next()
                blocks.append(self.graph_block())
            elif self.at_word("OPTIONAL", "FILTER", "UNION") or tok.kind == "LBRACE":
                raise self.error("templates admit only triple patterns and GRAPH blocks")
            elif self.at_term():
                tb = TripleBlock(tuple(self.triples_run()))
                if blocks and isinstance(blocks[-1], TripleBlock):
                    blocks[-1] = TripleBlock(blocks[-1].triples + tb.triples)
                else:
                    blocks.append(tb)
            elif tok.kind == "EOF":
                raise self.error("unexpected end of input inside '{...}'")
            else:
                raise self.error("expected a triple pattern, GRAPH block or '}'")
        return BasicPattern(tuple(blocks))

    # conditions

    def condition(self) -> Condition:
        left = self.and_condition()
        while self.peek().kind == "OROR":
            self.next()
            left = Or(left, self.and_condition())
        return left

    def and_condition(self) -> Condition:
        left = self.unary_condition()
        while self.peek().kind == "ANDAND":
            self.next()
            left = And(left, self.unary_condition())
        return left

    def unary_condition(self) -> Condition:
        tok = self.peek()
        if tok.kind == "BANG":
            self.next()
            return Not(self.unary_condition())
        if tok.kind == "LPAREN":
            self.next()
            inner = self.condition()
            self.expect("RPAREN", "')'")
            return inner
        if self.at_word("BOUND"):
            self.next()
            self.expect("LPAREN", "'(' after BOUND")
            var_tok = self.expect("VAR", "a variable in BOUND(...)")
            self.expect("RPAREN", "')'")
            return Bound(Var(var_tok.value))
        if self.at_term():
            left = self.term()
            self.expect("EQ", "'=' in comparison")
            return Equals(left, self.term())
        raise self.error("expected a condition")

    # queries

    def query(self) -> Query:
        if self.at_word("SELECT"):
            self.next()
            variables = []
            while self.peek().kind == "VAR":
                tok = self.next()
                v = Var(tok.value)
                if v in variables:
                    raise self.error(f"duplicate variable ?{v.name} in SELECT list", tok)
                variables.append(v)
            if not variables:
                raise self.error("SELECT needs at least one variable")
            self.expect_word("WHERE")
            q: Query = Select(tuple(variables), self.group())
        elif self.at_word("CONSTRUCT"):
            self.next()
            tpl = self.template()
            self.expect_word("WHERE")
            q = Construct(tpl, self.group())
        else:
            raise self.error("expected SELECT or CONSTRUCT")
        self.expect("EOF", "end of query")
        return q

    # updates

    def graph_ref(self, verb: str, named_only: bool = False) -> GraphName:
        if self.at_word("DEFAULT"):
            tok = self.next()
            if named_only:
                raise self.error(f"{verb} requires a named graph", tok)
            return DEFAULT
        if self.at_word("GRAPH"):
            self.next()
        tok = self.expect("IRI", "a graph IRI or DEFAULT")
        return Iri(tok.value)

    def ground_template(self, what: str) -> BasicPattern:
        tok = self.peek()
        tpl = self.template()
        if not is_ground(tpl):
            raise self.error(f"{what} requires ground triples (no variables)", tok)
        return tpl

    def update(self) -> Update:
        if self.at_word("INSERT"):
            self.next()
            if self.at_word("DATA"):
                self.next()
                u: Update = InsertWhere(self.ground_template("INSERT DATA"), BasicPattern())
            else:
                tpl = self.template()
                self.expect_word("WHERE")
                u = InsertWhere(tpl, self.group())
        elif self.at_word("DELETE"):
            self.next()
            if self.at_word("DATA"):
                self.next()
                u = DeleteWhere(self.ground_template("DELETE DATA"), BasicPattern())
            else:
                del_tpl = self.template()
                if self.at_word("INSERT"):
                    self.next()
                    ins_tpl = self.template()
                    self.expect_word("WHERE")
                    u = DeleteInsertWhere(del_tpl, ins_tpl, self.group())
                else:
                    self.expect_word("WHERE")
                    u = DeleteWhere(del_tpl, self.group())
        elif self.at_word("LOAD"):
            self.next()
            src = self.graph_ref("LOAD")
            dst: GraphName = DEFAULT
            if self.at_word("INTO"):
                self.next()
                dst = self.graph_ref("LOAD")
            u = Load(src, dst)
        elif self.at_word("CLEAR"):
            self.next()
            u = Clear(self.graph_ref("CLEAR"))
        elif self.at_word("CREATE"):
            self.next()
            u = Create(self.graph_ref("CREATE", named_only=True))
        elif self.at_word("DROP"):
            self.next()
            u = Drop(self.graph_ref("DROP", named_only=True))
        elif self.at_word("COPY") or self.at_word("MOVE") or self.at_word("ADD"):
            verb = str(self.next().value).upper()
            src = self.graph_ref(verb)
            self.expect_word("TO")
            dst = self.graph_ref(verb)
            cls = {"COPY": Copy, "MOVE": Move, "ADD": Add}[verb]
            u = cls(src, dst)
        else:
            raise self.error("expected an update verb")
        self.expect("EOF", "end of update")
        return u


def _prepare(text: str) -> list[_Token]:
    return _expand_prefixes(_Lexer(text).tokens())


def parse_query(text: str, *, skolem: Callable[[str], Iri] | None = None) -> Query:
    return _Parser(_prepare(text), skolem).query()


def parse_update(text: str, *, skolem: Callable[[str], Iri] | None = None) -> Update:
    return _Parser(_prepare(text), skolem).update()
