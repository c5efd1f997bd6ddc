"""Parser and printer for the rule language.

Prolog-flavored syntax, one statement per ".":

    fact.                       rec(x, class_1) :- cond(a), not contra(x).
    :- a, not b.                reduced_ef(X) :- measurement(lvef, X), X <= 0.40.
    #abducible history/1.       #pattern aggressive(choice(d, class_2a), pre([...]), dangers([...])).

"%" starts a line comment. Variables begin with an uppercase letter,
constants with a lowercase one; "-" before an atom is classical negation,
"not" is negation as failure and binds one literal. Parentheses around an
atom or term are permitted and ignored. Numbers are exact decimals with an
optional sign and no exponent form.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import List, Optional, Tuple

from . import patterns
from .model import (
    Atom,
    BodyElement,
    BodyLiteral,
    Comparison,
    Constant,
    Literal,
    Number,
    Program,
    RESERVED_PREFIX,
    Rule,
    Term,
    Variable,
    COMPARISON_OPS,
)
from .patterns import Choice, MalformedPattern


@dataclass(frozen=True)
class Query:
    """Conjunctive query: at least one goal, variables allowed."""

    goals: Tuple[BodyElement, ...]


class ParseError(Exception):
    """Syntax error with a 1-based source location."""

    def __init__(self, line: int, column: int, message: str, snippet: str = ""):
        self.line = line
        self.column = column
        self.message = message
        self.snippet = snippet
        super().__init__("%d:%d: %s" % (line, column, message))


_PUNCT = ("?-", ":-", "<=", ">=", "==", "!=", "<", ">", "(", ")", "[", "]", ",", ".", "-", "#", "/")


@dataclass(frozen=True)
class _Token:
    kind: str  # name | var | number | punct | eof
    text: str
    line: int
    column: int


def _tokenize(src: str) -> List[_Token]:
    tokens: List[_Token] = []
    lines = src.split("\n")
    i = 0
    line = 1
    col = 1
    n = len(src)

    def error(msg: str) -> ParseError:
        snippet = lines[line - 1] if line - 1 < len(lines) else ""
        return ParseError(line, col, msg, snippet)

    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (src[i].isalnum() or src[i] == "_"):
                i += 1
                col += 1
            text = src[start:i]
            kind = "var" if text[0].isupper() else "name"
            if text[0] == "_":
                raise ParseError(line, start_col, "identifiers may not start with '_'",
                                 lines[line - 1] if line - 1 < len(lines) else "")
            tokens.append(_Token(kind, text, line, start_col))
            continue
        if ch.isdigit():
            start = i
            start_col = col
            while i < n and src[i].isdigit():
                i += 1
                col += 1
            if i < n and src[i] == "." and i + 1 < n and src[i + 1].isdigit():
                i += 1
                col += 1
                while i < n and src[i].isdigit():
                    i += 1
                    col += 1
            tokens.append(_Token("number", src[start:i], line, start_col))
            continue
        matched = None
        for p in _PUNCT:
            if src.startswith(p, i):
                matched = p
                break
        if matched is None:
            raise error("unexpected character %r" % ch)
        tokens.append(_Token("punct", matched, line, col))
        i += len(matched)
        col += len(matched)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src_lines = src.split("\n")
        self.tokens = _tokenize(src)
        self.pos = 0

    # Token helpers

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, tok: _Token, message: str) -> ParseError:
        snippet = self.src_lines[tok.line - 1] if tok.line - 1 < len(self.src_lines) else ""
        return ParseError(tok.line, tok.column, message, snippet)

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise self.error(tok, "expected %r, found %r" % (text, tok.text or "end of input"))
        return tok

    def expect_name(self, what: str = "name") -> _Token:
        tok = self.next()
        if tok.kind != "name":
            raise self.error(tok, "expected %s, found %r" % (what, tok.text or "end of input"))
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind == "punct"

    # Grammar

    def parse_program(self) -> Program:
        rules: List[Rule] = []
        abducibles = set()
        decls: List = []
        while self.peek().kind != "eof":
            if self.at("#"):
                item = self.parse_directive()
                if isinstance(item, tuple):
                    abducibles.add(item)
                else:
                    decls.append(item)
            else:
                rules.append(self.parse_rule())
        return Program(tuple(rules), frozenset(abducibles), tuple(decls))

    def parse_rule(self) -> Rule:
        head: Optional[Literal] = None
        if self.at(":-"):
            self.next()
            body = self.parse_body()
        else:
            head = self.parse_literal()
            self._check_reserved(head)
            body = ()
            if self.at(":-"):
                self.next()
                body = self.parse_body()
        self.expect(".")
        return Rule(head, tuple(body))

    def parse_body(self) -> List[BodyElement]:
        elems = [self.parse_body_element()]
        while self.at(","):
            self.next()
            elems.append(self.parse_body_element())
        return elems

    def parse_body_element(self) -> BodyElement:
        if self.peek().kind == "name" and self.peek().text == "not":
            self.next()
            literal = self.parse_literal()
            self._check_reserved(literal)
            return BodyLiteral(literal, True)
        # A leading "-" means classical negation when an atom follows and a
        # negative number otherwise; bare terms must continue as comparisons.
        tok = self.peek()
        if tok.kind == "name" and not self._comparison_follows_constant():
            literal = self.parse_literal()
            self._check_reserved(literal)
            return BodyLiteral(literal, False)
        if tok.text == "-" and self.peek(1).kind == "name":
            literal = self.parse_literal()
            self._check_reserved(literal)
            return BodyLiteral(literal, False)
        if tok.text == "(" and self.peek(1).kind == "name":
            literal = self.parse_literal()
            self._check_reserved(literal)
            return BodyLiteral(literal, False)
        lhs = self.parse_term()
        op_tok = self.next()
        if op_tok.text not in COMPARISON_OPS:
            raise self.error(op_tok, "expected a comparison operator after %s" % (lhs,))
        rhs = self.parse_term()
        return Comparison(lhs, op_tok.text, rhs)

    def _comparison_follows_constant(self) -> bool:
        # name token that is NOT followed by "(" but IS followed by a
        # comparison operator: it is the left term of a builtin.
        if self.peek(1).text == "(":
            return False
        return self.peek(1).text in COMPARISON_OPS

    def parse_literal(self) -> Literal:
        strong = False
        if self.at("-"):
            self.next()
            strong = True
        if self.at("("):
            self.next()
            inner = self.parse_literal()
            self.expect(")")
            if strong:
                inner = Literal(inner.atom, not inner.strong_neg)
            return inner
        name = self.expect_name("a predicate name")
        args: List[Term] = []
        if self.at("("):
            self.next()
            args.append(self.parse_term())
            while self.at(","):
                self.next()
                args.append(self.parse_term())
            self.expect(")")
        return Literal(Atom(name.text, tuple(args)), strong)

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.text == "(":
            self.next()
            inner = self.parse_term()
            self.expect(")")
            return inner
        if tok.text == "-":
            self.next()
            num = self.next()
            if num.kind != "number":
                raise self.error(num, "expected a number after '-'")
            return Number(Decimal("-" + num.text))
        tok = self.next()
        if tok.kind == "number":
            return Number(Decimal(tok.text))
        if tok.kind == "var":
            return Variable(tok.text)
        if tok.kind == "name":
            return Constant(tok.text)
        raise self.error(tok, "expected a term, found %r" % (tok.text or "end of input"))

    def _check_reserved(self, literal: Literal) -> None:
        if literal.atom.predicate.startswith(RESERVED_PREFIX):
            tok = self.peek()
            raise self.error(
                tok, "predicate prefix %r is reserved" % RESERVED_PREFIX
            )

    # Directives

    def parse_directive(self):
        hash_tok = self.expect("#")
        kind_tok = self.expect_name("directive name")
        if kind_tok.text == "abducible":
            name = self.expect_name("a predicate name")
            if name.text.startswith(RESERVED_PREFIX):
                raise self.error(name, "predicate prefix %r is reserved" % RESERVED_PREFIX)
            self.expect("/")
            arity_tok = self.next()
            if arity_tok.kind != "number" or "." in arity_tok.text:
                raise self.error(arity_tok, "expected an arity")
            self.expect(".")
            return (name.text, int(arity_tok.text))
        if kind_tok.text == "pattern":
            return self.parse_pattern(kind_tok)
        raise self.error(kind_tok, "unknown directive #%s" % kind_tok.text)

    def parse_pattern(self, at_tok: _Token):
        kind_tok = self.expect_name("a pattern kind")
        kind = kind_tok.text
        if kind not in patterns.PATTERN_KINDS:
            snippet = self.src_lines[kind_tok.line - 1] if kind_tok.line - 1 < len(self.src_lines) else ""
            raise MalformedPattern(
                "unknown pattern kind %r" % kind, kind_tok.line, kind_tok.column, ""
            )
        self.expect("(")
        try:
            if kind in ("aggressive", "conservative"):
                choice = self._pattern_choice("choice", with_class=True)
                self.expect(",")
                pre = self._pattern_conj_list("pre")
                self.expect(",")
                dangers = self._pattern_dangers()
                decl_cls = (
                    patterns.AggressiveDecl if kind == "aggressive" else patterns.ConservativeDecl
                )
                decl = decl_cls(choice, pre, dangers)
            elif kind == "anti":
                choice = self._pattern_choice("choice", with_class=False)
                self.expect(",")
                dangers = self._pattern_dangers()
                decl = patterns.AntiDecl(choice, dangers)
            elif kind == "prefer":
                first = self._pattern_choice("first", with_class=True)
                self.expect(",")
                second = self._pattern_choice("second", with_class=True)
                self.expect(",")
                pre = self._pattern_conj_list("pre")
                decl = patterns.PreferDecl(first, second, pre)
            elif kind == "concomitant":
                trigger = self._pattern_choice("trigger", with_class=True)
                self.expect(",")
                companion = self._pattern_choice("with", with_class=True)
                self.expect(",")
                pre = self._pattern_conj_list("pre")
                decl = patterns.ConcomitantDecl(trigger, companion, pre)
            elif kind == "indispensable":
                trigger = self._pattern_choice("trigger", with_class=True)
                self.expect(",")
                needed = self._pattern_choice("needs", with_class=True)
                self.expect(",")
                pre = self._pattern_conj_list("pre")
                decl = patterns.IndispensableDecl(trigger, needed, pre)
            else:  # incompatible
                self.expect("[")
                names = [self.expect_name("a choice name").text]
                while self.at(","):
                    self.next()
                    names.append(self.expect_name("a choice name").text)
                self.expect("]")
                self.expect(",")
                class_label = self.expect_name("a class label").text
                pre: Tuple[BodyElement, ...] = ()
                if self.at(","):
                    self.next()
                    pre = self._pattern_conj_list("pre")
                decl = patterns.IncompatibleDecl(tuple(names), class_label, pre)
                decl.validate()
        except MalformedPattern as exc:
            if exc.line:
                raise
            raise MalformedPattern(exc.message, kind_tok.line, kind_tok.column) from None
        self.expect(")")
        self.expect(".")
        return decl

    def _pattern_choice(self, keyword: str, with_class: bool) -> Choice:
        tok = self.expect_name("'%s'" % keyword)
        if tok.text != keyword:
            raise self.error(tok, "expected '%s(...)'" % keyword)
        self.expect("(")
        name = self.expect_name("a choice name").text
        label = None
        if with_class:
            self.expect(",")
            label = self.expect_name("a class label").text
        self.expect(")")
        return Choice(name, label)

    def _pattern_conj_list(self, keyword: str) -> Tuple[BodyElement, ...]:
        tok = self.expect_name("'%s'" % keyword)
        if tok.text != keyword:
            raise self.error(tok, "expected '%s([...])'" % keyword)
        self.expect("(")
        self.expect("[")
        elems: List[BodyElement] = []
        if not self.at("]"):
            elems = self.parse_body()
        self.expect("]")
        self.expect(")")
        return tuple(elems)

    def _pattern_dangers(self) -> Tuple[Tuple[BodyElement, ...], ...]:
        tok = self.expect_name("'dangers'")
        if tok.text != "dangers":
            raise self.error(tok, "expected 'dangers([...])'")
        self.expect("(")
        self.expect("[")
        entries: List[Tuple[BodyElement, ...]] = []
        while not self.at("]"):
            if self.at("["):
                self.next()
                conj = tuple(self.parse_body())
                self.expect("]")
                entries.append(conj)
            else:
                entries.append((self.parse_body_element(),))
            if self.at(","):
                self.next()
                continue
            break
        self.expect("]")
        self.expect(")")
        return tuple(entries)

    def parse_query(self) -> Query:
        if self.at("?-"):
            self.next()
        goals = self.parse_body()
        if self.at("."):
            self.next()
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(tok, "unexpected input after query")
        return Query(tuple(goals))


def parse_program(src: str) -> Program:
    """Parses a whole program; raises ParseError at the first syntax error."""
    return _Parser(src).parse_program()


def parse_query(src: str) -> Query:
    """Parses "?- g1, not g2." or "g1, not g2." (trailing period optional)."""
    parser = _Parser(src)
    tok = parser.peek()
    if tok.kind == "eof":
        raise parser.error(tok, "empty query")
    return parser.parse_query()


def print_program(program: Program) -> str:
    """Canonical text; parse_program(print_program(p)) equals p."""
    out: List[str] = []
    for pred, arity in sorted(program.abducibles):
        out.append("#abducible %s/%d." % (pred, arity))
    for decl in program.pattern_decls:
        out.append(patterns.render_declaration(decl))
    for rule in program.rules:
        out.append(str(rule))
    return "\n".join(out) + ("\n" if out else "")
