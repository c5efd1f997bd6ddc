"""Core AST for the rule language: terms, atoms, literals, rules, programs.

All values are immutable after construction and hashable, so they can be
shared freely between threads and used as dict/set keys. Numbers are exact
decimals: guideline cutoffs like 0.40 must compare exactly, and 0.40 == 0.4
by numeric value rather than by spelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Mapping, Optional, Tuple, Union

# Predicates with this prefix are reserved for internally generated atoms
# (abducible helper literals). User programs may not define them.
RESERVED_PREFIX = "__"

COMPARISON_OPS = ("<", "<=", ">", ">=", "==", "!=")


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Number:
    value: Decimal

    def __str__(self) -> str:
        return str(self.value)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Number) and self.value == other.value

    def __hash__(self) -> int:
        return hash(("Number", self.value))


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Number, Variable]


def term_sort_key(term: Term) -> tuple:
    """Total deterministic order: numbers first (numerically), then constants,
    then variables. Used for reproducible grounding and rendering order."""
    if isinstance(term, Number):
        return (0, term.value, "")
    if isinstance(term, Constant):
        return (1, 0, term.name)
    return (2, 0, term.name)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> Tuple[str, int]:
        return (self.predicate, len(self.args))

    def is_ground(self) -> bool:
        return not any(isinstance(a, Variable) for a in self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return "%s(%s)" % (self.predicate, ", ".join(str(a) for a in self.args))


@dataclass(frozen=True)
class Literal:
    """Atom with optional classical negation ("-" prefix)."""

    atom: Atom
    strong_neg: bool = False

    @property
    def predicate(self) -> str:
        return self.atom.predicate

    def is_ground(self) -> bool:
        return self.atom.is_ground()

    def __str__(self) -> str:
        return ("-" if self.strong_neg else "") + str(self.atom)


def complement(lit: Literal) -> Literal:
    """Classical complement: flips the "-" prefix, atom unchanged. Involution."""
    return Literal(lit.atom, not lit.strong_neg)


def literal_sort_key(lit: Literal) -> tuple:
    return (
        lit.atom.predicate,
        len(lit.atom.args),
        tuple(term_sort_key(a) for a in lit.atom.args),
        lit.strong_neg,
    )


@dataclass(frozen=True)
class BodyLiteral:
    """Literal occurring in a rule body, positive or under negation as failure."""

    literal: Literal
    naf: bool = False

    def __str__(self) -> str:
        return ("not " if self.naf else "") + str(self.literal)


@dataclass(frozen=True)
class Comparison:
    """Numeric builtin. Operands must be numbers, or variables that are bound
    to numbers by grounding time."""

    lhs: Term
    op: str
    rhs: Term

    def __str__(self) -> str:
        return "%s %s %s" % (self.lhs, self.op, self.rhs)


BodyElement = Union[BodyLiteral, Comparison]


def _element_variables(elem: BodyElement) -> Iterator[Variable]:
    if isinstance(elem, BodyLiteral):
        for arg in elem.literal.atom.args:
            if isinstance(arg, Variable):
                yield arg
    else:
        for t in (elem.lhs, elem.rhs):
            if isinstance(t, Variable):
                yield t


def _substitute_term(term: Term, binding: Mapping[Variable, Term]) -> Term:
    if isinstance(term, Variable):
        return binding.get(term, term)
    return term


def substitute_literal(lit: Literal, binding: Mapping[Variable, Term]) -> Literal:
    if lit.atom.is_ground():
        return lit
    args = tuple(_substitute_term(a, binding) for a in lit.atom.args)
    return Literal(Atom(lit.atom.predicate, args), lit.strong_neg)


def substitute_element(elem: BodyElement, binding: Mapping[Variable, Term]) -> BodyElement:
    if isinstance(elem, BodyLiteral):
        return BodyLiteral(substitute_literal(elem.literal, binding), elem.naf)
    return Comparison(
        _substitute_term(elem.lhs, binding), elem.op, _substitute_term(elem.rhs, binding)
    )


def match_literal(pattern: Literal, candidate: Literal, binding: Mapping[Variable, Term]):
    """Extends `binding` so that pattern equals candidate, or returns None.
    Candidate must be ground."""
    if (
        pattern.atom.predicate != candidate.atom.predicate
        or len(pattern.atom.args) != len(candidate.atom.args)
        or pattern.strong_neg != candidate.strong_neg
    ):
        return None
    new = dict(binding)
    for p_arg, c_arg in zip(pattern.atom.args, candidate.atom.args):
        if isinstance(p_arg, Variable):
            bound = new.get(p_arg)
            if bound is None:
                new[p_arg] = c_arg
            elif bound != c_arg:
                return None
        elif p_arg != c_arg:
            return None
    return new


@dataclass(frozen=True)
class Rule:
    """head :- body. A missing head makes the rule an integrity constraint."""

    head: Optional[Literal]
    body: Tuple[BodyElement, ...] = ()

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    def head_variables(self) -> set:
        if self.head is None:
            return set()
        return {a for a in self.head.atom.args if isinstance(a, Variable)}

    def positive_body(self) -> Iterator[BodyLiteral]:
        for elem in self.body:
            if isinstance(elem, BodyLiteral) and not elem.naf:
                yield elem

    def variables(self) -> set:
        out = set(self.head_variables())
        for elem in self.body:
            out.update(_element_variables(elem))
        return out

    def unsafe_variables(self) -> set:
        """Variables appearing in the head, a naf element, or a builtin that
        never occur in a positive body literal. Must be empty (safety)."""
        positive = set()
        for elem in self.positive_body():
            positive.update(_element_variables(elem))
        demanded = set(self.head_variables())
        for elem in self.body:
            if isinstance(elem, Comparison) or (isinstance(elem, BodyLiteral) and elem.naf):
                demanded.update(_element_variables(elem))
        return demanded - positive

    def is_ground(self) -> bool:
        return not self.variables()

    def __str__(self) -> str:
        body_txt = ", ".join(str(e) for e in self.body)
        if self.head is None:
            return ":- %s." % body_txt
        if not self.body:
            return "%s." % self.head
        return "%s :- %s." % (self.head, body_txt)


def apply_binding(rule: Rule, binding: Mapping[Variable, Term]) -> Rule:
    """Replaces every bound variable; unbound variables stay. Idempotent for
    ground bindings."""
    head = None if rule.head is None else substitute_literal(rule.head, binding)
    body = tuple(substitute_element(e, binding) for e in rule.body)
    return Rule(head, body)


@dataclass(frozen=True)
class Program:
    """Parsed program: rules, abducible predicate declarations and pattern
    declarations (see hfadvisor.patterns for expansion)."""

    rules: Tuple[Rule, ...] = ()
    abducibles: frozenset = frozenset()  # of (predicate, arity)
    pattern_decls: Tuple = ()  # of patterns.PatternDecl

    def facts(self) -> Iterator[Rule]:
        for rule in self.rules:
            if rule.is_fact:
                yield rule

    def extended(
        self,
        rules: Tuple[Rule, ...] = (),
        abducibles: frozenset = frozenset(),
    ) -> "Program":
        return Program(
            self.rules + tuple(rules),
            self.abducibles | frozenset(abducibles),
            self.pattern_decls,
        )


def merge_programs(programs) -> Program:
    rules: list = []
    abducibles: set = set()
    decls: list = []
    for p in programs:
        rules.extend(p.rules)
        abducibles.update(p.abducibles)
        decls.extend(p.pattern_decls)
    return Program(tuple(rules), frozenset(abducibles), tuple(decls))


# Convenience constructors, mainly for tests and generated rules.

def mkterm(value) -> Term:
    if isinstance(value, (Constant, Number, Variable)):
        return value
    if isinstance(value, Decimal):
        return Number(value)
    if isinstance(value, (int, float)):
        return Number(Decimal(str(value)))
    if isinstance(value, str):
        if value[:1].isupper():
            return Variable(value)
        return Constant(value)
    raise TypeError("cannot make a term from %r" % (value,))


def atom(predicate: str, *args) -> Atom:
    return Atom(predicate, tuple(mkterm(a) for a in args))


def lit(predicate: str, *args, strong_neg: bool = False) -> Literal:
    return Literal(atom(predicate, *args), strong_neg)


def pos(literal_or_pred, *args) -> BodyLiteral:
    if isinstance(literal_or_pred, Literal):
        return BodyLiteral(literal_or_pred, False)
    return BodyLiteral(lit(literal_or_pred, *args), False)


def naf(literal_or_pred, *args) -> BodyLiteral:
    if isinstance(literal_or_pred, Literal):
        return BodyLiteral(literal_or_pred, True)
    return BodyLiteral(lit(literal_or_pred, *args), True)


def fact(predicate: str, *args, strong_neg: bool = False) -> Rule:
    return Rule(lit(predicate, *args, strong_neg=strong_neg), ())
