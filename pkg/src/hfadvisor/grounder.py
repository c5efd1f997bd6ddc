"""Instantiates rule variables over the program's constant domain.

Ground rules pass through untouched, so grounding a ground program is the
identity. Rules with variables are instantiated by joining their positive
body literals against an optimistic derivability closure (negation as
failure ignored, builtins evaluated), which yields exactly the
instantiations that could ever fire; rule safety guarantees the join binds
every variable. Builtins are evaluated away during instantiation.
Instantiations whose builtin compares a non-number (an untyped domain makes
such bindings inevitable) are dropped silently, except that a rule with
builtins losing every instantiation that way gets a warning attached.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .model import (
    BodyElement,
    BodyLiteral,
    Comparison,
    Constant,
    Literal,
    Number,
    Program,
    Rule,
    Term,
    Variable,
    apply_binding,
    match_literal,
    substitute_literal,
    term_sort_key,
)


class GroundError(Exception):
    def __init__(self, message: str, rule: Optional[Rule] = None):
        self.rule = rule
        if rule is not None:
            message = "%s (in rule: %s)" % (message, rule)
        super().__init__(message)


@dataclass(frozen=True)
class GroundProgram:
    """Variable-free program plus the set of ground literals it mentions."""

    rules: Tuple[Rule, ...]
    atom_universe: FrozenSet[Literal]
    warnings: Tuple[str, ...] = ()


def _compare(lhs: Decimal, op: str, rhs: Decimal) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == ">":
        return lhs > rhs
    if op == ">=":
        return lhs >= rhs
    if op == "==":
        return lhs == rhs
    if op == "!=":
        return lhs != rhs
    raise GroundError("unknown comparison operator %r" % op)


def evaluate_comparison(elem: Comparison) -> Optional[bool]:
    """True/False for a number-number comparison, None when an operand is a
    non-number (variables must be substituted away first)."""
    if isinstance(elem.lhs, Number) and isinstance(elem.rhs, Number):
        return _compare(elem.lhs.value, elem.op, elem.rhs.value)
    return None


def check_safety(rule: Rule) -> None:
    unsafe = rule.unsafe_variables()
    if unsafe:
        names = ", ".join(sorted(v.name for v in unsafe))
        raise GroundError("unsafe variables {%s}: they never occur in a positive body literal"
                          % names, rule)


def _static_builtin_check(rule: Rule) -> None:
    for elem in rule.body:
        if isinstance(elem, Comparison):
            for side in (elem.lhs, elem.rhs):
                if isinstance(side, Constant):
                    raise GroundError("builtin compares non-number %s" % side, rule)


def constant_domain(program: Program) -> List[Term]:
    """Constants and numbers from fact and rule heads, in deterministic
    order. This is the range of an instantiated variable."""
    seen: Set[Term] = set()
    for rule in program.rules:
        if rule.head is not None:
            for arg in rule.head.atom.args:
                if not isinstance(arg, Variable):
                    seen.add(arg)
    return sorted(seen, key=term_sort_key)


def _evaluate_ground(rule: Rule) -> Tuple[Optional[Rule], bool]:
    """Evaluates builtins in a ground rule: (rule with true builtins removed
    or None when one is false/non-numeric, dropped-over-a-non-number)."""
    body: List[BodyElement] = []
    for elem in rule.body:
        if isinstance(elem, Comparison):
            verdict = evaluate_comparison(elem)
            if verdict is None:
                return None, True
            if verdict is False:
                return None, False
            continue
        body.append(elem)
    return Rule(rule.head, tuple(body)), False


class _Closure:
    """Optimistic derivability: everything a rule head could become if every
    naf literal were true. Joining against it binds rule variables."""

    def __init__(self):
        self.literals: Set[Literal] = set()
        self.by_key: Dict[Tuple[str, int, bool], List[Literal]] = {}

    def add(self, literal: Literal) -> bool:
        if literal in self.literals:
            return False
        self.literals.add(literal)
        key = (literal.atom.predicate, literal.atom.arity, literal.strong_neg)
        self.by_key.setdefault(key, []).append(literal)
        return True

    def candidates(self, pattern: Literal) -> List[Literal]:
        key = (pattern.atom.predicate, pattern.atom.arity, pattern.strong_neg)
        return self.by_key.get(key, [])

    def join(self, rule: Rule) -> List[Dict[Variable, Term]]:
        bindings: List[Dict[Variable, Term]] = [{}]
        for elem in rule.positive_body():
            pattern_elem = elem.literal
            next_bindings: List[Dict[Variable, Term]] = []
            for binding in bindings:
                pattern = substitute_literal(pattern_elem, binding)
                if pattern.is_ground():
                    if pattern in self.literals:
                        next_bindings.append(binding)
                    continue
                for candidate in self.candidates(pattern):
                    extended = match_literal(pattern, candidate, binding)
                    if extended is not None:
                        next_bindings.append(extended)
            if not next_bindings:
                return []
            bindings = next_bindings
        return bindings


def _binding_sort_key(binding: Dict[Variable, Term]):
    return tuple(term_sort_key(t) for _, t in sorted(binding.items(), key=lambda kv: kv[0].name))


def ground_program(program: Program) -> GroundProgram:
    """Replaces each rule by its ground instances. Deterministic: rule order,
    then lexicographic binding order."""
    for rule in program.rules:
        check_safety(rule)
        _static_builtin_check(rule)

    closure = _Closure()
    changed = True
    while changed:
        changed = False
        for rule in program.rules:
            if rule.head is None:
                continue
            if rule.is_ground():
                ground, _ = _evaluate_ground(rule)
                if ground is not None and all(
                    elem.literal in closure.literals for elem in ground.positive_body()
                ):
                    changed |= closure.add(ground.head)
                continue
            for binding in closure.join(rule):
                ground, _ = _evaluate_ground(apply_binding(rule, binding))
                if ground is not None:
                    changed |= closure.add(ground.head)

    rules: List[Rule] = []
    seen: Set[Rule] = set()
    warnings: List[str] = []

    def emit(ground: Optional[Rule]) -> bool:
        if ground is None:
            return False
        if ground not in seen:
            seen.add(ground)
            rules.append(ground)
        return True

    for rule in program.rules:
        has_builtin = any(isinstance(e, Comparison) for e in rule.body)
        kept = 0
        dropped_any = False
        if rule.is_ground():
            ground, dropped = _evaluate_ground(rule)
            dropped_any = dropped
            if emit(ground):
                kept += 1
        else:
            bindings = sorted(closure.join(rule), key=_binding_sort_key)
            for binding in bindings:
                ground, dropped = _evaluate_ground(apply_binding(rule, binding))
                dropped_any = dropped_any or dropped
                if emit(ground):
                    kept += 1
        if has_builtin and kept == 0 and dropped_any:
            warnings.append("no instantiation of rule survived its builtins: %s" % rule)

    universe: Set[Literal] = set()
    for rule in rules:
        if rule.head is not None:
            universe.add(rule.head)
        for elem in rule.body:
            assert isinstance(elem, BodyLiteral)
            universe.add(elem.literal)
    return GroundProgram(tuple(rules), frozenset(universe), tuple(warnings))
