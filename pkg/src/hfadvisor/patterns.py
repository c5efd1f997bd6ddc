"""Knowledge-pattern declarations and their expansion into plain rules.

Seven reasoning templates cover how the guideline text is encoded:

  aggressive      recommend on a reason unless a contraindication is proved
  conservative    additionally demand explicit evidence of absence of danger
  anti            only state contraindications
  prefer          second-line choice when the first is contraindicated
  concomitant     a trigger choice pulls companion choices into effect
  indispensable   a trigger choice is revoked if a required choice fails
  incompatible    a group of choices may never all hold together

A declaration expands to rules; choices that act as concomitant or
indispensable triggers, or belong to an incompatible group, get guard
literals (not skip_concomitant_choice / not absent_indispensable_choice /
not taboo_choice) attached to every generated recommendation rule for that
choice. Incompatibility is deliberately encoded through taboo_choice rules
rather than integrity constraints: a constraint would wipe out every stable
model instead of excluding the bad combination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .model import (
    Atom,
    BodyElement,
    BodyLiteral,
    Constant,
    Literal,
    Rule,
    lit,
    naf,
    pos,
)

RECOMMENDATION = "recommendation"
CONTRAINDICATION = "contraindication"
TABOO = "taboo_choice"
SKIP_CONCOMITANT = "skip_concomitant_choice"
ABSENT_INDISPENSABLE = "absent_indispensable_choice"

PATTERN_KINDS = (
    "aggressive",
    "conservative",
    "anti",
    "prefer",
    "concomitant",
    "indispensable",
    "incompatible",
)


class MalformedPattern(Exception):
    """Raised for a structurally invalid pattern declaration."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self.describe())

    def describe(self) -> str:
        where = ""
        if self.source:
            where += "%s:" % self.source
        if self.line:
            where += "%d:%d: " % (self.line, self.column)
        elif where:
            where += " "
        return where + self.message

    def with_source(self, source: str) -> "MalformedPattern":
        return MalformedPattern(self.message, self.line, self.column, source)


@dataclass(frozen=True)
class Choice:
    """A treatment choice plus its evidence-class label (class label may be
    absent for anti declarations, which emit no recommendation rule)."""

    name: str
    class_label: Optional[str] = None


Conjunction = Tuple[BodyElement, ...]


@dataclass(frozen=True)
class AggressiveDecl:
    kind = "aggressive"
    choice: Choice
    pre: Conjunction
    dangers: Tuple[Conjunction, ...]


@dataclass(frozen=True)
class ConservativeDecl:
    kind = "conservative"
    choice: Choice
    pre: Conjunction
    dangers: Tuple[Conjunction, ...]


@dataclass(frozen=True)
class AntiDecl:
    kind = "anti"
    choice: Choice
    dangers: Tuple[Conjunction, ...]


@dataclass(frozen=True)
class PreferDecl:
    kind = "prefer"
    first: Choice
    second: Choice
    pre: Conjunction


@dataclass(frozen=True)
class ConcomitantDecl:
    kind = "concomitant"
    trigger: Choice
    companion: Choice
    pre: Conjunction


@dataclass(frozen=True)
class IndispensableDecl:
    kind = "indispensable"
    trigger: Choice
    needed: Choice
    pre: Conjunction


@dataclass(frozen=True)
class IncompatibleDecl:
    kind = "incompatible"
    choices: Tuple[str, ...]
    class_label: str
    pre: Conjunction = ()

    def validate(self) -> None:
        if len(set(self.choices)) < 2:
            raise MalformedPattern(
                "incompatible group needs at least 2 distinct choices, got %r"
                % (self.choices,)
            )


PatternDecl = object  # union of the *Decl classes above


def _recommendation(choice: Choice) -> Literal:
    if choice.class_label is None:
        raise MalformedPattern("choice %s is missing a class label" % choice.name)
    return lit(RECOMMENDATION, choice.name, choice.class_label)


def _guard(pred: str, choice_name: str) -> BodyLiteral:
    return naf(pred, choice_name)


def _conservative_danger(conj: Conjunction) -> Conjunction:
    """Conservative dangers demand explicit absence evidence: each positive
    literal d becomes `not -d` in the contraindication body."""
    out: List[BodyElement] = []
    for elem in conj:
        if isinstance(elem, BodyLiteral) and not elem.naf and not elem.literal.strong_neg:
            out.append(BodyLiteral(Literal(elem.literal.atom, True), True))
        else:
            raise MalformedPattern(
                "conservative dangers must be plain positive literals, got %s" % (elem,)
            )
    return tuple(out)


def expand(decl) -> List[Rule]:
    """Standalone expansion of one declaration (no cross-declaration guards).
    Guard attachment across declarations happens in expand_declarations."""
    rules, _ = _expand_one(decl)
    return rules


def _expand_one(decl) -> Tuple[List[Rule], Dict[str, Set[str]]]:
    """Returns (rules, guards) where guards maps a choice name to the guard
    predicates its recommendation rules must carry."""
    guards: Dict[str, Set[str]] = {}
    rules: List[Rule] = []

    if isinstance(decl, (AggressiveDecl, ConservativeDecl)):
        head = _recommendation(decl.choice)
        body = decl.pre + (naf(CONTRAINDICATION, decl.choice.name),)
        rules.append(Rule(head, body))
        contra = lit(CONTRAINDICATION, decl.choice.name)
        for danger in decl.dangers:
            if isinstance(decl, ConservativeDecl):
                rules.append(Rule(contra, _conservative_danger(danger)))
            else:
                rules.append(Rule(contra, danger))
    elif isinstance(decl, AntiDecl):
        contra = lit(CONTRAINDICATION, decl.choice.name)
        if not decl.dangers:
            raise MalformedPattern("anti declaration for %s has no dangers" % decl.choice.name)
        for danger in decl.dangers:
            rules.append(Rule(contra, danger))
    elif isinstance(decl, PreferDecl):
        first_head = _recommendation(decl.first)
        second_head = _recommendation(decl.second)
        rules.append(
            Rule(first_head, decl.pre + (naf(CONTRAINDICATION, decl.first.name),))
        )
        rules.append(
            Rule(
                second_head,
                decl.pre
                + (
                    pos(CONTRAINDICATION, decl.first.name),
                    naf(CONTRAINDICATION, decl.second.name),
                    naf(TABOO, decl.second.name),
                ),
            )
        )
    elif isinstance(decl, ConcomitantDecl):
        guards.setdefault(decl.trigger.name, set()).add(SKIP_CONCOMITANT)
        skip_head = lit(SKIP_CONCOMITANT, decl.trigger.name)
        rules.append(
            Rule(
                skip_head,
                decl.pre
                + (
                    naf(_recommendation(decl.companion)),
                    naf(CONTRAINDICATION, decl.companion.name),
                ),
            )
        )
        rules.append(
            Rule(
                _recommendation(decl.companion),
                decl.pre
                + (
                    pos(_recommendation(decl.trigger)),
                    naf(CONTRAINDICATION, decl.companion.name),
                ),
            )
        )
    elif isinstance(decl, IndispensableDecl):
        guards.setdefault(decl.trigger.name, set()).add(ABSENT_INDISPENSABLE)
        absent_head = lit(ABSENT_INDISPENSABLE, decl.trigger.name)
        rules.append(
            Rule(absent_head, decl.pre + (naf(_recommendation(decl.needed)),))
        )
        rules.append(
            Rule(
                _recommendation(decl.needed),
                decl.pre
                + (
                    pos(_recommendation(decl.trigger)),
                    naf(CONTRAINDICATION, decl.needed.name),
                ),
            )
        )
    elif isinstance(decl, IncompatibleDecl):
        decl.validate()
        for name in decl.choices:
            guards.setdefault(name, set()).add(TABOO)
            others = tuple(
                pos(RECOMMENDATION, other, decl.class_label)
                for other in decl.choices
                if other != name
            )
            rules.append(Rule(lit(TABOO, name), decl.pre + others))
    else:
        raise MalformedPattern("unknown pattern declaration %r" % (decl,))

    return rules, guards


_GUARD_ORDER = (CONTRAINDICATION, SKIP_CONCOMITANT, ABSENT_INDISPENSABLE, TABOO)


def _attach_guards(rule: Rule, guard_preds: Set[str]) -> Rule:
    """Appends missing `not guard(choice)` literals to a recommendation rule."""
    assert rule.head is not None and rule.head.predicate == RECOMMENDATION
    choice = rule.head.atom.args[0]
    present = {
        e.literal.atom.predicate
        for e in rule.body
        if isinstance(e, BodyLiteral) and e.naf and e.literal.atom.args[:1] == (choice,)
    }
    extra = tuple(
        _guard(pred, choice.name)
        for pred in _GUARD_ORDER
        if pred in guard_preds and pred not in present
    )
    if not extra:
        return rule
    return Rule(rule.head, rule.body + extra)


def expand_declarations(decls: Sequence) -> List[Rule]:
    """Expands a group of declarations together: every recommendation rule
    generated for a choice carries the guards that other declarations in the
    group register for it. Auto-recommendation rules (concomitant,
    indispensable) get them too; revocation must block every derivation of
    the trigger, not just its main rule."""
    guards: Dict[str, Set[str]] = {}
    per_decl: List[List[Rule]] = []
    for decl in decls:
        rules, decl_guards = _expand_one(decl)
        per_decl.append(rules)
        for name, preds in decl_guards.items():
            guards.setdefault(name, set()).update(preds)

    out: List[Rule] = []
    for rules in per_decl:
        for rule in rules:
            if (
                rule.head is not None
                and rule.head.predicate == RECOMMENDATION
                and rule.head.atom.args
                and isinstance(rule.head.atom.args[0], Constant)
            ):
                choice_name = rule.head.atom.args[0].name
                if choice_name in guards:
                    rule = _attach_guards(rule, guards[choice_name])
            out.append(rule)
    return out


# Rendering back to directive syntax (used by the program printer).

def _render_conj(conj: Conjunction) -> str:
    return ", ".join(str(e) for e in conj)


def _render_elements(conjs: Iterable[Conjunction]) -> str:
    parts = []
    for conj in conjs:
        if len(conj) == 1:
            parts.append(str(conj[0]))
        else:
            parts.append("[%s]" % _render_conj(conj))
    return ", ".join(parts)


def render_declaration(decl) -> str:
    if isinstance(decl, (AggressiveDecl, ConservativeDecl)):
        return "#pattern %s(choice(%s, %s), pre([%s]), dangers([%s]))." % (
            decl.kind,
            decl.choice.name,
            decl.choice.class_label,
            _render_conj(decl.pre),
            _render_elements(decl.dangers),
        )
    if isinstance(decl, AntiDecl):
        return "#pattern anti(choice(%s), dangers([%s]))." % (
            decl.choice.name,
            _render_elements(decl.dangers),
        )
    if isinstance(decl, PreferDecl):
        return "#pattern prefer(first(%s, %s), second(%s, %s), pre([%s]))." % (
            decl.first.name,
            decl.first.class_label,
            decl.second.name,
            decl.second.class_label,
            _render_conj(decl.pre),
        )
    if isinstance(decl, ConcomitantDecl):
        return "#pattern concomitant(trigger(%s, %s), with(%s, %s), pre([%s]))." % (
            decl.trigger.name,
            decl.trigger.class_label,
            decl.companion.name,
            decl.companion.class_label,
            _render_conj(decl.pre),
        )
    if isinstance(decl, IndispensableDecl):
        return "#pattern indispensable(trigger(%s, %s), needs(%s, %s), pre([%s]))." % (
            decl.trigger.name,
            decl.trigger.class_label,
            decl.needed.name,
            decl.needed.class_label,
            _render_conj(decl.pre),
        )
    if isinstance(decl, IncompatibleDecl):
        base = "#pattern incompatible([%s], %s" % (", ".join(decl.choices), decl.class_label)
        if decl.pre:
            base += ", pre([%s])" % _render_conj(decl.pre)
        return base + ")."
    raise MalformedPattern("unknown pattern declaration %r" % (decl,))
