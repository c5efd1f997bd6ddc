"""Abductive query answering.

Declared abducible predicates may be assumed true or false to make a query
succeed. Each relevant ground abducible atom `a` gets the even-loop pair

    a :- not __neg_a.        __neg_a :- not a.

which makes both truth values available to the solver; whichever value a
derivation commits to surfaces in the partial answer set and is reported as
an assumption. Atoms that are already facts need no assumption and get no
pair; helper atoms (reserved "__" prefix) are stripped from reported
answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .grounder import constant_domain, ground_program
from .model import (
    Atom,
    BodyLiteral,
    Literal,
    Program,
    RESERVED_PREFIX,
    Rule,
    Term,
    Variable,
    fact as make_fact,
    lit,
    literal_sort_key,
    naf,
)
from .parser import Query
from .solver import EngineOptions, PartialAnswerSet, solve


class ReservedPrefixCollision(Exception):
    """User program already defines an atom under the reserved prefix."""


@dataclass(frozen=True)
class AbductiveResult:
    answer: PartialAnswerSet
    assumed_true: FrozenSet[Literal]
    assumed_false: FrozenSet[Literal]

    def assumed_true_sorted(self) -> List[Literal]:
        return sorted(self.assumed_true, key=literal_sort_key)

    def assumed_false_sorted(self) -> List[Literal]:
        return sorted(self.assumed_false, key=literal_sort_key)


def _helper_name(atom: Atom, taken: Set[str]) -> str:
    parts = [atom.predicate] + [str(a).replace(".", "_") for a in atom.args]
    base = RESERVED_PREFIX + "neg_" + "_".join(parts)
    name = base
    suffix = 2
    while name in taken:
        name = "%s_%d" % (base, suffix)
        suffix += 1
    taken.add(name)
    return name


def _mentioned_atoms(
    program: Program, query: Optional[Query], pred: str, arity: int
) -> List[Atom]:
    """Ground atoms of pred/arity that unify with a literal occurring in the
    program rules or the query. Non-ground occurrences are instantiated over
    the grounding constant domain. An abducible atom mentioned nowhere
    cannot influence any rule, so no pair is generated for it."""
    domain = constant_domain(program)
    occurrences: List[Atom] = []
    for rule in program.rules:
        literals = [rule.head] if rule.head is not None else []
        literals += [e.literal for e in rule.body if isinstance(e, BodyLiteral)]
        occurrences += [l.atom for l in literals]
    if query is not None:
        occurrences += [
            e.literal.atom for e in query.goals if isinstance(e, BodyLiteral)
        ]

    found: Set[Atom] = set()
    for occ in occurrences:
        if occ.predicate != pred or occ.arity != arity:
            continue
        if occ.is_ground():
            found.add(occ)
            continue
        slots = [
            [arg] if not isinstance(arg, Variable) else domain for arg in occ.args
        ]
        for combo in product(*slots):
            found.add(Atom(pred, tuple(combo)))
    return sorted(found, key=lambda a: literal_sort_key(Literal(a)))


def transform_abducibles(program: Program, query: Optional[Query] = None) -> Program:
    """Adds the even-loop pair for every relevant ground abducible atom.
    Identity when no abducibles are declared."""
    transformed, _helpers = _transform_with_helpers(program, query)
    return transformed


def _transform_with_helpers(
    program: Program, query: Optional[Query] = None
) -> Tuple[Program, Dict[Atom, str]]:
    for rule in program.rules:
        if rule.head is not None and rule.head.atom.predicate.startswith(RESERVED_PREFIX):
            raise ReservedPrefixCollision(
                "program defines reserved atom %s" % rule.head
            )
    if not program.abducibles:
        return program, {}

    facts = {rule.head.atom for rule in program.facts() if not rule.head.strong_neg}
    pairs: List[Rule] = []
    taken: Set[str] = set()
    helpers: Dict[Atom, str] = {}
    for pred, arity in sorted(program.abducibles):
        for atom in _mentioned_atoms(program, query, pred, arity):
            if atom in facts:
                continue
            target = Literal(atom)
            helper_pred = _helper_name(atom, taken)
            helpers[atom] = helper_pred
            helper = lit(helper_pred)
            pairs.append(Rule(target, (naf(helper),)))
            pairs.append(Rule(helper, (naf(target),)))
    return program.extended(rules=tuple(pairs)), helpers


def abduce(
    program: Program,
    query: Query,
    limit: Optional[int] = None,
    options: Optional[EngineOptions] = None,
    extra_abducibles: Sequence[Tuple[str, int]] = (),
) -> Iterator[AbductiveResult]:
    """Solves the query over the abducible-transformed program and reports,
    per answer, which abducible literals were assumed. Given facts are never
    assumptions; a positive assumption is an atom proved through its
    even-loop pair (its helper shows up in the raw answer); a negative
    assumption must exclude at least one real derivation route, so an atom
    with no rules of its own is simply false by default, not assumed.
    Helper atoms never appear in reported answers."""
    if extra_abducibles:
        program = program.extended(abducibles=frozenset(extra_abducibles))
    abducible_keys = set(program.abducibles)
    fact_atoms = {r.head.atom for r in program.facts() if not r.head.strong_neg}
    original_heads = {
        r.head.atom for r in program.rules if r.head is not None and r.body
    }
    transformed, helpers = _transform_with_helpers(program, query)
    ground = ground_program(transformed)

    def is_abducible(literal: Literal) -> bool:
        return (
            not literal.strong_neg
            and literal.atom.key in abducible_keys
            and literal.atom not in fact_atoms
        )

    seen: Set[Tuple] = set()
    emitted = 0
    for raw in solve(ground, query, limit=None, options=options):
        raw_naf_preds = {l.atom.predicate for l in raw.nafs if not l.atom.args}
        answer = raw.without_reserved()
        key = (answer.bindings, answer.positive, answer.nafs)
        if key in seen:
            continue
        seen.add(key)
        assumed_true = frozenset(
            l
            for l in answer.positive
            if is_abducible(l) and helpers.get(l.atom) in raw_naf_preds
        )
        assumed_false = frozenset(
            l
            for l in answer.nafs
            if is_abducible(l) and l.atom in original_heads
        )
        yield AbductiveResult(answer, assumed_true, assumed_false)
        emitted += 1
        if limit is not None and emitted >= limit:
            return
