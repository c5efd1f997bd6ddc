"""Query answering over ground programs under stable-model semantics.

Two independent routes:

* solve(): a goal-directed, depth-first, backtracking evaluator producing
  partial answer sets. Negation-as-failure goals are evaluated
  constructively: "not a" tentatively assumes a false and then refutes every
  rule for a by falsifying one body element per rule (which may in turn
  prove other literals or assume further literals false). Positive literals
  recurring in their own call chain fail at zero or an odd number of
  negation crossings and succeed coinductively at an even number. Every
  candidate derivation is then checked globally: the accumulated assumption
  set must extend to a total stable model of the program (this subsumes
  integrity-constraint checking and also rejects candidates from programs
  whose unrelated odd loops admit no stable model at all). The extension
  check is a propagation-plus-branching search with a foundedness test,
  not the enumerator below.

* enumerate_stable_models_bruteforce(): the ground-truth oracle. For every
  subset of the atom universe it builds the reduct (drop rules blocked by
  the candidate, strip remaining naf literals), computes the least model of
  the resulting definite program, and keeps the candidate iff it equals its
  least model, is classically consistent, and violates no constraint.

solve()'s contract is agreement with the oracle.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .grounder import GroundProgram, evaluate_comparison
from .model import (
    BodyElement,
    BodyLiteral,
    Comparison,
    Literal,
    RESERVED_PREFIX,
    Term,
    Variable,
    complement,
    literal_sort_key,
    match_literal,
    substitute_element,
)
from .parser import Query

if sys.getrecursionlimit() < 100_000:
    sys.setrecursionlimit(100_000)


class ResourceLimit(Exception):
    """Step budget exceeded."""


class UniverseTooLarge(Exception):
    """Atom universe exceeds the brute-force enumeration bound."""


class QueryError(Exception):
    """Query cannot be instantiated (unbound variable in a naf/builtin goal)."""


@dataclass(frozen=True)
class EngineOptions:
    step_budget: int = 10_000_000
    model_bound: int = 20


@dataclass(frozen=True)
class PartialAnswerSet:
    """Positive literals proved plus literals proved unprovable along one
    successful derivation, with the query-variable bindings."""

    positive: FrozenSet[Literal]
    nafs: FrozenSet[Literal]
    bindings: Tuple[Tuple[str, Term], ...] = ()

    @property
    def binding_map(self) -> Dict[str, Term]:
        return dict(self.bindings)

    def positive_sorted(self) -> List[Literal]:
        return sorted(self.positive, key=literal_sort_key)

    def nafs_sorted(self) -> List[Literal]:
        return sorted(self.nafs, key=literal_sort_key)

    def without_reserved(self) -> "PartialAnswerSet":
        keep = lambda l: not l.atom.predicate.startswith(RESERVED_PREFIX)
        return PartialAnswerSet(
            frozenset(l for l in self.positive if keep(l)),
            frozenset(l for l in self.nafs if keep(l)),
            self.bindings,
        )

    def check_invariants(self, universe: Optional[FrozenSet[Literal]] = None) -> None:
        overlap = self.positive & self.nafs
        if overlap:
            raise AssertionError("literals both positive and naf: %s" % overlap)
        for l in self.positive:
            if complement(l) in self.positive:
                raise AssertionError("classically inconsistent on %s" % l)
        if universe is not None:
            stray = {l for l in self.positive | self.nafs if l not in universe}
            if stray:
                raise AssertionError("literals outside the atom universe: %s" % stray)


@dataclass(frozen=True)
class StableModel:
    atoms: FrozenSet[Literal]


def render_literal_set(pas: PartialAnswerSet) -> str:
    parts = [str(l) for l in pas.positive_sorted()]
    parts += ["not %s" % l for l in pas.nafs_sorted()]
    return "{ %s }" % ", ".join(parts)


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, steps: int):
        self.remaining = steps

    def tick(self, cost: int = 1) -> None:
        self.remaining -= cost
        if self.remaining < 0:
            raise ResourceLimit("step budget exceeded")


class _Index:
    """Shared read-only view of a ground program."""

    def __init__(self, ground: GroundProgram):
        self.ground = ground
        self.rules_by_head: Dict[Literal, List] = {}
        self.constraints: List = []
        for rule in ground.rules:
            if rule.head is None:
                self.constraints.append(rule)
            else:
                self.rules_by_head.setdefault(rule.head, []).append(rule)
        self.universe: List[Literal] = sorted(
            ground.atom_universe, key=literal_sort_key
        )


class _Derivation:
    """One goal-directed proof attempt. Owns the coinductive hypothesis set
    (literal -> assumed truth) and a trail for backtracking."""

    def __init__(self, index: _Index, budget: _Budget):
        self.index = index
        self.budget = budget
        self.chs: Dict[Literal, bool] = {}
        self.trail: List[Literal] = []
        self.in_progress: Dict[Literal, int] = {}

    # Assignment trail

    def _mark(self) -> int:
        return len(self.trail)

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            del self.chs[self.trail.pop()]

    def _assign(self, lit: Literal, value: bool) -> bool:
        cur = self.chs.get(lit)
        if cur is not None:
            return cur == value
        if value and self.chs.get(complement(lit)) is True:
            return False
        self.chs[lit] = value
        self.trail.append(lit)
        return True

    # Proof search. `flips` counts negation crossings from the query.

    def prove(self, lit: Literal, flips: int) -> Iterator[None]:
        self.budget.tick()
        cur = self.chs.get(lit)
        if cur is True:
            yield
            return
        if cur is False:
            return
        anc = self.in_progress.get(lit)
        if anc is not None:
            diff = flips - anc
            if diff == 0 or diff % 2 == 1:
                return
            # Even loop: assume the literal coinductively.
            mark = self._mark()
            if self._assign(lit, True):
                yield
            self._undo(mark)
            return
        rules = self.index.rules_by_head.get(lit)
        if not rules:
            return
        self.in_progress[lit] = flips
        try:
            for rule in rules:
                rule_mark = self._mark()
                for _ in self.prove_body(rule.body, 0, flips):
                    head_mark = self._mark()
                    # The body may have assumed the head false (odd loop
                    # through this very rule); concluding then fails.
                    if self._assign(lit, True):
                        yield
                    self._undo(head_mark)
                self._undo(rule_mark)
        finally:
            del self.in_progress[lit]

    def prove_body(self, body: Sequence[BodyElement], i: int, flips: int) -> Iterator[None]:
        if i == len(body):
            yield
            return
        for _ in self.prove_elem(body[i], flips):
            yield from self.prove_body(body, i + 1, flips)

    def prove_elem(self, elem: BodyElement, flips: int) -> Iterator[None]:
        if isinstance(elem, Comparison):
            if evaluate_comparison(elem) is True:
                yield
            return
        if elem.naf:
            yield from self.prove_naf(elem.literal, flips + 1)
        else:
            yield from self.prove(elem.literal, flips)

    def prove_naf(self, lit: Literal, flips: int) -> Iterator[None]:
        """Establishes that `lit` is false: assumes it, then refutes each of
        its rules by falsifying one body element per rule."""
        self.budget.tick()
        cur = self.chs.get(lit)
        if cur is False:
            yield
            return
        if cur is True:
            return
        mark = self._mark()
        if self._assign(lit, False):
            rules = self.index.rules_by_head.get(lit, ())
            yield from self._refute_all(rules, 0, flips)
        self._undo(mark)

    def _refute_all(self, rules: Sequence, i: int, flips: int) -> Iterator[None]:
        if i == len(rules):
            yield
            return
        for _ in self._refute_rule(rules[i], flips):
            yield from self._refute_all(rules, i + 1, flips)

    def _refute_rule(self, rule, flips: int) -> Iterator[None]:
        # One falsified element refutes the rule; facts are irrefutable.
        # A rule with an element already false under the current assumptions
        # is refuted as it stands; offering the other elements as further
        # choice points would only multiply equivalent derivations.
        for elem in rule.body:
            value = self.chs.get(elem.literal)
            if value is not None and value == elem.naf:
                yield
                return
        for elem in rule.body:
            assert isinstance(elem, BodyLiteral)
            if elem.naf:
                yield from self.prove(elem.literal, flips + 1)
            else:
                yield from self.prove_naf(elem.literal, flips)

    def snapshot(self) -> Tuple[FrozenSet[Literal], FrozenSet[Literal]]:
        positive = frozenset(l for l, v in self.chs.items() if v)
        nafs = frozenset(l for l, v in self.chs.items() if not v)
        return positive, nafs


# Stable-extension search backing the per-candidate global check.

class _NoModel(Exception):
    pass


class _ModelSearch:
    """Finds one total stable model consistent with a partial assignment:
    three-valued propagation, then branching on undecided literals, then a
    foundedness check on total assignments."""

    def __init__(self, index: _Index, budget: _Budget, extra: FrozenSet[Literal]):
        lits: Set[Literal] = set(index.universe)
        lits.update(extra)
        self.literals: List[Literal] = sorted(lits, key=literal_sort_key)
        self.id_of: Dict[Literal, int] = {l: i for i, l in enumerate(self.literals)}
        self.budget = budget

        self.rules: List[Tuple[int, Tuple[int, ...], Tuple[int, ...]]] = []
        self.rules_of_head: Dict[int, List[int]] = {}
        self.watch: Dict[int, List[int]] = {}
        for rule in index.ground.rules:
            head = -1 if rule.head is None else self.id_of[rule.head]
            pos = tuple(self.id_of[e.literal] for e in rule.body if not e.naf)
            nafm = tuple(self.id_of[e.literal] for e in rule.body if e.naf)
            rid = len(self.rules)
            self.rules.append((head, pos, nafm))
            if head >= 0:
                self.rules_of_head.setdefault(head, []).append(rid)
            for l in set(pos) | set(nafm) | ({head} if head >= 0 else set()):
                self.watch.setdefault(l, []).append(rid)
        self.comp_of: Dict[int, int] = {}
        for l, i in self.id_of.items():
            j = self.id_of.get(complement(l))
            if j is not None:
                self.comp_of[i] = j

        self.assign: List[Optional[bool]] = [None] * len(self.literals)
        self.trail: List[int] = []

    def _set(self, i: int, value: bool, queue: List[int]) -> None:
        cur = self.assign[i]
        if cur is not None:
            if cur != value:
                raise _NoModel
            return
        self.assign[i] = value
        self.trail.append(i)
        queue.append(i)

    def _rule_status(self, rid: int) -> str:
        head, pos, nafm = self.rules[rid]
        satisfied = True
        for l in pos:
            v = self.assign[l]
            if v is False:
                return "falsified"
            if v is None:
                satisfied = False
        for l in nafm:
            v = self.assign[l]
            if v is True:
                return "falsified"
            if v is None:
                satisfied = False
        return "satisfied" if satisfied else "open"

    def _propagate(self, queue: List[int]) -> None:
        while queue:
            self.budget.tick()
            i = queue.pop()
            value = self.assign[i]
            if value is True:
                j = self.comp_of.get(i)
                if j is not None:
                    self._set(j, False, queue)
            for rid in self.watch.get(i, ()):
                head, pos, nafm = self.rules[rid]
                status = self._rule_status(rid)
                if status == "satisfied":
                    if head < 0:
                        raise _NoModel
                    self._set(head, True, queue)
                elif status == "falsified" and head >= 0 and self.assign[head] is not True:
                    if all(
                        self._rule_status(r) == "falsified"
                        for r in self.rules_of_head[head]
                    ):
                        self._set(head, False, queue)

    def _founded(self) -> bool:
        derived = [False] * len(self.literals)
        changed = True
        while changed:
            changed = False
            for head, pos, nafm in self.rules:
                if head < 0 or derived[head]:
                    continue
                if self.assign[head] is not True:
                    continue
                if any(self.assign[l] is True for l in nafm):
                    continue
                if all(derived[l] for l in pos):
                    derived[head] = True
                    changed = True
        return all(
            derived[i] for i, v in enumerate(self.assign) if v is True
        )

    def _search(self, start: int) -> bool:
        self.budget.tick()
        i = start
        while i < len(self.literals) and self.assign[i] is not None:
            i += 1
        if i == len(self.literals):
            return self._founded()
        for value in (False, True):
            mark = len(self.trail)
            queue: List[int] = []
            try:
                self._set(i, value, queue)
                self._propagate(queue)
                if self._search(i + 1):
                    return True
            except _NoModel:
                pass
            while len(self.trail) > mark:
                self.assign[self.trail.pop()] = None
        return False

    def find(
        self, positive: FrozenSet[Literal], nafs: FrozenSet[Literal]
    ) -> Optional[FrozenSet[Literal]]:
        queue: List[int] = []
        try:
            for l in positive:
                self._set(self.id_of[l], True, queue)
            for l in nafs:
                self._set(self.id_of[l], False, queue)
            # Literals with no rules can never be derived.
            for i, l in enumerate(self.literals):
                if i not in self.rules_of_head:
                    self._set(i, False, queue)
            self._propagate(queue)
            if not self._search(0):
                return None
        except _NoModel:
            return None
        return frozenset(
            l for i, l in enumerate(self.literals) if self.assign[i] is True
        )


def _has_stable_extension(
    index: _Index,
    positive: FrozenSet[Literal],
    nafs: FrozenSet[Literal],
    witnesses: List[FrozenSet[Literal]],
    budget: _Budget,
) -> bool:
    for w in witnesses:
        if positive <= w and not (nafs & w):
            return True
    model = _ModelSearch(index, budget, positive | nafs).find(positive, nafs)
    if model is None:
        return False
    witnesses.append(model)
    return True


# Query instantiation: variables are bound by matching positive goals
# against the atom universe, in deterministic order.

def _query_instantiations(
    query: Query, index: _Index
) -> List[Tuple[Dict[Variable, Term], Tuple[BodyElement, ...]]]:
    if not query.goals:
        raise QueryError("query has no goals")

    def extend(i: int, binding: Dict[Variable, Term]) -> Iterator[Dict[Variable, Term]]:
        if i == len(query.goals):
            yield binding
            return
        goal = query.goals[i]
        if isinstance(goal, BodyLiteral) and not goal.naf and not goal.literal.is_ground():
            pattern = substitute_element(goal, binding)
            assert isinstance(pattern, BodyLiteral)
            if pattern.literal.is_ground():
                yield from extend(i + 1, binding)
                return
            for candidate in index.universe:
                new = match_literal(pattern.literal, candidate, binding)
                if new is not None:
                    yield from extend(i + 1, new)
        else:
            yield from extend(i + 1, binding)

    out = []
    for binding in extend(0, {}):
        goals = tuple(substitute_element(g, binding) for g in query.goals)
        for g in goals:
            if isinstance(g, BodyLiteral) and not g.literal.is_ground():
                unbound = sorted(
                    a.name for a in g.literal.atom.args if isinstance(a, Variable)
                )
                raise QueryError(
                    "query variable %s is not bound by any positive goal" % unbound[0]
                )
            if isinstance(g, Comparison) and any(
                isinstance(t, Variable) for t in (g.lhs, g.rhs)
            ):
                raise QueryError("comparison goal %s has an unbound variable" % (g,))
        out.append((binding, goals))
    return out


def solve(
    ground: GroundProgram,
    query: Query,
    limit: Optional[int] = None,
    options: Optional[EngineOptions] = None,
) -> Iterator[PartialAnswerSet]:
    """Enumerates distinct partial answer sets for the query, depth first,
    leftmost goal first, rule order; deduplicated on (bindings, positive,
    nafs). Each emitted answer is consistent with at least one stable model
    of the program."""
    opts = options or EngineOptions()
    index = _Index(ground)
    budget = _Budget(opts.step_budget)
    witnesses: List[FrozenSet[Literal]] = []
    seen: Set[Tuple] = set()
    emitted = 0
    if limit is not None and emitted >= limit:
        return
    for binding, goals in _query_instantiations(query, index):
        binding_items = tuple(
            sorted((v.name, t) for v, t in binding.items())
        )
        derivation = _Derivation(index, budget)
        for _ in derivation.prove_body(goals, 0, 0):
            positive, nafs = derivation.snapshot()
            key = (binding_items, positive, nafs)
            if key in seen:
                continue
            seen.add(key)
            if not _has_stable_extension(index, positive, nafs, witnesses, budget):
                continue
            emitted += 1
            yield PartialAnswerSet(positive, nafs, binding_items)
            if limit is not None and emitted >= limit:
                return


# Brute-force oracle.

def _bit_rules(ground: GroundProgram, id_of: Dict[Literal, int]):
    normal = []
    constraints = []
    for rule in ground.rules:
        pos_mask = 0
        naf_mask = 0
        for elem in rule.body:
            bit = 1 << id_of[elem.literal]
            if elem.naf:
                naf_mask |= bit
            else:
                pos_mask |= bit
        if rule.head is None:
            constraints.append((pos_mask, naf_mask))
        else:
            normal.append((id_of[rule.head], pos_mask, naf_mask))
    return normal, constraints


def _reduct_least_model(normal, candidate: int) -> int:
    lm = 0
    changed = True
    while changed:
        changed = False
        for head, pos_mask, naf_mask in normal:
            bit = 1 << head
            if lm & bit:
                continue
            if candidate & naf_mask:
                continue
            if (lm & pos_mask) == pos_mask:
                lm |= bit
                changed = True
    return lm


def enumerate_stable_models_bruteforce(
    ground: GroundProgram,
    bound: Optional[int] = None,
    options: Optional[EngineOptions] = None,
) -> Set[StableModel]:
    """Exhaustive Gelfond-Lifschitz check over every subset of the universe."""
    opts = options or EngineOptions()
    max_atoms = bound if bound is not None else opts.model_bound
    universe = sorted(ground.atom_universe, key=literal_sort_key)
    if len(universe) > max_atoms:
        raise UniverseTooLarge(
            "atom universe has %d literals, bound is %d" % (len(universe), max_atoms)
        )
    id_of = {l: i for i, l in enumerate(universe)}
    normal, constraints = _bit_rules(ground, id_of)
    inconsistent_pairs = []
    for l, i in id_of.items():
        j = id_of.get(complement(l))
        if j is not None and i < j:
            inconsistent_pairs.append((1 << i) | (1 << j))

    models: Set[StableModel] = set()
    for candidate in range(1 << len(universe)):
        if any((candidate & pair) == pair for pair in inconsistent_pairs):
            continue
        if any(
            (candidate & pos) == pos and not (candidate & nafm)
            for pos, nafm in constraints
        ):
            continue
        if _reduct_least_model(normal, candidate) == candidate:
            atoms = frozenset(
                universe[i] for i in range(len(universe)) if (candidate >> i) & 1
            )
            models.add(StableModel(atoms))
    return models


def check_stable(ground: GroundProgram, atoms: Set[Literal]) -> bool:
    """Single-candidate form of the oracle."""
    universe = sorted(ground.atom_universe, key=literal_sort_key)
    id_of = {l: i for i, l in enumerate(universe)}
    if any(l not in id_of for l in atoms):
        return False
    if any(complement(l) in atoms for l in atoms):
        return False
    candidate = 0
    for l in atoms:
        candidate |= 1 << id_of[l]
    normal, constraints = _bit_rules(ground, id_of)
    if any(
        (candidate & pos) == pos and not (candidate & nafm)
        for pos, nafm in constraints
    ):
        return False
    return _reduct_least_model(normal, candidate) == candidate
