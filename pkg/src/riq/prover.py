"""Proof search with saturation-based refutation and counter-model
extraction.

The search expands the goal bottom-up in a fixed stage order (closure rules,
then literal copying, disjunction, conjunction, existential propagation,
universal succession, atmost succession, atleast propagation) and treats an
application as exhausted once its result formulas are already present: both
disjuncts, some conjunct, the copied literal, a filler in the witness class,
or a merged target pair.  When no stage can add anything the branch is
saturated; the accumulated branch then yields a finite counter-model (label
classes as domain, negative literals as concept extensions, role atoms
closed under the RIAs), which is verified against the goal before being
returned.  Search is depth-first, leftmost premise first, and fully
deterministic; step/label/time budgets produce an explicit Unknown verdict
instead of non-termination.

Branches never share mutable state (label counters are search-local), so
independent branches could be searched in parallel by cloning the search
object; the single-threaded order is kept for reproducibility.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .core import (
    And,
    AtLeast,
    AtMost,
    Concept,
    ConceptName,
    Exists,
    Forall,
    NegatedName,
    Ontology,
    Or,
    RiqError,
    nnf_negate,
    subconcepts,
    is_literal,
)
from .rsystem import CflClosure, RSystem, build_rsystem
from .semantics import (
    Interpretation,
    falsifies,
    is_model,
    ria_closure,
)
from .sequent import (
    LabeledConcept,
    Neq,
    Proof,
    PropWitness,
    RoleAtom,
    RuleInstance,
    Sequent,
    Witness,
    apply_rule,
    build_prop_graph,
    check_proof,
    eq_classes,
    make_sequent,
)


class CountermodelError(RiqError):
    """A saturated branch produced an interpretation that failed
    verification; this is an internal error, never silently returned."""


@dataclass(frozen=True)
class SearchLimits:
    max_steps: int = 50000
    max_labels: int = 2000
    max_seconds_hint: int = 120

    def __post_init__(self) -> None:
        if min(self.max_steps, self.max_labels, self.max_seconds_hint) < 1:
            raise ValueError("search limits must be positive")


@dataclass(frozen=True)
class Proved:
    proof: Proof


@dataclass(frozen=True)
class Refuted:
    interpretation: Interpretation
    assignment: dict[str, str]
    branch: tuple[Sequent, ...]


@dataclass(frozen=True)
class Unknown:
    reason: str


ProveResult = Union[Proved, Refuted, Unknown]


def goal_sequent(ontology: Ontology, sub: Concept, sup: Concept,
                 label: str = "x0") -> Sequent:
    """The subsumption goal `|- x : gciList(O), x : nnf_negate(C) or D`."""
    gcis = tuple(LabeledConcept(lab, c) for lab, c in ontology.gci_list(label))
    return make_sequent((), gcis + (LabeledConcept(label, Or(nnf_negate(sub), sup)),))


class _Search:
    def __init__(self, ontology: Ontology, limits: SearchLimits):
        self.ontology = ontology
        self.limits = limits
        self.rsystem: RSystem = build_rsystem(ontology)
        self.steps = 0
        self.started = time.monotonic()
        self.used_labels: set[str] = set()
        self.counter = 0

    def fresh_label(self) -> str:
        while True:
            candidate = f"x{self.counter}"
            self.counter += 1
            if candidate not in self.used_labels:
                self.used_labels.add(candidate)
                return candidate

    def budget(self, seq: Sequent) -> Optional[Unknown]:
        self.steps += 1
        if self.steps > self.limits.max_steps:
            return Unknown("step limit reached")
        if len(seq.labels()) > self.limits.max_labels:
            return Unknown("label limit reached")
        if self.steps % 256 == 0:
            if time.monotonic() - self.started > self.limits.max_seconds_hint:
                return Unknown("time limit reached")
        return None

    # ------------------------------------------------------------------
    # stage scans: each returns the first enabled application, or None
    # ------------------------------------------------------------------

    def _closure_instance(self, seq: Sequent, eqc) -> Optional[RuleInstance]:
        for occ in seq.consequent:
            if isinstance(occ.concept, ConceptName):
                if seq.has(occ.label, NegatedName(occ.concept.name)):
                    return apply_rule(self.ontology, "id", seq,
                                      Witness(label=occ.label, concept=occ.concept),
                                      self.rsystem)
        for atom in seq.antecedent:
            if isinstance(atom, Neq) and eqc.connected(atom.left, atom.right):
                path = eqc.path(atom.left, atom.right)
                return apply_rule(self.ontology, "id_eq", seq,
                                  Witness(pair=(atom.left, atom.right),
                                          eq_path=path),
                                  self.rsystem)
        for occ in seq.consequent:
            if isinstance(occ.concept, AtLeast) and occ.concept.n == 0:
                return apply_rule(self.ontology, "atleast", seq,
                                  Witness(label=occ.label, concept=occ.concept),
                                  self.rsystem)
        return None

    def _reachable(self, seq: Sequent, graph, closure, role, label
                   ) -> list[tuple[str, frozenset[str], PropWitness]]:
        start = graph.eq.class_of(label)
        out = []
        for cls in graph.nodes:
            if (start, cls) in closure.reach.get(role, ()):
                string, node_path = closure.witness(role, start, cls)
                derivation = closure.derivation(role, start, cls)
                reps = tuple(graph.rep(node) for node in node_path)
                out.append((graph.rep(cls), cls, PropWitness(string, reps, derivation)))
        return out

    # ------------------------------------------------------------------
    # cycle agenda: one item per pending occurrence, in stage order
    # ------------------------------------------------------------------

    _STAGE = {"subst_eq": 0, "or": 1, "and": 2, "exists": 3, "forall": 4,
              "atmost": 5, "atleast": 6}

    def build_agenda(self, seq: Sequent) -> tuple[tuple, ...]:
        """Snapshot the obligations of a full saturation cycle: every
        consequent occurrence contributes at most one item, grouped by the
        calculus' stage order.  Items are realized against the sequent that
        is current when they fire."""
        buckets: list[list[tuple]] = [[] for _ in self._STAGE]
        seen = set()
        for occ in seq.consequent:
            item = None
            c = occ.concept
            if is_literal(c):
                item = ("subst_eq", occ.label, c)
            elif isinstance(c, Or):
                item = ("or", occ.label, c)
            elif isinstance(c, And):
                item = ("and", occ.label, c)
            elif isinstance(c, Exists):
                item = ("exists", occ.label, c)
            elif isinstance(c, Forall):
                item = ("forall", occ.label, c)
            elif isinstance(c, AtMost):
                item = ("atmost", occ.label, c)
            elif isinstance(c, AtLeast) and c.n > 0:
                item = ("atleast", occ.label, c)
            if item is not None and item not in seen:
                seen.add(item)
                buckets[self._STAGE[item[0]]].append(item)
        return tuple(item for bucket in buckets for item in bucket)

    def realize(self, item: tuple, seq: Sequent, eqc, graph, closure,
                delta_star: frozenset) -> Optional[Witness]:
        """Turn an agenda item into a rule witness against the current
        sequent, or None when the item is exhausted (its results already
        occurred on this branch, or its side condition has no witness yet).

        Exhaustion is judged against the branch-accumulated consequent, not
        the current one: results introduced earlier stay decisive even after
        a later rule consumed them, which is exactly what the counter-model
        construction reads off a saturated branch.
        """
        kind, label, c = item
        if not seq.has(label, c):
            return None  # principal was consumed along this branch
        if kind == "subst_eq":
            order = {lab: i for i, lab in enumerate(seq.labels())}
            members = sorted(eqc.class_of(label), key=lambda m: order.get(m, len(order)))
            for other in members:
                if (other, c) not in delta_star:
                    return Witness(label=label, concept=c, target=other,
                                   eq_path=eqc.path(label, other))
            return None
        if kind == "or":
            if (label, c.left) in delta_star and (label, c.right) in delta_star:
                return None
            return Witness(label=label, concept=c)
        if kind == "and":
            if (label, c.left) in delta_star or (label, c.right) in delta_star:
                return None
            return Witness(label=label, concept=c)
        if kind == "exists":
            for rep, cls, wit in self._reachable(seq, graph, closure, c.role, label):
                if not any((m, c.body) in delta_star for m in cls):
                    return Witness(label=label, concept=c, target=rep,
                                   strings=(wit.string,), paths=(wit.path,),
                                   derivations=(wit.derivation,))
            return None
        if kind == "forall":
            return Witness(label=label, concept=c, fresh=(self.fresh_label(),))
        if kind == "atmost":
            fresh = tuple(self.fresh_label() for _ in range(c.n + 1))
            return Witness(label=label, concept=c, fresh=fresh)
        if kind == "atleast":
            candidates = self._reachable(seq, graph, closure, c.role, label)
            open_classes = [(rep, cls, wit) for rep, cls, wit in candidates
                            if not any((m, c.body) in delta_star for m in cls)]
            if len(open_classes) < c.n:
                return None
            chosen = open_classes[: c.n]
            return Witness(label=label, concept=c,
                           targets=tuple(rep for rep, _, _ in chosen),
                           strings=tuple(w.string for _, _, w in chosen),
                           paths=tuple(w.path for _, _, w in chosen),
                           derivations=tuple(w.derivation for _, _, w in chosen))
        raise AssertionError(kind)

    #: items that may fire several times per cycle (one witness each)
    _REPEATING = ("subst_eq", "exists", "atleast")

    def expand(self, seq: Sequent, branch: tuple[Sequent, ...], goal: Sequent,
               delta_star: frozenset = frozenset(),
               agenda: Optional[tuple[tuple, ...]] = None,
               fresh_cycle: bool = True) -> ProveResult:
        over = self.budget(seq)
        if over is not None:
            return over
        self.used_labels.update(seq.labels())
        delta_star = delta_star | seq.concept_set()
        eqc = eq_classes(seq.antecedent, seq.labels())

        closing = self._closure_instance(seq, eqc)
        if closing is not None:
            return Proved(Proof(closing, ()))

        graph = build_prop_graph(seq)
        closure = CflClosure(self.rsystem, graph.edge_list)

        if agenda is None:
            agenda = self.build_agenda(seq)
            fresh_cycle = True

        fired = None
        rest: tuple[tuple, ...] = ()
        for i, item in enumerate(agenda):
            witness = self.realize(item, seq, eqc, graph, closure, delta_star)
            if witness is not None:
                fired = (item, witness)
                rest = agenda[i + 1:]
                if item[0] in self._REPEATING:
                    rest = (item,) + rest
                break

        if fired is None:
            if fresh_cycle:
                # a complete cycle added nothing: the branch is saturated
                interpretation, assignment = extract_countermodel(
                    self.ontology, branch, goal)
                return Refuted(interpretation, assignment, branch)
            return self.expand(seq, branch, goal, delta_star, None, True)

        item, witness = fired
        instance = apply_rule(self.ontology, item[0], seq, witness, self.rsystem)
        children = []
        pending_unknown: Optional[Unknown] = None
        for premise in instance.premises:
            result = self.expand(premise, branch + (premise,), goal,
                                 delta_star, rest, False)
            if isinstance(result, Refuted):
                return result
            if isinstance(result, Unknown):
                if pending_unknown is None:
                    pending_unknown = result
                # keep scanning siblings: one of them may still refute
                continue
            children.append(result.proof)
        if pending_unknown is not None:
            return pending_unknown
        return Proved(Proof(instance, tuple(children)))


def prove(ontology: Ontology, goal: Sequent,
          limits: SearchLimits = SearchLimits()) -> ProveResult:
    """Run the staged proof search on a goal sequent.

    Returns Proved with a checkable proof, Refuted with a verified
    counter-interpretation, or Unknown when a resource bound was hit.
    """
    search = _Search(ontology, limits)
    search.used_labels.update(goal.labels())
    previous = sys.getrecursionlimit()
    sys.setrecursionlimit(max(previous, 25_000))
    try:
        return search.expand(goal, (goal,), goal)
    except RecursionError:
        return Unknown("proof depth exceeded the recursion limit")
    finally:
        sys.setrecursionlimit(previous)


def subsumes(ontology: Ontology, sub: Concept, sup: Concept,
             limits: SearchLimits = SearchLimits()) -> ProveResult:
    """Decide O |= sub <= sup by proving the standard goal sequent."""
    return prove(ontology, goal_sequent(ontology, sub, sup), limits)


# ---------------------------------------------------------------------------
# Counter-model extraction
# ---------------------------------------------------------------------------


def _all_names(concepts) -> set[str]:
    names = set()
    for c in concepts:
        for sub in subconcepts(c):
            if isinstance(sub, (ConceptName, NegatedName)):
                names.add(sub.name)
    return names


def extract_countermodel(ontology: Ontology, branch: Sequence[Sequent],
                         goal: Optional[Sequent] = None
                         ) -> tuple[Interpretation, dict[str, str]]:
    """Build the interpretation induced by a saturated branch.

    Domain: equivalence classes of the branch labels.  A class is in a
    concept name's extension iff some member carries the negated literal in
    the accumulated consequent.  Role extensions start from the accumulated
    role atoms and are closed under all RIAs.  The result is verified (model
    of the ontology, falsifies the goal) before being returned.
    """
    if not branch:
        raise ValueError("empty branch")
    goal = goal if goal is not None else branch[0]
    atoms: dict = {}
    label_order: dict[str, None] = {}
    delta_star: set[tuple[str, Concept]] = set()
    for seq in branch:
        for atom in seq.antecedent:
            atoms.setdefault(atom)
        for lab in seq.labels():
            label_order.setdefault(lab)
        for occ in seq.consequent:
            delta_star.add((occ.label, occ.concept))

    eqc = eq_classes(tuple(atoms), tuple(label_order))
    assignment = {lab: eqc.rep(lab) for lab in label_order}
    domain = tuple(dict.fromkeys(assignment[lab] for lab in label_order))

    names = _all_names(c for _, c in delta_star)
    names |= _all_names(g.rhs for g in ontology.tbox)
    concept_ext = {
        name: frozenset(assignment[lab] for lab, c in delta_star
                        if isinstance(c, NegatedName) and c.name == name)
        for name in sorted(names)
    }

    role_pairs: dict[str, set[tuple[str, str]]] = {}
    for atom in atoms:
        if isinstance(atom, RoleAtom):
            src, dst = assignment[atom.src], assignment[atom.dst]
            if atom.role.inverted:
                src, dst = dst, src
            role_pairs.setdefault(atom.role.name, set()).add((src, dst))
    for ria in ontology.rbox:
        for role in ria.lhs + (ria.rhs,):
            role_pairs.setdefault(role.name, set())
    closed = ria_closure(role_pairs, ontology.rbox)

    interpretation = Interpretation(domain, concept_ext, closed)

    if not is_model(interpretation, ontology):
        raise CountermodelError("extracted interpretation is not a model of the ontology")
    goal_assignment = {lab: assignment[lab] for lab in goal.labels()}
    if not falsifies(interpretation, goal_assignment, ontology, goal):
        raise CountermodelError("extracted interpretation does not falsify the goal")
    return interpretation, assignment


def verify_proved(ontology: Ontology, result: ProveResult) -> bool:
    """Convenience used by pipelines: Proved results must pass the
    independent proof checker."""
    return isinstance(result, Proved) and bool(check_proof(ontology, result.proof))
