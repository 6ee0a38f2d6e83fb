"""Sequents, label equivalence classes, propagation graphs, the calculus
rules with side-condition checking, proof objects, and an independent proof
checker.

A sequent is `antecedent |- consequent`: the antecedent is a set of
structural atoms (role atoms forming a directed tree, plus equalities and
inequalities) kept in insertion order, and the consequent is a multiset of
labeled concepts.  Labels are plain strings ordered by first occurrence in
the sequent; rule applications pick class representatives in that order,
which makes proof search deterministic.

Proof nodes store enough witness data (equality paths, propagation strings
with their node paths and full one-step derivations, fresh labels) for
`check_proof` to re-verify every side condition locally, without re-running
any search.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

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
    Role,
    is_literal,
    nnf_negate,
    weight,
)
from .parser import ParseError, _Parser, _tokenize, parse_concept, render_concept
from .rsystem import RoleString, RSystem, build_rsystem, is_one_step

Label = str


class SequentError(RiqError):
    """Violation of the sequent well-formedness conditions."""


class RuleError(RiqError):
    """Rule not applicable: missing principal, failed side condition, or a
    broken invariant in the constructed premise."""


# ---------------------------------------------------------------------------
# Structural atoms and sequents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoleAtom:
    role: Role
    src: Label
    dst: Label

    def __str__(self) -> str:
        return f"{self.role}({self.src},{self.dst})"


@dataclass(frozen=True)
class Eq:
    left: Label
    right: Label

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Neq:
    left: Label
    right: Label

    def __str__(self) -> str:
        return f"{self.left} != {self.right}"


Atom = Union[RoleAtom, Eq, Neq]


@dataclass(frozen=True)
class LabeledConcept:
    label: Label
    concept: Concept


def _atom_labels(atom: Atom) -> tuple[Label, ...]:
    if isinstance(atom, RoleAtom):
        return (atom.src, atom.dst)
    return (atom.left, atom.right)


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple[Atom, ...]
    consequent: tuple[LabeledConcept, ...]

    def labels(self) -> tuple[Label, ...]:
        """All labels, ordered by first occurrence (antecedent first)."""
        seen: dict[Label, None] = {}
        for atom in self.antecedent:
            for lab in _atom_labels(atom):
                seen.setdefault(lab)
        for occ in self.consequent:
            seen.setdefault(occ.label)
        return tuple(seen)

    def atom_set(self) -> frozenset[Atom]:
        return frozenset(self.antecedent)

    def concept_set(self) -> frozenset[tuple[Label, Concept]]:
        return frozenset((occ.label, occ.concept) for occ in self.consequent)

    def has(self, label: Label, concept: Concept) -> bool:
        return any(occ.label == label and occ.concept == concept
                   for occ in self.consequent)

    def key(self):
        """Order-insensitive comparison key (multiset consequent)."""
        return (
            self.atom_set(),
            tuple(sorted((occ.label, render_concept(occ.concept))
                         for occ in self.consequent)),
        )


def make_sequent(atoms: Iterable[Atom], concepts: Iterable[LabeledConcept]) -> Sequent:
    """Deduplicate atoms (set semantics, insertion order kept), keep the
    consequent as a multiset, and validate the well-formedness conditions."""
    seen: dict[Atom, None] = {}
    for atom in atoms:
        seen.setdefault(atom)
    seq = Sequent(tuple(seen), tuple(concepts))
    _validate(seq)
    return seq


def _validate(seq: Sequent) -> None:
    edges: dict[tuple[Label, Label], None] = {}
    tree_nodes: set[Label] = set()
    for atom in seq.antecedent:
        if isinstance(atom, RoleAtom):
            edges.setdefault((atom.src, atom.dst))
            tree_nodes.update((atom.src, atom.dst))
    if edges:
        targets = [dst for _, dst in edges]
        if len(set(targets)) != len(targets):
            raise SequentError("role atoms do not form a tree: duplicate parent")
        roots = tree_nodes - set(targets)
        if len(roots) != 1:
            raise SequentError(f"role atoms do not form a tree: {len(roots)} roots")
        reached = set(roots)
        frontier = list(roots)
        while frontier:
            node = frontier.pop()
            for src, dst in edges:
                if src == node and dst not in reached:
                    reached.add(dst)
                    frontier.append(dst)
        if reached != tree_nodes:
            raise SequentError("role atoms do not form a tree: disconnected")
    antecedent_labels = {lab for atom in seq.antecedent for lab in _atom_labels(atom)}
    consequent_labels = {occ.label for occ in seq.consequent}
    if seq.antecedent:
        if not consequent_labels <= antecedent_labels:
            raise SequentError("consequent labels must occur in the antecedent")
    else:
        if len(consequent_labels) != 1:
            raise SequentError("a sequent with empty antecedent needs exactly one label")


def sequent_weight(seq: Sequent) -> int:
    """|antecedent| plus the summed weights of the consequent multiset."""
    return len(seq.atom_set()) + sum(weight(occ.concept) for occ in seq.consequent)


def substitute_label(seq: Sequent, x: Label, y: Label) -> Sequent:
    """Replace every occurrence of label y by x; the result must still be a
    well-formed sequent."""

    def sub(lab: Label) -> Label:
        return x if lab == y else lab

    atoms: list[Atom] = []
    for atom in seq.antecedent:
        if isinstance(atom, RoleAtom):
            atoms.append(RoleAtom(atom.role, sub(atom.src), sub(atom.dst)))
        elif isinstance(atom, Eq):
            atoms.append(Eq(sub(atom.left), sub(atom.right)))
        else:
            atoms.append(Neq(sub(atom.left), sub(atom.right)))
    concepts = [LabeledConcept(sub(occ.label), occ.concept) for occ in seq.consequent]
    return make_sequent(atoms, concepts)


def weaken(seq: Sequent, addition: Union[Atom, LabeledConcept]) -> Sequent:
    """Add a structural atom or another consequent occurrence; all labels of
    the addition must already occur in the sequent."""
    known = set(seq.labels())
    if isinstance(addition, LabeledConcept):
        if addition.label not in known:
            raise SequentError(f"weakening with fresh label {addition.label!r}")
        return make_sequent(seq.antecedent, seq.consequent + (addition,))
    if not set(_atom_labels(addition)) <= known:
        raise SequentError("weakening with a fresh label in a structural atom")
    return make_sequent(seq.antecedent + (addition,), seq.consequent)


# ---------------------------------------------------------------------------
# Equivalence classes and propagation graphs
# ---------------------------------------------------------------------------


class EqClasses:
    """Union-find closure of the equality atoms of an antecedent, with path
    reconstruction for the equality side condition."""

    def __init__(self, atoms: Iterable[Atom], order: Iterable[Label]):
        self._order = tuple(order)
        self._index = {lab: i for i, lab in enumerate(self._order)}
        self._parent = {lab: lab for lab in self._order}
        self._adj: dict[Label, list[Label]] = {lab: [] for lab in self._order}
        for atom in atoms:
            if isinstance(atom, Eq):
                self._ensure(atom.left)
                self._ensure(atom.right)
                self._adj[atom.left].append(atom.right)
                self._adj[atom.right].append(atom.left)
                self._union(atom.left, atom.right)

    def _ensure(self, lab: Label) -> None:
        if lab not in self._parent:
            self._index[lab] = len(self._index)
            self._order = self._order + (lab,)
            self._parent[lab] = lab
            self._adj[lab] = []

    def _find(self, lab: Label) -> Label:
        root = lab
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[lab] != root:
            self._parent[lab], lab = root, self._parent[lab]
        return root

    def _union(self, a: Label, b: Label) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            # keep the earliest label as root so representatives are stable
            if self._index[ra] <= self._index[rb]:
                self._parent[rb] = ra
            else:
                self._parent[ra] = rb

    def connected(self, x: Label, y: Label) -> bool:
        if x not in self._parent or y not in self._parent:
            return x == y
        return self._find(x) == self._find(y)

    def class_of(self, lab: Label) -> frozenset[Label]:
        if lab not in self._parent:
            return frozenset((lab,))
        root = self._find(lab)
        return frozenset(m for m in self._parent if self._find(m) == root)

    def rep(self, lab: Label) -> Label:
        return min(self.class_of(lab), key=lambda m: self._index.get(m, len(self._index)))

    @property
    def classes(self) -> tuple[frozenset[Label], ...]:
        by_root: dict[Label, set[Label]] = {}
        for lab in self._order:
            by_root.setdefault(self._find(lab), set()).add(lab)
        ordered = sorted(by_root.values(), key=lambda cls: min(self._index[m] for m in cls))
        return tuple(frozenset(cls) for cls in ordered)

    def path(self, x: Label, y: Label) -> Optional[tuple[Label, ...]]:
        """A chain x = z1, ..., zn = y with an equality atom (either
        orientation) between neighbours, or None."""
        if x == y:
            return (x,)
        if x not in self._parent or y not in self._parent:
            return None
        prev: dict[Label, Label] = {x: x}
        queue = deque([x])
        while queue:
            cur = queue.popleft()
            for nxt in self._adj[cur]:
                if nxt in prev:
                    continue
                prev[nxt] = cur
                if nxt == y:
                    path = [y]
                    while path[-1] != x:
                        path.append(prev[path[-1]])
                    return tuple(reversed(path))
                queue.append(nxt)
        return None


def eq_classes(atoms: Iterable[Atom], order: Iterable[Label] = ()) -> EqClasses:
    """Equivalence classes of the labels under the equality atoms; `order`
    fixes representative choice (first occurrence wins)."""
    atoms = tuple(atoms)
    if not order:
        seen: dict[Label, None] = {}
        for atom in atoms:
            for lab in _atom_labels(atom):
                seen.setdefault(lab)
        order = tuple(seen)
    return EqClasses(atoms, order)


class PropagationGraph:
    """Automaton view of a sequent: nodes are label classes, and every role
    atom contributes a forward edge and its inverse."""

    def __init__(self, seq: Sequent):
        order = seq.labels()
        self._position = {lab: i for i, lab in enumerate(order)}
        self.eq = eq_classes(seq.antecedent, order)
        self.nodes: tuple[frozenset[Label], ...] = self.eq.classes
        edges: set[tuple[frozenset[Label], Role, frozenset[Label]]] = set()
        for atom in seq.antecedent:
            if isinstance(atom, RoleAtom):
                src = self.eq.class_of(atom.src)
                dst = self.eq.class_of(atom.dst)
                edges.add((src, atom.role, dst))
                edges.add((dst, atom.role.inverse(), src))
        self.edges: frozenset[tuple[frozenset[Label], Role, frozenset[Label]]] = frozenset(edges)
        # stable iteration order, independent of hash randomization
        self.edge_list = tuple(sorted(
            edges, key=lambda e: (self._node_pos(e[0]), str(e[1]), self._node_pos(e[2]))))

    def _node_pos(self, node: frozenset[Label]) -> int:
        return min(self._position[m] for m in node)

    def rep(self, node: frozenset[Label]) -> Label:
        return min(node, key=lambda m: self._position[m])

    def has_edge(self, src: frozenset[Label], role: Role, dst: frozenset[Label]) -> bool:
        return (src, role, dst) in self.edges


def build_prop_graph(seq: Sequent) -> PropagationGraph:
    return PropagationGraph(seq)


@dataclass(frozen=True)
class PropWitness:
    """Evidence for a propagation side condition: the string, the node path
    it labels (as class representatives), and the one-step derivation of the
    string from the role."""

    string: RoleString
    path: tuple[Label, ...]
    derivation: tuple[RoleString, ...]


def prop_reachable(seq: Sequent, g: RSystem, role: Role, x: Label
                   ) -> tuple[tuple[Label, PropWitness], ...]:
    """Representatives of every class reachable from x's class under the
    language of `role`, each with its witness."""
    from .rsystem import CflClosure

    graph = build_prop_graph(seq)
    closure = CflClosure(g, graph.edge_list)
    start = graph.eq.class_of(x)
    out = []
    for cls in graph.nodes:
        if (start, cls) in closure.reach.get(role, ()):
            string, node_path = closure.witness(role, start, cls)
            derivation = closure.derivation(role, start, cls)
            reps = tuple(graph.rep(node) for node in node_path)
            out.append((graph.rep(cls), PropWitness(string, reps, derivation)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Rule instances and proofs
# ---------------------------------------------------------------------------

RULES = ("id", "id_eq", "subst_eq", "or", "and", "exists", "forall", "atmost", "atleast")


@dataclass(frozen=True)
class Witness:
    """Side-condition evidence recorded in a proof node; fields not used by
    the rule stay at their defaults."""

    label: Optional[Label] = None
    concept: Optional[Concept] = None
    pair: Optional[tuple[Label, Label]] = None
    eq_path: tuple[Label, ...] = ()
    target: Optional[Label] = None
    targets: tuple[Label, ...] = ()
    fresh: tuple[Label, ...] = ()
    strings: tuple[RoleString, ...] = ()
    paths: tuple[tuple[Label, ...], ...] = ()
    derivations: tuple[tuple[RoleString, ...], ...] = ()


#: Provenance of a premise occurrence: ("ctx", j) copies conclusion
#: occurrence j, ("active",) descends from the principal, ("gci", k) is the
#: k-th TBox axiom introduced at a fresh label.
Provenance = tuple
PremiseMap = tuple[Provenance, ...]


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    conclusion: Sequent
    premises: tuple[Sequent, ...]
    witness: Witness
    premise_maps: tuple[PremiseMap, ...] = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class Proof:
    instance: RuleInstance
    children: tuple["Proof", ...] = ()

    @property
    def conclusion(self) -> Sequent:
        return self.instance.conclusion

    def nodes(self) -> Iterable["Proof"]:
        yield self
        for child in self.children:
            yield from child.nodes()


def proof_size(proof: Proof) -> int:
    """Sum of the weights of all sequents in the proof tree."""
    return sum(sequent_weight(node.conclusion) for node in proof.nodes())


def proof_height(proof: Proof) -> int:
    if not proof.children:
        return 1
    return 1 + max(proof_height(child) for child in proof.children)


def _principal_index(seq: Sequent, label: Label, concept: Concept) -> int:
    for i, occ in enumerate(seq.consequent):
        if occ.label == label and occ.concept == concept:
            return i
    raise RuleError(f"principal {label} : {render_concept(concept)} not in consequent")


def _check_eq_path(seq: Sequent, x: Label, y: Label, path: tuple[Label, ...]) -> None:
    if not path or path[0] != x or path[-1] != y:
        raise RuleError(f"equality path must run from {x} to {y}")
    atoms = seq.atom_set()
    for a, b in zip(path, path[1:]):
        if Eq(a, b) not in atoms and Eq(b, a) not in atoms:
            raise RuleError(f"no equality atom between {a} and {b}")


def _check_propagation(seq: Sequent, g: RSystem, role: Role, x: Label, y: Label,
                       string: RoleString, path: tuple[Label, ...],
                       derivation: tuple[RoleString, ...]) -> None:
    """Re-verify a propagation witness: the derivation takes (role,) to the
    string by one-step rewrites, and the string labels a path from x's class
    to y's class in the propagation graph."""
    if len(path) != len(string) + 1:
        raise RuleError("propagation path length does not match its string")
    if not derivation or derivation[0] != (role,) or derivation[-1] != string:
        raise RuleError("derivation must run from the role to the witness string")
    for s, t in zip(derivation, derivation[1:]):
        if not is_one_step(g, s, t):
            raise RuleError(f"derivation step is not a one-step rewrite: {s} -> {t}")
    graph = build_prop_graph(seq)
    if graph.eq.class_of(path[0]) != graph.eq.class_of(x):
        raise RuleError("propagation path does not start at the principal label")
    if graph.eq.class_of(path[-1]) != graph.eq.class_of(y):
        raise RuleError("propagation path does not end at the target label")
    for a, ch, b in zip(path, string, path[1:]):
        if not graph.has_edge(graph.eq.class_of(a), ch, graph.eq.class_of(b)):
            raise RuleError(f"missing propagation edge {a} -{ch}-> {b}")


def _check_fresh(seq: Sequent, fresh: tuple[Label, ...]) -> None:
    known = set(seq.labels())
    if len(set(fresh)) != len(fresh):
        raise RuleError("fresh labels must be pairwise distinct")
    for lab in fresh:
        if lab in known:
            raise RuleError(f"label {lab!r} is not fresh")


def _ctx(n: int, skip: int) -> list[Provenance]:
    return [("ctx", j) for j in range(n) if j != skip]


def apply_rule(ontology: Ontology, rule: str, conclusion: Sequent,
               witness: Witness, rsystem: Optional[RSystem] = None) -> RuleInstance:
    """Construct the premises of a rule application bottom-up, verifying the
    side condition carried by the witness.  Raises RuleError if the rule does
    not apply."""
    _validate(conclusion)
    if rsystem is None:
        rsystem = build_rsystem(ontology)
    cons = conclusion.consequent

    if rule == "id":
        if not isinstance(witness.concept, ConceptName):
            raise RuleError("(id) needs a concept name")
        x, a = witness.label, witness.concept
        _principal_index(conclusion, x, a)
        _principal_index(conclusion, x, NegatedName(a.name))
        return RuleInstance(rule, conclusion, (), witness, ())

    if rule == "id_eq":
        if witness.pair is None:
            raise RuleError("(id_eq) needs its inequality atom")
        x, y = witness.pair
        if Neq(x, y) not in conclusion.atom_set():
            raise RuleError(f"inequality {x} != {y} not in the antecedent")
        _check_eq_path(conclusion, x, y, witness.eq_path)
        return RuleInstance(rule, conclusion, (), witness, ())

    if rule == "subst_eq":
        x, lit, y = witness.label, witness.concept, witness.target
        if lit is None or not is_literal(lit):
            raise RuleError("(subst_eq) applies to literals only")
        idx = _principal_index(conclusion, x, lit)
        _check_eq_path(conclusion, x, y, witness.eq_path)
        premise = make_sequent(
            conclusion.antecedent,
            cons[: idx + 1] + (LabeledConcept(y, lit),) + cons[idx + 1:])
        pmap = tuple([("ctx", j) for j in range(idx + 1)] + [("active",)]
                     + [("ctx", j) for j in range(idx + 1, len(cons))])
        return RuleInstance(rule, conclusion, (premise,), witness, (pmap,))

    if rule == "or":
        x, c = witness.label, witness.concept
        if not isinstance(c, Or):
            raise RuleError("(or) needs a disjunction")
        idx = _principal_index(conclusion, x, c)
        premise = make_sequent(
            conclusion.antecedent,
            cons[:idx] + (LabeledConcept(x, c.left), LabeledConcept(x, c.right))
            + cons[idx + 1:])
        pmap = tuple(_ctx(len(cons), idx)[:idx] + [("active",), ("active",)]
                     + _ctx(len(cons), idx)[idx:])
        return RuleInstance(rule, conclusion, (premise,), witness, (pmap,))

    if rule == "and":
        x, c = witness.label, witness.concept
        if not isinstance(c, And):
            raise RuleError("(and) needs a conjunction")
        idx = _principal_index(conclusion, x, c)
        premises = []
        pmaps = []
        for part in (c.left, c.right):
            premises.append(make_sequent(
                conclusion.antecedent,
                cons[:idx] + (LabeledConcept(x, part),) + cons[idx + 1:]))
            pmaps.append(tuple(_ctx(len(cons), idx)[:idx] + [("active",)]
                               + _ctx(len(cons), idx)[idx:]))
        return RuleInstance(rule, conclusion, tuple(premises), witness, tuple(pmaps))

    if rule == "exists":
        x, c, y = witness.label, witness.concept, witness.target
        if not isinstance(c, Exists):
            raise RuleError("(exists) needs an existential restriction")
        idx = _principal_index(conclusion, x, c)
        if len(witness.strings) != 1 or len(witness.paths) != 1 or len(witness.derivations) != 1:
            raise RuleError("(exists) needs exactly one propagation witness")
        _check_propagation(conclusion, rsystem, c.role, x, y,
                           witness.strings[0], witness.paths[0], witness.derivations[0])
        premise = make_sequent(
            conclusion.antecedent,
            cons[: idx + 1] + (LabeledConcept(y, c.body),) + cons[idx + 1:])
        pmap = tuple([("ctx", j) for j in range(idx + 1)] + [("active",)]
                     + [("ctx", j) for j in range(idx + 1, len(cons))])
        return RuleInstance(rule, conclusion, (premise,), witness, (pmap,))

    if rule == "forall":
        x, c = witness.label, witness.concept
        if not isinstance(c, Forall):
            raise RuleError("(forall) needs a universal restriction")
        idx = _principal_index(conclusion, x, c)
        if len(witness.fresh) != 1:
            raise RuleError("(forall) needs one fresh label")
        _check_fresh(conclusion, witness.fresh)
        y = witness.fresh[0]
        gcis = ontology.gci_list(y)
        premise = make_sequent(
            conclusion.antecedent + (RoleAtom(c.role, x, y),),
            (LabeledConcept(y, c.body),)
            + tuple(LabeledConcept(lab, g) for lab, g in gcis)
            + cons[:idx] + cons[idx + 1:])
        pmap = tuple([("active",)] + [("gci", k) for k in range(len(gcis))]
                     + _ctx(len(cons), idx))
        return RuleInstance(rule, conclusion, (premise,), witness, (pmap,))

    if rule == "atmost":
        x, c = witness.label, witness.concept
        if not isinstance(c, AtMost):
            raise RuleError("(atmost) needs an atmost restriction")
        idx = _principal_index(conclusion, x, c)
        if len(witness.fresh) != c.n + 1:
            raise RuleError(f"(atmost {c.n}) needs {c.n + 1} fresh labels")
        _check_fresh(conclusion, witness.fresh)
        ys = witness.fresh
        atoms = list(conclusion.antecedent)
        atoms += [Neq(ys[i], ys[j]) for i in range(len(ys)) for j in range(i + 1, len(ys))]
        atoms += [RoleAtom(c.role, x, y) for y in ys]
        new_cons: list[LabeledConcept] = []
        pmap: list[Provenance] = []
        neg = nnf_negate(c.body)
        for y in ys:
            new_cons.append(LabeledConcept(y, neg))
            pmap.append(("active",))
            for k, (lab, g) in enumerate(ontology.gci_list(y)):
                new_cons.append(LabeledConcept(lab, g))
                pmap.append(("gci", k))
        premise = make_sequent(atoms, tuple(new_cons) + cons[:idx] + cons[idx + 1:])
        pmap += _ctx(len(cons), idx)
        return RuleInstance(rule, conclusion, (premise,), witness, (tuple(pmap),))

    if rule == "atleast":
        x, c = witness.label, witness.concept
        if not isinstance(c, AtLeast):
            raise RuleError("(atleast) needs an atleast restriction")
        idx = _principal_index(conclusion, x, c)
        ys = witness.targets
        if len(ys) != c.n:
            raise RuleError(f"(atleast {c.n}) needs {c.n} target labels")
        if not (len(witness.strings) == len(witness.paths)
                == len(witness.derivations) == c.n):
            raise RuleError("(atleast) needs one propagation witness per target")
        for y, string, path, derivation in zip(ys, witness.strings, witness.paths,
                                               witness.derivations):
            _check_propagation(conclusion, rsystem, c.role, x, y, string, path, derivation)
        premises = []
        pmaps = []
        for y in ys:
            premises.append(make_sequent(
                conclusion.antecedent, (LabeledConcept(y, c.body),) + cons))
            pmaps.append(tuple([("active",)] + [("ctx", j) for j in range(len(cons))]))
        for i in range(len(ys)):
            for j in range(i + 1, len(ys)):
                premises.append(make_sequent(
                    conclusion.antecedent + (Eq(ys[i], ys[j]),), cons))
                pmaps.append(tuple(("ctx", j2) for j2 in range(len(cons))))
        return RuleInstance(rule, conclusion, tuple(premises), witness, tuple(pmaps))

    raise RuleError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    message: str = ""
    #: child indices from the root to the first failing node
    path: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_proof(ontology: Ontology, proof: Proof,
                rsystem: Optional[RSystem] = None) -> CheckResult:
    """Independently validate a proof: every node must re-derive under
    apply_rule (side conditions re-verified from the stored witnesses) and
    its premises must match the children's conclusions."""
    if rsystem is None:
        rsystem = build_rsystem(ontology)

    def walk(node: Proof, path: tuple[int, ...]) -> CheckResult:
        inst = node.instance
        try:
            rederived = apply_rule(ontology, inst.rule, inst.conclusion,
                                   inst.witness, rsystem)
        except RiqError as exc:
            return CheckResult(False, f"{inst.rule}: {exc}", path)
        if len(rederived.premises) != len(node.children):
            return CheckResult(
                False,
                f"{inst.rule}: expected {len(rederived.premises)} premises, "
                f"proof has {len(node.children)}", path)
        for i, (premise, child) in enumerate(zip(rederived.premises, node.children)):
            if premise.key() != child.conclusion.key():
                return CheckResult(False, f"{inst.rule}: premise {i} mismatch", path)
            result = walk(child, path + (i,))
            if not result.ok:
                return result
        return CheckResult(True)

    return walk(proof, ())


# ---------------------------------------------------------------------------
# Text round-trip for sequents
# ---------------------------------------------------------------------------


def render_sequent(seq: Sequent) -> str:
    left = ", ".join(str(atom) for atom in seq.antecedent)
    right = ", ".join(f"{occ.label} : {render_concept(occ.concept)}"
                      for occ in seq.consequent)
    if left and right:
        return f"{left} |- {right}"
    if left:
        return f"{left} |-"
    return f"|- {right}"


def parse_sequent(text: str) -> Sequent:
    """Inverse of render_sequent; used when re-validating serialized proofs,
    so internal names are allowed."""
    parser = _Parser(_tokenize(text), internal=True)
    atoms: list[Atom] = []
    concepts: list[LabeledConcept] = []
    if not (parser.peek().kind == "sym" and parser.peek().text == "|-"):
        while True:
            first = parser.next()
            if first.kind != "name":
                raise parser.error(f"expected an atom, found {first.text!r}", first)
            nxt = parser.peek()
            if nxt.kind == "sym" and nxt.text == "(":
                parser.next()
                src = parser.next()
                parser.expect_sym(",")
                dst = parser.next()
                parser.expect_sym(")")
                if src.kind != "name" or dst.kind != "name":
                    raise parser.error("expected labels in role atom", src)
                inverted = first.text.endswith("-")
                name = first.text[:-1] if inverted else first.text
                atoms.append(RoleAtom(Role(name, inverted), src.text, dst.text))
            elif nxt.kind == "sym" and nxt.text in ("=", "!="):
                parser.next()
                other = parser.next()
                if other.kind != "name":
                    raise parser.error("expected a label", other)
                if nxt.text == "=":
                    atoms.append(Eq(first.text, other.text))
                else:
                    atoms.append(Neq(first.text, other.text))
            else:
                raise parser.error(f"malformed atom after {first.text!r}", nxt)
            tok = parser.peek()
            if tok.kind == "sym" and tok.text == ",":
                parser.next()
                continue
            break
    parser.expect_sym("|-")
    while parser.peek().kind != "eof":
        lab = parser.next()
        if lab.kind != "name":
            raise parser.error(f"expected a label, found {lab.text!r}", lab)
        parser.expect_sym(":")
        concept = parser.parse_expr()
        concepts.append(LabeledConcept(lab.text, _nnf_from_raw(concept)))
        tok = parser.peek()
        if tok.kind == "sym" and tok.text == ",":
            parser.next()
            continue
        break
    tok = parser.peek()
    if tok.kind != "eof":
        raise parser.error(f"trailing input {tok.text!r}", tok)
    return make_sequent(atoms, concepts)


def _nnf_from_raw(concept: Concept) -> Concept:
    from .core import to_nnf

    return to_nnf(concept)


# ---------------------------------------------------------------------------
# Proof serialization (structured JSON)
# ---------------------------------------------------------------------------


def _role_to_str(role: Role) -> str:
    return str(role)


def _role_from_str(text: str) -> Role:
    if text.endswith("-"):
        return Role(text[:-1], True)
    return Role(text)


def _witness_to_dict(w: Witness) -> dict:
    out: dict = {}
    if w.label is not None:
        out["label"] = w.label
    if w.concept is not None:
        out["concept"] = render_concept(w.concept)
    if w.pair is not None:
        out["pair"] = list(w.pair)
    if w.eq_path:
        out["eq_path"] = list(w.eq_path)
    if w.target is not None:
        out["target"] = w.target
    if w.targets:
        out["targets"] = list(w.targets)
    if w.fresh:
        out["fresh"] = list(w.fresh)
    if w.strings:
        out["strings"] = [[_role_to_str(r) for r in s] for s in w.strings]
    if w.paths:
        out["paths"] = [list(p) for p in w.paths]
    if w.derivations:
        out["derivations"] = [[[_role_to_str(r) for r in step] for step in d]
                              for d in w.derivations]
    return out


def _witness_from_dict(d: dict) -> Witness:
    return Witness(
        label=d.get("label"),
        concept=parse_concept(d["concept"], internal=True) if "concept" in d else None,
        pair=tuple(d["pair"]) if "pair" in d else None,
        eq_path=tuple(d.get("eq_path", ())),
        target=d.get("target"),
        targets=tuple(d.get("targets", ())),
        fresh=tuple(d.get("fresh", ())),
        strings=tuple(tuple(_role_from_str(r) for r in s) for s in d.get("strings", ())),
        paths=tuple(tuple(p) for p in d.get("paths", ())),
        derivations=tuple(tuple(tuple(_role_from_str(r) for r in step) for step in dv)
                          for dv in d.get("derivations", ())),
    )


def _proof_to_dict(proof: Proof) -> dict:
    return {
        "rule": proof.instance.rule,
        "sequent": render_sequent(proof.conclusion),
        "witness": _witness_to_dict(proof.instance.witness),
        "premises": [_proof_to_dict(child) for child in proof.children],
    }


def proof_to_json(proof: Proof) -> str:
    return json.dumps({"format": "riq-proof", "version": 1,
                       "root": _proof_to_dict(proof)}, indent=2)


def _proof_from_dict(d: dict) -> Proof:
    children = tuple(_proof_from_dict(p) for p in d.get("premises", ()))
    instance = RuleInstance(
        rule=d["rule"],
        conclusion=parse_sequent(d["sequent"]),
        premises=tuple(child.conclusion for child in children),
        witness=_witness_from_dict(d.get("witness", {})),
    )
    return Proof(instance, children)


def proof_from_json(text: str) -> Proof:
    data = json.loads(text)
    if data.get("format") != "riq-proof":
        raise ParseError("not a riq proof file")
    return _proof_from_dict(data["root"])
