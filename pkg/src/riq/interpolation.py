"""Interpolants as sets of mini-sequents, their orthogonals, the quantifier
constructs, the proof-to-interpolant transformation, concept assembly, and
the end-to-end concept-interpolation pipeline with verification.

The transformation partitions a subsumption proof into a left part (first
ontology plus the subsumee) and a right part (subsumer plus the second
ontology): every active occurrence inherits the side of its principal, GCI
copies introduced at fresh labels go to the side of their source ontology,
and inequality atoms created by the atmost rule go to the side of the
principal.  Interpolants are then assigned to the initial sequents and
propagated down to the conclusion: rules whose principal sits on the right
combine premise interpolants directly (union, or the universal/atmost
constructs); rules whose principal sits on the left are handled by the
orthogonal wrap (orthogonal, mirrored right-side combination, orthogonal).

Every returned concept interpolant is re-verified: exact signature check and
fresh proofs of both subsumption directions, plus a bounded model-search
spot check when the signature is small enough.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

from .core import (
    AtLeast,
    AtMost,
    BOT,
    Concept,
    Exists,
    Forall,
    And,
    NegatedName,
    Ontology,
    Or,
    RiqError,
    Role,
    TOP,
    and_all,
    cpt,
    nnf_negate,
    or_all,
    union_ontology,
)
from .parser import parse_concept, render_concept
from .prover import (
    Proved,
    ProveResult,
    Refuted,
    SearchLimits,
    Unknown,
    goal_sequent,
    prove,
)
from .rsystem import build_rsystem
from .semantics import OracleGuardError, find_countermodel_bounded
from .sequent import (
    Eq,
    LabeledConcept,
    Neq,
    Proof,
    RuleInstance,
    Sequent,
    apply_rule,
    check_proof,
    make_sequent,
)

Label = str


class InterpolationError(RiqError):
    """Partitioning or extraction failure; when raised mid-pipeline it
    signals a bug, not a property of the input."""


# ---------------------------------------------------------------------------
# Interpolants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Member:
    """One mini-sequent of an interpolant: equality/inequality atoms over
    distinct labels, and a set of labeled concepts."""

    atoms: frozenset[Union[Eq, Neq]]
    concepts: frozenset[tuple[Label, Concept]]

    def __post_init__(self) -> None:
        for atom in self.atoms:
            if atom.left == atom.right:
                raise InterpolationError(
                    f"interpolant atom over a single label: {atom}")

    def key(self) -> tuple:
        return (tuple(sorted(str(a) for a in self.atoms)),
                tuple(sorted((lab, render_concept(c)) for lab, c in self.concepts)))

    def labels(self) -> frozenset[Label]:
        labs = {lab for lab, _ in self.concepts}
        for atom in self.atoms:
            labs.update((atom.left, atom.right))
        return frozenset(labs)


@dataclass(frozen=True)
class Interpolant:
    members: frozenset[Member]

    def sorted_members(self) -> tuple[Member, ...]:
        return tuple(sorted(self.members, key=Member.key))

    def labels(self) -> frozenset[Label]:
        return frozenset().union(*(m.labels() for m in self.members)) \
            if self.members else frozenset()


def member(atoms=(), concepts=()) -> Member:
    return Member(frozenset(atoms), frozenset(concepts))


def interpolant(*members_: Member) -> Interpolant:
    return Interpolant(frozenset(members_))


EMPTY = Interpolant(frozenset())


def _dominates(small: Member, big: Member) -> bool:
    return small.atoms <= big.atoms and small.concepts <= big.concepts


def prune_dominated(members) -> frozenset[Member]:
    """Drop members that componentwise extend another member.

    A member that is a superset of another is a weaker conjunct of the
    assembled concept, and every orthogonal pick over it can reuse the pick
    made for its dominator, so removing it changes nothing the pipeline
    asserts (this is exactly the redundancy behind the double-orthogonal
    domination property).  Keeping interpolants antichains is what makes the
    orthogonal wrap tractable in practice.
    """
    kept: list[Member] = []
    for m in sorted(members, key=lambda m: (len(m.atoms) + len(m.concepts), m.key())):
        if not any(_dominates(k, m) for k in kept):
            kept.append(m)
    return frozenset(kept)


def _union(parts: Sequence[Interpolant]) -> Interpolant:
    members: set[Member] = set()
    for part in parts:
        members |= part.members
    return Interpolant(prune_dominated(members))


def orthogonal(g: Interpolant) -> Interpolant:
    """All choice functions picking exactly one negated element from each
    member: equality atoms flip polarity, concepts are NNF-negated.
    Duplicates and dominated picks merge; the empty interpolant yields the
    single empty member, and any empty member kills the product."""
    partial: list[Member] = [Member(frozenset(), frozenset())]
    for m in sorted(prune_dominated(g.members), key=Member.key):
        options: list[tuple[str, object]] = []
        for atom in sorted(m.atoms, key=str):
            if isinstance(atom, Eq):
                options.append(("atom", Neq(atom.left, atom.right)))
            else:
                options.append(("atom", Eq(atom.left, atom.right)))
        for lab, c in sorted(m.concepts, key=lambda lc: (lc[0], render_concept(lc[1]))):
            options.append(("concept", (lab, nnf_negate(c))))
        grown: set[Member] = set()
        for p in partial:
            for kind, item in options:
                if kind == "atom":
                    grown.add(Member(p.atoms | {item}, p.concepts))
                else:
                    grown.add(Member(p.atoms, p.concepts | {item}))
        # partial picks dominated by another complete the same way, weaker
        partial = list(prune_dominated(grown))
    return Interpolant(frozenset(partial))


def box_interpolant(role: Role, x: Label, y: Label, g: Interpolant) -> Interpolant:
    """The universal construct: bundle each member's y-row into
    x : only role . (disjunction of the row); empty rows give only role . BOT."""
    members: set[Member] = set()
    for m in g.members:
        if any(y in (a.left, a.right) for a in m.atoms):
            raise InterpolationError(
                f"fresh label {y} occurs in interpolant atoms")
        row = sorted((c for lab, c in m.concepts if lab == y), key=render_concept)
        rest = frozenset((lab, c) for lab, c in m.concepts if lab != y)
        members.add(Member(m.atoms, rest | {(x, Forall(role, or_all(row)))}))
    return Interpolant(frozenset(members))


def leq_interpolant(n: int, role: Role, x: Label, ys: Sequence[Label],
                    g: Interpolant) -> Interpolant:
    """The atmost construct: drop inequalities among the fresh labels,
    concatenate all fresh-label rows, and bundle them into
    x : atmost n role . nnf_negate(disjunction of rows)."""
    fresh = set(ys)
    members: set[Member] = set()
    for m in g.members:
        kept_atoms = []
        for atom in m.atoms:
            touches = atom.left in fresh or atom.right in fresh
            if not touches:
                kept_atoms.append(atom)
                continue
            inside = atom.left in fresh and atom.right in fresh
            if not (isinstance(atom, Neq) and inside):
                raise InterpolationError(
                    f"interpolant atom {atom} escapes the fresh-label block")
        rows = sorted((c for lab, c in m.concepts if lab in fresh), key=render_concept)
        rest = frozenset((lab, c) for lab, c in m.concepts if lab not in fresh)
        bundled = AtMost(n, role, nnf_negate(or_all(rows)))
        members.add(Member(frozenset(kept_atoms), rest | {(x, bundled)}))
    return Interpolant(frozenset(members))


def interpolant_concept(g: Interpolant, x: Label) -> Concept:
    """Conjunction over members of the disjunction of each member's
    concepts; empty member contributes BOT, empty interpolant is TOP.  Only
    defined for single-label, atom-free interpolants."""
    for m in g.members:
        if m.atoms:
            raise InterpolationError("interpolant still carries (in)equality atoms")
        for lab, _ in m.concepts:
            if lab != x:
                raise InterpolationError(f"interpolant mentions foreign label {lab!r}")
    disjunctions = []
    for m in g.sorted_members():
        disjunctions.append(or_all(sorted((c for _, c in m.concepts), key=render_concept)))
    return and_all(disjunctions)


def collapse_topbot(c: Concept) -> Concept:
    """TOP/BOT constant collapsing, the only simplification applied: boolean
    units/absorbers plus the quantifier constants (some r . BOT = BOT,
    only r . TOP = TOP, atleast 0 = TOP, atleast n . BOT = BOT,
    atmost n . BOT = TOP)."""
    if isinstance(c, And):
        left, right = collapse_topbot(c.left), collapse_topbot(c.right)
        if left == BOT or right == BOT:
            return BOT
        if left == TOP:
            return right
        if right == TOP:
            return left
        return And(left, right)
    if isinstance(c, Or):
        left, right = collapse_topbot(c.left), collapse_topbot(c.right)
        if left == TOP or right == TOP:
            return TOP
        if left == BOT:
            return right
        if right == BOT:
            return left
        return Or(left, right)
    if isinstance(c, Exists):
        body = collapse_topbot(c.body)
        return BOT if body == BOT else Exists(c.role, body)
    if isinstance(c, Forall):
        body = collapse_topbot(c.body)
        return TOP if body == TOP else Forall(c.role, body)
    if isinstance(c, AtMost):
        body = collapse_topbot(c.body)
        return TOP if body == BOT else AtMost(c.n, c.role, body)
    if isinstance(c, AtLeast):
        if c.n == 0:
            return TOP
        body = collapse_topbot(c.body)
        return BOT if body == BOT else AtLeast(c.n, c.role, body)
    return c


# ---------------------------------------------------------------------------
# Proof partitioning
# ---------------------------------------------------------------------------


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class EndSplit:
    """How the conclusion sequent splits: one side per consequent occurrence,
    sides for its inequality atoms, and the tbox prefix length owned by the
    left ontology."""

    occ_sides: tuple[Side, ...]
    neq_sides: Mapping[Neq, Side]
    left_gcis: int


@dataclass(frozen=True)
class PartitionedProof:
    instance: RuleInstance
    occ_sides: tuple[Side, ...]
    neq_sides: Mapping[Neq, Side]
    children: tuple["PartitionedProof", ...]

    @property
    def conclusion(self) -> Sequent:
        return self.instance.conclusion


def _principal_side(node: PartitionedProof) -> Side:
    w = node.instance.witness
    for i, occ in enumerate(node.conclusion.consequent):
        if occ.label == w.label and occ.concept == w.concept:
            return node.occ_sides[i]
    raise InterpolationError("principal occurrence not found")


def annotate_partition(ontology: Ontology, proof: Proof,
                       end_split: EndSplit) -> PartitionedProof:
    """Upward pass assigning each occurrence and inequality atom a side.

    The proof is re-derived rule by rule so the occurrence provenance maps
    are available even for proofs loaded from JSON.
    """
    rsystem = build_rsystem(ontology)

    def walk(node: Proof, occ_sides: tuple[Side, ...],
             neq_sides: dict[Neq, Side]) -> PartitionedProof:
        inst = node.instance
        if len(occ_sides) != len(inst.conclusion.consequent):
            raise InterpolationError("side annotation does not match the sequent")
        rederived = apply_rule(ontology, inst.rule, inst.conclusion, inst.witness,
                               rsystem)
        if len(rederived.premises) != len(node.children):
            raise InterpolationError("proof does not re-derive: premise count")
        principal_side = None
        if inst.rule not in ("id", "id_eq"):
            w = inst.witness
            for i, occ in enumerate(inst.conclusion.consequent):
                if occ.label == w.label and occ.concept == w.concept:
                    principal_side = occ_sides[i]
                    break
            if principal_side is None:
                raise InterpolationError("no principal lineage for an occurrence")
        children = []
        for premise, pmap, child in zip(rederived.premises, rederived.premise_maps,
                                        node.children):
            if premise.key() != child.conclusion.key():
                raise InterpolationError("proof does not re-derive: premise mismatch")
            child_sides = []
            for origin in pmap:
                if origin[0] == "ctx":
                    child_sides.append(occ_sides[origin[1]])
                elif origin[0] == "active":
                    child_sides.append(principal_side)
                else:  # ("gci", k): route the copy to its source ontology
                    child_sides.append(Side.LEFT if origin[1] < end_split.left_gcis
                                       else Side.RIGHT)
            child_neq = dict(neq_sides)
            old_atoms = inst.conclusion.atom_set()
            for atom in premise.antecedent:
                if isinstance(atom, Neq) and atom not in old_atoms:
                    child_neq[atom] = principal_side
            # children may reorder equal premises; remap sides by content
            child_sides = _remap_sides(premise, child.conclusion, child_sides)
            children.append(walk(child, tuple(child_sides), child_neq))
        return PartitionedProof(rederived, occ_sides, dict(neq_sides), tuple(children))

    return walk(proof, end_split.occ_sides, dict(end_split.neq_sides))


def _remap_sides(premise: Sequent, actual: Sequent,
                 sides: Sequence[Side]) -> list[Side]:
    """Transfer occurrence sides from the re-derived premise to the stored
    child conclusion, which lists the same multiset possibly in another
    order."""
    if premise.consequent == actual.consequent:
        return list(sides)
    remaining = list(enumerate(premise.consequent))
    out: list[Side] = []
    for occ in actual.consequent:
        for k, (i, cand) in enumerate(remaining):
            if cand == occ:
                out.append(sides[i])
                del remaining[k]
                break
        else:
            raise InterpolationError("premise multiset mismatch while remapping")
    return out


# ---------------------------------------------------------------------------
# Interpolant extraction
# ---------------------------------------------------------------------------


def extract_interpolant(pp: PartitionedProof, o1: Ontology, o2: Ontology,
                        *, check_properties: bool = True) -> Interpolant:
    """Downward-from-leaves pass assigning an interpolant to every node.

    Initial rules produce the leaf interpolants (orthogonal-wrapped when
    the principal is on the left); interpolant-preserving rules take the
    union of their premises' interpolants; the universal and atmost rules
    apply their dedicated constructs.
    """

    def combine(node: PartitionedProof, parts: list[Interpolant]) -> Interpolant:
        rule = node.instance.rule
        w = node.instance.witness
        if rule in ("subst_eq", "or", "and", "exists", "atleast"):
            return _union(parts)
        if rule == "forall":
            return box_interpolant(w.concept.role, w.label, w.fresh[0], parts[0])
        if rule == "atmost":
            return leq_interpolant(w.concept.n, w.concept.role, w.label,
                                   w.fresh, parts[0])
        raise InterpolationError(f"unexpected rule {rule!r}")

    def leaf(node: PartitionedProof) -> Interpolant:
        inst = node.instance
        w = inst.witness
        if inst.rule == "id":
            x, pos = w.label, w.concept
            neg = NegatedName(pos.name)
            pos_side = neg_side = None
            for i, occ in enumerate(inst.conclusion.consequent):
                if occ.label == x and occ.concept == pos and pos_side is None:
                    pos_side = node.occ_sides[i]
                elif occ.label == x and occ.concept == neg and neg_side is None:
                    neg_side = node.occ_sides[i]
            if pos_side is Side.RIGHT and neg_side is Side.RIGHT:
                return interpolant(member(concepts=[(x, TOP)]))
            if pos_side is Side.LEFT and neg_side is Side.RIGHT:
                return interpolant(member(concepts=[(x, neg)]))
            if pos_side is Side.RIGHT and neg_side is Side.LEFT:
                return interpolant(member(concepts=[(x, pos)]))
            return interpolant(member(concepts=[(x, BOT)]))
        if inst.rule == "id_eq":
            atom = Neq(*w.pair)
            side = node.neq_sides.get(atom)
            if side is None:
                raise InterpolationError(f"inequality {atom} has no side tag")
            if side is Side.RIGHT:
                return interpolant(member(atoms=[atom]))
            return interpolant(member(atoms=[Eq(atom.left, atom.right)]))
        # (atleast 0): a zero-premise propagation rule
        if _principal_side(node) is Side.RIGHT:
            return EMPTY
        return interpolant(member())

    def walk(node: PartitionedProof) -> Interpolant:
        inst = node.instance
        if inst.rule in ("id", "id_eq") or not node.children:
            g = leaf(node)
        elif _principal_side(node) is Side.RIGHT:
            g = combine(node, [walk(child) for child in node.children])
        else:
            # the orthogonal wrap: swap partitions, combine, swap back
            g = orthogonal(combine(node, [orthogonal(walk(child))
                                          for child in node.children]))
        if check_properties:
            _check_lemma_properties(node, g, o1, o2)
        return g

    return walk(pp)


def _check_lemma_properties(node: PartitionedProof, g: Interpolant,
                            o1: Ontology, o2: Ontology) -> None:
    phi = {a for a, s in node.neq_sides.items() if s is Side.LEFT}
    psi = {a for a, s in node.neq_sides.items() if s is Side.RIGHT}
    seq_labels = set(node.conclusion.labels())
    left_concepts = [occ.concept for occ, side in
                     zip(node.conclusion.consequent, node.occ_sides)
                     if side is Side.LEFT]
    right_concepts = [occ.concept for occ, side in
                      zip(node.conclusion.consequent, node.occ_sides)
                      if side is Side.RIGHT]
    left_names = cpt(o1) | cpt(left_concepts)
    right_names = cpt(o2) | cpt(right_concepts)
    for m in g.members:
        for atom in m.atoms:
            flipped = type(atom)(atom.right, atom.left)
            if isinstance(atom, Eq):
                if Neq(atom.left, atom.right) not in phi and \
                   Neq(atom.right, atom.left) not in phi:
                    raise InterpolationError(
                        f"equality {atom} lacks a matching left inequality")
            elif atom not in psi and flipped not in psi:
                raise InterpolationError(
                    f"inequality {atom} lacks a matching right inequality")
        if not m.labels() <= seq_labels:
            raise InterpolationError("interpolant label outside the sequent")
        names = cpt([c for _, c in m.concepts])
        if not names <= left_names & right_names:
            raise InterpolationError(
                f"interpolant names {sorted(names - (left_names & right_names))} "
                "outside the shared signature")


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    signature_ok: bool
    extra_names: frozenset[str]
    forward: ProveResult
    backward: ProveResult
    oracle_checked: bool
    oracle_counterexample: Optional[str]

    @property
    def ok(self) -> bool:
        return (self.signature_ok and isinstance(self.forward, Proved)
                and isinstance(self.backward, Proved)
                and self.oracle_counterexample is None)

    @property
    def inconclusive(self) -> bool:
        """Nothing failed, but a direction proof hit its resource bound."""
        return (not self.ok and self.signature_ok
                and self.oracle_counterexample is None
                and not isinstance(self.forward, Refuted)
                and not isinstance(self.backward, Refuted))

    def lines(self) -> list[str]:
        def verdict(r: ProveResult) -> str:
            return type(r).__name__
        out = [
            "signature: " + ("ok" if self.signature_ok
                             else "extra names " + ", ".join(sorted(self.extra_names))),
            f"subsumee <= interpolant: {verdict(self.forward)}",
            f"interpolant <= subsumer: {verdict(self.backward)}",
        ]
        if self.oracle_checked:
            out.append("oracle spot-check: "
                       + (self.oracle_counterexample or "no counter-model found"))
        else:
            out.append("oracle spot-check: skipped (signature too large)")
        return out


def verify_interpolant(o1: Ontology, o2: Ontology, c: Concept, d: Concept,
                       i: Concept,
                       limits: SearchLimits = SearchLimits()) -> VerificationReport:
    """Check the three concept-interpolant conditions: shared signature
    (syntactic), and both subsumption directions proved over the union
    ontology; plus a bounded counter-model spot check when feasible."""
    shared = cpt(o1, c) & cpt(o2, d)
    extra = cpt(i) - shared
    ont = union_ontology(o1, o2)
    forward = prove(ont, goal_sequent(ont, c, i), limits)
    backward = prove(ont, goal_sequent(ont, i, d), limits)
    oracle_checked = False
    counterexample = None
    for sub, sup in ((c, i), (i, d)):
        try:
            hit = find_countermodel_bounded(ont, goal_sequent(ont, sub, sup))
            oracle_checked = True
            if hit is not None:
                counterexample = (f"counter-model against "
                                  f"{render_concept(sub)} <= {render_concept(sup)}")
                break
        except OracleGuardError:
            break
    return VerificationReport(not extra, frozenset(extra), forward, backward,
                              oracle_checked, counterexample)


@dataclass(frozen=True)
class InterpolationResult:
    status: str  # "ok" | "refuted" | "unknown"
    concept: Optional[Concept] = None
    interpolant: Optional[Interpolant] = None
    proof: Optional[Proof] = None
    prove_result: Optional[ProveResult] = None
    verification: Optional[VerificationReport] = None


def compute_concept_interpolant(o1: Ontology, o2: Ontology, c: Concept, d: Concept,
                                limits: SearchLimits = SearchLimits()
                                ) -> InterpolationResult:
    """Prove the split subsumption goal directly, partition the proof,
    extract the interpolant, assemble the concept, and verify it."""
    ont = union_ontology(o1, o2)
    x = "x0"
    left = tuple(LabeledConcept(lab, cc) for lab, cc in o1.gci_list(x))
    left += (LabeledConcept(x, nnf_negate(c)),)
    right = (LabeledConcept(x, d),)
    right += tuple(LabeledConcept(lab, cc) for lab, cc in o2.gci_list(x))
    goal = make_sequent((), left + right)
    result = prove(ont, goal, limits)
    if isinstance(result, Unknown):
        return InterpolationResult("unknown", prove_result=result)
    if isinstance(result, Refuted):
        return InterpolationResult("refuted", prove_result=result)
    proof = result.proof
    checked = check_proof(ont, proof)
    if not checked.ok:
        raise InterpolationError(f"prover emitted an invalid proof: {checked.message}")
    split = EndSplit(
        occ_sides=(Side.LEFT,) * len(left) + (Side.RIGHT,) * len(right),
        neq_sides={},
        left_gcis=len(o1.tbox),
    )
    pp = annotate_partition(ont, proof, split)
    g = extract_interpolant(pp, o1, o2)
    concept = collapse_topbot(interpolant_concept(g, x))
    report = verify_interpolant(o1, o2, c, d, concept, limits)
    if not report.ok:
        raise InterpolationError(
            "interpolant verification failed:\n  " + "\n  ".join(report.lines())
            + f"\n  interpolant: {render_concept(concept)}")
    return InterpolationResult("ok", concept, g, proof, result, report)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def interpolant_to_dict(g: Interpolant) -> dict:
    members = []
    for m in g.sorted_members():
        atoms = [{"kind": "eq" if isinstance(a, Eq) else "neq",
                  "left": a.left, "right": a.right}
                 for a in sorted(m.atoms, key=str)]
        concepts = [{"label": lab, "concept": render_concept(c)}
                    for lab, c in sorted(m.concepts,
                                         key=lambda lc: (lc[0], render_concept(lc[1])))]
        members.append({"atoms": atoms, "concepts": concepts})
    return {"format": "riq-interpolant", "version": 1, "members": members}


def interpolant_to_json(g: Interpolant) -> str:
    return json.dumps(interpolant_to_dict(g), indent=2)


def interpolant_from_dict(d: dict) -> Interpolant:
    members = []
    for m in d.get("members", ()):
        atoms = []
        for a in m.get("atoms", ()):
            cls = Eq if a["kind"] == "eq" else Neq
            atoms.append(cls(a["left"], a["right"]))
        concepts = [(c["label"], parse_concept(c["concept"], internal=True))
                    for c in m.get("concepts", ())]
        members.append(member(atoms, concepts))
    return Interpolant(frozenset(members))


def interpolant_from_json(text: str) -> Interpolant:
    return interpolant_from_dict(json.loads(text))
