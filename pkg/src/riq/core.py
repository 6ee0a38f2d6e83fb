"""Domain types for RIQ: roles, concepts in negation normal form, axioms,
ontologies, plus NNF negation, weight, simple-role and RBox regularity checks,
and signature extraction.

All values are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

#: Largest n accepted in a number restriction; the (atmost n) rule creates
#: n+1 fresh labels, so anything bigger is not desk-scale.
MAX_CARDINALITY = 2**31 - 1

#: Reserved concept name used to build TOP and BOT.  It is rejected by the
#: user-facing parser and excluded from cpt/sig.
RESERVED_NAME = "_T"


class RiqError(Exception):
    """Base class for all errors raised by this package."""


class OntologyError(RiqError):
    """Invalid ontology: bad axiom shape or non-simple role under a counting
    restriction."""


# ---------------------------------------------------------------------------
# Roles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Role:
    name: str
    inverted: bool = False

    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __str__(self) -> str:
        return self.name + ("-" if self.inverted else "")


# ---------------------------------------------------------------------------
# Concepts (negation normal form)
# ---------------------------------------------------------------------------


class Concept:
    """Base class of NNF concept nodes.  Negation occurs only on names."""

    __slots__ = ()


@dataclass(frozen=True)
class ConceptName(Concept):
    name: str


@dataclass(frozen=True)
class NegatedName(Concept):
    name: str


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: Role
    body: Concept


@dataclass(frozen=True)
class Forall(Concept):
    role: Role
    body: Concept


def _check_cardinality(n: int) -> None:
    if n < 0 or n > MAX_CARDINALITY:
        raise OntologyError(f"cardinality {n} out of range [0, {MAX_CARDINALITY}]")


@dataclass(frozen=True)
class AtMost(Concept):
    n: int
    role: Role
    body: Concept

    def __post_init__(self) -> None:
        _check_cardinality(self.n)


@dataclass(frozen=True)
class AtLeast(Concept):
    n: int
    role: Role
    body: Concept

    def __post_init__(self) -> None:
        _check_cardinality(self.n)


@dataclass(frozen=True)
class Not(Concept):
    """General negation, only valid in raw (pre-NNF) concept trees."""

    body: Concept


TOP: Concept = Or(ConceptName(RESERVED_NAME), NegatedName(RESERVED_NAME))
BOT: Concept = And(ConceptName(RESERVED_NAME), NegatedName(RESERVED_NAME))


def is_literal(c: Concept) -> bool:
    return isinstance(c, (ConceptName, NegatedName))


def nnf_negate(c: Concept) -> Concept:
    """NNF-preserving negation.

    Number restrictions flip without negating the filler; TOP and BOT map to
    each other so both keep their canonical shape.
    """
    if c == TOP:
        return BOT
    if c == BOT:
        return TOP
    if isinstance(c, ConceptName):
        return NegatedName(c.name)
    if isinstance(c, NegatedName):
        return ConceptName(c.name)
    if isinstance(c, And):
        return Or(nnf_negate(c.left), nnf_negate(c.right))
    if isinstance(c, Or):
        return And(nnf_negate(c.left), nnf_negate(c.right))
    if isinstance(c, Exists):
        return Forall(c.role, nnf_negate(c.body))
    if isinstance(c, Forall):
        return Exists(c.role, nnf_negate(c.body))
    if isinstance(c, AtMost):
        return AtLeast(c.n + 1, c.role, c.body)
    if isinstance(c, AtLeast):
        if c.n == 0:
            return BOT
        return AtMost(c.n - 1, c.role, c.body)
    raise ValueError(f"not an NNF concept: {c!r}")


def to_nnf(raw: Concept) -> Concept:
    """Push general negation inward, producing an equivalent NNF concept."""
    if isinstance(raw, Not):
        return nnf_negate(to_nnf(raw.body))
    if isinstance(raw, (ConceptName, NegatedName)):
        return raw
    if isinstance(raw, And):
        return And(to_nnf(raw.left), to_nnf(raw.right))
    if isinstance(raw, Or):
        return Or(to_nnf(raw.left), to_nnf(raw.right))
    if isinstance(raw, Exists):
        return Exists(raw.role, to_nnf(raw.body))
    if isinstance(raw, Forall):
        return Forall(raw.role, to_nnf(raw.body))
    if isinstance(raw, AtMost):
        return AtMost(raw.n, raw.role, to_nnf(raw.body))
    if isinstance(raw, AtLeast):
        return AtLeast(raw.n, raw.role, to_nnf(raw.body))
    raise ValueError(f"not a concept: {raw!r}")


def weight(c: Concept) -> int:
    """Concept weight: literals 1, binary +1, quantifiers +1, atmost +n+1,
    atleast +n."""
    if is_literal(c):
        return 1
    if isinstance(c, (And, Or)):
        return weight(c.left) + weight(c.right) + 1
    if isinstance(c, (Exists, Forall)):
        return weight(c.body) + 1
    if isinstance(c, AtMost):
        return weight(c.body) + c.n + 1
    if isinstance(c, AtLeast):
        return weight(c.body) + c.n
    raise ValueError(f"not an NNF concept: {c!r}")


def subconcepts(c: Concept) -> Iterator[Concept]:
    """Yield c and all its subconcepts, preorder."""
    yield c
    if isinstance(c, (And, Or)):
        yield from subconcepts(c.left)
        yield from subconcepts(c.right)
    elif isinstance(c, (Exists, Forall, AtMost, AtLeast, Not)):
        yield from subconcepts(c.body)


# ---------------------------------------------------------------------------
# Axioms and ontologies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RIA:
    """Complex role inclusion axiom lhs_1 o ... o lhs_n <= rhs."""

    lhs: tuple[Role, ...]
    rhs: Role

    def __post_init__(self) -> None:
        if len(self.lhs) < 1:
            raise OntologyError("RIA needs a nonempty left-hand side")


@dataclass(frozen=True)
class GCI:
    """General concept inclusion lhs <= rhs; normalized form has lhs = TOP."""

    lhs: Concept
    rhs: Concept


@dataclass(frozen=True)
class RegularityReport:
    ok: bool
    #: harvested strict-order constraints (s precedes r) witnessing regularity
    order: frozenset[tuple[str, str]] = frozenset()
    #: RIAs that match no clause shape, or that participate in an order cycle
    offenders: tuple[RIA, ...] = ()
    message: str = ""


def _simplicity_rias(rbox: Iterable[RIA]) -> list[RIA]:
    """Mirror RIAs with an inverse rhs onto the underlying name.

    w <= s- constrains s exactly like inv(w) <= s; the recursive simplicity
    definition only speaks about role names.
    """
    out = []
    for ria in rbox:
        if ria.rhs.inverted:
            out.append(RIA(tuple(r.inverse() for r in reversed(ria.lhs)), Role(ria.rhs.name)))
        else:
            out.append(ria)
    return out


def is_simple(r: Role, rbox: Iterable[RIA]) -> bool:
    """Whether r is a simple role w.r.t. rbox.

    An inverse role is simple iff its name is.  Roles on a dependency cycle
    through the single-role clause are treated as non-simple (greatest
    fixpoint refuted by cycles).
    """
    rias = _simplicity_rias(rbox)
    state: dict[str, Optional[bool]] = {}

    def simple_name(name: str) -> bool:
        if name in state:
            # None marks "in progress": a cycle refutes simplicity
            return state[name] is True
        state[name] = None
        verdict = True
        for ria in rias:
            if ria.rhs.name != name:
                continue
            if len(ria.lhs) != 1:
                verdict = False
                break
            if not simple_name(ria.lhs[0].name):
                verdict = False
                break
        state[name] = verdict
        return verdict

    return simple_name(r.name)


def _regular_clause_options(ria: RIA) -> list[frozenset[tuple[str, str]]]:
    """Constraint sets under which ria matches some clause of the
    regularity definition; empty list means no clause fits."""
    if ria.rhs.inverted:
        return []
    r = ria.rhs.name
    w = ria.lhs
    options: list[frozenset[tuple[str, str]]] = []
    if len(w) == 2 and w[0] == Role(r) and w[1] == Role(r):
        options.append(frozenset())  # w = rr
    if len(w) == 1 and w[0] == Role(r, True):
        options.append(frozenset())  # w = r-
    # w = s1...sn, every si strictly below r
    if all(s.name != r for s in w):
        options.append(frozenset((s.name, r) for s in w))
    # w = r s1...sn / w = s1...sn r, tail/head strictly below r
    if w[0] == Role(r) and all(s.name != r for s in w[1:]):
        options.append(frozenset((s.name, r) for s in w[1:]))
    if w[-1] == Role(r) and all(s.name != r for s in w[:-1]):
        options.append(frozenset((s.name, r) for s in w[:-1]))
    return options


def find_regular_order(rbox: Iterable[RIA]) -> RegularityReport:
    """Search for a strict partial order making every RIA regular.

    Greedy per-RIA: prefer a clause with no constraints, otherwise harvest
    the (unique, in practice) constraint set; then check the constraint
    digraph for cycles.
    """
    rias = tuple(rbox)
    constraints: set[tuple[str, str]] = set()
    contributed: dict[tuple[str, str], list[RIA]] = {}
    no_clause = []
    for ria in rias:
        options = _regular_clause_options(ria)
        if not options:
            no_clause.append(ria)
            continue
        best = min(options, key=len)
        constraints |= best
        for pair in best:
            contributed.setdefault(pair, []).append(ria)
    if no_clause:
        names = ", ".join(render_ria(x) for x in no_clause)
        return RegularityReport(False, offenders=tuple(no_clause),
                                message=f"no regularity clause matches: {names}")
    # cycle check on the constraint digraph (s, r) meaning s < r
    succs: dict[str, set[str]] = {}
    for s, r in constraints:
        succs.setdefault(s, set()).add(r)
    color: dict[str, int] = {}
    cycle_nodes: set[str] = set()

    def visit(node: str, stack: list[str]) -> bool:
        color[node] = 1
        stack.append(node)
        for nxt in succs.get(node, ()):
            if color.get(nxt) == 1:
                cycle_nodes.update(stack[stack.index(nxt):])
                return True
            if color.get(nxt, 0) == 0 and visit(nxt, stack):
                return True
        stack.pop()
        color[node] = 2
        return False

    for node in sorted(succs):
        if color.get(node, 0) == 0 and visit(node, []):
            offenders = tuple(ria for pair, rs in contributed.items()
                              if pair[0] in cycle_nodes and pair[1] in cycle_nodes
                              for ria in rs)
            return RegularityReport(False, offenders=offenders,
                                    message="constraint cycle through "
                                            + ", ".join(sorted(cycle_nodes)))
    return RegularityReport(True, order=frozenset(constraints))


def ria_matches_clause(ria: RIA, order: frozenset[tuple[str, str]]) -> bool:
    """Re-check that ria matches some clause under the given order (the
    transitive closure of the harvested constraints)."""
    closed = set(order)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(tuple(closed), tuple(closed)):
            if b == c and (a, d) not in closed:
                closed.add((a, d))
                changed = True
    for option in _regular_clause_options(ria):
        if all(pair in closed for pair in option):
            return True
    return False


@dataclass(frozen=True)
class Ontology:
    """Union of an RBox (RIAs) and a TBox of normalized GCIs (lhs = TOP).

    The tbox is an ordered tuple and may contain duplicates: unions built by
    the definability pipeline keep duplicate GCIs so that the per-label GCI
    list splits cleanly by source ontology.
    """

    rbox: tuple[RIA, ...] = ()
    tbox: tuple[GCI, ...] = ()
    regularity: RegularityReport = field(default=RegularityReport(True), compare=False)
    declared_roles: frozenset[str] = frozenset()
    declared_concepts: frozenset[str] = frozenset()

    def gci_list(self, label: str) -> tuple[tuple[str, Concept], ...]:
        """The multiset label : nnf_negate(C_i) in fixed tbox order."""
        return tuple((label, nnf_negate(g.rhs)) for g in self.tbox)


def _counting_roles(c: Concept) -> Iterator[Role]:
    for sub in subconcepts(c):
        if isinstance(sub, (AtMost, AtLeast)):
            yield sub.role


def make_ontology(rias: Iterable[RIA], gcis: Iterable[GCI]) -> Ontology:
    """Validate axioms and attach a regularity report.

    GCIs must already be normalized (lhs = TOP).  A counting restriction over
    a non-simple role is a hard error; a non-regular RBox only yields a
    warning in the report (the calculus still works for general RBoxes).
    """
    rbox = tuple(rias)
    tbox = tuple(gcis)
    for g in tbox:
        if g.lhs != TOP:
            raise OntologyError(f"GCI not normalized: {g!r}")
        for role in _counting_roles(g.rhs):
            if not is_simple(role, rbox):
                raise OntologyError(
                    f"role {role} under a number restriction is not simple")
    return Ontology(rbox, tbox, find_regular_order(rbox))


def normalize_ontology(gcis: Iterable[GCI], rias: Iterable[RIA]) -> Ontology:
    """Rewrite every C <= D into TOP <= nnf_negate(C) or D and validate."""
    normalized = []
    for g in gcis:
        if g.lhs == TOP:
            normalized.append(GCI(TOP, g.rhs))
        else:
            normalized.append(GCI(TOP, Or(nnf_negate(g.lhs), g.rhs)))
    return make_ontology(rias, normalized)


def union_ontology(o1: Ontology, o2: Ontology) -> Ontology:
    """Union used by interpolation/definability: tboxes concatenate (keeping
    duplicates, o1 first), rboxes concatenate with exact-duplicate removal."""
    rbox = list(o1.rbox)
    for ria in o2.rbox:
        if ria not in rbox:
            rbox.append(ria)
    ont = make_ontology(rbox, o1.tbox + o2.tbox)
    return Ontology(ont.rbox, ont.tbox, ont.regularity,
                    o1.declared_roles | o2.declared_roles,
                    o1.declared_concepts | o2.declared_concepts)


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    concept_names: frozenset[str]
    roles: frozenset[str]


SignatureSource = Union[Concept, GCI, RIA, Ontology]


def _collect(x: Union[SignatureSource, Iterable], names: set[str], roles: set[str]) -> None:
    if isinstance(x, Concept):
        for sub in subconcepts(x):
            if isinstance(sub, (ConceptName, NegatedName)):
                if sub.name != RESERVED_NAME:
                    names.add(sub.name)
            elif isinstance(sub, (Exists, Forall, AtMost, AtLeast)):
                roles.add(sub.role.name)
    elif isinstance(x, GCI):
        _collect(x.lhs, names, roles)
        _collect(x.rhs, names, roles)
    elif isinstance(x, RIA):
        roles.update(r.name for r in x.lhs)
        roles.add(x.rhs.name)
    elif isinstance(x, Ontology):
        for g in x.tbox:
            _collect(g, names, roles)
        for ria in x.rbox:
            _collect(ria, names, roles)
    else:
        for item in x:
            _collect(item, names, roles)


def signature_of(*xs: Union[SignatureSource, Iterable]) -> Signature:
    """Concept names and role names occurring in the arguments; the reserved
    TOP/BOT name is excluded."""
    names: set[str] = set()
    roles: set[str] = set()
    for x in xs:
        _collect(x, names, roles)
    return Signature(frozenset(names), frozenset(roles))


def cpt(*xs: Union[SignatureSource, Iterable]) -> frozenset[str]:
    """Concept names only."""
    return signature_of(*xs).concept_names


def render_ria(ria: RIA) -> str:
    return " o ".join(str(r) for r in ria.lhs) + " <= " + str(ria.rhs)


# Convenience folds used by interpolant assembly: empty disjunction is BOT,
# empty conjunction is TOP.


def or_all(concepts: Iterable[Concept]) -> Concept:
    cs = list(concepts)
    if not cs:
        return BOT
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = Or(c, out)
    return out


def and_all(concepts: Iterable[Concept]) -> Concept:
    cs = list(concepts)
    if not cs:
        return TOP
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = And(c, out)
    return out
