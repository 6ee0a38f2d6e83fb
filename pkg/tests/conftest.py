"""Shared generators and brute-force oracles for the test suite."""

from __future__ import annotations

import itertools
import random

import pytest

from riq.core import (
    And,
    AtLeast,
    AtMost,
    ConceptName,
    Exists,
    Forall,
    GCI,
    NegatedName,
    Ontology,
    Or,
    RIA,
    Role,
    TOP,
    is_simple,
    make_ontology,
)
from riq.parser import parse_concept, parse_ontology
from riq.semantics import Interpretation
from riq.sequent import parse_sequent


@pytest.fixture
def rng():
    return random.Random(20240817)


def C(text: str):
    return parse_concept(text)


def S(text: str):
    return parse_sequent(text)


def O(text: str):
    return parse_ontology(text)


EMPTY_ONT = make_ontology((), ())


# ---------------------------------------------------------------------------
# Random structure generators
# ---------------------------------------------------------------------------


def random_concept(rng: random.Random, names=("A", "B"), roles=("r",),
                   depth=3, counting=True, max_n=2, atleast_min=0,
                   counting_roles=None):
    """Random NNF concept.  atleast_min=1 avoids the n=0 case whose negation
    collapses to BOT (involution cannot hold there)."""
    if counting_roles is None:
        counting_roles = roles if counting else ()
    choices = ["name", "negname", "and", "or", "exists", "forall"]
    if counting_roles:
        choices += ["atmost", "atleast"]
    kind = rng.choice(choices if depth > 0 else ["name", "negname"])
    if kind == "name":
        return ConceptName(rng.choice(names))
    if kind == "negname":
        return NegatedName(rng.choice(names))
    if kind in ("and", "or"):
        left = random_concept(rng, names, roles, depth - 1, counting, max_n,
                              atleast_min, counting_roles)
        right = random_concept(rng, names, roles, depth - 1, counting, max_n,
                               atleast_min, counting_roles)
        return And(left, right) if kind == "and" else Or(left, right)
    role = Role(rng.choice(roles), rng.random() < 0.3)
    body = random_concept(rng, names, roles, depth - 1, counting, max_n,
                          atleast_min, counting_roles)
    if kind == "exists":
        return Exists(role, body)
    if kind == "forall":
        return Forall(role, body)
    crole = Role(rng.choice(counting_roles), rng.random() < 0.3)
    if kind == "atmost":
        return AtMost(rng.randint(0, max_n), crole, body)
    return AtLeast(rng.randint(atleast_min, max_n), crole, body)


_RIA_SHAPES = {
    "r": [
        [RIA((Role("r"), Role("r")), Role("r"))],
        [RIA((Role("r", True),), Role("r"))],
    ],
    "rs": [
        [RIA((Role("r"),), Role("s"))],
        [RIA((Role("r"), Role("s")), Role("s"))],
        [RIA((Role("r"), Role("r")), Role("r")), RIA((Role("r"),), Role("s"))],
    ],
}


def random_ontology(rng: random.Random, names=("A", "B"), roles=("r",),
                    max_gcis=2, allow_rias=True, depth=2) -> Ontology:
    rias: list[RIA] = []
    if allow_rias and rng.random() < 0.35:
        shapes = _RIA_SHAPES["r"] if roles == ("r",) else _RIA_SHAPES["rs"]
        rias = list(rng.choice(shapes))
    simple = tuple(name for name in roles if is_simple(Role(name), rias))
    gcis = []
    for _ in range(rng.randint(0, max_gcis)):
        body = random_concept(rng, names, roles, depth, counting=bool(simple),
                              counting_roles=simple)
        gcis.append(GCI(TOP, body))
    return make_ontology(rias, gcis)


def random_goal(rng: random.Random, names=("A", "B"), roles=("r",),
                ontology: Ontology | None = None, depth=2):
    rias = ontology.rbox if ontology is not None else ()
    simple = tuple(name for name in roles if is_simple(Role(name), rias))
    sub = random_concept(rng, names, roles, depth, counting=bool(simple),
                         counting_roles=simple)
    sup = random_concept(rng, names, roles, depth, counting=bool(simple),
                         counting_roles=simple)
    return sub, sup


def random_interpretation(rng: random.Random, names=("A", "B"), roles=("r",),
                          max_domain=4) -> Interpretation:
    n = rng.randint(1, max_domain)
    domain = tuple(f"e{i}" for i in range(n))
    concepts = {name: frozenset(e for e in domain if rng.random() < 0.5)
                for name in names}
    rels = {name: frozenset((a, b) for a in domain for b in domain
                            if rng.random() < 0.4)
            for name in roles}
    return Interpretation(domain, concepts, rels)


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def brute_language(rsystem, role: Role, max_len: int, max_steps: int) -> set:
    """All strings derivable from (role,) with at most max_steps one-step
    rewrites and length at most max_len (BFS over derivations)."""
    from riq.rsystem import one_step_rewrites

    start = (role,)
    out = {start}
    frontier = {start}
    for _ in range(max_steps):
        new = set()
        for s in frontier:
            for t, _, _ in one_step_rewrites(rsystem, s):
                if len(t) <= max_len and t not in out:
                    new.add(t)
        out |= new
        frontier = new
        if not frontier:
            break
    return out


def brute_reach(rsystem, edges, role: Role, max_len: int, max_steps: int) -> set:
    """Pairs (u, v) connected by a path labeled with some bounded-derivable
    string of the role's language (relation-composition per character)."""
    nodes = set()
    rel_by_char: dict[Role, set] = {}
    for u, ch, v in edges:
        nodes.update((u, v))
        rel_by_char.setdefault(ch, set()).add((u, v))
    pairs = set()
    for string in brute_language(rsystem, role, max_len, max_steps):
        current = {(u, u) for u in nodes}
        for ch in string:
            rel = rel_by_char.get(ch, set())
            current = {(u, w) for (u, v) in current for (v2, w) in rel if v == v2}
            if not current:
                break
        pairs |= current
    return pairs


def exhaustive_interpretations(names, roles, max_domain):
    """Every interpretation (no isomorphism reduction) up to the bound;
    only usable for tiny signatures."""
    for n in range(1, max_domain + 1):
        domain = tuple(f"e{i}" for i in range(n))
        subsets = list(itertools.chain.from_iterable(
            itertools.combinations(domain, k) for k in range(n + 1)))
        pair_space = [(a, b) for a in domain for b in domain]
        pair_subsets = list(itertools.chain.from_iterable(
            itertools.combinations(pair_space, k) for k in range(len(pair_space) + 1)))
        for cext in itertools.product(subsets, repeat=len(names)):
            for rext in itertools.product(pair_subsets, repeat=len(roles)):
                yield Interpretation(
                    domain,
                    {name: frozenset(cext[i]) for i, name in enumerate(names)},
                    {name: frozenset(rext[i]) for i, name in enumerate(roles)})
