"""R-systems: semi-Thue production systems derived from an ontology's RIAs,
bounded derivation search, and the context-free reachability closure that
decides the propagation side conditions.

Every production has a single role on the left, so the derivable strings of a
role form a context-free language; reachability of graph nodes under that
language is the least fixpoint of: seed Reach(r) with the r-labeled edges,
then for each production r -> s1...sk close Reach(r) over the relational
composition Reach(s1); ...; Reach(sk) until stable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional

from .core import Ontology, Role

RoleString = tuple[Role, ...]
Node = Hashable
Pair = tuple[Node, Node]


@dataclass(frozen=True)
class Production:
    lhs: Role
    rhs: RoleString

    def __post_init__(self) -> None:
        if len(self.rhs) < 1:
            raise ValueError("production right-hand side must be nonempty")

    def __str__(self) -> str:
        return f"{self.lhs} -> " + " ".join(str(r) for r in self.rhs)


@dataclass(frozen=True)
class RSystem:
    productions: frozenset[Production]

    def with_lhs(self, role: Role) -> tuple[Production, ...]:
        return tuple(sorted((p for p in self.productions if p.lhs == role),
                            key=str))


def build_rsystem(ontology: Ontology) -> RSystem:
    """Two productions per RIA: the rule itself and its mirrored inverse."""
    productions = set()
    for ria in ontology.rbox:
        productions.add(Production(ria.rhs, tuple(ria.lhs)))
        productions.add(Production(ria.rhs.inverse(),
                                   tuple(r.inverse() for r in reversed(ria.lhs))))
    return RSystem(frozenset(productions))


def one_step_rewrites(g: RSystem, s: RoleString) -> Iterable[tuple[RoleString, int, Production]]:
    """All strings reachable from s in one step, with the rewritten position
    and production used."""
    for i, ch in enumerate(s):
        for prod in g.with_lhs(ch):
            yield s[:i] + prod.rhs + s[i + 1:], i, prod

def is_one_step(g: RSystem, s: RoleString, t: RoleString) -> bool:
    """Whether t is derivable from s in exactly one step."""
    return any(out == t for out, _, _ in one_step_rewrites(g, s))


def derives_bounded(g: RSystem, source: RoleString, target: RoleString,
                    max_steps: int) -> Optional[tuple[RoleString, ...]]:
    """Shortest derivation source ->* target of length <= max_steps, as the
    sequence of intermediate strings (source first), or None.

    Rewrites never shrink a string, so anything longer than the target is a
    dead end; breadth-first search returns a minimal-length derivation.
    """
    if source == target:
        return (source,)
    seen = {source}
    queue: deque[tuple[RoleString, tuple[RoleString, ...]]] = deque([(source, (source,))])
    while queue:
        current, path = queue.popleft()
        if len(path) - 1 >= max_steps:
            continue
        for nxt, _, _ in one_step_rewrites(g, current):
            if len(nxt) > len(target) or nxt in seen:
                continue
            if nxt == target:
                return path + (nxt,)
            seen.add(nxt)
            queue.append((nxt, path + (nxt,)))
    return None


# ---------------------------------------------------------------------------
# CFL reachability
# ---------------------------------------------------------------------------

#: Why a pair entered Reach(role): a base edge, or a production application
#: with the intermediate nodes of the composition.
_Reason = tuple


class CflClosure:
    """Least-fixpoint reachability per role over a finite labeled graph.

    `reach` maps each role to the set of node pairs (u, v) such that some
    string in the role's derivable language labels a path u -> v.  One
    derivation reason per pair is recorded so witnesses (string, node path,
    and the full one-step derivation) can be reconstructed afterwards; the
    reason graph is acyclic because reasons are only recorded when a pair
    first appears.
    """

    def __init__(self, g: RSystem, edges: Iterable[tuple[Node, Role, Node]]):
        self.g = g
        self.edges = tuple(edges)
        self.reach: dict[Role, set[Pair]] = {}
        self.reasons: dict[tuple[Role, Node, Node], _Reason] = {}
        self._solve()

    def _add(self, role: Role, pair: Pair, reason: _Reason) -> bool:
        bucket = self.reach.setdefault(role, set())
        if pair in bucket:
            return False
        bucket.add(pair)
        self.reasons[(role, pair[0], pair[1])] = reason
        return True

    def _solve(self) -> None:
        for u, role, v in self.edges:
            self._add(role, (u, v), ("edge",))
        for prod in self.g.productions:
            for ch in prod.rhs:
                self.reach.setdefault(ch, set())
            self.reach.setdefault(prod.lhs, set())
        changed = True
        while changed:
            changed = False
            for prod in sorted(self.g.productions, key=str):
                # compose Reach(s1); ...; Reach(sk), keeping intermediates
                partial: list[tuple[Node, Node, tuple[Node, ...]]] = [
                    (u, v, (u, v)) for (u, v) in self.reach[prod.rhs[0]]
                ]
                for ch in prod.rhs[1:]:
                    nxt = []
                    step = self.reach[ch]
                    by_src: dict[Node, list[Node]] = {}
                    for a, b in step:
                        by_src.setdefault(a, []).append(b)
                    for u, v, mids in partial:
                        for w in by_src.get(v, ()):
                            nxt.append((u, w, mids + (w,)))
                    partial = nxt
                for u, v, mids in partial:
                    if self._add(prod.lhs, (u, v), ("prod", prod, mids)):
                        changed = True

    def pairs(self, role: Role) -> frozenset[Pair]:
        return frozenset(self.reach.get(role, ()))

    def witness(self, role: Role, u: Node, v: Node) -> tuple[RoleString, tuple[Node, ...]]:
        """A string S in the role's language and node path u -> v labeled by
        S, reconstructed from the recorded reasons."""
        reason = self.reasons.get((role, u, v))
        if reason is None:
            raise KeyError(f"({u!r}, {v!r}) not reachable under {role}")
        if reason[0] == "edge":
            return (role,), (u, v)
        _, prod, mids = reason
        string: list[Role] = []
        path: list[Node] = [u]
        for ch, a, b in zip(prod.rhs, mids, mids[1:]):
            sub_string, sub_path = self.witness(ch, a, b)
            string.extend(sub_string)
            path.extend(sub_path[1:])
        return tuple(string), tuple(path)

    def derivation(self, role: Role, u: Node, v: Node) -> tuple[RoleString, ...]:
        """The one-step derivation of the witness string from (role,), for
        independent re-checking of side conditions."""
        reason = self.reasons[(role, u, v)]
        if reason[0] == "edge":
            return ((role,),)
        _, prod, mids = reason
        # first step: role -> rhs, then expand each rhs character in place
        steps: list[RoleString] = [(role,), prod.rhs]
        prefix: RoleString = ()
        suffix = prod.rhs[1:]
        for ch, a, b in zip(prod.rhs, mids, mids[1:]):
            sub = self.derivation(ch, a, b)
            for intermediate in sub[1:]:
                steps.append(prefix + intermediate + suffix)
            prefix = prefix + sub[-1]
            suffix = suffix[1:]
        return tuple(steps)


def cfl_closure(g: RSystem, edges: Iterable[tuple[Node, Role, Node]]
                ) -> Mapping[Role, frozenset[Pair]]:
    """Per-role reachable node pairs (see CflClosure)."""
    closure = CflClosure(g, edges)
    return {role: frozenset(pairs) for role, pairs in closure.reach.items()}
