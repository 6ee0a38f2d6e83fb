"""Concept interpolation from proofs
====================================

Given O1, O2 and a provable subsumption C <= D over their union, the
pipeline proves the split goal, partitions the proof (O1 and C on the left,
D and O2 on the right), assigns mini-sequent interpolants to the initial
rules, propagates them down through the proof, and assembles a concept I
with cpt(I) inside the shared concept signature and O |= C <= I <= D.
Every run re-proves both directions before returning.
"""

from riq import parse_concept, parse_ontology, render
from riq.interpolation import (
    Interpolant,
    Member,
    compute_concept_interpolant,
    interpolant_to_json,
    orthogonal,
)
from riq.sequent import Eq, Neq
from riq.core import ConceptName, NegatedName

# The orthogonal of an interpolant picks one negated element from each
# member; it drives the handling of rules whose principal sits on the left.
g = Interpolant(frozenset({
    Member(frozenset({Eq("x", "y")}), frozenset({("x", ConceptName("A"))})),
    Member(frozenset({Neq("z", "u")}), frozenset({("z", NegatedName("B"))})),
}))
print("orthogonal members:")
for member in orthogonal(g).sorted_members():
    atoms = ", ".join(sorted(str(a) for a in member.atoms))
    concepts = ", ".join(f"{lab} : {render(c)}"
                         for lab, c in sorted(member.concepts, key=str))
    print(f"  {atoms} |- {concepts}")

# End to end: the ontologies share only the name B, and the interpolant for
# A <= E must be built from shared material.
o1 = parse_ontology("gci: A <= some r . B\n")
o2 = parse_ontology("gci: some r . B <= E\n")
result = compute_concept_interpolant(o1, o2, parse_concept("A"),
                                     parse_concept("E"))
print()
print("interpolant for A <= E:", render(result.concept))
for line in result.verification.lines():
    print(" ", line)

# The raw mini-sequent interpolant is available too, in a stable JSON shape.
print()
print(interpolant_to_json(result.interpolant))
