"""Explicit definitions of implicitly definable concepts
========================================================

A concept C is implicitly definable from a set theta of concept names under
an ontology O when the axioms pin down C's extension given the theta names
and the roles.  That is a subsumption question: rename every name outside
theta to a fresh primed copy and ask O u O' |= C <= C'.  A proof of it
yields, through interpolation, an explicit definition of C over theta.
"""

from riq import Proved, parse_concept, parse_ontology, render
from riq.definability import explicit_definition, is_implicitly_definable

# B-and-an-r-B-successor characterizes A under this ontology.
ontology = parse_ontology("""
gci: A <= B and some r . B
gci: B and some r . B <= A
""")
concept = parse_concept("A")

implicit = is_implicitly_definable(ontology, concept, ["B"])
print("implicitly definable from {B}:", isinstance(implicit, Proved))

result = explicit_definition(ontology, concept, ["B"])
print("definition:", render(result.definition))
for line in result.report.lines():
    print(" ", line)

# Definability can fail: without axioms, nothing pins A down.
empty = parse_ontology("")
free = explicit_definition(empty, parse_concept("A"), [])
print()
print("unconstrained A over the empty signature:", free.status)

# And the trivial direction: every theta name defines itself.
self_def = explicit_definition(empty, parse_concept("B"), ["B"])
print("B over {B}:", render(self_def.definition))
