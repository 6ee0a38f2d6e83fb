"""Concepts, negation normal form, and ontologies
=================================================

The toolkit works on complex concepts in negation normal form over a
vocabulary of concept names and roles (with inverses), and on ontologies
made of role inclusion axioms (RIAs) and general concept inclusions (GCIs).
"""

from riq import (
    Role,
    nnf_negate,
    parse_concept,
    parse_ontology,
    render,
    signature_of,
    to_nnf,
    weight,
    is_simple,
    find_regular_order,
)
from riq.core import Not

# Parse from the ASCII grammar.  `not` binds tighter than `and`, which binds
# tighter than `or`; quantifier bodies extend maximally right.
concept = parse_concept("A and some r . (B or not E)")
print("parsed:   ", concept)
print("rendered: ", render(concept))

# Negation stays in negation normal form.  Number restrictions flip without
# negating the filler: not(atmost 2 r . A) = atleast 3 r . A.
print("negated:  ", render(nnf_negate(concept)))
print("negated atmost:", render(nnf_negate(parse_concept("atmost 2 r . A"))))

# General negation is pushed inward on load.
raw = Not(parse_concept("some r . (A and B)"))
print("pushed:   ", render(to_nnf(raw)))

# The weight measure drives termination arguments: literals weigh 1, binary
# connectives add 1, quantifiers add 1, counting restrictions add their bound.
for text in ("A", "A and B", "atmost 1 r . A", "atleast 2 r . (A or B)"):
    print(f"weight({text}) = {weight(parse_concept(text))}")

# Ontology files are line oriented; GCIs normalize to TOP <= C form.
ontology = parse_ontology("""
# a small ontology
ria: r o s <= t
ria: t- <= u
gci: A <= some r . B
gci: TOP <= not B or E
""")
print()
print(render(ontology))

sig = signature_of(ontology)
print("concept names:", sorted(sig.concept_names))
print("role names:   ", sorted(sig.roles))

# Simple roles admit counting restrictions; t is derived by a composition,
# so it is not simple.
print("r simple:", is_simple(Role("r"), ontology.rbox))
print("t simple:", is_simple(Role("t"), ontology.rbox))

# Regularity: a strict partial order must make every RIA match one of the
# five admissible shapes.  A symmetric pair of inclusions cannot be ordered.
print("this rbox regular:", find_regular_order(ontology.rbox).ok)
bad = parse_ontology("ria: s <= r\nria: r <= s\n")
print("symmetric pair:   ", find_regular_order(bad.rbox).message)
