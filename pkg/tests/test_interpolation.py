import pytest

from riq.core import (
    BOT,
    ConceptName,
    GCI,
    NegatedName,
    RIA,
    Role,
    TOP,
    cpt,
    make_ontology,
    normalize_ontology,
)
from riq.interpolation import (
    EMPTY,
    EndSplit,
    Interpolant,
    InterpolationError,
    Side,
    annotate_partition,
    box_interpolant,
    collapse_topbot,
    compute_concept_interpolant,
    extract_interpolant,
    interpolant,
    interpolant_concept,
    interpolant_from_json,
    interpolant_to_json,
    leq_interpolant,
    member,
    orthogonal,
    verify_interpolant,
)
from riq.prover import Proved, SearchLimits, prove
from riq.sequent import Eq, LabeledConcept, Neq, make_sequent
from conftest import C, EMPTY_ONT, random_concept

r = Role("r")
A, B, E = ConceptName("A"), ConceptName("B"), ConceptName("E")
LIMITS = SearchLimits(max_steps=20000, max_labels=200, max_seconds_hint=60)


def mk(atoms=(), concepts=()):
    return member(atoms, concepts)


class TestOrthogonal:
    def test_worked_example(self):
        g = interpolant(
            mk([Eq("x", "y")], [("x", A)]),
            mk([Neq("z", "u")], [("z", NegatedName("B"))]),
        )
        assert orthogonal(g) == interpolant(
            mk([Neq("x", "y"), Eq("z", "u")]),
            mk([Neq("x", "y")], [("z", B)]),
            mk([Eq("z", "u")], [("x", NegatedName("A"))]),
            mk([], [("x", NegatedName("A")), ("z", B)]),
        )

    def test_singleton(self):
        g = interpolant(mk([], [("x", A)]))
        assert orthogonal(g) == interpolant(mk([], [("x", NegatedName("A"))]))

    def test_empty_interpolant_gives_empty_member(self):
        assert orthogonal(EMPTY) == interpolant(mk())

    def test_empty_member_kills_product(self):
        assert orthogonal(interpolant(mk())) == EMPTY

    def test_size_bound(self, rng):
        for _ in range(100):
            g = _random_interpolant(rng)
            bound = 1
            for m in g.members:
                bound *= len(m.atoms) + len(m.concepts)
            assert len(orthogonal(g).members) <= bound

    def test_double_orthogonal_domination(self, rng):
        # every member of the double orthogonal extends some original member
        for _ in range(300):
            g = _random_interpolant(rng, max_elements=2)
            for mm in orthogonal(orthogonal(g)).members:
                assert any(m.atoms <= mm.atoms and m.concepts <= mm.concepts
                           for m in g.members)


def _random_interpolant(rng, max_elements=3):
    labels = ["x", "y", "z", "u"]
    members = []
    for _ in range(rng.randint(0, 3)):
        atoms = []
        concepts = []
        for _ in range(rng.randint(0, max_elements)):
            if rng.random() < 0.4:
                a, b = rng.sample(labels, 2)
                atoms.append(Eq(a, b) if rng.random() < 0.5 else Neq(a, b))
            else:
                concepts.append((rng.choice(labels),
                                 random_concept(rng, depth=1, atleast_min=1)))
        members.append(mk(atoms, concepts))
    return Interpolant(frozenset(members))


class TestBoxInterpolant:
    def test_bundles_row_into_disjunction(self):
        g = interpolant(mk([], [("y", A), ("y", B)]))
        out = box_interpolant(r, "x", "y", g)
        assert out == interpolant(mk([], [("x", C("only r . (A or B)"))]))

    def test_memberwise(self):
        g = interpolant(mk([], [("y", A)]), mk([], [("y", B)]))
        out = box_interpolant(r, "x", "y", g)
        assert out == interpolant(
            mk([], [("x", C("only r . A"))]),
            mk([], [("x", C("only r . B"))]))

    def test_empty_row_gives_box_bottom(self):
        g = interpolant(mk([], [("x2", ConceptName("D"))]))
        out = box_interpolant(r, "x", "y", g)
        [m] = out.members
        assert ("x2", ConceptName("D")) in m.concepts
        assert ("x", C("only r . BOT")) in m.concepts

    def test_fresh_label_in_atoms_rejected(self):
        g = interpolant(mk([Eq("y", "z")], []))
        with pytest.raises(InterpolationError):
            box_interpolant(r, "x", "y", g)


class TestLeqInterpolant:
    def test_zero_bound_single_row(self):
        g = interpolant(mk([], [("y0", NegatedName("A"))]))
        out = leq_interpolant(0, r, "x", ("y0",), g)
        assert out == interpolant(mk([], [("x", C("atmost 0 r . A"))]))

    def test_fresh_inequalities_dropped_empty_rows_give_top(self):
        g = interpolant(mk([Neq("y0", "y1")], []))
        out = leq_interpolant(1, r, "x", ("y0", "y1"), g)
        assert out == interpolant(mk([], [("x", C("atmost 1 r . TOP"))]))

    def test_foreign_member_still_bundled(self):
        g = interpolant(mk([], [("z", ConceptName("D"))]))
        out = leq_interpolant(2, r, "x", ("y0", "y1", "y2"), g)
        [m] = out.members
        assert ("z", ConceptName("D")) in m.concepts
        assert ("x", C("atmost 2 r . TOP")) in m.concepts

    def test_equality_on_fresh_labels_rejected(self):
        g = interpolant(mk([Eq("y0", "y1")], []))
        with pytest.raises(InterpolationError):
            leq_interpolant(1, r, "x", ("y0", "y1"), g)


class TestInterpolantConcept:
    def test_conjunction_of_disjunctions(self):
        g = interpolant(mk([], [("x", A), ("x", B)]), mk([], [("x", E)]))
        concept = interpolant_concept(g, "x")
        assert concept == C("(A or B) and E") or concept == C("E and (A or B)")

    def test_singleton(self):
        assert interpolant_concept(interpolant(mk([], [("x", A)])), "x") == A

    def test_empty_is_top(self):
        assert interpolant_concept(EMPTY, "x") == TOP

    def test_empty_member_is_bottom_disjunct(self):
        assert interpolant_concept(interpolant(mk()), "x") == BOT

    def test_foreign_label_rejected(self):
        with pytest.raises(InterpolationError):
            interpolant_concept(interpolant(mk([], [("y", A)])), "x")

    def test_atom_bearing_rejected(self):
        with pytest.raises(InterpolationError):
            interpolant_concept(interpolant(mk([Eq("x", "y")], [])), "x")


class TestCollapse:
    def test_or_bot(self):
        assert collapse_topbot(C("BOT or A")) == A

    def test_and_top(self):
        assert collapse_topbot(C("A and TOP")) == A

    def test_nested(self):
        assert collapse_topbot(C("(BOT or A) and (TOP or B)")) == A

    def test_quantifier_body(self):
        assert collapse_topbot(C("only r . (BOT or A)")) == C("only r . A")


class TestAnnotateAndExtract:
    def _pipeline_parts(self, o1, o2, sub, sup):
        from riq.core import nnf_negate, union_ontology

        ont = union_ontology(o1, o2)
        left = tuple(LabeledConcept(lab, cc) for lab, cc in o1.gci_list("x0"))
        left += (LabeledConcept("x0", nnf_negate(sub)),)
        right = (LabeledConcept("x0", sup),)
        right += tuple(LabeledConcept(lab, cc) for lab, cc in o2.gci_list("x0"))
        goal = make_sequent((), left + right)
        result = prove(ont, goal, LIMITS)
        assert isinstance(result, Proved)
        split = EndSplit((Side.LEFT,) * len(left) + (Side.RIGHT,) * len(right),
                         {}, len(o1.tbox))
        return ont, result.proof, split

    def test_id_leaf_sides(self):
        ont, proof, split = self._pipeline_parts(EMPTY_ONT, EMPTY_ONT, A, A)
        pp = annotate_partition(ont, proof, split)
        g = extract_interpolant(pp, EMPTY_ONT, EMPTY_ONT)
        assert interpolant_concept(g, "x0") == A

    def test_right_only_closure_gives_trivial_interpolant(self):
        # B or not B on the right closes alone; the left side contributes TOP
        ont, proof, split = self._pipeline_parts(EMPTY_ONT, EMPTY_ONT,
                                                 A, C("B or not B"))
        pp = annotate_partition(ont, proof, split)
        g = extract_interpolant(pp, EMPTY_ONT, EMPTY_ONT)
        assert collapse_topbot(interpolant_concept(g, "x0")) == TOP

    def test_forall_premise_tags(self):
        ont, proof, split = self._pipeline_parts(
            EMPTY_ONT, EMPTY_ONT, C("some r . A"), C("some r . (A or B)"))
        pp = annotate_partition(ont, proof, split)

        def find(node, rule):
            if node.instance.rule == rule:
                return node
            for child in node.children:
                hit = find(child, rule)
                if hit:
                    return hit
            return None

        forall_node = find(pp, "forall")
        assert forall_node is not None
        child = forall_node.children[0]
        fresh = forall_node.instance.witness.fresh[0]
        fresh_sides = [side for occ, side in
                       zip(child.conclusion.consequent, child.occ_sides)
                       if occ.label == fresh]
        # the universal principal came from the left (negated subsumee)
        assert fresh_sides and all(s is Side.LEFT for s in fresh_sides)


class TestPipeline:
    def test_conjunction_projection(self):
        out = compute_concept_interpolant(EMPTY_ONT, EMPTY_ONT,
                                          C("A and B"), C("A or E"), LIMITS)
        assert out.status == "ok"
        assert cpt(out.concept) <= {"A"}
        assert out.verification.ok

    def test_identity(self):
        out = compute_concept_interpolant(EMPTY_ONT, EMPTY_ONT, A, A, LIMITS)
        assert out.status == "ok"
        assert out.verification.ok

    def test_chain_through_shared_name(self):
        o1 = normalize_ontology([GCI(A, B)], [])
        o2 = normalize_ontology([GCI(B, E)], [])
        out = compute_concept_interpolant(o1, o2, A, E, LIMITS)
        assert out.status == "ok"
        assert cpt(out.concept) <= {"B"}

    def test_not_subsumed_reports_refuted(self):
        out = compute_concept_interpolant(EMPTY_ONT, EMPTY_ONT, A, B, LIMITS)
        assert out.status == "refuted"

    def test_lemma5_properties_enforced(self):
        # extraction validates properties (1)-(4) at every node; a run on a
        # propagation-heavy goal exercises them
        ont = make_ontology([RIA((r,), Role("s"))], ())
        out = compute_concept_interpolant(ont, EMPTY_ONT, C("some r . A"),
                                          C("some s . (A or B)"), LIMITS)
        assert out.status == "ok"


class TestPipelineFuzz:
    def test_random_provable_goals_interpolate(self, rng):
        """Every provable random subsumption must yield a verified
        interpolant (or an honest unknown under the budget)."""
        from conftest import random_concept, random_ontology

        limits = SearchLimits(max_steps=1500, max_labels=40, max_seconds_hint=10)
        done = 0
        trials = 0
        while done < 40 and trials < 400:
            trials += 1
            o1 = random_ontology(rng, names=("A", "B"), roles=("r",), max_gcis=1)
            o2 = random_ontology(rng, names=("B", "E"), roles=("r",), max_gcis=1)
            from riq.core import union_ontology

            try:
                union = union_ontology(o1, o2)
            except Exception:
                continue  # merged rbox can break simplicity of counting roles
            sub = random_concept(rng, names=("A", "B"), roles=("r",), depth=2,
                                 counting=False)
            sup = random_concept(rng, names=("B", "E"), roles=("r",), depth=2,
                                 counting=False)
            from riq.prover import subsumes

            if not isinstance(subsumes(union, sub, sup, limits), Proved):
                continue
            out = compute_concept_interpolant(o1, o2, sub, sup, limits)
            if out.status == "unknown":
                continue
            assert out.status == "ok"
            assert out.verification.ok
            assert cpt(out.concept) <= cpt(o1, sub) & cpt(o2, sup)
            done += 1
        assert done >= 30


class TestSplitGoalAgreement:
    def test_joined_and_split_goals_agree(self, rng):
        """Proving not-C-or-D and proving the pre-split consequent must give
        the same verdict (the disjunction rule is invertible)."""
        from conftest import random_concept, random_ontology
        from riq.core import nnf_negate
        from riq.prover import goal_sequent, prove

        limits = SearchLimits(max_steps=800, max_labels=30, max_seconds_hint=10)
        decided = 0
        for _ in range(120):
            ont = random_ontology(rng, names=("A", "B"), roles=("r",), max_gcis=1)
            sub = random_concept(rng, names=("A", "B"), roles=("r",), depth=2)
            sup = random_concept(rng, names=("A", "B"), roles=("r",), depth=2)
            joined = prove(ont, goal_sequent(ont, sub, sup), limits)
            gcis = tuple(LabeledConcept(lab, c) for lab, c in ont.gci_list("x0"))
            split = make_sequent((), gcis + (
                LabeledConcept("x0", nnf_negate(sub)), LabeledConcept("x0", sup)))
            split_result = prove(ont, split, limits)
            if type(joined).__name__ == "Unknown" or \
               type(split_result).__name__ == "Unknown":
                continue
            assert type(joined).__name__ == type(split_result).__name__, \
                (sub, sup)
            decided += 1
        assert decided >= 60


class TestVerifyInterpolant:
    def test_good_interpolant_passes(self):
        report = verify_interpolant(EMPTY_ONT, EMPTY_ONT,
                                    C("A and B"), C("A or E"), A, LIMITS)
        assert report.ok

    def test_signature_violation_detected(self):
        report = verify_interpolant(EMPTY_ONT, EMPTY_ONT,
                                    C("A and B"), C("A or E"), E, LIMITS)
        assert not report.signature_ok
        assert "E" in report.extra_names

    def test_unsound_interpolant_detected(self):
        report = verify_interpolant(EMPTY_ONT, EMPTY_ONT, A, A, BOT, LIMITS)
        assert not report.ok
        assert not isinstance(report.forward, Proved)


class TestSerialization:
    def test_roundtrip(self):
        g = interpolant(
            mk([Eq("x", "y")], [("x", A)]),
            mk([Neq("z", "u")], [("z", NegatedName("B"))]),
        )
        assert interpolant_from_json(interpolant_to_json(g)) == g
