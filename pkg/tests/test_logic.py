import pytest
from hypothesis import given, settings, strategies as st

from negtax import logic
from negtax.logic import (
    And,
    App,
    Implies,
    Lambda,
    LocalShape,
    Not,
    Or,
    PairPattern,
    ParseError,
    PolarityKind,
    Pred,
    Quant,
    Quantifier,
    UnboundVar,
    Var,
    free_vars,
    is_closed,
    local_shape,
    match_pair_pattern,
    parse_formula,
    polarity_sequence,
    pretty,
)


class TestParser:
    def test_atoms(self):
        assert parse_formula("x") == Var("x")
        assert parse_formula("Movie") == Pred("Movie")
        assert parse_formula("Movie(x)") == Pred("Movie", (Var("x"),))
        assert parse_formula("R(x, y)") == Pred("R", (Var("x"), Var("y")))

    def test_precedence_not_and_or_implies(self):
        f = parse_formula("¬A ∧ B ∨ C → D")
        assert f == Implies(Or(And(Not(Pred("A")), Pred("B")), Pred("C")), Pred("D"))

    def test_implies_right_associative(self):
        assert parse_formula("A → B → C") == Implies(
            Pred("A"), Implies(Pred("B"), Pred("C"))
        )

    def test_and_or_left_associative(self):
        assert parse_formula("A ∧ B ∧ C") == And(And(Pred("A"), Pred("B")), Pred("C"))
        assert parse_formula("A ∨ B ∨ C") == Or(Or(Pred("A"), Pred("B")), Pred("C"))

    def test_quantifier_binds_maximally_right(self):
        f = parse_formula("∀x. Movie(x) → Feature(x)")
        assert f == Quant(
            Quantifier.FORALL,
            "x",
            Implies(Pred("Movie", (Var("x"),)), Pred("Feature", (Var("x"),))),
        )

    def test_quantifier_dot_optional(self):
        assert parse_formula("∃x P(x)") == parse_formula("∃x. P(x)")

    def test_ascii_spellings(self):
        unicode = parse_formula("∀x. ¬(A(x) ∧ B(x)) → ∃y. C(y)")
        ascii_ = parse_formula("forall x. not (A(x) & B(x)) -> exists y. C(y)")
        alt = parse_formula("all x. !(A(x) & B(x)) -> some y. C(y)")
        assert unicode == ascii_ == alt

    def test_lambda_with_type_tag(self):
        f = parse_formula("λx:e. Organism(x)")
        assert f == Lambda("x", "e", Pred("Organism", (Var("x"),)))
        assert parse_formula("lam x. P(x)") == Lambda("x", None, Pred("P", (Var("x"),)))

    def test_application_by_juxtaposition(self):
        f = parse_formula("(f x)")
        assert f == App(Var("f"), Var("x"))
        assert parse_formula("(f x y)") == App(App(Var("f"), Var("x")), Var("y"))

    def test_appendix_worked_example(self):
        text = "λx:e. Organism(x) ∧ PerformAnoxygenicPhotosynthesis(x) ∧ ¬Cyanobacteria(x)"
        f = parse_formula(text)
        assert isinstance(f, Lambda)
        assert pretty(f) == text

    def test_parse_error_reports_byte_offset(self):
        with pytest.raises(ParseError) as exc_info:
            parse_formula("A ∧ ∧ B")
        # "A ∧ " is 1 + 1 + 3 + 1 = 6 bytes before the bad token
        assert exc_info.value.offset == 6
        assert "expected" in str(exc_info.value)

    def test_trailing_junk_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("A B")

    def test_unknown_character_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("A ∧ #")

    def test_strict_rejects_free_vars(self):
        with pytest.raises(UnboundVar):
            parse_formula("P(x)", strict=True)
        assert parse_formula("∀x. P(x)", strict=True)


class TestFreeVars:
    def test_binding(self):
        f = parse_formula("∀x. P(x, y)")
        assert free_vars(f) == {"y"}
        assert not is_closed(f)
        assert is_closed(parse_formula("λy. ∀x. P(x, y)"))

    def test_shadowing_scopes_are_local(self):
        f = parse_formula("(∀x. P(x)) ∧ Q(x)")
        assert free_vars(f) == {"x"}


# --- round-trip property -----------------------------------------------------

_VAR_NAMES = ["x", "y", "z", "u", "v'", "w_1"]
_PRED_NAMES = ["P", "Q", "R", "Movie", "FeatureTomHanks", "C_2"]

_vars = st.sampled_from(_VAR_NAMES).map(Var)
_nullary_preds = st.sampled_from(_PRED_NAMES).map(Pred)


def _formulas():
    leaves = _vars | _nullary_preds

    def extend(children):
        unary = st.builds(Not, children)
        quant = st.builds(
            Quant, st.sampled_from(list(Quantifier)), st.sampled_from(_VAR_NAMES), children
        )
        lam = st.builds(
            Lambda, st.sampled_from(_VAR_NAMES), st.sampled_from([None, "e", "t", "et"]), children
        )
        return unary | quant | lam \
            | st.builds(And, children, children) \
            | st.builds(Or, children, children) \
            | st.builds(Implies, children, children) \
            | st.builds(App, children, children) \
            | st.builds(
                lambda name, args: Pred(name, tuple(args)),
                st.sampled_from(_PRED_NAMES),
                st.lists(children, min_size=1, max_size=3),
            )

    return st.recursive(leaves, extend, max_leaves=25)


FORMULAS = _formulas()


class TestRoundTrip:
    @settings(max_examples=500, deadline=None)
    @given(FORMULAS)
    def test_parse_pretty_identity(self, f):
        assert parse_formula(pretty(f)) == f

    @settings(max_examples=200, deadline=None)
    @given(FORMULAS)
    def test_pretty_is_stable(self, f):
        assert pretty(parse_formula(pretty(f))) == pretty(f)


class TestPolaritySequence:
    def test_orders_events_preorder(self):
        f = parse_formula("∀x. ¬(∃y. P(x, y))")
        assert [e.event for e in polarity_sequence(f)] == [
            PolarityKind.FORALL,
            PolarityKind.NOT,
            PolarityKind.EXISTS,
        ]

    def test_positions_strictly_increase(self):
        f = parse_formula("¬A ∧ ∃x. ¬B(x)")
        events = polarity_sequence(f)
        positions = [e.position for e in events]
        assert positions == sorted(positions)
        assert [e.event for e in events] == [
            PolarityKind.NOT,
            PolarityKind.EXISTS,
            PolarityKind.NOT,
        ]

    def test_empty_for_plain_formula(self):
        assert polarity_sequence(parse_formula("P ∧ Q")) == []


class TestLocalShape:
    def test_forall_plain(self):
        assert local_shape(parse_formula("∀x. M(x) → F(x)")) is LocalShape.FORALL_PLAIN

    def test_exists_plain(self):
        assert local_shape(parse_formula("∃x. M(x) ∧ F(x)")) is LocalShape.EXISTS_PLAIN

    def test_exists_neg(self):
        assert local_shape(parse_formula("∃x. M(x) ∧ ¬F(x)")) is LocalShape.EXISTS_NEG

    def test_neg_exists(self):
        assert local_shape(parse_formula("¬∃x. M(x) ∧ F(x)")) is LocalShape.NEG_EXISTS

    def test_neg_exists_through_connectives(self):
        assert local_shape(parse_formula("¬(A ∨ ∃x. F(x))")) is LocalShape.NEG_EXISTS

    def test_neg_exists_takes_precedence_over_exists_neg(self):
        f = parse_formula("(∃x. ¬F(x)) ∧ ¬∃y. G(y)")
        assert local_shape(f) is LocalShape.NEG_EXISTS

    def test_negated_forall_is_not_neg_exists(self):
        assert local_shape(parse_formula("¬∀x. F(x)")) is LocalShape.FORALL_PLAIN

    def test_none(self):
        assert local_shape(parse_formula("λx. M(x)")) is LocalShape.NONE
        assert local_shape(parse_formula("¬M(x)")) is LocalShape.NONE

    def test_deeper_quantifier_blocks_exists_neg(self):
        # a ¬ below an intervening ∀ does not mark the outer ∃ as negated
        f = parse_formula("∃x. ∀y. ¬F(y)")
        assert local_shape(f) is LocalShape.FORALL_PLAIN
        # but an inner ∃ carrying its own ¬ still registers
        g = parse_formula("∃x. ∃y. ¬F(y)")
        assert local_shape(g) is LocalShape.EXISTS_NEG


FORALL = "∀x. M(x) → F(x)"
EXISTS = "∃x. M(x) ∧ F(x)"
EXISTS_NEG = "∃x. M(x) ∧ ¬F(x)"
NEG_EXISTS = "¬∃x. M(x) ∧ F(x)"


class TestPairPattern:
    def match(self, a, b):
        return match_pair_pattern(parse_formula(a), parse_formula(b))

    def test_contradiction_pattern(self):
        assert self.match(FORALL, EXISTS_NEG) is PairPattern.FORALL_EXISTS_NOT

    def test_contrary_pattern(self):
        assert self.match(FORALL, NEG_EXISTS) is PairPattern.FORALL_NOT_EXISTS

    def test_subcontradiction_pattern(self):
        assert self.match(EXISTS, EXISTS_NEG) is PairPattern.EXISTS_EXISTS_NOT

    def test_order_matters(self):
        assert self.match(EXISTS_NEG, FORALL) is None
        assert self.match(NEG_EXISTS, FORALL) is None

    def test_no_pattern_without_quantifiers(self):
        assert self.match("λx. M(x)", "λx. ¬M(x)") is None

    def test_forall_forall_no_pattern(self):
        assert self.match(FORALL, FORALL) is None
