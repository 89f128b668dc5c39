import itertools

import pytest

import generators as G
from theoryfusion.errors import ParseError, ResourceLimitError, WellFormednessError
from theoryfusion.semantics import FiniteStructure, evaluate
from theoryfusion.syntax import (
    FALSE,
    TRUE,
    Language,
    alpha_equal,
    bound_var_count,
    canonical_form,
    depth,
    enumerate_expressions,
    free_vars,
    is_well_formed,
    parse_expr,
    to_sexpr,
    well_formed,
)
from theoryfusion.workspace import parse_workspace, print_workspace


def test_parse_language_and_theory():
    ws = parse_workspace("""
        (language LP (sorts s) (relations (P s)))
        (theory TA (language LP) (axioms (forall ((x s)) (P x))))
    """)
    lp = ws.languages["LP"]
    assert lp.sorts == ("s",) and lp.relations == (("P", ("s",)),)
    ta = ws.theories["TA"]
    assert ta.language == lp
    assert [to_sexpr(a) for a in ta.axioms] == ["(forall ((v1 s)) (P v1))"]


def test_undeclared_sort_in_relation():
    with pytest.raises(ParseError, match="unresolved sort"):
        parse_workspace("(language LP (sorts s) (relations (P t)))")


def test_print_is_idempotent_and_set_like():
    text = """
        (language LP (sorts s) (relations (P s)))
        (theory T (language LP) (axioms (exists ((y s)) (P y)) (forall ((x s)) (P x))))
    """
    swapped = text.replace("(exists ((y s)) (P y)) (forall ((x s)) (P x))",
                           "(forall ((x s)) (P x)) (exists ((y s)) (P y))")
    once = print_workspace(parse_workspace(text))
    assert print_workspace(parse_workspace(once)) == once
    assert print_workspace(parse_workspace(swapped)) == once


def test_binders_print_canonically():
    ws = parse_workspace("""
        (language LP (sorts s) (relations (P s)))
        (theory T (language LP) (axioms (forall ((y s)) (P y))))
    """)
    assert "(forall ((v1 s)) (P v1))" in print_workspace(ws)


def test_well_formed_examples(LP):
    assert well_formed(LP, parse_expr("(forall ((x s)) (P x))"))
    with pytest.raises(WellFormednessError, match="free variable"):
        well_formed(LP, parse_expr("(P x)"))
    with pytest.raises(WellFormednessError, match="unknown relation"):
        well_formed(LP, parse_expr("(forall ((x s)) (Q x))"))


def test_well_formed_arity_and_sort(L1):
    with pytest.raises(WellFormednessError, match="arity"):
        well_formed(L1, parse_expr("(forall ((x person)) (employs x))"))
    with pytest.raises(WellFormednessError, match="sort mismatch"):
        well_formed(L1, parse_expr("(forall ((x person) (y person)) (employs x y))"))
    with pytest.raises(WellFormednessError, match="unknown sort"):
        well_formed(L1, parse_expr("(forall ((x robot)) true)"))
    assert not is_well_formed(L1, parse_expr("(mgr z)"))


def test_parse_rejects_nary_and_bad_syntax():
    for bad in ["(and true)", "(and true false true)", "(forall () true)", "(not)", "(forall ((x s)) )",
                "(forall x (P x))", "((P) x)"]:
        with pytest.raises(ParseError):
            parse_expr(bad)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_workspace("(language LP (sorts s)\n  (relations (P s))")
    assert info.value.line == 1 and info.value.col == 1


def test_canonical_form_examples():
    assert to_sexpr(canonical_form(parse_expr("(forall ((y s)) (P y))"))) == "(forall ((v1 s)) (P v1))"
    c = canonical_form(parse_expr("(exists ((a s) (b s)) (and (P a) (P b)))"))
    assert to_sexpr(c) == "(exists ((v1 s) (v2 s)) (and (P v1) (P v2)))"
    nested = canonical_form(parse_expr("(and (forall ((q s)) (P q)) (exists ((r s)) (P r)))"))
    assert to_sexpr(nested) == "(and (forall ((v1 s)) (P v1)) (exists ((v2 s)) (P v2)))"


def test_shadowing_is_resolved_by_renaming():
    e = parse_expr("(forall ((x s)) (exists ((x s)) (P x)))")
    assert to_sexpr(canonical_form(e)) == "(forall ((v1 s)) (exists ((v2 s)) (P v2)))"


def test_canonical_form_idempotent_on_random_expressions():
    rng = G.seeded(11)
    for _ in range(1000):
        lang = G.language(rng, 2, 3, 2)
        e = G.expr(rng, lang, rng.randint(0, 4), max_vars=3)
        c = canonical_form(e)
        assert canonical_form(c) == c
        assert alpha_equal(c, e)
        assert well_formed(lang, c)


def _structures(lang, rng, n):
    for _ in range(n):
        universes = {s: tuple(range(rng.randint(1, 2))) for s in lang.sorts}
        rels = {}
        for r, ar in lang.relations:
            tuples = list(itertools.product(*(universes[s] for s in ar)))
            rels[r] = tuple(t for t in tuples if rng.random() < 0.5)
        yield FiniteStructure(lang, universes, rels)


def test_canonical_form_preserves_satisfaction():
    rng = G.seeded(12)
    for _ in range(200):
        lang = G.language(rng, 2, 2, 2)
        e = G.expr(rng, lang, 3, max_vars=2)
        for m in _structures(lang, rng, 3):
            assert evaluate(m, e) == evaluate(m, canonical_form(e))


def test_depth_and_counts():
    e = parse_expr("(forall ((x s)) (and (P x) (not (P x))))")
    assert depth(e) == 3
    assert bound_var_count(e) == 1
    assert free_vars(parse_expr("(and (P x) (forall ((y s)) (P y)))")) == {"x"}
    assert depth(TRUE) == 0


def test_enumeration_depth_zero(LP):
    assert enumerate_expressions(LP, 0, 1) == [TRUE, FALSE]


def test_enumeration_depth_one_contains_quantified_atoms(LP):
    texts = {to_sexpr(e) for e in enumerate_expressions(LP, 1, 1)}
    assert "(forall ((v1 s)) (P v1))" in texts
    assert "(exists ((v1 s)) (P v1))" in texts


def _oracle_lp(max_depth):
    """Expressions over LP written with the single variable ``x``, closed, at most one binder."""
    level = {"true": (0, False), "false": (0, False), "(P x)": (0, True)}
    for _ in range(max_depth):
        cur = dict(level)
        for a, (ba, fa) in cur.items():
            level.setdefault(f"(not {a})", (ba, fa))
            for q in ("forall", "exists"):
                level.setdefault(f"({q} ((x s)) {a})", (ba + 1, False))
            for b, (bb, fb) in cur.items():
                for op in ("and", "or", "implies", "iff"):
                    level.setdefault(f"({op} {a} {b})", (ba + bb, fa or fb))
    return {k for k, (b, free) in level.items() if b <= 1 and not free}


def test_enumeration_matches_brute_force_oracle(LP):
    for d in range(3):
        mine = {to_sexpr(e).replace("v1", "x") for e in enumerate_expressions(LP, d, 1)}
        assert mine == _oracle_lp(d)


def test_enumeration_count_frozen(LP):
    assert len(enumerate_expressions(LP, 2, 1)) == 2672


def test_enumeration_is_closed_and_deterministic():
    lang = Language(["a", "b"], {"R": ("a", "b"), "Q": ("b",)})
    first = enumerate_expressions(lang, 2, 2)
    assert first == enumerate_expressions(lang, 2, 2)
    assert len({to_sexpr(e) for e in first}) == len(first)
    for e in first:
        assert well_formed(lang, e)
        assert depth(e) <= 2 and bound_var_count(e) <= 2
        assert canonical_form(e) == e


def test_enumeration_cap(LP):
    with pytest.raises(ResourceLimitError):
        enumerate_expressions(LP, 3, 2, cap=1000)


def test_language_invariants():
    with pytest.raises(WellFormednessError):
        Language(["s", "s"], {})
    with pytest.raises(WellFormednessError):
        Language(["s"], {"P": ("t",)})
    with pytest.raises(WellFormednessError):
        Language(["forall"], {})
    assert Language(["s"], {"P": ("s",)}, name="A") == Language(["s"], {"P": ("s",)}, name="B")


def test_constants_print():
    assert to_sexpr(TRUE) == "true" and to_sexpr(FALSE) == "false"
    assert parse_expr("true") == TRUE
