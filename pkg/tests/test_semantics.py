import itertools

import pytest

import generators as G
from theoryfusion import propositional as prop
from theoryfusion.errors import WellFormednessError
from theoryfusion.lattice import Theory, meet
from theoryfusion.semantics import (
    AxiomWitness,
    Bounds,
    BoundReport,
    FiniteStructure,
    Limits,
    Refutation,
    check_refutation,
    check_witness,
    clear_caches,
    consistent,
    entails,
    evaluate,
    find_model,
    ground_in_structure,
    refute,
)
from theoryfusion.syntax import FALSE, Language, parse_expr


def S(lang, universes, rels):
    return FiniteStructure(lang, universes, rels)


def test_evaluate_examples(LP, TA, TB):
    full = S(LP, {"s": ("a",)}, {"P": [("a",)]})
    empty = S(LP, {"s": ("a",)}, {"P": []})
    assert evaluate(full, TA.axioms[0])
    assert not evaluate(empty, TA.axioms[0])
    assert evaluate(empty, TB.axioms[0])


def test_evaluate_language_mismatch(LP, L1):
    m = S(LP, {"s": (0,)}, {"P": []})
    with pytest.raises(WellFormednessError):
        evaluate(m, parse_expr("(forall ((x person)) (mgr x))"))


def test_structure_invariants(LP):
    with pytest.raises(WellFormednessError):
        S(LP, {"s": ()}, {})
    with pytest.raises(WellFormednessError):
        S(LP, {"s": (0,)}, {"P": [(1,)]})


def test_find_model_examples(LP, TA, TB):
    m = find_model(TA, 1)
    assert m.sizes() == {"s": 1} and m.extension("P") == frozenset({(0,)})
    assert find_model(meet([TA, TB]), 3) is None
    e = find_model(Theory(LP, ()), 1)
    assert e.sizes() == {"s": 1} and e.extension("P") == frozenset()


def _all_structures(lang, max_size):
    """Every structure in the documented order: size vectors, then extension bitmasks."""
    for sizes in itertools.product(range(1, max_size + 1), repeat=len(lang.sorts)):
        universes = {s: tuple(range(n)) for s, n in zip(lang.sorts, sizes)}
        atoms = [(r, t) for r, ar in lang.relations
                 for t in itertools.product(*(universes[s] for s in ar))]
        for bits in itertools.product((False, True), repeat=len(atoms)):
            rels = {r: [] for r in lang.relation_names}
            for (r, t), b in zip(atoms, bits):
                if b:
                    rels[r].append(t)
            yield S(lang, universes, rels)


def test_find_model_is_first_in_enumeration_order():
    rng = G.seeded(31)
    checked = 0
    for _ in range(120):
        lang = G.language(rng, 2, 2, 2)
        if sum(2 ** len(ar) for _, ar in lang.relations) > 10:
            continue
        t = G.theory(rng, lang, 2, 2)
        expected = next((m for m in _all_structures(lang, 2) if all(evaluate(m, a) for a in t.axioms)), None)
        got = find_model(t, 2)
        assert got == expected
        checked += 1
    assert checked > 50


def test_find_model_routes_agree():
    rng = G.seeded(32)
    dpll_only = Limits(exhaustive_bits=0)
    for _ in range(150):
        lang = G.language(rng, 2, 3, 2)
        t = G.theory(rng, lang, 3, 3)
        assert find_model(t, 3) == find_model(t, 3, dpll_only)


def test_refute_examples(TA, TB, LP):
    cert = refute(meet([TA, TB]), 0)
    assert isinstance(cert, Refutation) and check_refutation(cert)
    for d in range(3):
        assert refute(TA, d) is None
    bottom = refute(Theory(LP, [FALSE]), 0)
    assert bottom is not None and check_refutation(bottom)


def test_consistent_examples(TA, TB, LP):
    assert consistent(TA).yes
    v = consistent(meet([TA, TB]))
    assert v.no and check_witness(v, meet([TA, TB]))
    # needs two elements, which max_size 1 cannot provide, and it is satisfiable
    two = Theory(LP, [parse_expr("(exists ((x s) (y s)) (and (P x) (not (P y))))")])
    u = consistent(two, Bounds(max_size=1, term_depth=1))
    assert u.unknown and isinstance(u.witness, BoundReport)
    assert consistent(two, Bounds(max_size=2, term_depth=1)).yes


def test_entails_examples(TA, LP):
    v = entails(TA, parse_expr("(exists ((x s)) (P x))"))
    assert v.yes and isinstance(v.witness, Refutation)
    assert check_witness(v, TA, parse_expr("(exists ((x s)) (P x))"))
    empty = Theory(LP, ())
    n = entails(empty, TA.axioms[0])
    assert n.no and n.witness.extension("P") == frozenset()
    assert check_witness(n, empty, TA.axioms[0])


def test_entails_reflexive():
    rng = G.seeded(33)
    for _ in range(100):
        lang = G.language(rng, 2, 2, 2)
        t = G.theory(rng, lang, 3, 3)
        for a in t.axioms:
            v = entails(t, a)
            assert v.yes
            assert isinstance(v.witness, AxiomWitness)


def test_verdicts_carry_checkable_witnesses():
    rng = G.seeded(34)
    for _ in range(150):
        lang = G.language(rng, 2, 2, 1)
        t = G.theory(rng, lang, 2, 2)
        e = G.expr(rng, lang, 2, 1)
        for v, target in ((consistent(t), None), (entails(t, e), e)):
            assert check_witness(v, t, target)


def test_soundness_models_and_refutations_exclusive():
    rng = G.seeded(35)
    for _ in range(200):
        lang = G.language(rng, 1, 2, 1)
        t = G.theory(rng, lang, 3, 2)
        m = find_model(t, 3)
        r = refute(t, 1)
        assert m is None or r is None
        if m is not None:
            assert all(evaluate(m, a) for a in t.axioms)
        if r is not None:
            assert check_refutation(r)


def test_tampered_certificate_is_rejected(TA, TB):
    cert = refute(meet([TA, TB]), 0)
    forged = Refutation(cert.language, cert.axioms, cert.term_depth, cert.skolem_symbols,
                        cert.skolemized, cert.universe, cert.atoms, cert.ground[:-1])
    assert not check_refutation(forged)


def test_evaluate_agrees_with_grounding():
    rng = G.seeded(36)
    for _ in range(300):
        lang = G.language(rng, 2, 2, 2)
        e = G.expr(rng, lang, 3, 2)
        universes = {s: tuple(range(rng.randint(1, 3))) for s in lang.sorts}
        rels = {}
        for r, ar in lang.relations:
            rels[r] = [t for t in itertools.product(*(universes[s] for s in ar)) if rng.random() < 0.5]
        m = S(lang, universes, rels)
        assert evaluate(m, e) == ground_in_structure(m, e)


def test_nonempty_universes():
    lang = Language(["s"], {"P": ("s",)})
    v = entails(Theory(lang, [parse_expr("(forall ((x s)) (P x))")]), parse_expr("(exists ((x s)) (P x))"))
    assert v.yes


def test_determinism(TA, TB):
    first = consistent(meet([TA, TB])).witness.render()
    clear_caches()
    assert consistent(meet([TA, TB])).witness.render() == first


def test_propositional_layer_against_truth_tables():
    rng = G.seeded(37)
    for _ in range(300):
        n = rng.randint(1, 6)

        def rand(d):
            if d == 0 or rng.random() < 0.3:
                return prop.pvar(rng.randrange(n))
            k = rng.choice(["not", "and", "or"])
            if k == "not":
                return prop.pnot(rand(d - 1))
            parts = [rand(d - 1) for _ in range(rng.randint(2, 3))]
            return prop.pand(parts) if k == "and" else prop.por(parts)

        fs = [rand(3) for _ in range(rng.randint(1, 3))]
        brute = None
        for bits in itertools.product((0, 1), repeat=n):
            if all(prop.peval(f, bits) for f in fs):
                brute = list(bits)
                break
        got = prop.satisfiable(fs, n)
        if brute is None:
            assert got is None
            assert prop.independently_unsatisfiable(fs)
        else:
            assert got is not None and list(got[:n]) == brute
            table = prop.truth_table(prop.pand(fs), n)
            assert table.any()
