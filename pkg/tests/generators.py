"""Seeded random languages, expressions, theories, morphisms and diagrams for tests."""

import itertools
import random

from theoryfusion.diagram import TheoryDiagram
from theoryfusion.lattice import Theory
from theoryfusion.morphism import LanguageMorphism
from theoryfusion.syntax import FALSE, TRUE, Atom, Binary, Language, Not, Quant

SORT_NAMES = "abcdefgh"
REL_NAMES = "PQRSTUVW"


def language(rng, max_sorts=3, max_rels=3, max_arity=2, name="L", min_sorts=1, min_arity=0):
    ns = rng.randint(min_sorts, max_sorts)
    sorts = [f"s{SORT_NAMES[i]}" for i in range(ns)]
    rels = {}
    for i in range(rng.randint(0, max_rels)):
        k = rng.randint(min_arity, max_arity)
        rels[REL_NAMES[i]] = tuple(rng.choice(sorts) for _ in range(k))
    return Language(sorts, rels, name=name)


def expr(rng, lang, depth, max_vars=2, env=(), budget=None):
    """Random closed well-formed expression with nesting depth at most ``depth``."""
    budget = max_vars if budget is None else budget
    usable = [r for r, ar in lang.relations if all(any(s == vs for _, vs in env) for s in ar)]
    choices = ["atom"] * 4 if usable else []
    if not usable or rng.random() < 0.1:
        choices.append("const")
    if depth > 0:
        choices += ["not", "bin", "bin"]
        if budget > 0:
            choices += ["quant", "quant"]
    kind = rng.choice(choices)
    if kind == "const":
        return rng.choice([TRUE, FALSE])
    if kind == "atom":
        r = rng.choice(usable)
        return Atom(r, tuple(rng.choice([v for v, vs in env if vs == s]) for s in lang.arity(r)))
    if kind == "not":
        return Not(expr(rng, lang, depth - 1, max_vars, env, budget))
    if kind == "bin":
        op = rng.choice(["and", "or", "implies", "iff"])
        return Binary(op, expr(rng, lang, depth - 1, max_vars, env, budget),
                      expr(rng, lang, depth - 1, max_vars, env, budget))
    v = f"x{len(env) + 1}"
    s = rng.choice(lang.sorts)
    return Quant(rng.choice(["forall", "exists"]), ((v, s),),
                 expr(rng, lang, depth - 1, max_vars, env + ((v, s),), budget - 1))


def theory(rng, lang, max_axioms=2, depth=2, max_vars=2, name="T"):
    return Theory(lang, [expr(rng, lang, depth, max_vars) for _ in range(rng.randint(0, max_axioms))],
                  name=name)


def morphism(rng, source, target, name="f", tries=20):
    """Random arity-preserving morphism, or None when none was found."""
    for _ in range(tries):
        smap = {s: rng.choice(target.sorts) for s in source.sorts}
        rmap = {}
        for r, ar in source.relations:
            want = tuple(smap[s] for s in ar)
            cands = [t for t, tar in target.relations if tar == want]
            if not cands:
                break
            rmap[r] = rng.choice(cands)
        else:
            return LanguageMorphism(source, target, smap, rmap, name=name)
    return None


def collapse(rng, source, name="g", extra=True):
    """Random morphism out of ``source`` into a freshly built target; always exists."""
    k = rng.randint(1, len(source.sorts) + (1 if extra else 0))
    tsorts = [f"t{i}" for i in range(k)]
    smap = {s: rng.choice(tsorts) for s in source.sorts}
    trels, rmap = {}, {}
    for r, ar in source.relations:
        want = tuple(smap[s] for s in ar)
        same = [t for t, tar in trels.items() if tar == want]
        if same and rng.random() < 0.5:
            rmap[r] = rng.choice(same)
        else:
            t = f"R{len(trels)}"
            trels[t] = want
            rmap[r] = t
    if extra and rng.random() < 0.5:
        trels[f"R{len(trels)}"] = tuple(rng.choice(tsorts) for _ in range(rng.randint(0, 2)))
    target = Language(tsorts, trels, name=f"{name}-target")
    return LanguageMorphism(source, target, smap, rmap, name=name)


def diagram(rng, max_nodes=4, max_edges=4, max_sorts=3, max_rels=3, axioms=True, name="D"):
    """Random diagram; edges found by rejection sampling between node languages."""
    nodes = {}
    for i in range(rng.randint(1, max_nodes)):
        lang = language(rng, max_sorts, max_rels, max_arity=2, name=f"L{i}")
        nodes[f"n{i}"] = theory(rng, lang, max_axioms=2 if axioms else 0, depth=2, name=f"T{i}")
    names = sorted(nodes)
    edges = {}
    for j in range(rng.randint(0, max_edges)):
        for _ in range(10):
            m, n = rng.choice(names), rng.choice(names)
            f = morphism(rng, nodes[m].language, nodes[n].language, name=f"f{j}")
            if f is not None:
                edges[f"e{j}"] = (m, n, f)
                break
    return TheoryDiagram.build(nodes, edges, name=name)


def span(rng, max_sorts=2, max_rels=2, name="S"):
    """Random span ``apex -> left``, ``apex -> right`` built from collapses of the apex."""
    apex_lang = language(rng, max_sorts, max_rels, max_arity=2, name="La")
    f = collapse(rng, apex_lang, name="f")
    g = collapse(rng, apex_lang, name="g")
    fl = f.target.renamed("Lf")
    gl = g.target.renamed("Lg")
    f = LanguageMorphism(apex_lang, fl, f.sort_map, f.rel_map, name="f")
    g = LanguageMorphism(apex_lang, gl, g.sort_map, g.rel_map, name="g")
    nodes = {
        "a": theory(rng, apex_lang, max_axioms=1, name="Ta"),
        "b": theory(rng, fl, max_axioms=2, name="Tb"),
        "c": theory(rng, gl, max_axioms=2, name="Tc"),
    }
    return TheoryDiagram.build(nodes, {"e1": ("a", "b", f), "e2": ("a", "c", g)}, name=name)


def all_morphisms(source, target):
    """Every arity-preserving morphism ``source -> target`` (brute force)."""
    for simg in itertools.product(target.sorts, repeat=len(source.sorts)):
        smap = dict(zip(source.sorts, simg))
        options = []
        for r, ar in source.relations:
            want = tuple(smap[s] for s in ar)
            options.append([t for t, tar in target.relations if tar == want])
        for rimg in itertools.product(*options):
            yield LanguageMorphism(source, target, smap, dict(zip(source.relation_names, rimg)))


def seeded(seed):
    return random.Random(seed)
