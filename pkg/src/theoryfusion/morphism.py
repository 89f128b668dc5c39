"""Language morphisms, induced expression translation, endorelations and quotients."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MorphismError, WellFormednessError
from .syntax import (
    Atom,
    Binary,
    Const,
    Language,
    Not,
    Quant,
    canonical_form,
    to_sexpr,
    well_formed,
)


class UnionFind:
    """Disjoint sets whose representative is always the least member."""

    def __init__(self, items=()):
        self.parent = {}
        for x in items:
            self.add(x)

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        lo, hi = (ra, rb) if ra < rb else (rb, ra)
        self.parent[hi] = lo
        return lo

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {r: sorted(ms) for r, ms in sorted(out.items())}


@dataclass(frozen=True)
class LanguageMorphism:
    """Arity-preserving symbol map ``source -> target`` (total on source symbols)."""

    source: Language
    target: Language
    sort_map: tuple
    rel_map: tuple
    name: str = field(default="f", compare=False)
    _sorts: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _rels: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        smap = dict(self.sort_map.items() if isinstance(self.sort_map, dict) else self.sort_map)
        rmap = dict(self.rel_map.items() if isinstance(self.rel_map, dict) else self.rel_map)
        src, tgt = self.source, self.target
        for s in src.sorts:
            if s not in smap:
                raise MorphismError(f"morphism {self.name} is not total: sort {s!r} unmapped")
            if not tgt.has_sort(smap[s]):
                raise MorphismError(f"morphism {self.name}: sort {smap[s]!r} not in target")
        for s in smap:
            if not src.has_sort(s):
                raise MorphismError(f"morphism {self.name}: sort {s!r} not in source")
        for r, ar in src.relations:
            if r not in rmap:
                raise MorphismError(f"morphism {self.name} is not total: relation {r!r} unmapped")
            t = rmap[r]
            if not tgt.has_relation(t):
                raise MorphismError(f"morphism {self.name}: relation {t!r} not in target")
            want = tuple(smap[s] for s in ar)
            if tgt.arity(t) != want:
                raise MorphismError(
                    f"morphism {self.name} does not preserve arity: {r}{ar} -> {t}{tgt.arity(t)}"
                )
        for r in rmap:
            if not src.has_relation(r):
                raise MorphismError(f"morphism {self.name}: relation {r!r} not in source")
        object.__setattr__(self, "sort_map", tuple(sorted(smap.items())))
        object.__setattr__(self, "rel_map", tuple(sorted(rmap.items())))
        object.__setattr__(self, "_sorts", smap)
        object.__setattr__(self, "_rels", rmap)

    def sort(self, s):
        return self._sorts[s]

    def rel(self, r):
        return self._rels[r]

    def sort_preimage(self, s):
        return tuple(a for a, b in self.sort_map if b == s)

    def rel_preimage(self, r):
        return tuple(a for a, b in self.rel_map if b == r)

    def is_injective(self):
        return (len(set(self._sorts.values())) == len(self._sorts)
                and len(set(self._rels.values())) == len(self._rels))

    def is_surjective(self):
        return (set(self._sorts.values()) == set(self.target.sorts)
                and set(self._rels.values()) == set(self.target.relation_names))

    def renamed(self, name):
        return LanguageMorphism(self.source, self.target, self.sort_map, self.rel_map, name=name)


def identity(language, name=None):
    return LanguageMorphism(
        language,
        language,
        {s: s for s in language.sorts},
        {r: r for r in language.relation_names},
        name=name or f"id-{language.name}",
    )


def compose(f, g, name=None):
    """Diagrammatic composite: first ``f``, then ``g``."""
    if f.target != g.source:
        raise MorphismError(f"cannot compose {f.name} with {g.name}: endpoint mismatch")
    return LanguageMorphism(
        f.source,
        g.target,
        {s: g.sort(t) for s, t in f.sort_map},
        {r: g.rel(t) for r, t in f.rel_map},
        name=name or f"{f.name};{g.name}",
    )


def expr_map(f, e):
    """Translate ``e`` along ``f`` symbol by symbol; the result is canonical."""

    def go(x):
        if isinstance(x, Const):
            return x
        if isinstance(x, Atom):
            return Atom(f.rel(x.rel), x.args)
        if isinstance(x, Not):
            return Not(go(x.body))
        if isinstance(x, Binary):
            return Binary(x.op, go(x.left), go(x.right))
        return Quant(x.kind, tuple((v, f.sort(s)) for v, s in x.binders), go(x.body))

    return canonical_form(go(e))


def expr_preimage(f, e2):
    """Every source expression whose translation along ``f`` is alpha-equal to ``e2``.

    Translation keeps the AST shape, so the preimage is the product of
    per-binder sort choices and per-atom relation choices, filtered by arity.
    Returned as a tuple sorted by canonical text.
    """
    well_formed(f.target, e2)
    e2 = canonical_form(e2)

    def go(x, env):
        if isinstance(x, Const):
            yield x
            return
        if isinstance(x, Atom):
            want = tuple(env[a] for a in x.args)
            for r in f.rel_preimage(x.rel):
                if f.source.arity(r) == want:
                    yield Atom(r, x.args)
            return
        if isinstance(x, Not):
            for b in go(x.body, env):
                yield Not(b)
            return
        if isinstance(x, Binary):
            lefts = list(go(x.left, env))
            if not lefts:
                return
            rights = list(go(x.right, env))
            for a in lefts:
                for b in rights:
                    yield Binary(x.op, a, b)
            return
        choices = [f.sort_preimage(s) for _, s in x.binders]
        for picked in itertools.product(*choices):
            inner = dict(env)
            binders = []
            for (v, _), s in zip(x.binders, picked):
                inner[v] = s
                binders.append((v, s))
            for b in go(x.body, inner):
                yield Quant(x.kind, tuple(binders), b)

    found = {canonical_form(e) for e in go(e2, {})}
    return tuple(sorted(found, key=to_sexpr))


# -- endorelations -----------------------------------------------------------


def _pairs(pairs):
    return tuple(sorted({tuple(sorted(p)) for p in pairs}))


@dataclass(frozen=True)
class Endorelation:
    """Symbol identifications on one language; pairs are stored unordered."""

    language: Language
    sort_pairs: tuple = ()
    rel_pairs: tuple = ()
    name: str = field(default="R", compare=False)

    def __post_init__(self):
        for a, b in self.sort_pairs:
            for s in (a, b):
                if not self.language.has_sort(s):
                    raise WellFormednessError(f"endorelation {self.name}: unknown sort {s!r}")
        for a, b in self.rel_pairs:
            for r in (a, b):
                if not self.language.has_relation(r):
                    raise WellFormednessError(f"endorelation {self.name}: unknown relation {r!r}")
        object.__setattr__(self, "sort_pairs", _pairs(self.sort_pairs))
        object.__setattr__(self, "rel_pairs", _pairs(self.rel_pairs))

    def closure(self):
        """Least-member class maps ``(sort -> rep, relation -> rep)`` of the generated equivalence."""
        su = UnionFind(self.language.sorts)
        for a, b in self.sort_pairs:
            su.union(a, b)
        ru = UnionFind(self.language.relation_names)
        for a, b in self.rel_pairs:
            ru.union(a, b)
        return ({s: su.find(s) for s in self.language.sorts},
                {r: ru.find(r) for r in self.language.relation_names})

    def check_consistent(self):
        """Raise unless related relations have pointwise-related arities."""
        scls, rcls = self.closure()
        seen = {}
        for r, ar in self.language.relations:
            shape = tuple(scls[s] for s in ar)
            rep = rcls[r]
            if rep in seen and seen[rep][1] != shape:
                other = seen[rep][0]
                raise WellFormednessError(
                    f"endorelation {self.name} is not arity-consistent: "
                    f"{other} and {r} are identified but their arities differ after closure"
                )
            seen.setdefault(rep, (r, shape))
        return True

    def generated_pairs(self):
        scls, rcls = self.closure()
        sp = [(a, b) for a, b in itertools.combinations(self.language.sorts, 2) if scls[a] == scls[b]]
        rp = [(a, b) for a, b in itertools.combinations(self.language.relation_names, 2)
              if rcls[a] == rcls[b]]
        return _pairs(sp), _pairs(rp)


def discrete(language, name=None):
    return Endorelation(language, (), (), name=name or f"eq-{language.name}")


def kernel(f, name=None):
    """Identify source symbols sent to the same target symbol."""
    src = f.source
    sp = [(a, b) for a, b in itertools.combinations(src.sorts, 2) if f.sort(a) == f.sort(b)]
    rp = [(a, b) for a, b in itertools.combinations(src.relation_names, 2) if f.rel(a) == f.rel(b)]
    return Endorelation(src, sp, rp, name=name or f"ker-{f.name}")


def same_equivalence(r1, r2):
    return r1.language == r2.language and r1.closure() == r2.closure()


def quotient_language(language, relation, name=None):
    """Collapse each equivalence class to its least member; return ``(Q, epi)``."""
    if relation.language != language:
        raise MorphismError(f"endorelation {relation.name} is not based on {language.name}")
    relation.check_consistent()
    scls, rcls = relation.closure()
    rels = {}
    for r, ar in language.relations:
        rels.setdefault(rcls[r], tuple(scls[s] for s in ar))
    qname = name or f"{language.name}/{relation.name}"
    q = Language(sorted(set(scls.values())), rels, name=qname)
    epi = LanguageMorphism(language, q, scls, rcls, name=f"quot-{qname}")
    return q, epi


def epi_mono_factorization(f):
    """``f = compose(q, m)`` with ``q`` the quotient by ``kernel(f)`` and ``m`` injective."""
    q_lang, q = quotient_language(f.source, kernel(f))
    m = LanguageMorphism(
        q_lang,
        f.target,
        {c: f.sort(c) for c in q_lang.sorts},
        {c: f.rel(c) for c in q_lang.relation_names},
        name=f"mono-{f.name}",
    )
    return q_lang, q, m
