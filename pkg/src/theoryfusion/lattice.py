"""Theories, theory morphisms and the fiber operators between lattices of theories.

Closed theories are infinite, so nothing here materializes a closure.  The
inverse image, universal direct image and mapping closure are answered as
membership queries through the bounded entailment oracle; ``inv_reify``
turns the inverse image into a finite theory by filtering a bounded
expression enumeration and is only an under-approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import MorphismError, WellFormednessError
from .morphism import LanguageMorphism, expr_map, expr_preimage, identity, quotient_language
from .semantics import DEFAULT_BOUNDS, DEFAULT_LIMITS, AxiomTuple, Status, Verdict, entails
from .syntax import Language, canonical_form, check_symbol, enumerate_expressions, qualify, to_sexpr, well_formed


@dataclass(frozen=True)
class Theory:
    """A base language plus a canonical, deduplicated, text-sorted axiom tuple."""

    language: Language
    axioms: tuple = ()
    name: str = field(default="T", compare=False)

    def __post_init__(self):
        canon = {}
        for a in self.axioms:
            well_formed(self.language, a)
            c = canonical_form(a)
            canon[to_sexpr(c)] = c
        object.__setattr__(self, "axioms", AxiomTuple(canon[k] for k in sorted(canon)))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.language, self.axioms))
            object.__setattr__(self, "_hash", h)
        return h

    def renamed(self, name):
        # axioms are already canonical, so skip revalidation
        t = object.__new__(Theory)
        for k, v in (("language", self.language), ("axioms", self.axioms), ("name", name)):
            object.__setattr__(t, k, v)
        return t

    def with_axioms(self, axioms, name=None):
        return Theory(self.language, tuple(self.axioms) + tuple(axioms), name=name or self.name)


def empty_theory(language, name=None):
    return Theory(language, (), name=name or f"empty-{language.name}")


@dataclass(frozen=True)
class Aggregate:
    """Per-obligation verdicts behind an aggregated verdict."""

    items: tuple

    def render(self):
        lines = ["(obligations"]
        for expr, v in self.items:
            lines.append(f"  ({v.status.value} {to_sexpr(expr)})")
            if v.witness is not None and not v.yes:
                lines.append("    " + v.witness.render().replace("\n", "\n    "))
        return "\n".join(lines) + ")"


@dataclass(frozen=True)
class Vacuous:
    """No preimage exists, so a universal condition holds trivially."""

    def render(self):
        return "(vacuous empty-preimage)"


def aggregate(items):
    """Conservative combination: any No gives No, else any Unknown gives Unknown."""
    items = tuple(items)
    statuses = {v.status for _, v in items}
    if Status.NO in statuses:
        status = Status.NO
    elif Status.UNKNOWN in statuses:
        status = Status.UNKNOWN
    else:
        status = Status.YES
    return Verdict(status, Aggregate(items))


@dataclass(frozen=True)
class TheoryMorphism:
    underlying: LanguageMorphism
    source: Theory
    target: Theory
    verdict: Verdict = field(default=None, compare=False)

    def __post_init__(self):
        if self.underlying.source != self.source.language:
            raise MorphismError(
                f"morphism {self.underlying.name}: source language does not match theory {self.source.name}")
        if self.underlying.target != self.target.language:
            raise MorphismError(
                f"morphism {self.underlying.name}: target language does not match theory {self.target.name}")

    @property
    def name(self):
        return self.underlying.name

    def verified(self, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
        """Copy carrying the validation verdict."""
        v = validate_theory_morphism(self.underlying, self.source, self.target, bounds, limits)
        return TheoryMorphism(self.underlying, self.source, self.target, v)


def _require_base(f, theory, end):
    lang = f.source if end == "source" else f.target
    if theory.language != lang:
        raise MorphismError(
            f"theory {theory.name} is not based on the {end} language of {f.name}")


@lru_cache(maxsize=4096)
def _image(f, theory):
    return Theory(f.target, tuple(expr_map(f, a) for a in theory.axioms))


def dir_exists(f, theory, name=None):
    """Translate every axiom forward along ``f``."""
    _require_base(f, theory, "source")
    return _image(f, theory).renamed(name or f"{theory.name}-via-{f.name}")


def inv_member(f, target_theory, e1, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Is ``e1`` in the inverse image of ``target_theory`` (its translation entailed)?"""
    _require_base(f, target_theory, "target")
    well_formed(f.source, e1)
    return entails(target_theory, expr_map(f, e1), bounds, limits)


def inv_reify(f, target_theory, max_depth, max_vars, bounds=DEFAULT_BOUNDS,
              limits=DEFAULT_LIMITS, name=None):
    """Bounded under-approximation of the inverse image as a finite theory."""
    _require_base(f, target_theory, "target")
    keep = [e for e in enumerate_expressions(f.source, max_depth, max_vars)
            if inv_member(f, target_theory, e, bounds, limits).yes]
    return Theory(f.source, keep, name=name or f"inv-{f.name}-{target_theory.name}")


def dir_forall_member(f, source_theory, e2, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Is every preimage of ``e2`` entailed by ``source_theory``?"""
    _require_base(f, source_theory, "source")
    well_formed(f.target, e2)
    pre = expr_preimage(f, e2)
    if not pre:
        return Verdict(Status.YES, Vacuous())
    return aggregate((e1, entails(source_theory, e1, bounds, limits)) for e1 in pre)


def clo_member(f, source_theory, e1, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Mapping-closure membership: inverse image of the direct image."""
    well_formed(f.source, e1)
    return inv_member(f, dir_exists(f, source_theory), e1, bounds, limits)


def leq(ta, tb, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """``ta <= tb``: ``ta`` is at least as specialized (entails every axiom of ``tb``)."""
    if ta.language != tb.language:
        raise MorphismError(f"theories {ta.name} and {tb.name} have different base languages")
    return aggregate((b, entails(ta, b, bounds, limits)) for b in tb.axioms)


def meet(theories, name=None):
    """Union of axiom sets over one shared language."""
    theories = list(theories)
    if not theories:
        raise WellFormednessError("meet needs at least one theory")
    lang = theories[0].language
    for t in theories[1:]:
        if t.language != lang:
            raise MorphismError(f"meet: theory {t.name} has a different base language")
    axioms = [a for t in theories for a in t.axioms]
    return Theory(lang, axioms, name=name or "+".join(t.name for t in theories))


def validate_theory_morphism(f, source_theory, target_theory, bounds=DEFAULT_BOUNDS,
                             limits=DEFAULT_LIMITS):
    """Every translated source axiom must be entailed by the target theory."""
    _require_base(f, source_theory, "source")
    _require_base(f, target_theory, "target")
    return aggregate(
        (a, entails(target_theory, expr_map(f, a), bounds, limits)) for a in source_theory.axioms)


def theory_morphism(f, source_theory, target_theory, verify=False, bounds=DEFAULT_BOUNDS,
                    limits=DEFAULT_LIMITS):
    tm = TheoryMorphism(f, source_theory, target_theory)
    return tm.verified(bounds, limits) if verify else tm


# -- maintenance operations -----------------------------------------------------


def theory_sum(named, name=None):
    """Disjoint union of languages with symbols labelled ``index$local``.

    ``named`` is a list of ``(index name, Theory)``.  Returns the sum theory and
    one injection per component, each already verified (its axioms are
    literally present in the sum).
    """
    named = list(named)
    if not named:
        raise WellFormednessError("sum needs at least one theory")
    labels = [n for n, _ in named]
    if len(set(labels)) != len(labels):
        raise WellFormednessError("sum: component names must be distinct")
    for n in labels:
        check_symbol(n, "component")
    sorts, rels = [], {}
    for n, t in named:
        sorts += [qualify(n, s) for s in t.language.sorts]
        for r, ar in t.language.relations:
            rels[qualify(n, r)] = tuple(qualify(n, s) for s in ar)
    sname = name or "+".join(labels)
    lang = Language(sorts, rels, name=f"{sname}-lang")
    injections = []
    axioms = []
    for n, t in named:
        f = LanguageMorphism(
            t.language, lang,
            {s: qualify(n, s) for s in t.language.sorts},
            {r: qualify(n, r) for r in t.language.relation_names},
            name=f"in-{n}")
        axioms += [expr_map(f, a) for a in t.axioms]
        injections.append(f)
    total = Theory(lang, axioms, name=sname)
    legs = []
    for (n, t), f in zip(named, injections):
        verdict = validate_theory_morphism(f, t, total)
        legs.append(TheoryMorphism(f, t, total, verdict))
    return total, legs


def quotient_theory(theory, relation, name=None):
    """Quotient the base language by ``relation`` and move the axioms along the epi."""
    if relation.language != theory.language:
        raise MorphismError(f"endorelation {relation.name} is not based on theory {theory.name}")
    qname = name or f"{theory.name}/{relation.name}"
    qlang, epi = quotient_language(theory.language, relation, name=f"{qname}-lang")
    qt = dir_exists(epi, theory, name=qname)
    return qt, TheoryMorphism(epi, theory, qt, validate_theory_morphism(epi, theory, qt))


def subtheory(theory, indices, name=None):
    """Axioms selected by position in the canonical order, with the inclusion into ``theory``."""
    picked = []
    for i in sorted(set(indices)):
        if not 0 <= i < len(theory.axioms):
            raise WellFormednessError(
                f"axiom index {i} out of range for theory {theory.name} ({len(theory.axioms)} axioms)")
        picked.append(theory.axioms[i])
    sub = Theory(theory.language, picked, name=name or f"{theory.name}-sub")
    inc = identity(theory.language, name=f"inc-{sub.name}")
    return sub, TheoryMorphism(inc, sub, theory, validate_theory_morphism(inc, sub, theory))


def symbol_bijection_maps(t1, t2, h):
    """True when language morphism ``h`` is bijective and carries t1's axioms exactly onto t2's."""
    if h.source != t1.language or h.target != t2.language:
        return False
    if not (h.is_injective() and h.is_surjective()):
        return False
    return dir_exists(h, t1).axioms == t2.axioms
