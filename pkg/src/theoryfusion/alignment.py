"""Alignment spans built from user-supplied type correspondences, and merge.

A correspondence ``(a, b)`` becomes one mediating symbol ``a=b`` with a leg
to ``a`` in the left theory and a leg to ``b`` in the right theory.  Merge is
the fusion of that span.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import TheoryDiagram, classify, theory_fusion
from .errors import WellFormednessError
from .lattice import Theory, validate_theory_morphism
from .morphism import LanguageMorphism
from .semantics import DEFAULT_BOUNDS, DEFAULT_LIMITS
from .syntax import Language, qualify

LEFT, MEDIATOR, RIGHT = "left", "mediator", "right"


def _dedupe(pairs):
    return tuple(dict.fromkeys((str(a), str(b)) for a, b in pairs))


@dataclass(frozen=True)
class AlignmentSpec:
    left: Theory
    right: Theory
    sort_pairs: tuple = ()
    rel_pairs: tuple = ()
    mediating_axioms: tuple = ()
    name: str = field(default="align", compare=False)

    def __post_init__(self):
        sp, rp = _dedupe(self.sort_pairs), _dedupe(self.rel_pairs)
        ll, rl = self.left.language, self.right.language
        for a, b in sp:
            if not ll.has_sort(a):
                raise WellFormednessError(f"alignment: unknown left sort {a!r}")
            if not rl.has_sort(b):
                raise WellFormednessError(f"alignment: unknown right sort {b!r}")
        paired = set(sp)
        for r, s in rp:
            if not ll.has_relation(r):
                raise WellFormednessError(f"alignment: unknown left relation {r!r}")
            if not rl.has_relation(s):
                raise WellFormednessError(f"alignment: unknown right relation {s!r}")
            ar, br = ll.arity(r), rl.arity(s)
            if len(ar) != len(br) or any(p not in paired for p in zip(ar, br)):
                raise WellFormednessError(
                    f"alignment: arity mismatch between paired relations {r} and {s}")
        object.__setattr__(self, "sort_pairs", sp)
        object.__setattr__(self, "rel_pairs", rp)
        object.__setattr__(self, "mediating_axioms", tuple(self.mediating_axioms))


def _joined(a, b):
    return f"{a}={b}"


def mediating_language(spec):
    ll = spec.left.language
    rl = spec.right.language
    sorts = [_joined(a, b) for a, b in spec.sort_pairs]
    rels = {_joined(r, s): tuple(_joined(x, y) for x, y in zip(ll.arity(r), rl.arity(s)))
            for r, s in spec.rel_pairs}
    return Language(sorts, rels, name=f"{spec.name}-mediating-lang")


def build_span(spec):
    """Span ``left <- mediator -> right`` realizing the correspondences."""
    mlang = mediating_language(spec)
    mediator = Theory(mlang, spec.mediating_axioms, name=f"{spec.name}-mediating")
    to_left = LanguageMorphism(
        mlang, spec.left.language,
        {_joined(a, b): a for a, b in spec.sort_pairs},
        {_joined(r, s): r for r, s in spec.rel_pairs},
        name=f"{spec.name}-to-left")
    to_right = LanguageMorphism(
        mlang, spec.right.language,
        {_joined(a, b): b for a, b in spec.sort_pairs},
        {_joined(r, s): s for r, s in spec.rel_pairs},
        name=f"{spec.name}-to-right")
    diagram = TheoryDiagram.build(
        {LEFT: spec.left, MEDIATOR: mediator, RIGHT: spec.right},
        {"to-left": (MEDIATOR, LEFT, to_left), "to-right": (MEDIATOR, RIGHT, to_right)},
        name=spec.name)
    if not spec.mediating_axioms:
        return diagram.verified()
    return diagram


@dataclass(frozen=True)
class MergeResult:
    theory: Theory
    cocone: object
    classification: object
    provenance: tuple
    span: TheoryDiagram

    def provenance_table(self):
        return "\n".join(f"{fused} <- {' '.join(members)}" for fused, members in self.provenance)


def provenance(cocone):
    """``(fused symbol, qualified contributing symbols)`` for every fused symbol."""
    groups = {}
    for n, f in sorted(cocone.language_legs().items()):
        for s, t in f.sort_map:
            groups.setdefault(t, []).append(qualify(n, s))
        for r, t in f.rel_map:
            groups.setdefault(t, []).append(qualify(n, r))
    return tuple((k, tuple(sorted(v))) for k, v in sorted(groups.items()))


def merge(spec, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS, name=None):
    """Alignment followed by unification: fuse the span and classify it."""
    span = build_span(spec)
    fused, cocone = theory_fusion(span, bounds=bounds, limits=limits,
                                  name=name or f"{spec.name}-merged")
    return MergeResult(fused, cocone, classify(span, bounds, limits), provenance(cocone), span)


def leg_verdicts(spec, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Validation verdicts of both span legs (must never be No for a sound alignment)."""
    span = build_span(spec)
    return {e: validate_theory_morphism(tm.underlying, tm.source, tm.target, bounds, limits)
            for e, tm in sorted(span.morphisms.items())}
