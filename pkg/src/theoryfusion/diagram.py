"""Diagrams of languages and theories, cocones and the fusion (colimit) construction.

Fusing a theory diagram runs four steps in order:

1. take the base diagram of languages;
2. fuse it: disjoint union with node-qualified names ``node$local``, then
   merge every symbol with its image along every edge (union-find; a class
   is named by its least member);
3. move each node theory along its cocone leg (direct image);
4. take the meet (axiom union) of the moved theories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import DiagramError, MorphismError
from .lattice import Theory, TheoryMorphism, dir_exists, meet, quotient_theory, theory_sum, validate_theory_morphism
from .morphism import Endorelation, LanguageMorphism, UnionFind, compose
from .semantics import DEFAULT_BOUNDS, DEFAULT_LIMITS, Status, consistent
from .syntax import Language, check_symbol, qualify


@dataclass(frozen=True)
class ShapeGraph:
    nodes: tuple = ()
    edges: tuple = ()

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise DiagramError("duplicate node name in shape graph")
        for n in nodes:
            check_symbol(n, "node")
        edges = tuple((e, m, n) for e, m, n in self.edges)
        names = [e for e, _, _ in edges]
        if len(set(names)) != len(names):
            raise DiagramError("duplicate edge name in shape graph")
        for e, m, n in edges:
            if m not in nodes or n not in nodes:
                raise DiagramError(f"edge {e} has an undeclared endpoint")
        object.__setattr__(self, "nodes", tuple(sorted(nodes)))
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    def endpoints(self, edge):
        for e, m, n in self.edges:
            if e == edge:
                return m, n
        raise DiagramError(f"unknown edge {edge}")


@dataclass(frozen=True)
class LanguageDiagram:
    shape: ShapeGraph
    languages: dict
    morphisms: dict
    name: str = field(default="D", compare=False)

    def __post_init__(self):
        if set(self.languages) != set(self.shape.nodes):
            raise DiagramError(f"diagram {self.name}: every node needs exactly one language")
        if set(self.morphisms) != {e for e, _, _ in self.shape.edges}:
            raise DiagramError(f"diagram {self.name}: every edge needs exactly one morphism")
        for e, m, n in self.shape.edges:
            f = self.morphisms[e]
            if f.source != self.languages[m] or f.target != self.languages[n]:
                raise DiagramError(f"diagram {self.name}: morphism on edge {e} does not match its endpoints")


@dataclass(frozen=True)
class TheoryDiagram:
    shape: ShapeGraph
    theories: dict
    morphisms: dict
    name: str = field(default="D", compare=False)

    def __post_init__(self):
        if set(self.theories) != set(self.shape.nodes):
            raise DiagramError(f"diagram {self.name}: every node needs exactly one theory")
        if set(self.morphisms) != {e for e, _, _ in self.shape.edges}:
            raise DiagramError(f"diagram {self.name}: every edge needs exactly one morphism")
        for e, m, n in self.shape.edges:
            tm = self.morphisms[e]
            if tm.source != self.theories[m] or tm.target != self.theories[n]:
                raise DiagramError(f"diagram {self.name}: theory morphism on edge {e} does not match its endpoints")

    @classmethod
    def build(cls, nodes, edges, name="D"):
        """``nodes``: node -> Theory; ``edges``: edge -> (m, n, LanguageMorphism)."""
        shape = ShapeGraph(tuple(nodes), tuple((e, m, n) for e, (m, n, _) in edges.items()))
        morphisms = {e: TheoryMorphism(f, nodes[m], nodes[n]) for e, (m, n, f) in edges.items()}
        return cls(shape, dict(nodes), morphisms, name=name)

    def verified(self, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
        """Copy whose edge morphisms all carry a validation verdict."""
        morphisms = {e: tm.verified(bounds, limits) for e, tm in self.morphisms.items()}
        return TheoryDiagram(self.shape, self.theories, morphisms, name=self.name)

    def edge_verdicts(self):
        return {e: tm.verdict for e, tm in sorted(self.morphisms.items())}


def _language_morphism(m):
    return m.underlying if isinstance(m, TheoryMorphism) else m


def _edge_language_morphism(diagram, e):
    return _language_morphism(diagram.morphisms[e])


@dataclass(frozen=True)
class Cocone:
    """Legs ``node -> morphism into apex`` over a language or theory diagram."""

    diagram: object
    apex: object
    legs: dict

    def language_legs(self):
        return {n: _language_morphism(m) for n, m in self.legs.items()}

    def base(self):
        apex = self.apex.language if isinstance(self.apex, Theory) else self.apex
        diagram = self.diagram if isinstance(self.diagram, LanguageDiagram) else base(self.diagram)
        return Cocone(diagram, apex, self.language_legs())

    def violations(self):
        """Edges ``e: m -> n`` where ``leg(m) != compose(edge(e), leg(n))``."""
        legs = self.language_legs()
        bad = []
        for e, m, n in self.diagram.shape.edges:
            f = _edge_language_morphism(self.diagram, e)
            try:
                ok = compose(f, legs[n]) == legs[m]
            except MorphismError:
                ok = False
            if not ok:
                bad.append(e)
        return bad

    def check(self):
        bad = self.violations()
        if bad:
            raise DiagramError(f"cocone fails the commuting law on edges {', '.join(bad)}")
        return True


def base(diagram):
    """Underlying diagram of languages with the same shape."""
    return LanguageDiagram(
        diagram.shape,
        {n: t.language for n, t in diagram.theories.items()},
        {e: tm.underlying for e, tm in diagram.morphisms.items()},
        name=diagram.name,
    )


def language_fusion(ldiagram, name=None):
    """Colimit of a language diagram: qualified coproduct modulo edge identifications."""
    sorts = UnionFind()
    rels = UnionFind()
    arity = {}
    for n in ldiagram.shape.nodes:
        lang = ldiagram.languages[n]
        for s in lang.sorts:
            sorts.add(qualify(n, s))
        for r, ar in lang.relations:
            rels.add(qualify(n, r))
            arity[qualify(n, r)] = tuple(qualify(n, s) for s in ar)
    for e, m, n in ldiagram.shape.edges:
        f = ldiagram.morphisms[e]
        for s, t in f.sort_map:
            sorts.union(qualify(m, s), qualify(n, t))
        for r, t in f.rel_map:
            rels.union(qualify(m, r), qualify(n, t))
    fused_rels = {}
    for q, ar in sorted(arity.items()):
        rep = rels.find(q)
        shape = tuple(sorts.find(s) for s in ar)
        if fused_rels.setdefault(rep, shape) != shape:
            raise DiagramError(f"relation class {rep} has inconsistent arities after merging")
    fused_sorts = sorted({sorts.find(s) for s in sorts.parent})
    lname = name or f"{ldiagram.name}-fusion-lang"
    apex = Language(fused_sorts, fused_rels, name=lname)
    legs = {}
    for n in ldiagram.shape.nodes:
        lang = ldiagram.languages[n]
        legs[n] = LanguageMorphism(
            lang, apex,
            {s: sorts.find(qualify(n, s)) for s in lang.sorts},
            {r: rels.find(qualify(n, r)) for r in lang.relation_names},
            name=f"{lname}-leg-{n}")
    cocone = Cocone(ldiagram, apex, legs)
    cocone.check()
    return apex, cocone


def move_along_cocone(diagram, lcocone):
    """Direct image of each node theory along its leg: a homogeneous family over the apex."""
    legs = lcocone.language_legs()
    if set(legs) != set(diagram.shape.nodes):
        raise DiagramError("cocone legs do not match the diagram's nodes")
    return {n: dir_exists(legs[n], diagram.theories[n], name=f"{diagram.theories[n].name}@{n}")
            for n in diagram.shape.nodes}


def theory_fusion(diagram, verify=False, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS, name=None):
    """Fusion theory of ``diagram`` and the theory cocone whose base is the language fusion cocone.

    With ``verify`` every edge morphism is validated first and a ``No``
    verdict aborts the construction.
    """
    if verify:
        diagram = diagram.verified(bounds, limits)
        failed = [e for e, v in diagram.edge_verdicts().items() if v.no]
        if failed:
            raise DiagramError(f"edge morphisms fail validation: {', '.join(failed)}")
    tname = name or f"{diagram.name}-fusion"
    ldiagram = base(diagram)
    apex_lang, lcocone = language_fusion(ldiagram, name=f"{tname}-lang")
    moved = move_along_cocone(diagram, lcocone)
    if moved:
        fused = meet([moved[n] for n in diagram.shape.nodes], name=tname)
    else:
        fused = Theory(apex_lang, (), name=tname)
    legs = {}
    for n, f in lcocone.legs.items():
        src = diagram.theories[n]
        legs[n] = TheoryMorphism(f, src, fused, validate_theory_morphism(f, src, fused, bounds, limits))
    return fused, Cocone(diagram, fused, legs)


def factorize(lcocone, other):
    """The unique morphism ``h`` from the fusion apex with ``compose(leg(n), h) == other.leg(n)``."""
    diagram = lcocone.diagram
    odiag = other.diagram if isinstance(other.diagram, LanguageDiagram) else base(other.diagram)
    if odiag.shape != diagram.shape or odiag.languages != diagram.languages:
        raise DiagramError("cocones are over different diagrams")
    if odiag.morphisms != diagram.morphisms:
        raise DiagramError("cocones are over different diagrams")
    other = Cocone(odiag, other.apex.language if isinstance(other.apex, Theory) else other.apex,
                   other.language_legs())
    other.check()
    legs = lcocone.language_legs()
    hs, hr = {}, {}
    for n in diagram.shape.nodes:
        f, g = legs[n], other.legs[n]
        for s, cls in f.sort_map:
            if hs.setdefault(cls, g.sort(s)) != g.sort(s):
                raise DiagramError(f"internal error: sort class {cls} has two images")
        for r, cls in f.rel_map:
            if hr.setdefault(cls, g.rel(r)) != g.rel(r):
                raise DiagramError(f"internal error: relation class {cls} has two images")
    return LanguageMorphism(lcocone.apex, other.apex, hs, hr, name="factor")


# -- classification --------------------------------------------------------------


class Cosmos(str, Enum):
    MONOCOSMIC = "monocosmic"
    POLYCOSMIC = "polycosmic"
    POINTWISE_INCONSISTENT = "pointwise-inconsistent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Classification:
    kind: Cosmos
    fusion: object
    nodes: tuple

    def __str__(self):
        return self.kind.value


def classify(diagram, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Monocosmic, polycosmic, pointwise inconsistent or unknown under the bounds."""
    fused, cocone = theory_fusion(diagram, bounds=bounds, limits=limits)
    moved = move_along_cocone(diagram, cocone.base())
    fusion_verdict = consistent(fused, bounds, limits)
    node_verdicts = tuple((n, consistent(moved[n], bounds, limits)) for n in diagram.shape.nodes)
    statuses = [v.status for _, v in node_verdicts]
    if fusion_verdict.yes:
        kind = Cosmos.MONOCOSMIC
    elif fusion_verdict.no and all(s is Status.YES for s in statuses):
        kind = Cosmos.POLYCOSMIC
    elif Status.NO in statuses:
        kind = Cosmos.POINTWISE_INCONSISTENT
    else:
        kind = Cosmos.UNKNOWN
    return Classification(kind, fusion_verdict, node_verdicts)


# -- diagram maintenance -----------------------------------------------------------


def empty_diagram(name="empty"):
    return TheoryDiagram(ShapeGraph(), {}, {}, name=name)


def single_node(node, theory, name=None):
    return TheoryDiagram(ShapeGraph((node,)), {node: theory}, {}, name=name or f"{theory.name}-diagram")


def diagram_sum(d1, d2, name=None):
    """Disjoint union of shapes; node and edge names must not collide."""
    clash = set(d1.shape.nodes) & set(d2.shape.nodes)
    eclash = {e for e, _, _ in d1.shape.edges} & {e for e, _, _ in d2.shape.edges}
    if clash or eclash:
        raise DiagramError(f"diagram sum needs disjoint names; shared: {', '.join(sorted(clash | eclash))}")
    shape = ShapeGraph(d1.shape.nodes + d2.shape.nodes, d1.shape.edges + d2.shape.edges)
    return TheoryDiagram(shape, {**d1.theories, **d2.theories}, {**d1.morphisms, **d2.morphisms},
                         name=name or f"{d1.name}+{d2.name}")


def remove_node(diagram, node, name=None):
    if node not in diagram.shape.nodes:
        raise DiagramError(f"unknown node {node}")
    edges = tuple(x for x in diagram.shape.edges if node not in (x[1], x[2]))
    keep = {e for e, _, _ in edges}
    return TheoryDiagram(
        ShapeGraph(tuple(n for n in diagram.shape.nodes if n != node), edges),
        {n: t for n, t in diagram.theories.items() if n != node},
        {e: tm for e, tm in diagram.morphisms.items() if e in keep},
        name=name or diagram.name)


def span_parts(diagram):
    """``(apex, ((edge, foot), (edge, foot)))`` when the shape is a span, else DiagramError."""
    shape = diagram.shape
    if len(shape.nodes) != 3 or len(shape.edges) != 2:
        raise DiagramError("pushout needs a span: three nodes and two edges")
    (e1, a1, f1), (e2, a2, f2) = shape.edges
    if a1 != a2 or f1 == f2 or a1 in (f1, f2):
        raise DiagramError("pushout needs a span: both edges must leave one apex towards distinct feet")
    return a1, ((e1, f1), (e2, f2))


def pushout(span, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS, name=None):
    span_parts(span)
    return theory_fusion(span, bounds=bounds, limits=limits, name=name)


def pushout_by_sum_quotient(span, name=None):
    """Same colimit computed as a quotient of the sum of all components.

    Each apex symbol is identified with its images in both feet.
    """
    apex, _ = span_parts(span)
    nodes = span.shape.nodes
    total, injections = theory_sum([(n, span.theories[n]) for n in nodes],
                                   name=name or f"{span.name}-sum")
    inj = {n: tm.underlying for n, tm in zip(nodes, injections)}
    sp, rp = [], []
    for e, m, n in span.shape.edges:
        f = span.morphisms[e].underlying
        sp += [(qualify(m, s), qualify(n, t)) for s, t in f.sort_map]
        rp += [(qualify(m, r), qualify(n, t)) for r, t in f.rel_map]
    relation = Endorelation(total.language, sp, rp, name="glue")
    quotient, epi = quotient_theory(total, relation, name=name or f"{span.name}-pushout")
    legs = {n: TheoryMorphism(compose(inj[n], epi.underlying), span.theories[n], quotient)
            for n in nodes}
    return quotient, Cocone(span, quotient, legs)
