"""Workspace documents: parenthesized forms for languages, theories, morphisms,
endorelations and diagrams.

::

    (language NAME (sorts S...) (relations (R S...)...))
    (theory NAME (language LNAME) (axioms EXPR...))
    (morphism NAME (source L1) (target L2) (sorts (a b)...) (relations (r s)...))
    (endorelation NAME (language L) (sorts (a b)...) (relations (r s)...))
    (diagram NAME (nodes (n T)...) (edges (e m n f)...))

``;`` starts a line comment.  Printing is canonical: entities grouped by kind,
sorted by name, and every set sorted by its printed text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .alignment import AlignmentSpec
from .diagram import ShapeGraph, TheoryDiagram
from .errors import DiagramError, MorphismError, ParseError, WellFormednessError
from .lattice import Theory, TheoryMorphism
from .morphism import Endorelation, LanguageMorphism
from .sexpr import SList, Sym, read_all, where
from .syntax import SYMBOL_RE, Language, parse_expr, to_sexpr, well_formed

NAME_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.=+/$@-]*\Z")
KINDS = ("language", "theory", "morphism", "endorelation", "diagram")


@dataclass
class Workspace:
    languages: dict = field(default_factory=dict)
    theories: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    endorelations: dict = field(default_factory=dict)
    diagrams: dict = field(default_factory=dict)

    def table(self, kind):
        return {"language": self.languages, "theory": self.theories, "morphism": self.morphisms,
                "endorelation": self.endorelations, "diagram": self.diagrams}[kind]

    def get(self, kind, name):
        try:
            return self.table(kind)[name]
        except KeyError:
            raise ParseError(f"unresolved {kind} {name!r}") from None

    def add(self, entity, name=None):
        """Register ``entity``; an identical redefinition is accepted, a different one is not."""
        kind = kind_of(entity)
        name = name or entity.name
        table = self.table(kind)
        if name in table and not _same(table[name], entity):
            raise ParseError(f"duplicate {kind} name {name!r}")
        table[name] = entity
        return entity

    def update(self, other):
        for kind in KINDS:
            for name, entity in other.table(kind).items():
                self.add(entity, name)
        return self

    def counts(self):
        return {kind: len(self.table(kind)) for kind in KINDS}


def kind_of(entity):
    if isinstance(entity, Language):
        return "language"
    if isinstance(entity, Theory):
        return "theory"
    if isinstance(entity, LanguageMorphism):
        return "morphism"
    if isinstance(entity, Endorelation):
        return "endorelation"
    if isinstance(entity, TheoryDiagram):
        return "diagram"
    raise TypeError(f"not a workspace entity: {type(entity).__name__}")


def _same(a, b):
    return print_canonical(a) == print_canonical(b)


# -- parsing ---------------------------------------------------------------------


def _fail(msg, node):
    raise ParseError(msg, *where(node))


def _sym(node, what):
    if not isinstance(node, Sym):
        _fail(f"expected {what}", node)
    return node.text


def _name(node, what="name"):
    text = _sym(node, what)
    if not NAME_RE.match(text):
        _fail(f"invalid {what} {text!r}", node)
    return text


def _symbol(node, what):
    text = _sym(node, what)
    if not SYMBOL_RE.match(text):
        _fail(f"invalid {what} {text!r}", node)
    return text


def _sections(form, allowed, required):
    out = {}
    for item in form.items[2:]:
        if not isinstance(item, SList) or not item.items or not isinstance(item.items[0], Sym):
            _fail("expected a (section ...) list", item)
        key = item.items[0].text
        if key not in allowed:
            _fail(f"unexpected section {key!r} in {form.items[0].text}", item)
        if key in out:
            _fail(f"repeated section {key!r}", item)
        out[key] = item
    for key in required:
        if key not in out:
            _fail(f"missing section ({key} ...)", form)
    return out


def _single(section, what):
    if len(section.items) != 2:
        _fail(f"({section.items[0].text} ...) takes exactly one {what}", section)
    return _name(section.items[1], what)


def _pairs(section, what):
    out = []
    for item in section.items[1:]:
        if not isinstance(item, SList) or len(item.items) != 2:
            _fail(f"expected ({what} {what}) pair", item)
        out.append((_symbol(item.items[0], what), _symbol(item.items[1], what)))
    return out


def _parse_language(form, name):
    secs = _sections(form, {"sorts", "relations"}, ())
    sorts = []
    if "sorts" in secs:
        for node in secs["sorts"].items[1:]:
            s = _symbol(node, "sort")
            if s in sorts:
                _fail(f"duplicate sort {s!r}", node)
            sorts.append(s)
    rels = []
    seen = set()
    if "relations" in secs:
        for decl in secs["relations"].items[1:]:
            if not isinstance(decl, SList) or not decl.items:
                _fail("expected (relation sort...)", decl)
            r = _symbol(decl.items[0], "relation")
            if r in seen:
                _fail(f"duplicate relation {r!r}", decl)
            seen.add(r)
            arity = []
            for node in decl.items[1:]:
                s = _symbol(node, "sort")
                if s not in sorts:
                    _fail(f"unresolved sort {s!r} in relation {r}", node)
                arity.append(s)
            rels.append((r, tuple(arity)))
    try:
        return Language(sorts, rels, name=name)
    except WellFormednessError as exc:
        _fail(str(exc), form)


def _located(exc_type, msg, node):
    line, col = where(node)
    return exc_type(f"{line}:{col}: {msg}")


def _parse_theory(form, name, ws):
    secs = _sections(form, {"language", "axioms"}, ("language",))
    lang = ws.get("language", _single(secs["language"], "language name"))
    axioms = []
    if "axioms" in secs:
        for node in secs["axioms"].items[1:]:
            e = parse_expr(node)
            try:
                well_formed(lang, e)
            except WellFormednessError as exc:
                raise _located(WellFormednessError, f"axiom of theory {name}: {exc}", node) from None
            axioms.append(e)
    return Theory(lang, axioms, name=name)


def _parse_morphism(form, name, ws):
    secs = _sections(form, {"source", "target", "sorts", "relations"}, ("source", "target"))
    src = ws.get("language", _single(secs["source"], "language name"))
    tgt = ws.get("language", _single(secs["target"], "language name"))
    smap = _pairs(secs["sorts"], "sort") if "sorts" in secs else []
    rmap = _pairs(secs["relations"], "relation") if "relations" in secs else []
    for kind, pairs in (("sort", smap), ("relation", rmap)):
        keys = [a for a, _ in pairs]
        if len(set(keys)) != len(keys):
            _fail(f"morphism {name} maps a {kind} twice", form)
    try:
        return LanguageMorphism(src, tgt, smap, rmap, name=name)
    except MorphismError as exc:
        raise _located(MorphismError, str(exc), form) from None


def _parse_endorelation(form, name, ws):
    secs = _sections(form, {"language", "sorts", "relations"}, ("language",))
    lang = ws.get("language", _single(secs["language"], "language name"))
    sp = _pairs(secs["sorts"], "sort") if "sorts" in secs else []
    rp = _pairs(secs["relations"], "relation") if "relations" in secs else []
    try:
        rel = Endorelation(lang, sp, rp, name=name)
        rel.check_consistent()
    except WellFormednessError as exc:
        raise _located(WellFormednessError, str(exc), form) from None
    return rel


def _parse_diagram(form, name, ws):
    secs = _sections(form, {"nodes", "edges"}, ())
    nodes = {}
    if "nodes" in secs:
        for item in secs["nodes"].items[1:]:
            if not isinstance(item, SList) or len(item.items) != 2:
                _fail("expected (node theory)", item)
            n = _symbol(item.items[0], "node")
            if n in nodes:
                _fail(f"duplicate node {n!r}", item)
            nodes[n] = ws.get("theory", _name(item.items[1], "theory name"))
    edges = {}
    if "edges" in secs:
        for item in secs["edges"].items[1:]:
            if not isinstance(item, SList) or len(item.items) != 4:
                _fail("expected (edge source-node target-node morphism)", item)
            e = _name(item.items[0], "edge")
            m, n = _symbol(item.items[1], "node"), _symbol(item.items[2], "node")
            if e in edges:
                _fail(f"duplicate edge {e!r}", item)
            for x in (m, n):
                if x not in nodes:
                    _fail(f"unresolved node {x!r} in edge {e}", item)
            edges[e] = (m, n, ws.get("morphism", _name(item.items[3], "morphism name")))
    try:
        return TheoryDiagram.build(nodes, edges, name=name)
    except (DiagramError, MorphismError) as exc:
        raise _located(DiagramError, f"diagram {name}: {exc}", form) from None


_PARSERS = {
    "theory": _parse_theory,
    "morphism": _parse_morphism,
    "endorelation": _parse_endorelation,
    "diagram": _parse_diagram,
}


def parse_workspace(text):
    """Parse a document into a :class:`Workspace`; forward references are allowed."""
    forms = {kind: {} for kind in KINDS}
    for form in read_all(text):
        if not isinstance(form, SList) or len(form.items) < 2 or not isinstance(form.items[0], Sym):
            _fail("expected (kind NAME ...)", form)
        kind = form.items[0].text
        if kind not in KINDS:
            _fail(f"unknown form {kind!r}", form)
        name = _name(form.items[1], f"{kind} name")
        if name in forms[kind]:
            _fail(f"duplicate {kind} name {name!r}", form)
        forms[kind][name] = form
    ws = Workspace()
    for name, form in forms["language"].items():
        ws.languages[name] = _parse_language(form, name)
    for kind in ("theory", "morphism", "endorelation", "diagram"):
        for name, form in forms[kind].items():
            try:
                ws.table(kind)[name] = _PARSERS[kind](form, name, ws)
            except ParseError as exc:
                if exc.line is None:
                    raise ParseError(exc.message, *where(form)) from None
                raise
    return ws


def load_workspaces(paths):
    ws = Workspace()
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            ws.update(parse_workspace(fh.read()))
    return ws


def parse_alignment(text, left, right, name="align"):
    """Read ``(alignment (sorts (a b)...) (relations (r s)...) (axioms EXPR...))``."""
    forms = read_all(text)
    if len(forms) != 1 or not isinstance(forms[0], SList) or not forms[0].items \
            or not isinstance(forms[0].items[0], Sym) or forms[0].items[0].text != "alignment":
        raise ParseError("expected a single (alignment ...) form", 1, 1)
    form = forms[0]
    secs = {}
    for item in form.items[1:]:
        if not isinstance(item, SList) or not item.items or not isinstance(item.items[0], Sym):
            _fail("expected a (section ...) list", item)
        key = item.items[0].text
        if key not in ("sorts", "relations", "axioms") or key in secs:
            _fail(f"unexpected section {key!r}", item)
        secs[key] = item
    sp = _pairs(secs["sorts"], "sort") if "sorts" in secs else []
    rp = _pairs(secs["relations"], "relation") if "relations" in secs else []
    axioms = [parse_expr(node) for node in secs["axioms"].items[1:]] if "axioms" in secs else []
    return AlignmentSpec(left, right, sp, rp, axioms, name=name)


# -- printing --------------------------------------------------------------------


def _lines(head, sections):
    body = "\n".join("  " + s for s in sections)
    return f"({head}\n{body})" if sections else f"({head})"


def _pair_list(key, pairs):
    items = sorted(f"({a} {b})" for a, b in pairs)
    return f"({key}{''.join(' ' + x for x in items)})"


def print_canonical(entity):
    """Deterministic text of one entity; references print by name."""
    if isinstance(entity, Language):
        rels = sorted("(" + " ".join((r,) + ar) + ")" for r, ar in entity.relations)
        sorts = "(sorts" + "".join(" " + s for s in entity.sorts) + ")"
        relations = "(relations" + "".join("\n    " + r for r in rels) + ")"
        return _lines(f"language {entity.name}", [sorts, relations])
    if isinstance(entity, Theory):
        axioms = sorted(to_sexpr(a) for a in entity.axioms)
        return _lines(f"theory {entity.name}", [
            f"(language {entity.language.name})",
            "(axioms" + "".join("\n    " + a for a in axioms) + ")",
        ])
    if isinstance(entity, LanguageMorphism):
        return _lines(f"morphism {entity.name}", [
            f"(source {entity.source.name})",
            f"(target {entity.target.name})",
            _pair_list("sorts", entity.sort_map),
            _pair_list("relations", entity.rel_map),
        ])
    if isinstance(entity, Endorelation):
        return _lines(f"endorelation {entity.name}", [
            f"(language {entity.language.name})",
            _pair_list("sorts", entity.sort_pairs),
            _pair_list("relations", entity.rel_pairs),
        ])
    if isinstance(entity, TheoryDiagram):
        nodes = sorted(f"({n} {t.name})" for n, t in entity.theories.items())
        edges = sorted(f"({e} {m} {n} {entity.morphisms[e].underlying.name})"
                       for e, m, n in entity.shape.edges)
        return _lines(f"diagram {entity.name}", [
            "(nodes" + "".join(" " + x for x in nodes) + ")",
            "(edges" + "".join(" " + x for x in edges) + ")",
        ])
    if isinstance(entity, Workspace):
        return print_workspace(entity)
    raise TypeError(f"cannot print {type(entity).__name__}")


def print_workspace(ws):
    blocks = []
    for kind in KINDS:
        table = ws.table(kind)
        for name in sorted(table):
            entity = table[name]
            text = print_canonical(entity)
            if entity.name != name:
                text = text.replace(f"({kind} {entity.name}", f"({kind} {name}", 1)
            blocks.append(text)
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def workspace_of(*entities):
    """Workspace holding ``entities`` and every language, theory and morphism they reference."""
    ws = Workspace()

    def add(x):
        if isinstance(x, Language):
            ws.add(x)
        elif isinstance(x, Theory):
            add(x.language)
            ws.add(x)
        elif isinstance(x, LanguageMorphism):
            add(x.source)
            add(x.target)
            ws.add(x)
        elif isinstance(x, TheoryMorphism):
            add(x.source)
            add(x.target)
            add(x.underlying)
        elif isinstance(x, Endorelation):
            add(x.language)
            ws.add(x)
        elif isinstance(x, TheoryDiagram):
            for t in x.theories.values():
                add(t)
            for tm in x.morphisms.values():
                add(tm.underlying)
            ws.add(x)
        else:
            raise TypeError(f"not a workspace entity: {type(x).__name__}")

    for e in entities:
        add(e)
    return ws
