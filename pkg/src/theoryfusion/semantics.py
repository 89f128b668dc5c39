"""Bounded semantic decision support: finite models, refutations and entailment.

Both procedures are sound and incomplete.  ``find_model`` searches finite
structures with every universe nonempty and at most ``max_size`` elements;
``refute`` Skolemizes, instantiates universals over Herbrand terms up to a
term depth (plus one seed constant per sort) and asks the propositional
solver.  Verdicts combine the two and fall back to ``unknown``.

The model search uses one fact about logic without equality: duplicating an
element of a model yields another model.  So if a model fits in some size
vector, one also fits in every pointwise larger vector, and the search can
fix universe sizes greedily sort by sort.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from . import propositional as prop
from .errors import ResourceLimitError, WellFormednessError
from .syntax import (
    FALSE,
    TRUE,
    Atom,
    Binary,
    Const,
    Not,
    Quant,
    canonical_form,
    free_vars,
    relations_used,
    sorts_used,
    to_sexpr,
    well_formed,
)


@dataclass(frozen=True)
class Bounds:
    max_size: int = 3
    term_depth: int = 1

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if self.term_depth < 0:
            raise ValueError("term_depth must be non-negative")


@dataclass(frozen=True)
class Limits:
    max_ground_atoms: int = 100_000
    max_ground_nodes: int = 2_000_000
    max_herbrand_terms: int = 2_000
    # atom spaces up to 2**exhaustive_bits assignments are scanned by the circuit kernel
    exhaustive_bits: int = 12


DEFAULT_BOUNDS = Bounds()
DEFAULT_LIMITS = Limits()


class Status(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: object = None
    note: str = ""

    @property
    def yes(self):
        return self.status is Status.YES

    @property
    def no(self):
        return self.status is Status.NO

    @property
    def unknown(self):
        return self.status is Status.UNKNOWN

    @property
    def decisive(self):
        return self.status is not Status.UNKNOWN

    def __str__(self):
        return self.status.value


@dataclass(frozen=True)
class AxiomWitness:
    """The queried expression is literally an axiom of the theory."""

    expr: object

    def render(self):
        return f"(axiom {to_sexpr(self.expr)})"


@dataclass(frozen=True)
class BoundReport:
    bounds: Bounds

    def render(self):
        return (f"(bounds-exhausted (max-size {self.bounds.max_size})"
                f" (term-depth {self.bounds.term_depth}))")


class AxiomTuple(tuple):
    """Tuple of canonical axioms that remembers its hash, member set and semantic core."""

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = self.__dict__["_h"] = tuple.__hash__(self)
        return h

    def members(self):
        m = self.__dict__.get("_m")
        if m is None:
            m = self.__dict__["_m"] = frozenset(self)
        return m

    def core(self):
        c = self.__dict__.get("_c")
        if c is None:
            c = self.__dict__["_c"] = semantic_core(self)
        return c


def axiom_tuple(axioms):
    return axioms if isinstance(axioms, AxiomTuple) else AxiomTuple(axioms)


@dataclass(frozen=True)
class _Presentation:
    language: object
    axioms: tuple
    core: tuple = field(default=None, compare=False)


def presentation(language, axioms):
    return _Presentation(language, tuple(axioms))


# -- finite structures -------------------------------------------------------


@dataclass(frozen=True)
class FiniteStructure:
    language: object
    universes: tuple
    relations: tuple

    def __post_init__(self):
        unis = dict(self.universes)
        rels = dict(self.relations)
        lang = self.language
        for s in lang.sorts:
            if not unis.get(s):
                raise WellFormednessError(f"universe of sort {s!r} must be nonempty")
        unis = {s: tuple(unis[s]) for s in lang.sorts}
        ext = {}
        for r, ar in lang.relations:
            tuples = frozenset(tuple(t) for t in rels.get(r, ()))
            for t in tuples:
                if len(t) != len(ar) or any(x not in unis[s] for x, s in zip(t, ar)):
                    raise WellFormednessError(f"tuple {t} does not fit arity of {r}")
            ext[r] = tuples
        object.__setattr__(self, "universes", tuple(sorted(unis.items())))
        object.__setattr__(self, "relations", tuple(sorted(ext.items())))

    def universe(self, s):
        return dict(self.universes)[s]

    def extension(self, r):
        return dict(self.relations)[r]

    def sizes(self):
        return {s: len(u) for s, u in self.universes}

    def render(self):
        lines = ["(structure"]
        for s, u in self.universes:
            lines.append(f"  (universe {s} {' '.join(map(str, u))})")
        for r, tuples in self.relations:
            body = " ".join("(" + " ".join(map(str, t)) + ")" for t in sorted(tuples))
            lines.append(f"  ({r}{' ' + body if body else ''})")
        return "\n".join(lines) + ")"


def evaluate(structure, e):
    """Tarskian truth value of the closed expression ``e`` in ``structure``."""
    try:
        well_formed(structure.language, e)
    except WellFormednessError as exc:
        raise WellFormednessError(f"expression does not fit the structure's language: {exc}") from exc
    unis = dict(structure.universes)
    ext = dict(structure.relations)

    def go(x, env):
        if isinstance(x, Const):
            return x.value
        if isinstance(x, Atom):
            return tuple(env[a] for a in x.args) in ext[x.rel]
        if isinstance(x, Not):
            return not go(x.body, env)
        if isinstance(x, Binary):
            a = go(x.left, env)
            if x.op == "and":
                return a and go(x.right, env)
            if x.op == "or":
                return a or go(x.right, env)
            if x.op == "implies":
                return (not a) or go(x.right, env)
            return a == go(x.right, env)
        names = [v for v, _ in x.binders]
        domains = [unis[s] for _, s in x.binders]
        test = all if x.kind == "forall" else any
        return test(go(x.body, {**env, **dict(zip(names, combo))})
                    for combo in itertools.product(*domains))

    return go(e, {})


# -- simplification shared by both procedures --------------------------------


def fold(e):
    """Fold constants and drop vacuous binders; equivalent over nonempty universes."""
    if isinstance(e, (Const, Atom)):
        return e
    if isinstance(e, Not):
        b = fold(e.body)
        if isinstance(b, Const):
            return FALSE if b.value else TRUE
        if isinstance(b, Not):
            return b.body
        return Not(b)
    if isinstance(e, Binary):
        a, b = fold(e.left), fold(e.right)
        op = e.op
        if isinstance(a, Const) or isinstance(b, Const):
            if op == "and":
                if a == FALSE or b == FALSE:
                    return FALSE
                return b if a == TRUE else a
            if op == "or":
                if a == TRUE or b == TRUE:
                    return TRUE
                return b if a == FALSE else a
            if op == "implies":
                if a == FALSE or b == TRUE:
                    return TRUE
                if a == TRUE:
                    return b
                return fold(Not(a))
            if isinstance(a, Const) and isinstance(b, Const):
                return TRUE if a == b else FALSE
            c, other = (a, b) if isinstance(a, Const) else (b, a)
            return other if c.value else fold(Not(other))
        return Binary(op, a, b)
    body = fold(e.body)
    if isinstance(body, Const):
        return body
    live = free_vars(body)
    binders = tuple((v, s) for v, s in e.binders if v in live)
    if not binders:
        return body
    return Quant(e.kind, binders, body)


@lru_cache(maxsize=100_000)
def _fold_canonical(e):
    return canonical_form(fold(e))


def semantic_core(axioms):
    """Folded, deduplicated axioms without ``true``; ``(false,)`` if any folds to false."""
    out = {}
    for a in axioms:
        f = _fold_canonical(a)
        if f == FALSE:
            return (FALSE,)
        if f != TRUE:
            out[f] = None
    return tuple(sorted(out, key=to_sexpr))


# -- finite grounding --------------------------------------------------------


class AtomSpace:
    """Ground atoms of some relations over fixed universe sizes ``0..n-1``.

    Atoms are numbered relation by relation (name order) and, inside one
    relation, by lexicographic order of the argument tuple.
    """

    def __init__(self, relations, sizes):
        self.relations = tuple(relations)
        self.sizes = dict(sizes)
        self.offset = {}
        self.strides = {}
        n = 0
        for r, ar in self.relations:
            self.offset[r] = n
            strides, acc = [], 1
            for s in reversed(ar):
                strides.append(acc)
                acc *= self.sizes[s]
            self.strides[r] = tuple(reversed(strides))
            n += acc
        self.nbits = n

    @property
    def key(self):
        return (self.relations, tuple(sorted(self.sizes.items())))

    def index(self, rel, elems):
        return self.offset[rel] + sum(e * k for e, k in zip(elems, self.strides[rel]))

    def decode(self, bits):
        ext = {}
        for r, ar in self.relations:
            tuples = itertools.product(*[range(self.sizes[s]) for s in ar])
            base = self.offset[r]
            ext[r] = {t for i, t in enumerate(tuples) if bits[base + i]}
        return ext


def ground_finite(e, space):
    """Propositional formula equivalent to ``e`` over the atom space's universes."""
    counter = [0]

    def go(x, env):
        counter[0] += 1
        if counter[0] > DEFAULT_LIMITS.max_ground_nodes:
            raise ResourceLimitError("finite grounding exceeded node cap")
        if isinstance(x, Const):
            return prop.PTRUE if x.value else prop.PFALSE
        if isinstance(x, Atom):
            return prop.pvar(space.index(x.rel, tuple(env[a] for a in x.args)))
        if isinstance(x, Not):
            return prop.pnot(go(x.body, env))
        if isinstance(x, Binary):
            a, b = go(x.left, env), go(x.right, env)
            if x.op == "and":
                return prop.pand((a, b))
            if x.op == "or":
                return prop.por((a, b))
            if x.op == "implies":
                return prop.por((prop.pnot(a), b))
            return prop.pand((prop.por((prop.pnot(a), b)), prop.por((a, prop.pnot(b)))))
        names = [v for v, _ in x.binders]
        domains = [range(space.sizes[s]) for _, s in x.binders]
        parts = [go(x.body, {**env, **dict(zip(names, combo))})
                 for combo in itertools.product(*domains)]
        return prop.pand(parts) if x.kind == "forall" else prop.por(parts)

    return go(e, {})


@lru_cache(maxsize=50_000)
def _ground_cached(e, space_key):
    return ground_finite(e, AtomSpace(*space_key))


@lru_cache(maxsize=20_000)
def _axiom_table(e, space_key):
    space = AtomSpace(*space_key)
    return prop.truth_table(_ground_cached(e, space_key), space.nbits)


@lru_cache(maxsize=5_000)
def _theory_table(core, space_key):
    space = AtomSpace(*space_key)
    table = np.ones(1 << space.nbits, np.bool_)
    for a in core:
        table &= _axiom_table(a, space_key)
        if not table.any():
            break
    return table


def _least_model_bits(core, space, limits):
    """Least satisfying assignment over ``space`` (numpy 0/1 array) or None."""
    if space.nbits > limits.max_ground_atoms:
        raise ResourceLimitError(f"{space.nbits} ground atoms exceed the cap")
    key = space.key
    if space.nbits <= limits.exhaustive_bits:
        table = _theory_table(core, key)
        hits = np.flatnonzero(table)
        if hits.size == 0:
            return None
        return prop.row_bits(int(hits[0]), space.nbits)
    formulas = [_ground_cached(a, key) for a in core]
    return prop.satisfiable(formulas, space.nbits)


def _signature(language, core):
    rels = set()
    sorts = set()
    for a in core:
        rels |= relations_used(a)
        sorts |= sorts_used(a)
    return tuple(sorted(sorts)), tuple((r, language.arity(r)) for r in sorted(rels))


def find_model(theory, max_size, limits=DEFAULT_LIMITS):
    """First model in enumeration order with every universe of size ``<= max_size``.

    Order: size vectors lexicographically (sorts by name), then relation
    extensions lexicographically over ground atoms, false before true.  Sorts
    and relations absent from the axioms get size 1 and empty extensions,
    which is where the order puts them anyway.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    language = theory.language
    core = getattr(theory, "core", None)
    if core is None or callable(core):
        core = axiom_tuple(theory.axioms).core()
    if core == (FALSE,):
        return None
    sorts, rels = _signature(language, core)

    def probe(sizes):
        return _least_model_bits(core, AtomSpace(rels, sizes), limits)

    sizes = {s: max_size for s in sorts}
    bits = probe(sizes)
    if bits is None:
        return None
    for s in sorts:
        for n in range(1, max_size):
            trial = {**sizes, s: n}
            found = probe(trial)
            if found is not None:
                sizes, bits = trial, found
                break
    space = AtomSpace(rels, sizes)
    ext = space.decode(bits)
    universes = {s: tuple(range(sizes.get(s, 1))) for s in language.sorts}
    return FiniteStructure(language, universes, {r: ext.get(r, ()) for r in language.relation_names})


def ground_in_structure(structure, e):
    """Ground ``e`` over the structure's universes and evaluate it propositionally."""
    well_formed(structure.language, e)
    unis = dict(structure.universes)
    pos = {s: {x: i for i, x in enumerate(u)} for s, u in unis.items()}
    space = AtomSpace(structure.language.relations, {s: len(u) for s, u in unis.items()})
    bits = np.zeros(space.nbits, np.int8)
    for r, tuples in structure.relations:
        ar = structure.language.arity(r)
        for t in tuples:
            bits[space.index(r, tuple(pos[s][x] for x, s in zip(t, ar)))] = 1
    return prop.peval(ground_finite(canonical_form(e), space), bits)


# -- Skolemization and Herbrand grounding --------------------------------------


def _nnf(e, positive=True):
    if isinstance(e, Const):
        return ("T",) if e.value == positive else ("F",)
    if isinstance(e, Atom):
        return ("lit", positive, e.rel, tuple(("var", a) for a in e.args))
    if isinstance(e, Not):
        return _nnf(e.body, not positive)
    if isinstance(e, Binary):
        a, b, op = e.left, e.right, e.op
        if op == "implies":
            return ("or", _nnf(a, False), _nnf(b, True)) if positive else \
                ("and", _nnf(a, True), _nnf(b, False))
        if op == "iff":
            if positive:
                return ("and", ("or", _nnf(a, False), _nnf(b, True)),
                        ("or", _nnf(a, True), _nnf(b, False)))
            return ("and", ("or", _nnf(a, True), _nnf(b, True)),
                    ("or", _nnf(a, False), _nnf(b, False)))
        if (op == "and") == positive:
            return ("and", _nnf(a, positive), _nnf(b, positive))
        return ("or", _nnf(a, positive), _nnf(b, positive))
    universal = (e.kind == "forall") == positive
    out = _nnf(e.body, positive)
    for v, s in reversed(e.binders):
        out = ("all" if universal else "ex", v, s, out)
    return out


def _subst_term(t, sub):
    if t[0] == "var":
        return sub.get(t[1], t)
    return ("fn", t[1], tuple(_subst_term(a, sub) for a in t[2]))


def _skolemize(f, symbols):
    """Replace existentials by Skolem terms; ``symbols`` collects (name, arg sorts, sort)."""

    def go(x, universals, sub):
        tag = x[0]
        if tag in ("T", "F"):
            return x
        if tag == "lit":
            return ("lit", x[1], x[2], tuple(_subst_term(t, sub) for t in x[3]))
        if tag in ("and", "or"):
            return (tag, go(x[1], universals, sub), go(x[2], universals, sub))
        _, v, s, body = x
        if tag == "all":
            return ("all", v, s, go(body, universals + ((v, s),), {k: w for k, w in sub.items() if k != v}))
        name = f"sk{len(symbols) + 1}"
        symbols.append((name, tuple(us for _, us in universals), s))
        term = ("fn", name, tuple(("var", u) for u, _ in universals))
        return go(body, universals, {**sub, v: term})

    return go(f, (), {})


def _render_term(t, env):
    if t[0] == "var":
        return env[t[1]]
    if not t[2]:
        return t[1]
    return f"{t[1]}({','.join(_render_term(a, env) for a in t[2])})"


def _render_skolem(x):
    tag = x[0]
    if tag == "T":
        return "true"
    if tag == "F":
        return "false"
    if tag == "lit":
        env = _IdentityEnv()
        atom = f"({' '.join((x[2],) + tuple(_render_term(t, env) for t in x[3]))})"
        return atom if x[1] else f"(not {atom})"
    if tag in ("and", "or"):
        return f"({tag} {_render_skolem(x[1])} {_render_skolem(x[2])})"
    return f"(forall (({x[1]} {x[2]})) {_render_skolem(x[3])})"


class _IdentityEnv(dict):
    def __missing__(self, key):
        return key


def herbrand_universe(sorts, symbols, term_depth, limits=DEFAULT_LIMITS):
    """Terms per sort: seed and Skolem constants, then function applications up to the depth."""
    terms = {s: {f"@{s}": None} for s in sorts}
    for name, args, s in symbols:
        if not args:
            terms[s][name] = None
    functions = [(n, a, s) for n, a, s in symbols if a]
    for _ in range(term_depth):
        snapshot = {s: list(ts) for s, ts in terms.items()}
        for name, args, s in functions:
            for combo in itertools.product(*[snapshot[a] for a in args]):
                terms[s][f"{name}({','.join(combo)})"] = None
        if sum(len(ts) for ts in terms.values()) > limits.max_herbrand_terms:
            raise ResourceLimitError("Herbrand universe exceeded the term cap")
    return {s: tuple(ts) for s, ts in terms.items()}


def _herbrand_ground(language, axioms, term_depth, limits):
    core = semantic_core(axioms)
    if core == (FALSE,):
        return (), {}, (), (prop.PFALSE,), ()
    symbols = []
    skolemized = [_skolemize(_nnf(a), symbols) for a in core]
    universe = herbrand_universe(language.sorts, symbols, term_depth, limits)
    atoms = {}
    budget = [0]

    def atom_id(name):
        i = atoms.get(name)
        if i is None:
            if len(atoms) >= limits.max_ground_atoms:
                raise ResourceLimitError("Herbrand grounding exceeded the atom cap")
            i = atoms[name] = len(atoms)
        return i

    def go(x, env):
        budget[0] += 1
        if budget[0] > limits.max_ground_nodes:
            raise ResourceLimitError("Herbrand grounding exceeded the node cap")
        tag = x[0]
        if tag == "T":
            return prop.PTRUE
        if tag == "F":
            return prop.PFALSE
        if tag == "lit":
            name = f"{x[2]}({','.join(_render_term(t, env) for t in x[3])})"
            v = prop.pvar(atom_id(name))
            return v if x[1] else prop.pnot(v)
        if tag == "and":
            return prop.pand((go(x[1], env), go(x[2], env)))
        if tag == "or":
            return prop.por((go(x[1], env), go(x[2], env)))
        _, v, s, body = x
        return prop.pand([go(body, {**env, v: t}) for t in universe[s]])

    ground = tuple(go(f, {}) for f in skolemized)
    names = tuple(sorted(atoms, key=atoms.get))
    rendered = tuple(_render_skolem(f) for f in skolemized)
    return tuple(symbols), universe, names, ground, rendered


@dataclass(frozen=True)
class Refutation:
    """Propositionally unsatisfiable Herbrand instances of a theory's Skolem form."""

    language: object
    axioms: tuple
    term_depth: int
    skolem_symbols: tuple
    skolemized: tuple
    universe: tuple
    atoms: tuple
    ground: tuple = field(repr=False)

    def render(self):
        lines = [f"(refutation (term-depth {self.term_depth})"]
        for name, args, s in self.skolem_symbols:
            lines.append(f"  (skolem {name} ({' '.join(args)}) {s})")
        for f in self.skolemized:
            lines.append(f"  (clause-form {f})")
        for s, ts in self.universe:
            lines.append(f"  (terms {s} {' '.join(ts)})")
        for g in self.ground:
            lines.append(f"  (ground {prop.prender(g, self.atoms)})")
        return "\n".join(lines) + ")"


def refute(theory, term_depth, limits=DEFAULT_LIMITS):
    """A :class:`Refutation` when the Herbrand instances are unsatisfiable, else None.

    A refutation proves the theory has no model of any cardinality (with
    nonempty universes).
    """
    if term_depth < 0:
        raise ValueError("term_depth must be non-negative")
    symbols, universe, names, ground, rendered = _herbrand_ground(
        theory.language, tuple(theory.axioms), term_depth, limits)
    if prop.satisfiable(list(ground), len(names)) is not None:
        return None
    return Refutation(theory.language, tuple(theory.axioms), term_depth, symbols, rendered,
                      tuple(sorted(universe.items())), names, ground)


def check_refutation(cert, limits=DEFAULT_LIMITS):
    """Re-derive the ground instances and decide them with an independent solver."""
    symbols, universe, names, ground, _ = _herbrand_ground(
        cert.language, cert.axioms, cert.term_depth, limits)
    if ground != cert.ground or names != cert.atoms:
        return False
    return prop.independently_unsatisfiable(list(cert.ground))


# -- verdicts ------------------------------------------------------------------


@lru_cache(maxsize=50_000)
def _consistent(language, axioms, bounds, limits):
    pres = _Presentation(language, tuple(axioms), axiom_tuple(axioms).core())
    model = find_model(pres, bounds.max_size, limits)
    if model is not None:
        return Verdict(Status.YES, model)
    cert = refute(pres, bounds.term_depth, limits)
    if cert is not None:
        return Verdict(Status.NO, cert)
    return Verdict(Status.UNKNOWN, BoundReport(bounds))


def consistent(theory, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Yes with a model, No with a refutation, otherwise Unknown."""
    return _consistent(theory.language, axiom_tuple(theory.axioms), bounds, limits)


def entails(theory, e, bounds=DEFAULT_BOUNDS, limits=DEFAULT_LIMITS):
    """Yes (refutation of T + not e, or e is an axiom), No (countermodel), or Unknown."""
    well_formed(theory.language, e)
    ce = canonical_form(e)
    axioms = axiom_tuple(theory.axioms)
    if ce in axioms.members():
        return Verdict(Status.YES, AxiomWitness(ce))
    return _entails(theory.language, axioms, ce, bounds, limits)


def _extend_core(core, e):
    extra = semantic_core((e,))
    if core == (FALSE,) or extra == (FALSE,):
        return (FALSE,)
    return tuple(sorted(set(core) | set(extra), key=to_sexpr))


@lru_cache(maxsize=200_000)
def _entails(language, axioms, e, bounds, limits):
    neg = canonical_form(Not(e))
    pres = _Presentation(language, tuple(axioms) + (neg,), _extend_core(axioms.core(), neg))
    model = find_model(pres, bounds.max_size, limits)
    if model is not None:
        return Verdict(Status.NO, model)
    cert = refute(pres, bounds.term_depth, limits)
    if cert is not None:
        return Verdict(Status.YES, cert)
    return Verdict(Status.UNKNOWN, BoundReport(bounds))


def check_witness(verdict, theory, e=None):
    """Re-check the witness of a decisive consistency (``e`` None) or entailment verdict."""
    w = verdict.witness
    if verdict.unknown:
        return isinstance(w, BoundReport)
    if isinstance(w, AxiomWitness):
        return verdict.yes and e is not None and canonical_form(e) in tuple(theory.axioms)
    if isinstance(w, FiniteStructure):
        ok = all(evaluate(w, a) for a in theory.axioms)
        if e is None:
            return verdict.yes and ok
        return verdict.no and ok and not evaluate(w, e)
    if isinstance(w, Refutation):
        expected = tuple(theory.axioms)
        if e is not None:
            expected = expected + (canonical_form(Not(canonical_form(e))),)
        if w.axioms != expected:
            return False
        return (verdict.no if e is None else verdict.yes) and check_refutation(w)
    return False


def clear_caches():
    for fn in (_fold_canonical, _ground_cached, _axiom_table, _theory_table, _consistent, _entails):
        fn.cache_clear()
