"""Many-sorted relational languages and their closed first-order expressions.

Expressions are immutable ASTs.  Structural equality of two expressions is
alpha-equivalence only after both went through :func:`canonical_form`, which
renames bound variables to ``v1, v2, ...`` in depth-first binder order.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ParseError, ResourceLimitError, WellFormednessError
from .sexpr import SList, Sym, read_one, where

_SEGMENT = r"[A-Za-z0-9][A-Za-z0-9_=-]*"
SYMBOL_RE = re.compile(rf"{_SEGMENT}(\${_SEGMENT})*\Z")
VARIABLE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")

KEYWORDS = frozenset(
    {"true", "false", "not", "and", "or", "implies", "iff", "forall", "exists"}
)
BINARY_OPS = ("and", "or", "implies", "iff")
QUANTIFIERS = ("forall", "exists")

DEFAULT_ENUMERATION_CAP = 500_000


def check_symbol(name, kind="symbol"):
    if not isinstance(name, str) or not SYMBOL_RE.match(name) or name in KEYWORDS:
        raise WellFormednessError(f"invalid {kind} name {name!r}")
    return name


def qualify(prefix, local):
    """Qualified name ``prefix$local`` used for disjoint unions."""
    return f"{prefix}${local}"


@dataclass(frozen=True)
class Language:
    """Sorts plus relation symbols with sorted arities.

    ``relations`` may be given as a mapping or as ``(name, arity)`` pairs; it is
    stored as a name-sorted tuple so equal signatures compare equal.  ``name``
    is a label only and does not take part in equality.
    """

    sorts: tuple = ()
    relations: tuple = ()
    name: str = field(default="L", compare=False)
    _arity: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        sorts = list(self.sorts)
        if len(set(sorts)) != len(sorts):
            dup = sorted({s for s in sorts if sorts.count(s) > 1})
            raise WellFormednessError(f"duplicate sort {dup[0]!r} in language {self.name}")
        for s in sorts:
            check_symbol(s, "sort")
        rels = self.relations.items() if isinstance(self.relations, Mapping) else self.relations
        arity = {}
        for rname, ar in rels:
            check_symbol(rname, "relation")
            if rname in arity:
                raise WellFormednessError(f"duplicate relation {rname!r} in language {self.name}")
            ar = tuple(ar)
            for s in ar:
                if s not in sorts:
                    raise WellFormednessError(
                        f"unresolved sort {s!r} in arity of relation {rname!r}"
                    )
            arity[rname] = ar
        object.__setattr__(self, "sorts", tuple(sorted(sorts)))
        object.__setattr__(self, "relations", tuple(sorted(arity.items())))
        object.__setattr__(self, "_arity", arity)

    def arity(self, rel):
        return self._arity[rel]

    def has_sort(self, s):
        return s in self.sorts

    def has_relation(self, r):
        return r in self._arity

    @property
    def relation_names(self):
        return tuple(r for r, _ in self.relations)

    def symbol_count(self):
        return len(self.sorts) + len(self.relations)

    def renamed(self, name):
        return Language(self.sorts, self.relations, name=name)


# -- expressions -------------------------------------------------------------


class Expr:
    __slots__ = ()

    def __str__(self):
        return to_sexpr(self)

    def _memo_hash(self):
        # trees are hashed over and over as cache keys; remember the value
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: bool

    __hash__ = Expr._memo_hash

    def __repr__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True, repr=False)
class Atom(Expr):
    rel: str
    args: tuple = ()

    __hash__ = Expr._memo_hash

    def __repr__(self):
        return f"Atom({to_sexpr(self)})"


@dataclass(frozen=True, repr=False)
class Not(Expr):
    body: Expr

    __hash__ = Expr._memo_hash

    def __repr__(self):
        return f"Expr({to_sexpr(self)})"


@dataclass(frozen=True, repr=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    __hash__ = Expr._memo_hash

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise WellFormednessError(f"unknown binary connective {self.op!r}")

    def __repr__(self):
        return f"Expr({to_sexpr(self)})"


@dataclass(frozen=True, repr=False)
class Quant(Expr):
    kind: str
    binders: tuple
    body: Expr

    __hash__ = Expr._memo_hash

    def __post_init__(self):
        if self.kind not in QUANTIFIERS:
            raise WellFormednessError(f"unknown quantifier {self.kind!r}")
        if not self.binders:
            raise WellFormednessError("quantifier without binders")
        object.__setattr__(self, "binders", tuple((v, s) for v, s in self.binders))

    def __repr__(self):
        return f"Expr({to_sexpr(self)})"


TRUE = Const(True)
FALSE = Const(False)


def And(a, b):
    return Binary("and", a, b)


def Or(a, b):
    return Binary("or", a, b)


def Implies(a, b):
    return Binary("implies", a, b)


def Iff(a, b):
    return Binary("iff", a, b)


def Forall(binders, body):
    return Quant("forall", tuple(binders), body)


def Exists(binders, body):
    return Quant("exists", tuple(binders), body)


@lru_cache(maxsize=200_000)
def to_sexpr(e):
    if isinstance(e, Const):
        return "true" if e.value else "false"
    if isinstance(e, Atom):
        return f"({' '.join((e.rel,) + e.args)})"
    if isinstance(e, Not):
        return f"(not {to_sexpr(e.body)})"
    if isinstance(e, Binary):
        return f"({e.op} {to_sexpr(e.left)} {to_sexpr(e.right)})"
    if isinstance(e, Quant):
        bs = " ".join(f"({v} {s})" for v, s in e.binders)
        return f"({e.kind} ({bs}) {to_sexpr(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


def parse_expr(src):
    """Parse an expression from text or from an already-read s-expression."""
    node = read_one(src) if isinstance(src, str) else src
    return _expr_from(node)


def _expr_from(node):
    line, col = where(node)
    if isinstance(node, Sym):
        if node.text == "true":
            return TRUE
        if node.text == "false":
            return FALSE
        raise ParseError(f"unexpected symbol {node.text!r} where an expression was expected", line, col)
    if not node.items:
        raise ParseError("empty expression", line, col)
    head = node.items[0]
    if not isinstance(head, Sym):
        raise ParseError("expression head must be a symbol", line, col)
    h, rest = head.text, node.items[1:]
    if h == "not":
        if len(rest) != 1:
            raise ParseError("not takes exactly one argument", line, col)
        return Not(_expr_from(rest[0]))
    if h in BINARY_OPS:
        if len(rest) != 2:
            raise ParseError(f"{h} takes exactly two arguments", line, col)
        return Binary(h, _expr_from(rest[0]), _expr_from(rest[1]))
    if h in QUANTIFIERS:
        if len(rest) != 2 or not isinstance(rest[0], SList) or not rest[0].items:
            raise ParseError(f"{h} expects a binder list and a body", line, col)
        binders = []
        for b in rest[0].items:
            if not (isinstance(b, SList) and len(b) == 2 and all(isinstance(x, Sym) for x in b)):
                raise ParseError("binder must be (variable sort)", *where(b))
            v, s = b.items[0].text, b.items[1].text
            if not VARIABLE_RE.match(v) or v in KEYWORDS:
                raise ParseError(f"invalid variable name {v!r}", *where(b))
            binders.append((v, s))
        return Quant(h, tuple(binders), _expr_from(rest[1]))
    if h in KEYWORDS:
        raise ParseError(f"misplaced keyword {h!r}", line, col)
    args = []
    for a in rest:
        if not isinstance(a, Sym) or a.text in KEYWORDS or not VARIABLE_RE.match(a.text):
            raise ParseError(f"atom arguments must be variables (in {h})", *where(a))
        args.append(a.text)
    return Atom(h, tuple(args))


# -- structural utilities ----------------------------------------------------


def free_vars(e):
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Atom):
        return frozenset(e.args)
    if isinstance(e, Not):
        return free_vars(e.body)
    if isinstance(e, Binary):
        return free_vars(e.left) | free_vars(e.right)
    return free_vars(e.body) - {v for v, _ in e.binders}


def depth(e):
    """Connective-nesting depth; atoms and constants have depth 0."""
    if isinstance(e, (Const, Atom)):
        return 0
    if isinstance(e, (Not, Quant)):
        return 1 + depth(e.body)
    return 1 + max(depth(e.left), depth(e.right))


def bound_var_count(e):
    if isinstance(e, (Const, Atom)):
        return 0
    if isinstance(e, Not):
        return bound_var_count(e.body)
    if isinstance(e, Binary):
        return bound_var_count(e.left) + bound_var_count(e.right)
    return len(e.binders) + bound_var_count(e.body)


def sorts_used(e):
    if isinstance(e, (Const, Atom)):
        return frozenset()
    if isinstance(e, Not):
        return sorts_used(e.body)
    if isinstance(e, Binary):
        return sorts_used(e.left) | sorts_used(e.right)
    return frozenset(s for _, s in e.binders) | sorts_used(e.body)


def relations_used(e):
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Atom):
        return frozenset([e.rel])
    if isinstance(e, Not):
        return relations_used(e.body)
    if isinstance(e, Binary):
        return relations_used(e.left) | relations_used(e.right)
    return relations_used(e.body)


@lru_cache(maxsize=200_000)
def canonical_form(e):
    """Rename bound variables to v1, v2, ... in depth-first binder order.

    Free variables are left untouched, so the result is only guaranteed to be
    canonical for closed expressions.
    """
    counter = itertools.count(1)

    def go(x, env):
        if isinstance(x, Const):
            return x
        if isinstance(x, Atom):
            return Atom(x.rel, tuple(env.get(a, a) for a in x.args))
        if isinstance(x, Not):
            return Not(go(x.body, env))
        if isinstance(x, Binary):
            left = go(x.left, env)
            return Binary(x.op, left, go(x.right, env))
        inner = dict(env)
        binders = []
        for v, s in x.binders:
            name = f"v{next(counter)}"
            inner[v] = name
            binders.append((name, s))
        return Quant(x.kind, tuple(binders), go(x.body, inner))

    return go(e, {})


def alpha_equal(a, b):
    return canonical_form(a) == canonical_form(b)


def canonical_text(e):
    return to_sexpr(canonical_form(e))


def well_formed(language, e):
    """Return True when ``e`` is a closed, sort-correct expression over ``language``.

    Raises WellFormednessError describing the first violation otherwise.
    """

    def go(x, env):
        if isinstance(x, Const):
            return
        if isinstance(x, Atom):
            if not language.has_relation(x.rel):
                raise WellFormednessError(f"unknown relation {x.rel!r}")
            ar = language.arity(x.rel)
            if len(ar) != len(x.args):
                raise WellFormednessError(
                    f"arity mismatch: {x.rel} expects {len(ar)} arguments, got {len(x.args)}"
                )
            for a, s in zip(x.args, ar):
                if a not in env:
                    raise WellFormednessError(f"free variable {a!r}")
                if env[a] != s:
                    raise WellFormednessError(
                        f"sort mismatch: variable {a!r} has sort {env[a]!r}, {x.rel} expects {s!r}"
                    )
            return
        if isinstance(x, Not):
            return go(x.body, env)
        if isinstance(x, Binary):
            go(x.left, env)
            return go(x.right, env)
        names = [v for v, _ in x.binders]
        if len(set(names)) != len(names):
            raise WellFormednessError(f"duplicate binder in {to_sexpr(x)}")
        inner = dict(env)
        for v, s in x.binders:
            if not language.has_sort(s):
                raise WellFormednessError(f"unknown sort {s!r}")
            inner[v] = s
        go(x.body, inner)

    if not isinstance(e, Expr):
        raise WellFormednessError(f"not an expression: {e!r}")
    go(e, {})
    return True


def is_well_formed(language, e):
    try:
        return well_formed(language, e)
    except WellFormednessError:
        return False


# -- bounded enumeration -----------------------------------------------------


def enumerate_expressions(language, max_depth, max_vars, cap=DEFAULT_ENUMERATION_CAP):
    """All closed well-formed expressions within the depth and variable bounds.

    Depth counts connective nesting (quantifiers included); ``max_vars`` bounds
    the total number of bound variables.  The list is duplicate-free up to
    alpha-equivalence and its order is deterministic.
    """
    if max_depth < 0 or max_vars < 0:
        raise ValueError("bounds must be non-negative")
    sorts = language.sorts
    total = [0]
    memo = {}

    def bump(k):
        total[0] += k
        if total[0] > cap:
            raise ResourceLimitError(f"expression enumeration exceeded cap of {cap}")

    def gen(d, scope, budget):
        key = (d, scope, budget)
        if key in memo:
            return memo[key]
        out = [(TRUE, 0), (FALSE, 0)]
        for rel, ar in language.relations:
            choices = [[i for i, s in enumerate(scope) if s == want] for want in ar]
            for idx in itertools.product(*choices):
                out.append((Atom(rel, tuple(f"x{i + 1}" for i in idx)), 0))
        if d > 0:
            sub = gen(d - 1, scope, budget)
            out.extend((Not(e), u) for e, u in sub)
            for op in BINARY_OPS:
                for a, ua in sub:
                    for b, ub in sub:
                        if ua + ub <= budget:
                            out.append((Binary(op, a, b), ua + ub))
            for kind in QUANTIFIERS:
                for k in range(1, budget + 1):
                    for bsorts in itertools.product(sorts, repeat=k):
                        binders = tuple(
                            (f"x{len(scope) + j + 1}", s) for j, s in enumerate(bsorts)
                        )
                        for body, ub in gen(d - 1, scope + bsorts, budget - k):
                            out.append((Quant(kind, binders, body), k + ub))
        bump(len(out))
        memo[key] = out
        return out

    seen = set()
    result = []
    for e, _ in gen(max_depth, (), max_vars):
        c = canonical_form(e)
        if c not in seen:
            seen.add(c)
            result.append(c)
    return result
