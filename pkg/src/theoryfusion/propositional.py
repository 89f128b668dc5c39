"""Propositional formulas, CNF conversion and the solver interface.

Formulas are tuples: ``PTRUE``, ``PFALSE``, ``("v", i)``, ``("not", f)``,
``("and", (f, ...))`` and ``("or", (f, ...))``.  The smart constructors fold
constants, flatten and drop duplicate children, so the grounders never build
trivially redundant structure.
"""

from __future__ import annotations

import numpy as np

from . import kernels

PTRUE = ("T",)
PFALSE = ("F",)


def pvar(i):
    return ("v", i)


def pnot(f):
    if f is PTRUE or f == PTRUE:
        return PFALSE
    if f is PFALSE or f == PFALSE:
        return PTRUE
    if f[0] == "not":
        return f[1]
    return ("not", f)


def _junction(tag, unit, zero, fs):
    out = {}
    for f in fs:
        if f == unit:
            continue
        if f == zero:
            return zero
        if f[0] == tag:
            for g in f[1]:
                out[g] = None
        else:
            out[f] = None
    if not out:
        return unit
    for f in out:
        if pnot(f) in out:
            return zero
    if len(out) == 1:
        return next(iter(out))
    return (tag, tuple(out))


def pand(fs):
    return _junction("and", PTRUE, PFALSE, fs)


def por(fs):
    return _junction("or", PFALSE, PTRUE, fs)


def peval(f, values):
    """Evaluate under ``values`` (indexable by variable id)."""
    tag = f[0]
    if tag == "T":
        return True
    if tag == "F":
        return False
    if tag == "v":
        return bool(values[f[1]])
    if tag == "not":
        return not peval(f[1], values)
    if tag == "and":
        return all(peval(g, values) for g in f[1])
    return any(peval(g, values) for g in f[1])


def pvars(f, acc=None):
    acc = set() if acc is None else acc
    stack = [f]
    while stack:
        g = stack.pop()
        if g[0] == "v":
            acc.add(g[1])
        elif g[0] == "not":
            stack.append(g[1])
        elif g[0] in ("and", "or"):
            stack.extend(g[1])
    return acc


def prender(f, names=None):
    tag = f[0]
    if tag == "T":
        return "true"
    if tag == "F":
        return "false"
    if tag == "v":
        return names[f[1]] if names is not None else f"p{f[1]}"
    if tag == "not":
        return f"(not {prender(f[1], names)})"
    return f"({tag} {' '.join(prender(g, names) for g in f[1])})"


# -- CNF ---------------------------------------------------------------------


class CNF:
    """Clause store; literals are ``2*v`` (positive) and ``2*v + 1`` (negative)."""

    def __init__(self, nvars):
        self.nvars = nvars
        self.clauses = []
        self.empty = False

    def fresh(self):
        v = self.nvars
        self.nvars += 1
        return v

    def add(self, lits):
        s = set(lits)
        for lit in s:
            if lit ^ 1 in s:
                return
        if not s:
            self.empty = True
        self.clauses.append(sorted(s))

    def extend(self, clauses):
        for c in clauses:
            self.add(c)


def tseitin(formulas, cnf):
    """Assert every formula in ``formulas`` into ``cnf``; atoms keep their ids."""
    memo = {}

    def lit(f):
        tag = f[0]
        if tag == "v":
            return 2 * f[1]
        if tag == "not":
            return lit(f[1]) ^ 1
        key = id(f)
        hit = memo.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        kids = [lit(g) for g in f[1]]
        a = 2 * cnf.fresh()
        if tag == "and":
            for k in kids:
                cnf.add([a ^ 1, k])
            cnf.add([a] + [k ^ 1 for k in kids])
        else:
            cnf.add([a ^ 1] + kids)
            for k in kids:
                cnf.add([a, k ^ 1])
        memo[key] = (f, a)
        return a

    for f in formulas:
        if f == PTRUE:
            continue
        if f == PFALSE:
            cnf.add([])
            continue
        if f[0] == "and":
            tseitin(f[1], cnf)
            continue
        if f[0] == "or" and all(g[0] == "v" or (g[0] == "not" and g[1][0] == "v") for g in f[1]):
            cnf.add([lit(g) for g in f[1]])
            continue
        cnf.add([lit(f)])
    return cnf


def cnf_arrays(cnf):
    """CSR clause arrays plus per-literal occurrence lists for the DPLL kernel."""
    sizes = np.fromiter((len(c) for c in cnf.clauses), np.int64, len(cnf.clauses))
    starts = np.zeros(len(cnf.clauses) + 1, np.int64)
    np.cumsum(sizes, out=starts[1:])
    if cnf.clauses:
        lits = np.fromiter((x for c in cnf.clauses for x in c), np.int64, int(starts[-1]))
    else:
        lits = np.zeros(0, np.int64)
    clause_of = np.repeat(np.arange(len(cnf.clauses), dtype=np.int64), sizes)
    order = np.argsort(lits, kind="stable")
    occ = clause_of[order]
    counts = np.bincount(lits, minlength=2 * cnf.nvars)
    occ_start = np.zeros(2 * cnf.nvars + 1, np.int64)
    np.cumsum(counts, out=occ_start[1:])
    return lits, starts, occ_start, occ


def solve(cnf):
    """Return the least satisfying assignment (numpy 0/1 array) or None."""
    if cnf.empty:
        return None
    if cnf.nvars == 0:
        return np.zeros(0, np.int8)
    sat, value = kernels.dpll(*cnf_arrays(cnf), cnf.nvars)
    return value if sat else None


def satisfiable(formulas, nvars):
    cnf = tseitin(formulas, CNF(nvars))
    model = solve(cnf)
    return None if model is None else model[:nvars]


# -- circuits ----------------------------------------------------------------


def compile_circuit(f):
    """Flatten ``f`` into topologically ordered node arrays; the root is last."""
    ops, arg, kids = [], [], []
    memo = {}

    def node(g):
        key = id(g)
        hit = memo.get(key)
        if hit is not None and hit[0] is g:
            return hit[1]
        tag = g[0]
        if tag == "T":
            ops.append(kernels.OP_TRUE), arg.append(0), kids.append(())
        elif tag == "F":
            ops.append(kernels.OP_FALSE), arg.append(0), kids.append(())
        elif tag == "v":
            ops.append(kernels.OP_VAR), arg.append(g[1]), kids.append(())
        else:
            children = (node(g[1]),) if tag == "not" else tuple(node(h) for h in g[1])
            ops.append({"not": kernels.OP_NOT, "and": kernels.OP_AND, "or": kernels.OP_OR}[tag])
            arg.append(0)
            kids.append(children)
        idx = len(ops) - 1
        memo[key] = (g, idx)
        return idx

    node(f)
    cstart = np.zeros(len(ops) + 1, np.int64)
    np.cumsum([len(k) for k in kids], out=cstart[1:])
    cidx = np.fromiter((c for k in kids for c in k), np.int64, int(cstart[-1]))
    return (np.asarray(ops, np.int8), np.asarray(arg, np.int64), cstart, cidx)


def truth_table(f, nbits):
    """Truth value of ``f`` on every assignment of ``nbits`` variables, in lexicographic order."""
    ops, arg, cstart, cidx = compile_circuit(f)
    return kernels.eval_circuit(ops, arg, cstart, cidx, nbits, 0, 1 << nbits)


def row_bits(row, nbits):
    return np.array([(row >> (nbits - 1 - j)) & 1 for j in range(nbits)], np.int8)


# -- independent check ---------------------------------------------------------


def independently_unsatisfiable(formulas):
    """Decide unsatisfiability with sympy's solver, independent of the DPLL kernel."""
    import sympy
    from sympy.logic.inference import satisfiable as sympy_satisfiable

    cache = {}

    def conv(f):
        tag = f[0]
        if tag == "T":
            return sympy.true
        if tag == "F":
            return sympy.false
        if tag == "v":
            sym = cache.get(f[1])
            if sym is None:
                sym = cache[f[1]] = sympy.Symbol(f"p{f[1]}")
            return sym
        if tag == "not":
            return sympy.Not(conv(f[1]))
        parts = [conv(g) for g in f[1]]
        return sympy.And(*parts) if tag == "and" else sympy.Or(*parts)

    expr = sympy.And(*[conv(f) for f in formulas])
    return sympy_satisfiable(expr) is False
