"""Array kernels behind the model finder and the refutation procedure.

Two kernels do the bulk of the numeric work:

* :func:`dpll` decides a CNF given in CSR form and, for satisfiable input,
  returns the lexicographically least model over variable order 0, 1, ...
  (false before true).  Only unit propagation prunes the search, so the
  first complete assignment reached is that least model.
* :func:`eval_circuit` evaluates a propositional circuit on a contiguous
  block of assignments ``lo..hi-1``; assignment ``r`` gives variable ``j``
  the bit ``(r >> (nbits - 1 - j)) & 1``, so row order is lexicographic.

Each kernel exists as plain numpy/python code and, when numba is available,
as an ``@njit`` build of the same source.  ``THEORYFUSION_JIT`` selects the
backend at import time: ``0``/``numpy`` forces the fallback, ``1``/``numba``
requires numba, ``auto`` (default) uses numba when it imports.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

OP_FALSE, OP_TRUE, OP_VAR, OP_NOT, OP_AND, OP_OR = range(6)


def _dpll_impl(lits, starts, occ_start, occ, nvars):
    m = starts.shape[0] - 1
    value = np.full(nvars, -1, np.int8)
    nsat = np.zeros(m, np.int64)
    nfalse = np.zeros(m, np.int64)
    trail = np.empty(nvars + 1, np.int64)
    dec_pos = np.zeros(nvars + 1, np.int64)
    dec_var = np.zeros(nvars + 1, np.int64)
    dec_flipped = np.zeros(nvars + 1, np.bool_)
    tlen = 0
    qhead = 0
    level = 0

    for c in range(m):
        if starts[c + 1] == starts[c]:
            return False, value
    for c in range(m):
        if starts[c + 1] - starts[c] == 1:
            lit = lits[starts[c]]
            v = lit >> 1
            want = 1 - (lit & 1)
            if value[v] == -1:
                value[v] = want
                trail[tlen] = lit
                tlen += 1
            elif value[v] != want:
                return False, value

    conflict = False
    while True:
        while qhead < tlen:
            lit = trail[qhead]
            qhead += 1
            for k in range(occ_start[lit], occ_start[lit + 1]):
                nsat[occ[k]] += 1
            nlit = lit ^ 1
            for k in range(occ_start[nlit], occ_start[nlit + 1]):
                c = occ[k]
                nfalse[c] += 1
                if conflict or nsat[c] > 0:
                    continue
                if nfalse[c] < starts[c + 1] - starts[c] - 1:
                    continue
                n_open = 0
                last_open = -1
                satisfied = False
                for j in range(starts[c], starts[c + 1]):
                    lj = lits[j]
                    vj = value[lj >> 1]
                    if vj == -1:
                        n_open += 1
                        last_open = lj
                    elif vj == 1 - (lj & 1):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if n_open == 0:
                    conflict = True
                elif n_open == 1:
                    value[last_open >> 1] = 1 - (last_open & 1)
                    trail[tlen] = last_open
                    tlen += 1
            if conflict:
                break

        if conflict:
            while level > 0 and dec_flipped[level]:
                level -= 1
            if level == 0:
                return False, value
            stop = dec_pos[level]
            for i in range(tlen - 1, stop - 1, -1):
                lit = trail[i]
                if i < qhead:
                    for k in range(occ_start[lit], occ_start[lit + 1]):
                        nsat[occ[k]] -= 1
                    nlit = lit ^ 1
                    for k in range(occ_start[nlit], occ_start[nlit + 1]):
                        nfalse[occ[k]] -= 1
                value[lit >> 1] = -1
            tlen = stop
            qhead = stop
            v = dec_var[level]
            dec_flipped[level] = True
            value[v] = 1
            trail[tlen] = 2 * v
            tlen += 1
            conflict = False
            continue

        v = -1
        for u in range(nvars):
            if value[u] == -1:
                v = u
                break
        if v == -1:
            return True, value
        level += 1
        dec_pos[level] = tlen
        dec_var[level] = v
        dec_flipped[level] = False
        value[v] = 0
        trail[tlen] = 2 * v + 1
        tlen += 1


def _eval_circuit_numpy(ops, arg, cstart, cidx, nbits, lo, hi):
    rows = np.arange(lo, hi, dtype=np.int64)
    vals = np.empty((ops.shape[0], rows.shape[0]), np.bool_)
    for i in range(ops.shape[0]):
        op = ops[i]
        if op == OP_FALSE:
            vals[i] = False
        elif op == OP_TRUE:
            vals[i] = True
        elif op == OP_VAR:
            vals[i] = ((rows >> (nbits - 1 - arg[i])) & 1).astype(np.bool_)
        elif op == OP_NOT:
            vals[i] = ~vals[cidx[cstart[i]]]
        elif op == OP_AND:
            vals[i] = np.logical_and.reduce(vals[cidx[cstart[i]:cstart[i + 1]]], axis=0)
        else:
            vals[i] = np.logical_or.reduce(vals[cidx[cstart[i]:cstart[i + 1]]], axis=0)
    return vals[-1].copy()


def _eval_circuit_loops(ops, arg, cstart, cidx, nbits, lo, hi):
    n = ops.shape[0]
    out = np.empty(hi - lo, np.bool_)
    vals = np.empty(n, np.bool_)
    for r in range(lo, hi):
        for i in range(n):
            op = ops[i]
            if op == OP_FALSE:
                vals[i] = False
            elif op == OP_TRUE:
                vals[i] = True
            elif op == OP_VAR:
                vals[i] = ((r >> (nbits - 1 - arg[i])) & 1) == 1
            elif op == OP_NOT:
                vals[i] = not vals[cidx[cstart[i]]]
            elif op == OP_AND:
                acc = True
                for k in range(cstart[i], cstart[i + 1]):
                    if not vals[cidx[k]]:
                        acc = False
                        break
                vals[i] = acc
            else:
                acc = False
                for k in range(cstart[i], cstart[i + 1]):
                    if vals[cidx[k]]:
                        acc = True
                        break
                vals[i] = acc
        out[r - lo] = vals[n - 1]
    return out


_IMPLS = {"numpy": {"dpll": _dpll_impl, "eval_circuit": _eval_circuit_numpy}}
if numba is not None:
    _IMPLS["numba"] = {
        "dpll": numba.njit(cache=True)(_dpll_impl),
        "eval_circuit": numba.njit(cache=True)(_eval_circuit_loops),
    }


def _initial_backend():
    flag = os.environ.get("THEORYFUSION_JIT", "auto").strip().lower()
    if flag in ("0", "numpy", "off", "false", "no"):
        return "numpy"
    if flag in ("1", "numba", "on", "true", "yes"):
        if numba is None:
            raise ImportError("THEORYFUSION_JIT requests numba but numba is not installed")
        return "numba"
    return "numba" if numba is not None else "numpy"


_backend = _initial_backend()


def available_backends():
    return tuple(sorted(_IMPLS))


def get_backend():
    return _backend


def set_backend(name):
    """Switch kernel backend at runtime; returns the previous one."""
    global _backend
    if name not in _IMPLS:
        raise ValueError(f"unknown or unavailable backend {name!r}")
    prev, _backend = _backend, name
    return prev


def dpll(lits, starts, occ_start, occ, nvars):
    """Return ``(satisfiable, values)`` where values are 0/1 (-1 only when unsat)."""
    sat, value = _IMPLS[_backend]["dpll"](lits, starts, occ_start, occ, nvars)
    return bool(sat), value


def eval_circuit(ops, arg, cstart, cidx, nbits, lo, hi):
    return _IMPLS[_backend]["eval_circuit"](ops, arg, cstart, cidx, nbits, lo, hi)
