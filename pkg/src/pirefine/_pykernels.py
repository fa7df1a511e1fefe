"""Pure-Python evaluation kernels.

Propositional kernels are bit-parallel: the truth table of every node is one
Python int with bit ``v`` set when the node is true under valuation ``v``
(bit ``j`` of ``v`` is the value of variable ``j``).  Model kernels represent
the extension of a node as a bitmask of worlds.

``pirefine._kernels`` implements the same functions with the same
enumeration order; the two must agree bit for bit.
"""

from __future__ import annotations

from itertools import combinations

from ._program import OP_AND, OP_BOT, OP_BOX, OP_DIA, OP_IMP, OP_NOT, OP_OR, OP_TOP, OP_VAR

MAX_TABLE_VARS = 26


def _atom_tables(n_vars: int) -> tuple:
    n = 1 << n_vars
    full = (1 << n) - 1
    tables = []
    for j in range(n_vars):
        block = 1 << j
        unit = ((1 << block) - 1) << block
        tables.append(unit * (full // ((1 << (2 * block)) - 1)))
    return tables, full


def _eval_tables(code: list, atoms: list, full: int) -> list:
    ext = []
    for i in range(0, len(code), 3):
        op, a, b = code[i], code[i + 1], code[i + 2]
        if op == OP_VAR:
            ext.append(atoms[a])
        elif op == OP_TOP:
            ext.append(full)
        elif op == OP_BOT:
            ext.append(0)
        elif op == OP_NOT:
            ext.append(full ^ ext[a])
        elif op == OP_AND:
            ext.append(ext[a] & ext[b])
        elif op == OP_OR:
            ext.append(ext[a] | ext[b])
        elif op == OP_IMP:
            ext.append((full ^ ext[a]) | ext[b])
        else:
            raise ValueError("modal opcode in a propositional program")
    return ext


def pair_tables(code: list, n_vars: int, pairs: list) -> list:
    if n_vars > MAX_TABLE_VARS:
        raise ValueError(f"too many variables for a truth table: {n_vars}")
    atoms, full = _atom_tables(n_vars)
    ext = _eval_tables(code, atoms, full)
    return [full ^ (ext[pairs[i]] ^ ext[pairs[i + 1]]) for i in range(0, len(pairs), 2)]


def first_countervaluation(code: list, n_vars: int, premises: list, conclusion: tuple) -> int:
    tables = pair_tables(code, n_vars, list(premises) + list(conclusion))
    good = (1 << (1 << n_vars)) - 1
    for t in tables[:-1]:
        good &= t
    bad = good & ~tables[-1]
    if not bad:
        return -1
    return (bad & -bad).bit_length() - 1


def _eval_model(code: list, atoms: list, succ: list, n: int, universal: bool) -> list:
    full = (1 << n) - 1
    ext = []
    for i in range(0, len(code), 3):
        op, a, b = code[i], code[i + 1], code[i + 2]
        if op == OP_VAR:
            ext.append(atoms[a])
        elif op == OP_TOP:
            ext.append(full)
        elif op == OP_BOT:
            ext.append(0)
        elif op == OP_NOT:
            ext.append(full ^ ext[a])
        elif op == OP_AND:
            ext.append(ext[a] & ext[b])
        elif op == OP_OR:
            ext.append(ext[a] | ext[b])
        elif op == OP_IMP:
            ext.append((full ^ ext[a]) | ext[b])
        elif op == OP_BOX:
            x = ext[a]
            if universal:
                ext.append(full if x == full else 0)
            else:
                m = 0
                for w in range(n):
                    if not succ[w] & ~x:
                        m |= 1 << w
                ext.append(m)
        elif op == OP_DIA:
            x = ext[a]
            if universal:
                ext.append(full if x else 0)
            else:
                m = 0
                for w in range(n):
                    if succ[w] & x:
                        m |= 1 << w
                ext.append(m)
        else:
            raise ValueError(f"unknown opcode {op}")
    return ext


def _countermodel(ext: list, premises: list, conclusion: tuple, full: int) -> bool:
    for i in range(0, len(premises), 2):
        if ext[premises[i]] != ext[premises[i + 1]]:
            return False
    return ext[conclusion[0]] != ext[conclusion[1]]


def first_countermodel_k(code, n_atoms, max_worlds, premises, conclusion, max_models):
    """Enumerate Kripke models by (worlds, relation bits, valuation bits).

    Relation bit ``i*n + j`` means world i sees world j; valuation bit
    ``w*n_atoms + a`` means atom a holds at world w.  Returns
    ``(status, n_worlds, relation, valuation, tried)`` with status 1 for a
    countermodel, 0 when the bound is exhausted, -1 when ``max_models`` cut
    the search short.
    """
    tried = 0
    for n in range(1, max_worlds + 1):
        full = (1 << n) - 1
        nn, nv = n * n, n * n_atoms
        if nn + nv > 62:
            return (-1, 0, 0, 0, tried)
        for r in range(1 << nn):
            succ = [(r >> (w * n)) & full for w in range(n)]
            for val in range(1 << nv):
                tried += 1
                if tried > max_models:
                    return (-1, 0, 0, 0, tried - 1)
                atoms = [0] * n_atoms
                for w in range(n):
                    for a in range(n_atoms):
                        if (val >> (w * n_atoms + a)) & 1:
                            atoms[a] |= 1 << w
                ext = _eval_model(code, atoms, succ, n, False)
                if _countermodel(ext, premises, conclusion, full):
                    return (1, n, r, val, tried)
    return (0, 0, 0, 0, tried)


def first_countermodel_s5(code, n_atoms, max_worlds, premises, conclusion, max_models):
    """Enumerate universal models as sets of distinct valuations.

    Sets are visited by size, then in lexicographic order of the sorted
    valuation indices.  Returns ``(status, valuations, tried)``.
    """
    tried = 0
    n_vals = 1 << n_atoms
    for k in range(1, min(max_worlds, n_vals, 63) + 1):
        full = (1 << k) - 1
        for combo in combinations(range(n_vals), k):
            tried += 1
            if tried > max_models:
                return (-1, (), tried - 1)
            atoms = [0] * n_atoms
            for w, v in enumerate(combo):
                for a in range(n_atoms):
                    if (v >> a) & 1:
                        atoms[a] |= 1 << w
            ext = _eval_model(code, atoms, None, k, True)
            if _countermodel(ext, premises, conclusion, full):
                return (1, combo, tried)
    return (0, (), tried)
