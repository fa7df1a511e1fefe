# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels; same contract as ``pirefine._pykernels``."""

import sys

from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc
from cpython.bytes cimport PyBytes_FromStringAndSize

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    OP_VAR = 0
    OP_TOP = 1
    OP_BOT = 2
    OP_NOT = 3
    OP_AND = 4
    OP_OR = 5
    OP_IMP = 6
    OP_BOX = 7
    OP_DIA = 8

MAX_TABLE_VARS = 26

cdef uint64_t ALL = <uint64_t>0xFFFFFFFFFFFFFFFF
cdef uint64_t PAT[6]
PAT[0] = <uint64_t>0xAAAAAAAAAAAAAAAA
PAT[1] = <uint64_t>0xCCCCCCCCCCCCCCCC
PAT[2] = <uint64_t>0xF0F0F0F0F0F0F0F0
PAT[3] = <uint64_t>0xFF00FF00FF00FF00
PAT[4] = <uint64_t>0xFFFF0000FFFF0000
PAT[5] = <uint64_t>0xFFFFFFFF00000000


cdef int* _ints(object xs) except NULL:
    cdef Py_ssize_t n = len(xs), i
    cdef int* out = <int*>malloc((n if n > 0 else 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = xs[i]
    return out


cdef int _check_propositional(const int* code, int n_nodes) except -1:
    cdef int i
    for i in range(n_nodes):
        if code[3 * i] == OP_BOX or code[3 * i] == OP_DIA:
            raise ValueError("modal opcode in a propositional program")
    return 0


cdef inline void _eval_words(const int* code, int n_nodes, const uint64_t* atoms,
                             uint64_t* ext) noexcept nogil:
    cdef int i, op, a, b
    for i in range(n_nodes):
        op = code[3 * i]
        a = code[3 * i + 1]
        b = code[3 * i + 2]
        if op == OP_VAR:
            ext[i] = atoms[a]
        elif op == OP_TOP:
            ext[i] = ALL
        elif op == OP_BOT:
            ext[i] = 0
        elif op == OP_NOT:
            ext[i] = ~ext[a]
        elif op == OP_AND:
            ext[i] = ext[a] & ext[b]
        elif op == OP_OR:
            ext[i] = ext[a] | ext[b]
        else:
            ext[i] = (~ext[a]) | ext[b]


cdef inline void _load_chunk(uint64_t base, int n_vars, uint64_t* atoms) noexcept nogil:
    cdef int j
    for j in range(n_vars):
        if j < 6:
            atoms[j] = PAT[j]
        elif (base >> j) & 1:
            atoms[j] = ALL
        else:
            atoms[j] = 0


def first_countervaluation(list code, int n_vars, list premises, tuple conclusion):
    if n_vars > 40:
        raise ValueError(f"too many variables for a truth table: {n_vars}")
    cdef int n_nodes = len(code) // 3
    cdef int n_prem = len(premises) // 2
    cdef int* c = _ints(code)
    cdef int* p = NULL
    cdef uint64_t* ext = NULL
    cdef uint64_t atoms[64]
    cdef uint64_t total = (<uint64_t>1) << n_vars
    cdef uint64_t base = 0, good, bad, valid
    cdef int ca = conclusion[0], cb = conclusion[1], k
    cdef long long found = -1
    try:
        _check_propositional(c, n_nodes)
        p = _ints(premises)
        ext = <uint64_t*>malloc((n_nodes if n_nodes > 0 else 1) * sizeof(uint64_t))
        if ext == NULL:
            raise MemoryError()
        valid = ALL if total >= 64 else (((<uint64_t>1) << total) - 1)
        with nogil:
            while base < total:
                _load_chunk(base, n_vars, atoms)
                _eval_words(c, n_nodes, atoms, ext)
                good = valid
                for k in range(n_prem):
                    good &= ~(ext[p[2 * k]] ^ ext[p[2 * k + 1]])
                bad = good & (ext[ca] ^ ext[cb])
                if bad:
                    found = <long long>(base + __builtin_ctzll(bad))
                    break
                base += 64
        return found
    finally:
        free(c)
        free(p)
        free(ext)


def pair_tables(list code, int n_vars, list pairs):
    if n_vars > MAX_TABLE_VARS:
        raise ValueError(f"too many variables for a truth table: {n_vars}")
    if sys.byteorder != "little":
        from . import _pykernels
        return _pykernels.pair_tables(code, n_vars, pairs)
    cdef int n_nodes = len(code) // 3
    cdef int n_pairs = len(pairs) // 2
    cdef int* c = _ints(code)
    cdef int* p = NULL
    cdef uint64_t* ext = NULL
    cdef uint64_t* out = NULL
    cdef uint64_t atoms[64]
    cdef uint64_t total = (<uint64_t>1) << n_vars
    cdef Py_ssize_t n_words = <Py_ssize_t>((total + 63) // 64)
    cdef Py_ssize_t w
    cdef uint64_t valid
    cdef int k
    try:
        _check_propositional(c, n_nodes)
        p = _ints(pairs)
        ext = <uint64_t*>malloc((n_nodes if n_nodes > 0 else 1) * sizeof(uint64_t))
        out = <uint64_t*>malloc((n_pairs * n_words if n_pairs > 0 else 1) * sizeof(uint64_t))
        if ext == NULL or out == NULL:
            raise MemoryError()
        valid = ALL if total >= 64 else (((<uint64_t>1) << total) - 1)
        with nogil:
            for w in range(n_words):
                _load_chunk(<uint64_t>w * 64, n_vars, atoms)
                _eval_words(c, n_nodes, atoms, ext)
                for k in range(n_pairs):
                    out[k * n_words + w] = (~(ext[p[2 * k]] ^ ext[p[2 * k + 1]])) & valid
        return [
            int.from_bytes(PyBytes_FromStringAndSize(<char*>(out + k * n_words), n_words * 8), "little")
            for k in range(n_pairs)
        ]
    finally:
        free(c)
        free(p)
        free(ext)
        free(out)


cdef inline void _eval_model(const int* code, int n_nodes, const uint64_t* atoms,
                             const uint64_t* succ, int n, bint universal,
                             uint64_t* ext) noexcept nogil:
    cdef int i, op, a, b, w
    cdef uint64_t full = ALL if n >= 64 else (((<uint64_t>1) << n) - 1)
    cdef uint64_t x, m
    for i in range(n_nodes):
        op = code[3 * i]
        a = code[3 * i + 1]
        b = code[3 * i + 2]
        if op == OP_VAR:
            ext[i] = atoms[a]
        elif op == OP_TOP:
            ext[i] = full
        elif op == OP_BOT:
            ext[i] = 0
        elif op == OP_NOT:
            ext[i] = full & ~ext[a]
        elif op == OP_AND:
            ext[i] = ext[a] & ext[b]
        elif op == OP_OR:
            ext[i] = ext[a] | ext[b]
        elif op == OP_IMP:
            ext[i] = full & ((~ext[a]) | ext[b])
        elif op == OP_BOX:
            x = ext[a]
            if universal:
                ext[i] = full if x == full else 0
            else:
                m = 0
                for w in range(n):
                    if (succ[w] & ~x) == 0:
                        m |= (<uint64_t>1) << w
                ext[i] = m
        else:
            x = ext[a]
            if universal:
                ext[i] = full if x != 0 else 0
            else:
                m = 0
                for w in range(n):
                    if succ[w] & x:
                        m |= (<uint64_t>1) << w
                ext[i] = m


cdef inline bint _is_countermodel(const uint64_t* ext, const int* p, int n_prem,
                                  int ca, int cb) noexcept nogil:
    cdef int k
    for k in range(n_prem):
        if ext[p[2 * k]] != ext[p[2 * k + 1]]:
            return False
    return ext[ca] != ext[cb]


def first_countermodel_k(list code, int n_atoms, int max_worlds, list premises,
                         tuple conclusion, long long max_models):
    cdef int n_nodes = len(code) // 3
    cdef int n_prem = len(premises) // 2
    cdef int* c = _ints(code)
    cdef int* p = _ints(premises)
    cdef uint64_t* ext = <uint64_t*>malloc((n_nodes if n_nodes > 0 else 1) * sizeof(uint64_t))
    cdef uint64_t atoms[64]
    cdef uint64_t succ[64]
    cdef int ca = conclusion[0], cb = conclusion[1]
    cdef int n, nn, nv, w, a
    cdef uint64_t r, val, full
    cdef long long tried = 0
    cdef int status = 0
    cdef int found_n = 0
    cdef uint64_t found_r = 0, found_v = 0
    if ext == NULL:
        free(c)
        free(p)
        raise MemoryError()
    if n_atoms > 64:
        free(c)
        free(p)
        free(ext)
        raise ValueError("too many atoms")
    try:
        with nogil:
            for n in range(1, max_worlds + 1):
                full = ((<uint64_t>1) << n) - 1
                nn = n * n
                nv = n * n_atoms
                if nn + nv > 62:
                    status = -1
                    break
                r = 0
                while r < ((<uint64_t>1) << nn):
                    for w in range(n):
                        succ[w] = (r >> (w * n)) & full
                    val = 0
                    while val < ((<uint64_t>1) << nv):
                        tried += 1
                        if tried > max_models:
                            tried -= 1
                            status = -1
                            break
                        for a in range(n_atoms):
                            atoms[a] = 0
                        for w in range(n):
                            for a in range(n_atoms):
                                if (val >> (w * n_atoms + a)) & 1:
                                    atoms[a] |= (<uint64_t>1) << w
                        _eval_model(c, n_nodes, atoms, succ, n, False, ext)
                        if _is_countermodel(ext, p, n_prem, ca, cb):
                            status = 1
                            found_n = n
                            found_r = r
                            found_v = val
                            break
                        val += 1
                    if status != 0:
                        break
                    r += 1
                if status != 0:
                    break
        if status == -1:
            return (-1, 0, 0, 0, tried)
        return (status, found_n, found_r, found_v, tried)
    finally:
        free(c)
        free(p)
        free(ext)


def first_countermodel_s5(list code, int n_atoms, int max_worlds, list premises,
                          tuple conclusion, long long max_models):
    cdef int n_nodes = len(code) // 3
    cdef int n_prem = len(premises) // 2
    cdef int* c = _ints(code)
    cdef int* p = _ints(premises)
    cdef uint64_t* ext = <uint64_t*>malloc((n_nodes if n_nodes > 0 else 1) * sizeof(uint64_t))
    cdef uint64_t atoms[64]
    cdef int combo[64]
    cdef int ca = conclusion[0], cb = conclusion[1]
    cdef long long n_vals
    cdef int k, i, j, a, kmax
    cdef long long tried = 0
    cdef int status = 0
    cdef bint more
    if ext == NULL:
        free(c)
        free(p)
        raise MemoryError()
    if n_atoms > 30:
        free(c)
        free(p)
        free(ext)
        raise ValueError("too many atoms")
    n_vals = (<long long>1) << n_atoms
    kmax = max_worlds
    if kmax > n_vals:
        kmax = <int>n_vals
    if kmax > 63:
        kmax = 63
    try:
        with nogil:
            for k in range(1, kmax + 1):
                for i in range(k):
                    combo[i] = i
                more = True
                while more:
                    tried += 1
                    if tried > max_models:
                        tried -= 1
                        status = -1
                        break
                    for a in range(n_atoms):
                        atoms[a] = 0
                    for i in range(k):
                        for a in range(n_atoms):
                            if (combo[i] >> a) & 1:
                                atoms[a] |= (<uint64_t>1) << i
                    _eval_model(c, n_nodes, atoms, NULL, k, True, ext)
                    if _is_countermodel(ext, p, n_prem, ca, cb):
                        status = 1
                        break
                    # next combination in lexicographic order
                    i = k - 1
                    while i >= 0 and combo[i] == n_vals - k + i:
                        i -= 1
                    if i < 0:
                        more = False
                    else:
                        combo[i] += 1
                        for j in range(i + 1, k):
                            combo[j] = combo[j - 1] + 1
                if status != 0:
                    break
        if status == 1:
            return (1, tuple([combo[i] for i in range(k)]), tried)
        if status == -1:
            return (-1, (), tried)
        return (0, (), tried)
    finally:
        free(c)
        free(p)
        free(ext)
