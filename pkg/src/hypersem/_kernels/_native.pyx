# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels; mirrors hypersem._kernels.pure exactly.

Falls back to the pure module for inputs too large for the fixed-size
buffers (the workbench caps state spaces at 64 states long before that).
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc
from libc.string cimport memset

from . import pure as _pure

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

DEF MAX_STATES = 64
DEF MAX_BUF = 4194304  # 1 << 22
DEF RADIX = 65536


cdef void _insertion_sort_u64(uint64_t *buf, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef uint64_t v
    for i in range(1, n):
        v = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > v:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = v


cdef int _radix_sort_u64(uint64_t *buf, Py_ssize_t n) except -1:
    """LSD radix sort by 16-bit digits, skipping all-zero digit passes;
    small runs use insertion sort to avoid the counting buffers."""
    if n < 2:
        return 0
    if n < 128:
        _insertion_sort_u64(buf, n)
        return 0
    cdef uint64_t seen = 0
    cdef Py_ssize_t i
    for i in range(n):
        seen |= buf[i]
    cdef uint64_t *tmp = <uint64_t *> malloc(n * sizeof(uint64_t))
    cdef Py_ssize_t *counts = <Py_ssize_t *> malloc(RADIX * sizeof(Py_ssize_t))
    if tmp == NULL or counts == NULL:
        if tmp != NULL:
            free(tmp)
        if counts != NULL:
            free(counts)
        raise MemoryError()
    cdef uint64_t *src = buf
    cdef uint64_t *dst = tmp
    cdef uint64_t *swap
    cdef int shift
    cdef Py_ssize_t d, total, c
    try:
        for shift in range(0, 64, 16):
            if shift and not (seen >> shift):
                break
            memset(counts, 0, RADIX * sizeof(Py_ssize_t))
            for i in range(n):
                counts[(src[i] >> shift) & 0xFFFF] += 1
            total = 0
            for d in range(RADIX):
                c = counts[d]
                counts[d] = total
                total += c
            for i in range(n):
                d = (src[i] >> shift) & 0xFFFF
                dst[counts[d]] = src[i]
                counts[d] += 1
            swap = src
            src = dst
            dst = swap
        if src != buf:
            for i in range(n):
                buf[i] = src[i]
    finally:
        free(tmp)
        free(counts)
    return 0


def popcount(x):
    return __builtin_popcountll(<uint64_t> x)


def dirimg_rows(rows, p):
    """Union of successor rows over the states in mask p."""
    cdef Py_ssize_t n = len(rows)
    if n > MAX_STATES:
        return _pure.dirimg_rows(rows, p)
    cdef uint64_t[MAX_STATES] buf
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = rows[i]
    cdef uint64_t pp = p
    cdef uint64_t out = 0
    while pp:
        out |= buf[__builtin_ctzll(pp)]
        pp &= pp - 1
    return out


def compose_rows(rows_a, rows_b):
    """Row table of the forward composition a;b."""
    cdef Py_ssize_t n = len(rows_a)
    if n > MAX_STATES or len(rows_b) > MAX_STATES:
        return _pure.compose_rows(rows_a, rows_b)
    cdef uint64_t[MAX_STATES] a
    cdef uint64_t[MAX_STATES] b
    cdef Py_ssize_t i
    for i in range(n):
        a[i] = rows_a[i]
    for i in range(len(rows_b)):
        b[i] = rows_b[i]
    out = []
    cdef uint64_t row, acc
    for i in range(n):
        row = a[i]
        acc = 0
        while row:
            acc |= b[__builtin_ctzll(row)]
            row &= row - 1
        out.append(acc)
    return out


def converse_rows(rows, n):
    cdef Py_ssize_t nn = n
    if nn > MAX_STATES:
        return _pure.converse_rows(rows, n)
    cdef uint64_t[MAX_STATES] out
    cdef Py_ssize_t s
    for s in range(nn):
        out[s] = 0
    cdef uint64_t row, bit
    for s in range(len(rows)):
        row = rows[s]
        bit = (<uint64_t> 1) << s
        while row:
            out[__builtin_ctzll(row)] |= bit
            row &= row - 1
    return [out[s] for s in range(nn)]


cdef Py_ssize_t _prune_maximals(uint64_t *buf, Py_ssize_t k) noexcept nogil:
    # buf sorted by descending popcount: earlier entries cannot be subsets
    # of later ones, so one forward pass suffices
    cdef Py_ssize_t i, j, kept = 0
    cdef bint dominated
    for i in range(k):
        dominated = False
        for j in range(kept):
            if buf[i] & ~buf[j] == 0:
                dominated = True
                break
        if not dominated:
            buf[kept] = buf[i]
            kept += 1
    return kept


def maximal_sets(sets):
    """Subset-maximal elements of an iterable of masks, sorted ascending."""
    uniq = sorted(set(sets), key=lambda m: (m.bit_count(), m), reverse=True)
    cdef Py_ssize_t k = len(uniq)
    cdef uint64_t[64] small
    cdef Py_ssize_t i, kept
    cdef uint64_t *buf
    if k <= 64:
        for i in range(k):
            small[i] = uniq[i]
        kept = _prune_maximals(small, k)
        out = [small[i] for i in range(kept)]
        out.sort()
        return out
    if k > MAX_BUF:
        return _pure.maximal_sets(sets)
    buf = <uint64_t *> malloc(k * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    try:
        for i in range(k):
            buf[i] = uniq[i]
        kept = _prune_maximals(buf, k)
        out = [buf[i] for i in range(kept)]
    finally:
        free(buf)
    out.sort()
    return out


def expand_downset(antichain, cap):
    """All subsets of the antichain's members, sorted; None if > cap."""
    cdef uint64_t total = 0
    cdef uint64_t m
    cdef int pc
    for mm in antichain:
        m = mm
        pc = __builtin_popcountll(m)
        if pc >= 63:
            return _pure.expand_downset(antichain, cap)
        total += (<uint64_t> 1) << pc
    if total > MAX_BUF:
        return _pure.expand_downset(antichain, cap)
    if total == 0:
        return []
    cdef uint64_t *buf = <uint64_t *> malloc(total * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef uint64_t sub
    cdef Py_ssize_t pos = 0, i, uniq
    cdef uint64_t capv = cap
    try:
        for mm in antichain:
            m = mm
            sub = m
            while True:
                buf[pos] = sub
                pos += 1
                if sub == 0:
                    break
                sub = (sub - 1) & m
        _radix_sort_u64(buf, pos)
        uniq = 0
        for i in range(pos):
            if uniq == 0 or buf[i] != buf[uniq - 1]:
                buf[uniq] = buf[i]
                uniq += 1
        if <uint64_t> uniq > capv:
            return None
        return [buf[i] for i in range(uniq)]
    finally:
        free(buf)


cdef list _dedup_sorted(uint64_t *buf, Py_ssize_t pos):
    _radix_sort_u64(buf, pos)
    cdef Py_ssize_t i, uniq = 0
    for i in range(pos):
        if uniq == 0 or buf[i] != buf[uniq - 1]:
            buf[uniq] = buf[i]
            uniq += 1
    return [buf[i] for i in range(uniq)]


def union_product(a, b):
    """Sorted deduplicated { x | y : x in a, y in b }."""
    cdef Py_ssize_t na = len(a), nb = len(b)
    if na == 0 or nb == 0:
        return []
    cdef uint64_t[16] xs_small
    cdef uint64_t[16] ys_small
    cdef uint64_t[256] buf_small
    cdef Py_ssize_t i, j, pos
    if na <= 16 and nb <= 16:
        for i in range(na):
            xs_small[i] = a[i]
        for j in range(nb):
            ys_small[j] = b[j]
        pos = 0
        for i in range(na):
            for j in range(nb):
                buf_small[pos] = xs_small[i] | ys_small[j]
                pos += 1
        return _dedup_sorted(buf_small, pos)
    if na * nb > MAX_BUF or na > MAX_STATES * 1024 or nb > MAX_STATES * 1024:
        return _pure.union_product(a, b)
    cdef uint64_t *xs = <uint64_t *> malloc(na * sizeof(uint64_t))
    cdef uint64_t *ys = <uint64_t *> malloc(nb * sizeof(uint64_t))
    cdef uint64_t *buf = <uint64_t *> malloc(na * nb * sizeof(uint64_t))
    if xs == NULL or ys == NULL or buf == NULL:
        if xs != NULL:
            free(xs)
        if ys != NULL:
            free(ys)
        if buf != NULL:
            free(buf)
        raise MemoryError()
    try:
        for i in range(na):
            xs[i] = a[i]
        for j in range(nb):
            ys[j] = b[j]
        pos = 0
        for i in range(na):
            for j in range(nb):
                buf[pos] = xs[i] | ys[j]
                pos += 1
        return _dedup_sorted(buf, pos)
    finally:
        free(xs)
        free(ys)
        free(buf)


def is_downclosed(members):
    """True iff the member set is closed under removing one element."""
    cdef Py_ssize_t k = len(members) if hasattr(members, "__len__") else -1
    ms = sorted(members)
    k = len(ms)
    if k == 0:
        return True
    if k > MAX_BUF:
        return _pure.is_downclosed(members)
    cdef uint64_t *buf = <uint64_t *> malloc(k * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, lo, hi, mid
    cdef uint64_t m, t, child
    cdef bint found
    try:
        for i in range(k):
            buf[i] = ms[i]
        for i in range(k):
            m = buf[i]
            t = m
            while t:
                child = m ^ (t & (~t + 1))
                lo = 0
                hi = k - 1
                found = False
                while lo <= hi:
                    mid = (lo + hi) // 2
                    if buf[mid] == child:
                        found = True
                        break
                    if buf[mid] < child:
                        lo = mid + 1
                    else:
                        hi = mid - 1
                if not found:
                    return False
                t &= t - 1
        return True
    finally:
        free(buf)


def psc_scan_table(table, n):
    """Mirror of pure.psc_scan_table with identical witness order."""
    cdef int nn = n
    if nn > 20:
        return _pure.psc_scan_table(table, n)
    cdef Py_ssize_t entries = (<Py_ssize_t> 1) << nn
    if len(table) != entries:
        raise ValueError("table length must be 2**n")
    cdef uint64_t *tab = <uint64_t *> malloc(entries * sizeof(uint64_t))
    if tab == NULL:
        raise MemoryError()
    cdef Py_ssize_t q
    cdef uint64_t fq, r, s
    cdef bint ok
    try:
        for q in range(entries):
            tab[q] = table[q]
        for q in range(entries):
            fq = tab[q]
            r = fq
            while r:
                r = (r - 1) & fq
                s = q
                ok = False
                while True:
                    if tab[s] == r:
                        ok = True
                        break
                    if s == 0:
                        break
                    s = (s - 1) & (<uint64_t> q)
                if not ok:
                    return False, q, <object> r
        return True, -1, -1
    finally:
        free(tab)
