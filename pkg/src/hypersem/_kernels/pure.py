"""Pure-Python bitset kernels.

Masks are plain ints (states fit in one machine word, space cap 64).
``_native`` mirrors every signature here; both backends must produce
identical results, including witness scan order.
"""


def popcount(x):
    return x.bit_count()


def dirimg_rows(rows, p):
    """Union of successor rows over the states in mask p."""
    out = 0
    while p:
        low = p & -p
        out |= rows[low.bit_length() - 1]
        p ^= low
    return out


def compose_rows(rows_a, rows_b):
    """Row table of the forward composition a;b."""
    return [dirimg_rows(rows_b, row) for row in rows_a]


def converse_rows(rows, n):
    out = [0] * n
    for s, row in enumerate(rows):
        bit = 1 << s
        t = row
        while t:
            low = t & -t
            out[low.bit_length() - 1] |= bit
            t ^= low
    return out


def maximal_sets(sets):
    """Subset-maximal elements of an iterable of masks, sorted ascending."""
    uniq = sorted(set(sets), key=lambda m: (m.bit_count(), m), reverse=True)
    kept = []
    for m in uniq:
        for k in kept:
            if m & ~k == 0:
                break
        else:
            kept.append(m)
    kept.sort()
    return kept


def expand_downset(antichain, cap):
    """All subsets of the antichain's members, sorted; None if > cap."""
    out = set()
    for m in antichain:
        if m.bit_count() >= cap.bit_length():
            if (1 << m.bit_count()) > cap:
                return None
        sub = m
        while True:
            out.add(sub)
            if len(out) > cap:
                return None
            if sub == 0:
                break
            sub = (sub - 1) & m
    return sorted(out)


def union_product(a, b):
    """Sorted deduplicated { x | y : x in a, y in b }."""
    out = {x | y for x in a for y in b}
    return sorted(out)


def is_downclosed(members):
    """True iff the member set is closed under removing one element."""
    ms = members if isinstance(members, (set, frozenset)) else set(members)
    for m in ms:
        t = m
        while t:
            low = t & -t
            if (m ^ low) not in ms:
                return False
            t ^= low
    return True


def psc_scan_table(table, n):
    """Check 'every subset of an image is the exact image of some subset'.

    table[q] is the image of mask q, for all q over n states.  Returns
    (True, -1, -1) or (False, q, r) for the first failing pair in scan
    order: q ascending, r descending submasks of table[q].
    """
    for q in range(1 << n):
        fq = table[q]
        r = fq
        while r:
            r = (r - 1) & fq
            s = q
            ok = False
            while True:
                if table[s] == r:
                    ok = True
                    break
                if s == 0:
                    break
                s = (s - 1) & q
            if not ok:
                return False, q, r
    return True, -1, -1
