"""Forward predicate transformers on state-set masks.

A transformer is backed either by a relation (its direct image — exact
for everything the language denotes) or by an explicit table over all
subsets, which is how adversarial transformers for the lemma tests are
hosted.  Tables are limited to spaces of at most 16 states.
"""

from collections import namedtuple

from . import _kernels
from .errors import SpaceMismatch, SpaceTooLarge
from .relation import Rel

TABLE_MAX_STATES = 16
PSC_MAX_STATES = 10

PscResult = namedtuple("PscResult", "ok q r")
PscResult.__bool__ = lambda self: self.ok


class Transformer:
    """Monotone map from state masks to state masks."""

    __slots__ = ("space", "rel", "table")

    def __init__(self, space, rel=None, table=None):
        if (rel is None) == (table is None):
            raise ValueError("exactly one of rel/table required")
        self.space = space
        self.rel = rel
        self.table = table

    @classmethod
    def image(cls, rel):
        """Direct image of a relation."""
        return cls(rel.space, rel=rel)

    @classmethod
    def from_table(cls, space, entries, check_monotone=True):
        if space.size > TABLE_MAX_STATES:
            raise SpaceTooLarge(
                f"table representation limited to {TABLE_MAX_STATES} states")
        entries = tuple(entries)
        if len(entries) != 1 << space.size:
            raise ValueError("table must have one entry per subset")
        tr = cls(space, table=entries)
        if check_monotone and not is_monotone(tr):
            raise ValueError("table is not monotone")
        return tr

    @classmethod
    def from_function(cls, space, fn, check_monotone=True):
        return cls.from_table(
            space, (fn(p) for p in range(1 << space.size)), check_monotone)

    @classmethod
    def identity(cls, space):
        return cls.image(Rel.identity(space))

    @classmethod
    def bottom(cls, space):
        """The constantly-empty transformer (image of the empty relation)."""
        return cls.image(Rel.empty(space))

    def _check(self, other):
        if self.space != other.space:
            raise SpaceMismatch("transformers over different spaces")

    def apply(self, p):
        if self.rel is not None:
            return self.rel.dirimg(p)
        return self.table[p]

    def compose(self, other):
        """Forward composition: apply self, then other."""
        self._check(other)
        if self.rel is not None and other.rel is not None:
            return Transformer.image(self.rel.compose(other.rel))
        return Transformer.from_table(
            self.space, (other.apply(self.apply(p))
                         for p in range(1 << self.space.size)),
            check_monotone=False)

    def join(self, other):
        """Pointwise union."""
        self._check(other)
        if self.rel is not None and other.rel is not None:
            return Transformer.image(self.rel.union(other.rel))
        return Transformer.from_table(
            self.space, (self.apply(p) | other.apply(p)
                         for p in range(1 << self.space.size)),
            check_monotone=False)

    def tabulate(self):
        if self.table is not None:
            return list(self.table)
        if self.space.size > TABLE_MAX_STATES:
            raise SpaceTooLarge("space too large to tabulate")
        return [self.apply(p) for p in range(1 << self.space.size)]

    def extensionally_equal(self, other):
        self._check(other)
        if self.rel is not None and other.rel is not None:
            # direct image is injective on relations
            return self.rel == other.rel
        return self.tabulate() == other.tabulate()

    def __repr__(self):
        kind = "image" if self.rel is not None else "table"
        return f"Transformer({kind}, {self.space!r})"


def dom(tr):
    """States whose singleton image is nonempty."""
    out = 0
    for s in tr.space.states():
        if tr.apply(1 << s):
            out |= 1 << s
    return out


def is_monotone(tr):
    """Check p <= q implies phi p <= phi q via single-bit additions."""
    n = tr.space.size
    if n > PSC_MAX_STATES and tr.table is None:
        raise SpaceTooLarge(f"monotonicity scan limited to {PSC_MAX_STATES} states")
    tab = tr.tabulate()
    for p in range(1 << n):
        fp = tab[p]
        for b in range(n):
            if not p >> b & 1:
                if fp & ~tab[p | 1 << b]:
                    return False
    return True


def is_univ_disjunctive(tr):
    """Strict and distributes over union; on a finite space this reduces
    to agreeing with the union of singleton images."""
    n = tr.space.size
    if n > PSC_MAX_STATES and tr.table is None:
        raise SpaceTooLarge(f"disjunctivity scan limited to {PSC_MAX_STATES} states")
    tab = tr.tabulate()
    if tab[0]:
        return False
    single = [tab[1 << s] for s in range(n)]
    for p in range(1 << n):
        acc = 0
        t = p
        while t:
            low = t & -t
            acc |= single[low.bit_length() - 1]
            t ^= low
        if acc != tab[p]:
            return False
    return True


def psc_check(tr):
    """Every subset of an image is the exact image of some subset.

    Returns a truthy PscResult, or a falsy one carrying the first (q, r)
    with no witness s.  Brute force; spaces capped at 10 states.
    """
    n = tr.space.size
    if n > PSC_MAX_STATES:
        raise SpaceTooLarge(f"psc check limited to {PSC_MAX_STATES} states")
    tab = tr.table if tr.table is not None else [
        tr.apply(p) for p in range(1 << n)]
    ok, q, r = _kernels.psc_scan_table(list(tab), n)
    return PscResult(ok, q, r)
