"""Binary relations on a finite state space, as per-state successor masks."""

from . import _kernels
from .errors import SpaceMismatch


class Rel:
    """Immutable relation: rows[s] is the successor mask of state s."""

    __slots__ = ("space", "rows")

    def __init__(self, space, rows):
        rows = tuple(rows)
        if len(rows) != space.size:
            raise ValueError(f"expected {space.size} rows, got {len(rows)}")
        full = space.full_mask
        for r in rows:
            if r & ~full:
                raise ValueError("row has bits outside the space")
        self.space = space
        self.rows = rows

    @classmethod
    def empty(cls, space):
        return cls(space, (0,) * space.size)

    @classmethod
    def identity(cls, space):
        return cls(space, tuple(1 << s for s in space.states()))

    @classmethod
    def coreflexive(cls, space, mask):
        """{ (s, s) | s in mask }."""
        return cls(space, tuple((1 << s) & mask for s in space.states()))

    @classmethod
    def from_pairs(cls, space, pairs):
        rows = [0] * space.size
        for s, t in pairs:
            rows[s] |= 1 << t
        return cls(space, rows)

    def pairs(self):
        for s, row in enumerate(self.rows):
            t = row
            while t:
                low = t & -t
                yield s, low.bit_length() - 1
                t ^= low

    def pair_count(self):
        return sum(r.bit_count() for r in self.rows)

    def _check(self, other):
        if self.space != other.space:
            raise SpaceMismatch("relations over different spaces")

    def compose(self, other):
        """Forward composition: x (self;other) y iff exists z."""
        self._check(other)
        return Rel(self.space, _kernels.compose_rows(self.rows, other.rows))

    def union(self, other):
        self._check(other)
        return Rel(self.space, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def intersect(self, other):
        # not in the surface language; used by checks and tests
        self._check(other)
        return Rel(self.space, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def converse(self):
        return Rel(self.space, _kernels.converse_rows(self.rows, self.space.size))

    def dirimg(self, p):
        """Direct image of mask p."""
        return _kernels.dirimg_rows(self.rows, p)

    def domain(self):
        out = 0
        for s, row in enumerate(self.rows):
            if row:
                out |= 1 << s
        return out

    def is_partial_function(self):
        return all(row.bit_count() <= 1 for row in self.rows)

    def is_coreflexive(self):
        return all(row & ~(1 << s) == 0 for s, row in enumerate(self.rows))

    def is_subrelation(self, other):
        self._check(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __eq__(self, other):
        return (isinstance(other, Rel) and self.space == other.space
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.space, self.rows))

    def __repr__(self):
        return f"Rel({self.space!r}, pairs={sorted(self.pairs())})"


def rel_recover(transformer):
    """Relation whose direct image the transformer is: s R t iff t in phi{s}."""
    space = transformer.space
    return Rel(space, tuple(transformer.apply(1 << s) for s in space.states()))
