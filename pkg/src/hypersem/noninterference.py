"""Noninterference checks in three formulations, plus refinement reports.

A LowView partitions the states by agreement on the low variables.  The
relational and hyper checks agree on every relation; the possibilistic
check additionally demands that the domain not split an agreement class
(automatic for total denotations), so all three coincide on total
deterministic programs and are cross-tested against one another:

* relational — the four-state quantifier, checked by enumeration;
* possibilistic — the simulation inequality sim;R <= R;sim;
* hyper — agreement classes stay agreement classes under the forward
  transformer (only the maximal sets, i.e. the classes, need checking).
"""

from dataclasses import dataclass

from .errors import NotARefinement
from .family import FamilySet, family_le
from .hyper import HEval, LoopVariant
from .relation import Rel
from .semantics import sem_tr


class LowView:
    """Partition of a state space by equality on chosen low variables."""

    __slots__ = ("space", "low_vars", "classes", "class_of")

    def __init__(self, space, low_vars):
        low = tuple(low_vars)
        for v in low:
            if not space.has_var(v):
                raise ValueError(f"undeclared low variable {v!r}")
        buckets = {}
        for s in space.states():
            env = space.decode(s)
            key = tuple(env[v] for v in low)
            buckets.setdefault(key, 0)
            buckets[key] |= 1 << s
        classes = tuple(sorted(buckets.values()))
        class_of = [0] * space.size
        for mask in classes:
            t = mask
            while t:
                low_bit = t & -t
                class_of[low_bit.bit_length() - 1] = mask
                t ^= low_bit
        self.space = space
        self.low_vars = low
        self.classes = classes
        self.class_of = tuple(class_of)

    def agrees(self, s, t):
        return self.class_of[s] == self.class_of[t]

    def sim_relation(self):
        """The agreement relation as a Rel (s related to its whole class)."""
        return Rel(self.space, self.class_of)

    def agreement_family(self):
        """All sets lying inside one class, as a down-set (never expanded)."""
        return FamilySet.downset(self.classes)


def agr(mask, view):
    """True iff the set lies inside a single agreement class."""
    if mask == 0:
        return True
    low_bit = mask & -mask
    cls = view.class_of[low_bit.bit_length() - 1]
    return mask & ~cls == 0


@dataclass
class NIVerdict:
    ok: bool
    witness: tuple = None

    def __bool__(self):
        return self.ok


def ni_relational(rel, view, view_out=None):
    """Deterministic-style NI: related agreeing sources force agreeing
    targets.  Witness is (s, s', t, t') on failure."""
    out = view_out if view_out is not None else view
    pairs = list(rel.pairs())
    for s, s2 in pairs:
        for t, t2 in pairs:
            if view.agrees(s, t) and not out.agrees(s2, t2):
                return NIVerdict(False, (s, s2, t, t2))
    return NIVerdict(True)


def ni_possibilistic(rel, view, view_out=None):
    """Possibilistic NI via the simulation inequality sim;R <= R;sim."""
    out = view_out if view_out is not None else view
    lhs = view.sim_relation().compose(rel)
    rhs = rel.compose(out.sim_relation())
    if lhs.is_subrelation(rhs):
        return NIVerdict(True)
    for s, t in lhs.pairs():
        if not rhs.rows[s] >> t & 1:
            return NIVerdict(False, (s, t))
    raise AssertionError("unreachable")


def ni_hyper(node, view, view_out=None):
    """Hyper-level NI: each agreement class maps into an agreement set.

    With view_out, checks the generalized policy agreement-in (view) to
    agreement-out (view_out).
    """
    out = view_out if view_out is not None else view
    tr = sem_tr(node, view.space)
    for cls in view.classes:
        img = tr.apply(cls)
        if not agr(img, out):
            return NIVerdict(False, (cls, img))
    return NIVerdict(True)


def ni_hyper_via_families(node, view, view_out=None):
    """Same check through the hyper engine: image of the agreement
    down-set must stay inside the output agreement down-set."""
    out = view_out if view_out is not None else view
    ev = HEval(view.space, LoopVariant.PAPER)
    result = ev.eval(node, view.agreement_family())
    return family_le(result, out.agreement_family())


@dataclass
class HyperpropertyOracle:
    """Membership predicate over relations with a claimed closure flag."""

    member: object  # Rel -> bool
    subset_closed: bool
    name: str = ""


def relational_ni_oracle(view):
    return HyperpropertyOracle(
        lambda rel: bool(ni_relational(rel, view)), True, "relational-ni")


def possibilistic_ni_oracle(view):
    return HyperpropertyOracle(
        lambda rel: bool(ni_possibilistic(rel, view)), False, "possibilistic-ni")


@dataclass
class RefinementReport:
    spec_member: bool
    impl_member: bool
    preserved: bool
    closure_falsified: bool


def refinement_preserves(oracle, spec, impl):
    """Check membership transport along impl <= spec.

    For an oracle claiming subset closure, spec in H must force impl in
    H; a violation falsifies the closure claim.
    """
    if not impl.is_subrelation(spec):
        raise NotARefinement("impl is not a subrelation of spec")
    s_in = bool(oracle.member(spec))
    r_in = bool(oracle.member(impl))
    falsified = oracle.subset_closed and s_in and not r_in
    preserved = (not s_in) or r_in
    return RefinementReport(s_in, r_in, preserved, falsified)
