import random
import warnings

import pytest

from hypersem.errors import NonSubsetClosedQuery
from hypersem.family import (FamilySet, family_le, mask_of, powerset_family,
                             ssc, subsets_of)
from hypersem.harness import GenConfig, gen_program, lift_family, random_downset
from hypersem.hyper import (HEval, LoopVariant, guarded_join_apply, happly,
                            hrefines, hyper_bottom, inner_join_apply,
                            lfp_demand, loop_iterates, otimes_apply)
from hypersem.lang import (Assign, Atom, BoolConst, Choice, Cmp, If, IntBin,
                           IntConst, IntVar, RelAtom, Seq, Skip, While, parse)
from hypersem.semantics import sem_tr
from hypersem.space import StateSpace
from hypersem.transformer import Transformer


def fam(*masks):
    return FamilySet.explicit(masks)


def loop_program():
    pf = parse("var x: 0..7; while x < 4 { x := x + 1 }")
    return pf.body, pf.space()


Q25 = fam(mask_of([2, 5]))


# ---------------------------------------------------------------- reference
# An independent definitional evaluator over plain frozensets: no
# down-sets, no maximal-element shortcuts, loops by synchronized
# iteration.  The engine must agree with it exactly.

def ref_eval(node, family, space, ev):
    if not family:
        return frozenset()
    if isinstance(node, Skip):
        return frozenset(family)
    if isinstance(node, Atom):
        tr = ev._atom(node.atom)
        return frozenset(tr.apply(p) for p in family)
    if isinstance(node, Seq):
        return ref_eval(node.rest, ref_eval(node.first, family, space, ev),
                        space, ev)
    if isinstance(node, Choice):
        out = set()
        for p in family:
            a = ref_eval(node.left, frozenset(subsets_of(p)), space, ev)
            b = ref_eval(node.right, frozenset(subsets_of(p)), space, ev)
            out.update(r | s for r in a for s in b)
        return frozenset(out)
    if isinstance(node, If):
        bmask = ev._guard(node.cond)
        nb = space.full_mask & ~bmask
        out = set()
        for p in family:
            a = ref_eval(node.then, frozenset(subsets_of(p & bmask)), space, ev)
            b = ref_eval(node.orelse, frozenset(subsets_of(p & nb)), space, ev)
            out.update(r | s for r in a for s in b)
        return frozenset(out)
    if isinstance(node, While):
        return ref_while(node, family, space, ev)
    raise TypeError(node)


def ref_while(node, family, space, ev):
    bmask = ev._guard(node.cond)
    nb = space.full_mask & ~bmask
    systems = {}
    pending = [frozenset(family)]
    while pending:
        q = pending.pop()
        if q in systems:
            continue
        entries = []
        for p in q:
            y = ref_eval(node.body, frozenset(subsets_of(p & bmask)), space, ev)
            entries.append((y, p & nb))
            pending.append(y)
        systems[q] = entries
    vals = {q: frozenset((0,)) for q in systems}
    while True:
        nxt = {
            q: frozenset(r | s
                         for y, m in systems[q]
                         for r in vals[y]
                         for s in subsets_of(m))
            for q in systems
        }
        if nxt == vals:
            return vals[frozenset(family)]
        vals = nxt


# ---------------------------------------------------------------- bottom

def test_hyper_bottom():
    assert hyper_bottom(FamilySet.empty()).is_empty
    assert hyper_bottom(Q25).members() == {0}
    assert hyper_bottom(ssc(Q25)).members() == {0}


# ---------------------------------------------------------------- operators

def test_inner_join_example(x8):
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    d = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(2))))
    ev = HEval(x8)
    out = inner_join_apply(c, d, fam(mask_of([0])), ev)
    assert out.members() == {0, mask_of([1]), mask_of([2]), mask_of([1, 2])}


def test_inner_join_empty_query(x8):
    ev = HEval(x8)
    assert inner_join_apply(Skip(), Skip(), FamilySet.empty(), ev).is_empty


def test_inner_join_contains_lift(x8):
    rng = random.Random(0)
    for seed in range(10):
        cfg = GenConfig(seed=seed, allow_choice=False,
                        allow_nondet_atoms=False, max_space=8)
        pf = gen_program(cfg)
        space = pf.space()
        tr = sem_tr(pf.body, space)
        ev = HEval(space)
        for _ in range(5):
            q = random_downset(rng, space.size)
            out = inner_join_apply(pf.body, pf.body, q, ev)
            assert family_le(lift_family(tr, q), out)


def test_otimes_example(x8):
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    d = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(2))))
    ev = HEval(x8, LoopVariant.OTIMES)
    out = otimes_apply(c, d, fam(mask_of([0])), ev)
    assert out.members() == {mask_of([1, 2])}
    assert otimes_apply(c, d, FamilySet.empty(), ev).is_empty


def test_otimes_breaks_subset_closure(x8):
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    d = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(2))))
    ev = HEval(x8, LoopVariant.OTIMES)
    out = otimes_apply(c, d, powerset_family(mask_of([0])), ev)
    assert out.members() == {0, mask_of([1, 2])}
    assert not out.is_subset_closed()


def test_guarded_join_example(x8):
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    b = Cmp("<", IntVar("x"), IntConst(4))
    ev = HEval(x8)
    out = guarded_join_apply(b, c, Skip(), Q25, ev)
    assert out.members() == {0, mask_of([3]), mask_of([5]), mask_of([3, 5])}
    assert out.is_subset_closed()  # closed although Q25 is not


def test_guarded_join_true_reduces_to_branch(x8):
    rng = random.Random(1)
    for seed in range(10):
        cfg = GenConfig(seed=seed, allow_choice=False,
                        allow_nondet_atoms=False, max_space=8)
        pf = gen_program(cfg)
        space = pf.space()
        ev = HEval(space)
        for _ in range(4):
            q = random_downset(rng, space.size)
            out = guarded_join_apply(BoolConst(True), pf.body, Skip(), q, ev)
            assert out == ev.eval(pf.body, q)


def test_guarded_join_monotone_in_query(x8):
    rng = random.Random(2)
    b = Cmp("<", IntVar("x"), IntConst(4))
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    d = Atom(Assign("x", IntBin("*", IntVar("x"), IntConst(2))))
    ev = HEval(x8)
    for _ in range(40):
        small = {rng.randrange(256) for _ in range(rng.randint(0, 3))}
        big = small | {rng.randrange(256) for _ in range(2)}
        out_small = guarded_join_apply(b, c, d, FamilySet.explicit(small), ev)
        out_big = guarded_join_apply(b, c, d, FamilySet.explicit(big), ev)
        assert family_le(out_small, out_big)


# ---------------------------------------------------------------- happly

def test_happly_skip_and_atom_identity(x8):
    q = ssc(Q25)
    assert happly(Skip(), q, x8) == q
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    empty_only = fam(0)
    assert happly(c, empty_only, x8) == empty_only


def test_happly_loop_on_closed_query():
    node, space = loop_program()
    out = happly(node, ssc(Q25), space)
    assert out == ssc(fam(mask_of([4, 5])))
    assert mask_of([4, 5]) in out
    assert out.antichain() == {mask_of([4, 5])}


def test_happly_strict_gate():
    node, space = loop_program()
    with pytest.raises(NonSubsetClosedQuery):
        happly(node, Q25, space)
    with pytest.raises(NonSubsetClosedQuery):
        happly(node, FamilySet.empty(), space)
    with warnings.catch_warnings(record=True) as got:
        warnings.simplefilter("always")
        out = happly(node, Q25, space, strict=False)
    assert got
    assert out == ssc(fam(mask_of([4, 5])))


def test_happly_naive_variant_permits_open_queries():
    node, space = loop_program()
    out = happly(node, Q25, space, LoopVariant.NAIVE)
    assert out == fam(0, mask_of([4]), mask_of([5]))


# ---------------------------------------------------------------- iterates

def test_naive_iterates_match_worked_example():
    node, space = loop_program()
    vals = loop_iterates(node.cond, node.body, Q25, 4, space,
                         LoopVariant.NAIVE)
    assert vals[0] == fam(0)
    assert vals[1] == fam(0, mask_of([5]))
    assert vals[2] == fam(0, mask_of([5]))
    assert vals[3] == fam(0, mask_of([4]), mask_of([5]))
    assert vals[4] == vals[3]


def test_otimes_iterates_match_worked_example():
    node, space = loop_program()
    vals = loop_iterates(node.cond, node.body, Q25, 3, space,
                         LoopVariant.OTIMES)
    assert vals[0] == fam(0)
    assert vals[1] == fam(mask_of([5]))
    assert not family_le(vals[0], vals[1])
    assert not family_le(vals[1], vals[0])
    assert vals[3] == fam(mask_of([4, 5]))


def test_paper_variant_iterates_ascend_to_fixpoint():
    node, space = loop_program()
    q = ssc(Q25)
    vals = loop_iterates(node.cond, node.body, q, 4, space)
    assert vals[0] == fam(0)
    assert vals[1] == fam(0, mask_of([5]))
    assert vals[2] == vals[1]
    assert vals[3] == ssc(fam(mask_of([4, 5])))
    assert vals[4] == vals[3]
    for a, b in zip(vals, vals[1:]):
        assert family_le(a, b)


# ---------------------------------------------------------------- lfp

def test_lfp_while_false_is_closure():
    pf = parse("var x: 0..7; while false { x := x + 1 }")
    space = pf.space()
    rng = random.Random(3)
    ev = HEval(space)
    for _ in range(15):
        members = {rng.randrange(256) for _ in range(rng.randint(1, 3))}
        q = FamilySet.explicit(members)
        assert lfp_demand(pf.body.cond, pf.body.body, q, ev) == ssc(q)


def test_lfp_while_true_skip_is_bottom():
    pf = parse("var x: 0..7; while true { skip }")
    space = pf.space()
    ev = HEval(space)
    assert lfp_demand(pf.body.cond, pf.body.body, ssc(Q25), ev) == fam(0)


def test_lfp_demand_equals_loop_value():
    node, space = loop_program()
    ev = HEval(space)
    assert lfp_demand(node.cond, node.body, ssc(Q25), ev) == \
        ssc(fam(mask_of([4, 5])))
    assert lfp_demand(node.cond, node.body, FamilySet.empty(), ev).is_empty


def test_cross_check_flag_agrees():
    for seed in range(12):
        cfg = GenConfig(seed=seed, allow_choice=False,
                        allow_nondet_atoms=False, max_space=6)
        pf = gen_program(cfg)
        space = pf.space()
        ev = HEval(space, cross_check=True)
        rng = random.Random(seed)
        for _ in range(4):
            ev.eval(pf.body, random_downset(rng, space.size))
        assert not ev.stats.cross_mismatches


# ---------------------------------------------------------------- refinement

def test_hrefines_reflexive_and_choice_chain(x8):
    add3 = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(3))))
    add5 = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(5))))
    both = Choice(add3, add5)
    battery = [powerset_family(mask_of([0])), ssc(Q25),
               powerset_family(x8.full_mask)]
    assert hrefines(add3, add3, battery, x8)
    assert hrefines(add3, both, battery, x8)
    assert not hrefines(add5, add3, [powerset_family(mask_of([0]))], x8)


def test_hrefines_requires_closed_queries(x8):
    with pytest.raises(NonSubsetClosedQuery):
        hrefines(Skip(), Skip(), [Q25], x8)


# ---------------------------------------------------------------- lemmas

def rel_to_atom(rel, space):
    pairs = []
    for s, t in rel.pairs():
        src = tuple(sorted(space.decode(s).items()))
        dst = tuple(sorted(space.decode(t).items()))
        pairs.append((src, dst))
    return Atom(RelAtom(tuple(pairs)))


def rnd_rel_atom(rng, space, density=None):
    from hypersem.relation import Rel
    d = rng.random() if density is None else density
    rows = [sum(1 << t for t in space.states() if rng.random() < d)
            for _ in space.states()]
    return Rel(space, rows)


def rnd_partial_function(rng, space):
    from hypersem.relation import Rel
    rows = [1 << rng.randrange(space.size) if rng.random() < 0.8 else 0
            for _ in space.states()]
    return Rel(space, rows)


def test_guarded_join_output_always_closed():
    # branches must preserve closure (deterministic atoms); the query may
    # be anything, closed or not
    space = StateSpace((("s", 0, 4),))
    rng = random.Random(4)
    ev = HEval(space)
    for _ in range(150):
        c = rel_to_atom(rnd_partial_function(rng, space), space)
        d = rel_to_atom(rnd_partial_function(rng, space), space)
        b = Cmp("<", IntVar("s"), IntConst(rng.randint(0, 4)))
        q = FamilySet.explicit(
            {rng.randrange(32) for _ in range(rng.randint(1, 3))})
        out = guarded_join_apply(b, c, d, q, ev)
        assert out.is_subset_closed()


def test_lift_of_guarded_transformer_on_closed_queries():
    # equality of the lifted guarded join with the guarded inner join of
    # the lifts, on subset-closed queries, arbitrary (nondet) branches
    space = StateSpace((("s", 0, 3),))
    rng = random.Random(5)
    ev = HEval(space)
    from hypersem.relation import Rel
    from hypersem.transformer import Transformer
    for _ in range(200):
        c_rel = rnd_rel_atom(rng, space)
        d_rel = rnd_rel_atom(rng, space)
        bmask = rng.randrange(16)
        b = _mask_guard(space, bmask)
        node_if = If(b, rel_to_atom(c_rel, space), rel_to_atom(d_rel, space))
        q = random_downset(rng, space.size)
        got = ev.eval(node_if, q)
        want = lift_family(sem_tr(node_if, space), q)
        assert got == want


def _mask_guard(space, bmask):
    # a guard whose satisfying set is exactly bmask, via equality tests
    cond = BoolConst(False)
    for s in range(space.size):
        if bmask >> s & 1:
            env = space.decode(s)
            clause = BoolConst(True)
            for n, v in env.items():
                clause = _and(clause, Cmp("=", IntVar(n), IntConst(v)))
            cond = _or(cond, clause)
    return cond


def _and(a, b):
    from hypersem.lang import BoolBin
    return BoolBin("&&", a, b)


def _or(a, b):
    from hypersem.lang import BoolBin
    return BoolBin("||", a, b)


def test_lift_below_inner_join_with_strict_witness(x8):
    c = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(1))))
    d = Atom(Assign("x", IntBin("+", IntVar("x"), IntConst(2))))
    ev = HEval(x8)
    q = fam(mask_of([0]))
    joined = lift_family(sem_tr(Choice(c, d), x8), q)
    inner = inner_join_apply(c, d, q, ev)
    assert family_le(joined, inner)
    # the stored strict witness: the inner join has strictly more sets
    assert joined.members() == {mask_of([1, 2])}
    assert inner.members() == {0, mask_of([1]), mask_of([2]), mask_of([1, 2])}


def test_lift_below_hyper_for_nondet_programs():
    rng = random.Random(6)
    for seed in range(25):
        cfg = GenConfig(seed=seed, allow_choice=True,
                        allow_nondet_atoms=True, max_space=6)
        pf = gen_program(cfg)
        space = pf.space()
        tr = sem_tr(pf.body, space)
        ev = HEval(space)
        for _ in range(4):
            q = random_downset(rng, space.size)
            assert family_le(lift_family(tr, q), ev.eval(pf.body, q))


def test_deterministic_programs_preserve_closure():
    rng = random.Random(7)
    for seed in range(25):
        cfg = GenConfig(seed=seed, allow_choice=False,
                        allow_nondet_atoms=False, max_space=8)
        pf = gen_program(cfg)
        space = pf.space()
        ev = HEval(space)
        for _ in range(4):
            q = random_downset(rng, space.size)
            assert ev.eval(pf.body, q).is_subset_closed()


def test_naive_loop_anomaly_disagrees_with_lift():
    node, space = loop_program()
    lifted = lift_family(sem_tr(node, space), Q25)
    naive = happly(node, Q25, space, LoopVariant.NAIVE)
    assert lifted == fam(mask_of([4, 5]))
    assert naive == fam(0, mask_of([4]), mask_of([5]))
    assert naive != lifted


# ---------------------------------------------------------------- reference

def test_psc_table_lift_preserves_closure(s3):
    # the subset-image property makes the elementwise lift keep families
    # subset closed, also for non-disjunctive table transformers
    tab = Transformer.from_function(
        s3, lambda p: 0b100 if p & 0b011 == 0b011 else 0)
    from hypersem.transformer import psc_check
    assert psc_check(tab)
    rng = random.Random(9)
    for _ in range(60):
        q = random_downset(rng, 3)
        image = FamilySet.explicit(tab.apply(p) for p in q.members())
        assert image.is_subset_closed()


def test_engine_matches_reference_evaluator():
    rng = random.Random(8)
    for seed in range(60):
        cfg = GenConfig(seed=seed, max_space=5,
                        allow_choice=seed % 2 == 0,
                        allow_nondet_atoms=seed % 3 == 0)
        pf = gen_program(cfg)
        space = pf.space()
        ev = HEval(space)
        for _ in range(4):
            members = frozenset(
                rng.randrange(1 << space.size)
                for _ in range(rng.randint(1, 3)))
            q = FamilySet.explicit(members)
            want = ref_eval(pf.body, members, space, ev)
            got = ev.eval(pf.body, q)
            assert got == FamilySet.explicit(want), pf.body
