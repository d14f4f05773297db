import random

import pytest

from hypersem.errors import SpaceTooLarge
from hypersem.family import FamilySet, subsets_of
from hypersem.harness import (DiffReport, GenConfig, diff_prop1, diff_thm1,
                              enumerate_downsets, gen_program, lift_family,
                              random_downset, search_psc_join_counterexample,
                              search_ssc_necessity)
from hypersem.lang import parse, pp_program
from hypersem.semantics import sem_rel, sem_tr


def test_gen_reproducible():
    a = gen_program(GenConfig(seed=42))
    b = gen_program(GenConfig(seed=42))
    assert a == b
    c = gen_program(GenConfig(seed=43))
    assert pp_program(a) == pp_program(b)
    assert a != c or pp_program(a) == pp_program(c)


def test_gen_respects_flags():
    from hypersem.lang import atoms_deterministic, is_choice_free
    for seed in range(30):
        cfg = GenConfig(seed=seed, allow_choice=False,
                        allow_nondet_atoms=False)
        pf = gen_program(cfg)
        assert is_choice_free(pf.body)
        assert atoms_deterministic(pf.body, pf.space())


def test_gen_space_bounds():
    for seed in range(30):
        pf = gen_program(GenConfig(seed=seed, max_space=10))
        assert pf.space().size <= 10
        pf = gen_program(GenConfig(seed=seed, space_size=4))
        assert pf.space().size == 4
    for size in (5, 6, 7, 8):
        pf = gen_program(GenConfig(seed=1, space_size=size, max_range=4))
        assert pf.space().size == size


def test_generated_programs_roundtrip():
    for seed in range(1000):
        cfg = GenConfig(seed=seed, max_space=8)
        pf = gen_program(cfg)
        assert parse(pp_program(pf)) == pf


def test_enumerate_downsets_small_counts():
    ones = list(enumerate_downsets(1))
    assert len(ones) == 2
    assert FamilySet.downset([0]) in ones
    assert FamilySet.downset([1]) in ones
    assert len(list(enumerate_downsets(2))) == 5
    assert len(list(enumerate_downsets(3))) == 19
    assert len(list(enumerate_downsets(4))) == 167


def test_enumerate_downsets_matches_bruteforce():
    # independent oracle: filter all families over n states for nonempty
    # subset-closed ones
    for n in (1, 2, 3):
        masks = list(range(1 << n))
        brute = set()
        for bitsel in range(1, 1 << len(masks)):
            members = frozenset(m for i, m in enumerate(masks)
                                if bitsel >> i & 1)
            fam = FamilySet.explicit(members)
            if fam.is_subset_closed():
                brute.add(fam)
        enumerated = set(enumerate_downsets(n))
        assert enumerated == brute


def test_enumerate_downsets_bruteforce_count_size_4():
    count = 0
    for bitsel in range(1, 1 << 16):
        members = [m for m in range(16) if bitsel >> m & 1]
        ms = set(members)
        ok = True
        for m in members:
            t = m
            while t:
                low = t & -t
                if (m ^ low) not in ms:
                    ok = False
                    break
                t ^= low
            if not ok:
                break
        if ok:
            count += 1
    assert count == 167


def test_enumerate_downsets_all_closed_and_distinct():
    fams = list(enumerate_downsets(4))
    assert all(f.is_subset_closed() and not f.is_empty for f in fams)
    assert len(set(fams)) == len(fams)


def test_enumerate_downsets_size_cap():
    with pytest.raises(SpaceTooLarge):
        next(enumerate_downsets(6))


def test_random_downset_closed():
    rng = random.Random(0)
    for _ in range(50):
        fam = random_downset(rng, 5)
        assert fam.is_subset_closed()
        assert not fam.is_empty


def test_diff_prop1_clean():
    report = diff_prop1(GenConfig(seed=5, max_space=8), trials=40)
    assert report.trials == 40
    assert report.failures == 0
    assert report.first_witness is None


def test_diff_prop1_empty_relation_atom():
    pf = parse("var x: 0..3; rel { }")
    space = pf.space()
    rel = sem_rel(pf.body, space)
    tr = sem_tr(pf.body, space)
    for p in range(16):
        assert rel.dirimg(p) == 0 == tr.apply(p)


def test_diff_thm1_exhaustive_size_3():
    queries = list(enumerate_downsets(3))
    report = diff_thm1(GenConfig(seed=7, space_size=3, max_range=2),
                       trials=20, queries=queries)
    assert report.trials == 20
    assert report.failures == 0


def test_diff_thm1_nondet_containment():
    report = diff_thm1(GenConfig(seed=9, space_size=3, max_range=2,
                                 allow_nondet_atoms=True),
                       trials=25, samples=20, deterministic=False)
    assert report.failures == 0
    assert report.strict_cases >= 1  # inner joins do add sets


def test_diff_thm1_cross_check_counts():
    report = diff_thm1(GenConfig(seed=11, space_size=3, max_range=2),
                       trials=10, samples=10, cross_check=True)
    assert report.failures == 0
    assert report.cross_checks >= 1


def test_search_psc_join_finds_counterexample():
    found = search_psc_join_counterexample(seed=0, trials=500, size=3)
    assert found is not None
    a, b = found
    from hypersem.transformer import Transformer, psc_check
    assert psc_check(Transformer.image(a))
    assert psc_check(Transformer.image(b))
    assert not psc_check(Transformer.image(a).join(Transformer.image(b)))


def test_search_ssc_necessity_reports_witnesses():
    import warnings
    mism, trials, witness = search_ssc_necessity(seed=0, trials=60, size=4)
    assert trials == 60
    if witness is not None:
        pf, q, got, want = witness
        assert got != want
    # the worked loop example gives a guaranteed witness
    pf = parse("var x: 0..7; while x < 4 { x := x + 1 }")
    space = pf.space()
    from hypersem.family import mask_of
    from hypersem.hyper import LoopVariant, happly
    q = FamilySet.explicit([mask_of([2, 5])])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        got = happly(pf.body, q, space, LoopVariant.PAPER, strict=False)
    want = lift_family(sem_tr(pf.body, space), q)
    assert got != want


def test_diff_report_records_first_witness_only():
    rep = DiffReport()
    rep.record_failure("first")
    rep.record_failure("second")
    assert rep.failures == 2
    assert rep.first_witness == "first"
