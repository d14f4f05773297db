"""Random program generation, down-set enumeration, differential oracles.

Generated loops guard on a dedicated counter variable that the body only
increments, so termination is structural; semantics never needs it (the
fixpoints exist regardless) but stabilization is fast.  Every battery is
reproducible from its seed.
"""

import random
import warnings
from dataclasses import dataclass, replace

from .errors import SpaceTooLarge
from .family import FamilySet, powerset_family
from .hyper import HEval, LoopVariant, happly
from .lang import (Assign, Assume, Atom, BoolBin, BoolConst, Choice, Cmp,
                   Havoc, If, IntBin, IntConst, IntVar, NondetAssign,
                   ProgramFile, RelAtom, Seq, Skip, While, parse, pp_program)
from .relation import Rel
from .semantics import sem_rel, sem_tr
from .transformer import Transformer, is_univ_disjunctive, psc_check

_VAR_NAMES = ("x", "y", "z", "w", "v", "u")
_COUNTER_NAMES = ("k", "j", "i", "m")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 3
    max_vars: int = 2
    max_range: int = 4
    allow_choice: bool = True
    allow_nondet_atoms: bool = True
    max_space: int = 10
    space_size: int = None  # exact space size when set
    # restrict atoms to ones that cannot get stuck, so denotations are
    # total wherever loops terminate (the three NI forms then coincide)
    total_atoms: bool = False


@dataclass
class DiffReport:
    trials: int = 0
    failures: int = 0
    first_witness: str = None
    strict_cases: int = 0
    cross_checks: int = 0

    def record_failure(self, witness):
        self.failures += 1
        if self.first_witness is None:
            self.first_witness = witness


# ---------------------------------------------------------------- generator

def _factorizations(n, max_factors, max_factor):
    """All ways to write n as an ordered product of in-bound factors."""
    if n == 1:
        return [()]
    out = []
    for f in range(2, min(n, max_factor) + 1):
        if n % f == 0 and max_factors > 0:
            for rest in _factorizations(n // f, max_factors - 1, max_factor):
                out.append((f,) + rest)
    return out


def _pick_decls(rng, cfg):
    nvars = max(1, cfg.max_vars)
    max_factor = cfg.max_range + 1
    if cfg.space_size is not None:
        opts = _factorizations(cfg.space_size, nvars, max(max_factor, 2))
        if not opts:
            opts = [(cfg.space_size,)]
        factors = rng.choice(opts)
    else:
        factors = []
        size = 1
        for _ in range(rng.randint(1, nvars)):
            f = rng.randint(2, max_factor)
            if size * f > cfg.max_space:
                break
            factors.append(f)
            size *= f
        if not factors:
            factors = [min(cfg.max_space, max_factor)]
    names = list(_VAR_NAMES[:len(factors)])
    return tuple((n, 0, f - 1) for n, f in zip(names, factors))


class _Gen:
    def __init__(self, cfg, rng, decls):
        self.cfg = cfg
        self.rng = rng
        self.decls = decls
        self.names = [n for n, _, _ in decls]
        self.ranges = {n: (lo, hi) for n, lo, hi in decls}

    def iexpr(self, depth):
        r = self.rng
        if depth <= 0 or r.random() < 0.5:
            if r.random() < 0.5:
                return IntConst(r.randint(0, self.cfg.max_range))
            return IntVar(r.choice(self.names))
        op = r.choice(("+", "-", "*"))
        return IntBin(op, self.iexpr(depth - 1), self.iexpr(depth - 1))

    def bexpr(self, depth):
        r = self.rng
        if depth <= 0 or r.random() < 0.6:
            roll = r.random()
            if roll < 0.1:
                return BoolConst(r.random() < 0.5)
            op = r.choice(("=", "!=", "<", "<=", ">", ">="))
            return Cmp(op, self.iexpr(1), self.iexpr(1))
        if r.random() < 0.3:
            return BoolBin(r.choice(("&&", "||")),
                           self.bexpr(depth - 1), self.bexpr(depth - 1))
        return self.bexpr(depth - 1)

    def atom(self, frozen):
        r = self.rng
        writable = [n for n in self.names if n not in frozen]
        if self.cfg.total_atoms:
            return self.total_atom(writable, frozen)
        roll = r.random()
        if roll < 0.15:
            return Atom(Assume(self.bexpr(1)))
        if self.cfg.allow_nondet_atoms and roll < 0.30 and writable:
            v = r.choice(writable)
            if r.random() < 0.5:
                return Atom(Havoc(v))
            return Atom(NondetAssign(v, self.iexpr(0), self.iexpr(0)))
        if roll < 0.36:
            return Atom(self.rel_atom())
        if not writable:
            return Skip()
        v = r.choice(writable)
        return Atom(Assign(v, self.iexpr(1)))

    def total_atom(self, writable, frozen):
        """Stuck-free deterministic atoms only: in-range constants, copies
        into enclosing ranges, products of 0..1 variables, total relation
        literals that leave loop counters alone."""
        r = self.rng
        if not writable:
            return Skip()
        if r.random() < 0.2:
            return Atom(self.total_rel_atom(frozen))
        v = r.choice(writable)
        lo, hi = self.ranges[v]
        options = [IntConst(r.randint(lo, hi))]
        for n in self.names:
            nlo, nhi = self.ranges[n]
            if lo <= nlo and nhi <= hi:
                options.append(IntVar(n))
        bitvars = [n for n in self.names if self.ranges[n] == (0, 1)]
        if bitvars and lo <= 0 and hi >= 1:
            options.append(IntBin("*", IntVar(r.choice(bitvars)),
                                  IntVar(r.choice(bitvars))))
        return Atom(Assign(v, r.choice(options)))

    def total_rel_atom(self, frozen=frozenset()):
        r = self.rng
        envs = []

        def expand(i, acc):
            if i == len(self.decls):
                envs.append(tuple(sorted(acc)))
                return
            n, lo, hi = self.decls[i]
            for v in range(lo, hi + 1):
                expand(i + 1, acc + [(n, v)])

        expand(0, [])
        pairs = []
        for src in envs:
            dst = r.choice(envs)
            if frozen:
                # counters must pass through unchanged
                src_map = dict(src)
                dst = tuple(sorted((n, src_map[n] if n in frozen else v)
                                   for n, v in dst))
            pairs.append((src, dst))
        return RelAtom(tuple(sorted(pairs)))

    def rel_atom(self):
        r = self.rng
        npairs = r.randint(0, 3)
        pairs = []
        used_src = set()
        for _ in range(npairs):
            src = tuple(sorted((n, r.randint(lo, hi))
                               for n, (lo, hi) in self.ranges.items()))
            if not self.cfg.allow_nondet_atoms:
                if src in used_src:
                    continue
                used_src.add(src)
            dst = tuple(sorted((n, r.randint(lo, hi))
                               for n, (lo, hi) in self.ranges.items()))
            pairs.append((src, dst))
        return RelAtom(tuple(pairs))

    def stmt(self, depth, frozen):
        r = self.rng
        if depth <= 0:
            return self.atom(frozen)
        roll = r.random()
        if roll < 0.30:
            return self.atom(frozen)
        if roll < 0.50:
            return Seq(self.stmt(depth - 1, frozen), self.stmt(depth - 1, frozen))
        if roll < 0.62 and self.cfg.allow_choice:
            return Choice(self.stmt(depth - 1, frozen), self.stmt(depth - 1, frozen))
        if roll < 0.80:
            return If(self.bexpr(depth), self.stmt(depth - 1, frozen),
                      self.stmt(depth - 1, frozen))
        return self.loop(depth, frozen)

    def loop(self, depth, frozen):
        r = self.rng
        counters = [n for n in self.names if n not in frozen]
        if not counters or r.random() < 0.15:
            # divergence-flavoured loops are fine: the fixpoints are finite.
            # In total mode divergence would make the denotation partial,
            # so only the vacuous loop is allowed there.
            diverge = not self.cfg.total_atoms and r.random() >= 0.7
            guard = BoolConst(diverge)
            body = Skip() if diverge else self.stmt(depth - 1, frozen)
            return While(guard, body)
        v = r.choice(counters)
        lo, hi = self.ranges[v]
        bound = r.randint(lo, hi)
        guard = Cmp("<", IntVar(v), IntConst(bound))
        inner = self.stmt(depth - 1, frozen | {v})
        body = Seq(inner, Atom(Assign(v, IntBin("+", IntVar(v), IntConst(1)))))
        return While(guard, body)


def gen_program(cfg):
    """Reproducible random program honoring the config flags."""
    rng = random.Random(cfg.seed)
    decls = _pick_decls(rng, cfg)
    g = _Gen(cfg, rng, decls)
    body = g.stmt(cfg.max_depth, frozenset())
    return ProgramFile(decls, (), (), (), body)


# ---------------------------------------------------------------- down-sets

def enumerate_downsets(n):
    """Every nonempty subset-closed family over n states, exactly once.

    Enumerated as the nonempty antichains of the subset lattice, in a
    fixed DFS order.  Limited to n <= 5.
    """
    if n > 5:
        raise SpaceTooLarge("down-set enumeration limited to 5 states")
    masks = list(range(1 << n))

    def rec(start, chosen):
        for i in range(start, len(masks)):
            m = masks[i]
            if any(m & ~c == 0 or c & ~m == 0 for c in chosen):
                continue
            nxt = chosen + [m]
            yield FamilySet.downset(nxt)
            yield from rec(i + 1, nxt)

    yield from rec(0, [])


def random_downset(rng, n, max_antichain=3):
    """Random nonempty subset-closed family over n states."""
    k = rng.randint(1, max_antichain)
    masks = [rng.randrange(1 << n) for _ in range(k)]
    return FamilySet.downset(masks)


def lift_family(tr, fam):
    """Elementwise image { phi p | p in fam } as an explicit family."""
    return FamilySet.explicit(tr.apply(p) for p in fam.members())


# ---------------------------------------------------------------- oracles

def diff_prop1(cfg, trials=200):
    """Direct image of the relational denotation vs the transformer
    denotation, exhaustive over every subset; any gap is a bug."""
    report = DiffReport()
    for t in range(trials):
        pf = gen_program(replace(cfg, seed=cfg.seed * 100003 + t))
        space = pf.space()
        rel = sem_rel(pf.body, space)
        tr = sem_tr(pf.body, space)
        report.trials += 1
        for p in range(1 << space.size):
            a = rel.dirimg(p)
            b = tr.apply(p)
            if a != b:
                report.record_failure(
                    f"program:\n{pp_program(pf)}\np={p:#x} rel-image={a:#x} "
                    f"transformer={b:#x}")
                break
    return report


def diff_thm1(cfg, trials=100, queries=None, samples=100, *,
              deterministic=True, cross_check=False):
    """Hyper denotation vs elementwise lift of the transformer denotation
    on subset-closed queries.

    Equality is the oracle for deterministic choice-free programs.  With
    deterministic=False only the containment lift <= hyper is required
    and strict cases are counted.
    """
    report = DiffReport()
    stats_host = []
    for t in range(trials):
        seed = cfg.seed * 499979 + t
        if deterministic:
            sub = replace(cfg, seed=seed, allow_choice=False,
                          allow_nondet_atoms=False)
        else:
            sub = replace(cfg, seed=seed, allow_choice=True)
        pf = gen_program(sub)
        space = pf.space()
        tr = sem_tr(pf.body, space)
        ev = HEval(space, LoopVariant.PAPER, cross_check=cross_check)
        stats_host.append(ev.stats)
        if queries is not None:
            battery = queries
        else:
            rng = random.Random(seed ^ 0x5EED)
            battery = [random_downset(rng, space.size) for _ in range(samples)]
        report.trials += 1
        for q in battery:
            got = ev.eval(pf.body, q)
            want = lift_family(tr, q)
            if deterministic:
                if got != want:
                    report.record_failure(
                        f"program:\n{pp_program(pf)}\nquery={q!r}\n"
                        f"hyper={got!r}\nlift={want!r}")
                    break
            else:
                if not want <= got:
                    report.record_failure(
                        f"program:\n{pp_program(pf)}\nquery={q!r}\n"
                        f"hyper={got!r}\nlift={want!r}")
                    break
                if got != want:
                    report.strict_cases += 1
    if cross_check:
        mism = sum(len(s.cross_mismatches) for s in stats_host)
        report.cross_checks = sum(s.cross_checks for s in stats_host)
        if mism:
            report.record_failure(f"{mism} kleene cross-check mismatches")
            report.failures += mism - 1
    return report


# ---------------------------------------------------------------- searches

def search_psc_join_counterexample(seed=0, trials=2000, size=3):
    """Random search for disjunctive transformers with the subset-image
    property whose join lacks it (open question; domains may overlap)."""
    rng = random.Random(seed)
    for _ in range(trials):
        a = _random_rel(rng, size)
        b = _random_rel(rng, size)
        ta = Transformer.image(a)
        tb = Transformer.image(b)
        if not (psc_check(ta) and psc_check(tb)):
            continue
        if not psc_check(ta.join(tb)):
            return a, b
    return None


def search_ssc_necessity(seed=0, trials=200, size=4):
    """Sample non-closed queries on deterministic programs and report
    how often the loop fixpoint differs from the elementwise lift."""
    rng = random.Random(seed)
    mismatches = 0
    witness = None
    for t in range(trials):
        cfg = GenConfig(seed=seed * 31 + t, allow_choice=False,
                        allow_nondet_atoms=False, max_space=size,
                        space_size=size)
        pf = gen_program(cfg)
        space = pf.space()
        members = [rng.randrange(1 << space.size)
                   for _ in range(rng.randint(1, 3))]
        q = FamilySet.explicit(members)
        if q.is_subset_closed():
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got = happly(pf.body, q, space, LoopVariant.PAPER, strict=False)
        want = lift_family(sem_tr(pf.body, space), q)
        if got != want:
            mismatches += 1
            if witness is None:
                witness = (pf, q, got, want)
    return mismatches, trials, witness


def _random_rel(rng, size):
    density = rng.random()
    rows = []
    for _ in range(size):
        row = 0
        for t in range(size):
            if rng.random() < density:
                row |= 1 << t
        rows.append(row)
    space = _sized_space(size)
    return Rel(space, rows)


_SPACE_CACHE = {}


def _sized_space(n):
    space = _SPACE_CACHE.get(n)
    if space is None:
        from .space import StateSpace
        space = StateSpace((("s", 0, n - 1),))
        _SPACE_CACHE[n] = space
    return space
