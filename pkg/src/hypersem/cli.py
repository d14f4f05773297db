"""Command-line entry point.

Exit codes: 0 for success / verdict true, 1 for verdict false or
differential failures, 2 for usage and parse errors.
"""

import argparse
import sys

from . import _kernels
from .errors import WorkbenchError
from .family import FamilySet
from .harness import (GenConfig, diff_prop1, diff_thm1, enumerate_downsets,
                      search_psc_join_counterexample, search_ssc_necessity)
from .hyper import HEval, LoopVariant, happly, loop_iterates
from .lang import (Atom, Choice, If, Seq, Skip, While, parse, pp_bool, pp_int,
                   pp_stmt)
from .noninterference import (LowView, ni_hyper, ni_possibilistic,
                              ni_relational)
from .notation import (family_json, format_family, format_state,
                       format_state_set, parse_family, parse_rel_file,
                       parse_state, parse_state_set, state_set_json,
                       to_json_text)
from .semantics import sem_rel, sem_tr
from .transformer import Transformer, psc_check

_VARIANTS = {v.value: v for v in LoopVariant}


def _read_program(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _ast_lines(node, indent=0):
    pad = "  " * indent
    if isinstance(node, Skip):
        yield pad + "skip"
    elif isinstance(node, Atom):
        yield pad + "atom " + pp_stmt(node)
    elif isinstance(node, Seq):
        yield pad + "seq"
        yield from _ast_lines(node.first, indent + 1)
        yield from _ast_lines(node.rest, indent + 1)
    elif isinstance(node, Choice):
        yield pad + "choice"
        yield from _ast_lines(node.left, indent + 1)
        yield from _ast_lines(node.right, indent + 1)
    elif isinstance(node, If):
        yield pad + "if " + pp_bool(node.cond)
        yield from _ast_lines(node.then, indent + 1)
        yield pad + "else"
        yield from _ast_lines(node.orelse, indent + 1)
    elif isinstance(node, While):
        yield pad + "while " + pp_bool(node.cond)
        yield from _ast_lines(node.body, indent + 1)


def _cmd_parse(args):
    pf = _read_program(args.file)
    for n, lo, hi in pf.decls:
        print(f"var {n}: {lo}..{hi}")
    for group, names in (("low", pf.low), ("lowin", pf.low_in),
                         ("lowout", pf.low_out)):
        if names:
            print(f"{group} " + ", ".join(names))
    for line in _ast_lines(pf.body):
        print(line)
    return 0


def _cmd_eval(args):
    pf = _read_program(args.file)
    space = pf.space()
    if args.level == "rel":
        sid = parse_state(space, args.input)
        rel = sem_rel(pf.body, space)
        out = rel.dirimg(1 << sid)
        print(to_json_text(state_set_json(space, out)) if args.format == "json-like"
              else format_state_set(space, out))
        return 0
    if args.level == "tr":
        mask = parse_state_set(space, args.input)
        tr = sem_tr(pf.body, space)
        out = tr.apply(mask)
        print(to_json_text(state_set_json(space, out)) if args.format == "json-like"
              else format_state_set(space, out))
        return 0
    fam = parse_family(space, args.input)
    variant = _VARIANTS[args.variant]
    out = happly(pf.body, fam, space, variant, strict=not args.no_strict_ssc)
    if args.format == "json-like":
        print(to_json_text(family_json(space, out, antichain=args.antichain)))
    else:
        print(format_family(space, out, antichain=args.antichain))
    return 0


def _cmd_iterates(args):
    pf = _read_program(args.file)
    space = pf.space()
    if not isinstance(pf.body, While):
        print("iterates needs a program whose body is a single loop",
              file=sys.stderr)
        return 2
    fam = parse_family(space, args.query)
    variant = _VARIANTS[args.variant]
    vals = loop_iterates(pf.body.cond, pf.body.body, fam, args.steps,
                         space, variant)
    for i, v in enumerate(vals):
        print(f"Q{i} = {format_family(space, v)}")
    return 0


def _cmd_check_ni(args):
    pf = _read_program(args.file)
    space = pf.space()
    low_in = pf.low_in or pf.low
    low_out = pf.low_out or pf.low
    if not low_in:
        print("program declares no low variables", file=sys.stderr)
        return 2
    view_in = LowView(space, low_in)
    view_out = LowView(space, low_out)
    rel = sem_rel(pf.body, space)
    forms = ("rel", "poss", "hyper") if args.form == "all" else (args.form,)
    ok = True
    for form in forms:
        if form == "rel":
            verdict = ni_relational(rel, view_in, view_out)
        elif form == "poss":
            verdict = ni_possibilistic(rel, view_in, view_out)
        else:
            verdict = ni_hyper(pf.body, view_in, view_out)
        if verdict:
            print(f"{form}: secure")
        else:
            ok = False
            if form == "hyper":
                cls, img = verdict.witness
                print(f"{form}: insecure  class={format_state_set(space, cls)} "
                      f"image={format_state_set(space, img)}")
            elif form == "poss":
                s, t = verdict.witness
                print(f"{form}: insecure  required successor missing for "
                      f"{format_state(space, s)} ~> {format_state(space, t)}")
            else:
                s, s2, t, t2 = verdict.witness
                print(f"{form}: insecure  witness "
                      f"{format_state(space, s)}->{format_state(space, s2)} vs "
                      f"{format_state(space, t)}->{format_state(space, t2)}")
    return 0 if ok else 1


def _print_report(kind, report):
    print(f"{kind}: trials={report.trials} failures={report.failures}"
          + (f" strict-cases={report.strict_cases}" if report.strict_cases else "")
          + (f" cross-checks={report.cross_checks}" if report.cross_checks else ""))
    if report.first_witness:
        print("first witness:")
        print(report.first_witness)
    return 0 if report.failures == 0 else 1


def _cmd_diff(args):
    cfg = GenConfig(seed=args.seed, max_space=args.size or 10)
    if args.prop1:
        return _print_report("prop1", diff_prop1(cfg, trials=args.trials))
    if args.thm1:
        size = args.size or 4
        cfg = GenConfig(seed=args.seed, max_space=size, space_size=size)
        queries = (list(enumerate_downsets(size)) if size <= 5 else None)
        report = diff_thm1(cfg, trials=args.trials, queries=queries,
                           cross_check=args.cross_check)
        return _print_report("thm1", report)
    if args.search == "psc-join":
        found = search_psc_join_counterexample(seed=args.seed,
                                               trials=args.trials,
                                               size=args.size or 3)
        if found is None:
            print("no counterexample found (join of the sampled "
                  "subset-image-preserving transformers kept the property)")
            return 0
        a, b = found
        print(f"counterexample: {a!r} joined with {b!r}")
        return 1
    if args.search == "ssc-necessity":
        mism, trials, witness = search_ssc_necessity(seed=args.seed,
                                                     trials=args.trials,
                                                     size=args.size or 4)
        print(f"non-closed queries with fixpoint != lift: {mism}/{trials}")
        return 0
    print("choose --prop1, --thm1 or --search", file=sys.stderr)
    return 2


def _cmd_psc(args):
    with open(args.relfile, encoding="utf-8") as fh:
        space, rel = parse_rel_file(fh.read())
    result = psc_check(Transformer.image(rel))
    if result:
        print("psc: holds")
        return 0
    print(f"psc: fails  q={format_state_set(space, result.q)} "
          f"r={format_state_set(space, result.r)}")
    return 1


def _cmd_enumerate(args):
    count = 0
    for fam in enumerate_downsets(args.size):
        count += 1
        if args.list:
            from .space import StateSpace
            space = StateSpace((("s", 0, args.size - 1),))
            print(format_family(space, fam))
    print(f"nonempty subset-closed families over {args.size} states: {count}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="hypersem",
        description="finite-state workbench for relational, transformer and "
                    "hyper-level program semantics")
    ap.add_argument("--backend", action="store_true",
                    help="print the kernel backend and exit")
    sub = ap.add_subparsers(dest="cmd")

    p = sub.add_parser("parse", help="parse a program and print its AST")
    p.add_argument("file")

    p = sub.add_parser("eval", help="evaluate a program on an input literal")
    p.add_argument("file")
    p.add_argument("--level", choices=("rel", "tr", "hyper"), default="tr")
    p.add_argument("--input", required=True,
                   help="state / state set / family literal, per level")
    p.add_argument("--variant", choices=sorted(_VARIANTS), default="paper")
    p.add_argument("--no-strict-ssc", action="store_true",
                   help="downgrade the subset-closed query check to a warning")
    p.add_argument("--format", choices=("text", "json-like"), default="text")
    p.add_argument("--antichain", action="store_true",
                   help="print only maximal sets of the result family")

    p = sub.add_parser("iterates", help="print loop-functional iterates")
    p.add_argument("file")
    p.add_argument("--query", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--variant", choices=sorted(_VARIANTS), default="paper")

    p = sub.add_parser("check-ni", help="noninterference checks")
    p.add_argument("file")
    p.add_argument("--form", choices=("rel", "poss", "hyper", "all"),
                   default="all")

    p = sub.add_parser("diff", help="differential oracles and searches")
    p.add_argument("--prop1", action="store_true")
    p.add_argument("--thm1", action="store_true")
    p.add_argument("--search", choices=("psc-join", "ssc-necessity"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--size", type=int)
    p.add_argument("--cross-check", action="store_true",
                   help="verify demand-driven loop values against the "
                        "synchronized iteration")

    p = sub.add_parser("psc", help="check the subset-image property of a "
                                   "relation file")
    p.add_argument("relfile")

    p = sub.add_parser("enumerate", help="enumerate subset-closed families")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--list", action="store_true")

    return ap


_HANDLERS = {
    "parse": _cmd_parse,
    "eval": _cmd_eval,
    "iterates": _cmd_iterates,
    "check-ni": _cmd_check_ni,
    "diff": _cmd_diff,
    "psc": _cmd_psc,
    "enumerate": _cmd_enumerate,
}


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.backend:
        print(_kernels.backend())
        return 0
    if args.cmd is None:
        ap.print_usage(sys.stderr)
        return 2
    try:
        return _HANDLERS[args.cmd](args)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
