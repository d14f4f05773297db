"""Surface syntax: AST, parser, pretty printer, and atom elaboration.

Program files declare finite-range variables, optionally a low-security
view, and one statement:

    var x: 0..7;
    low x;
    while x < 4 { x := x + 1 }

Statements: ``skip``, ``x := e``, ``assume b``, ``x :in e1..e2``,
``havoc x``, ``rel { {x=0} -> {x=4}, ... }``, ``c ; d``, ``c [] d``
(nondeterministic choice, binding looser than ``;``),
``if b { c } else { d }``, ``while b { c }``.  Line comments ``//``.
"""

import re
from dataclasses import dataclass

from .errors import ParseError, UndeclaredVariable
from .relation import Rel
from .space import StateSpace


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class IntVar:
    name: str


@dataclass(frozen=True)
class IntNeg:
    expr: object


@dataclass(frozen=True)
class IntBin:
    op: str  # + - *
    left: object
    right: object


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # = != < <= > >=
    left: object
    right: object


@dataclass(frozen=True)
class BoolBin:
    op: str  # && ||
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    expr: object


@dataclass(frozen=True)
class Assign:
    var: str
    expr: object


@dataclass(frozen=True)
class Assume:
    cond: object


@dataclass(frozen=True)
class NondetAssign:
    var: str
    lo: object
    hi: object


@dataclass(frozen=True)
class Havoc:
    var: str


@dataclass(frozen=True)
class RelAtom:
    # pairs of state literals, each a sorted tuple of (name, value)
    pairs: tuple


@dataclass(frozen=True)
class Atom:
    atom: object


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Seq:
    first: object
    rest: object


@dataclass(frozen=True)
class Choice:
    left: object
    right: object


@dataclass(frozen=True)
class If:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class While:
    cond: object
    body: object


@dataclass(frozen=True)
class ProgramFile:
    decls: tuple  # (name, lo, hi) in declaration order
    low: tuple
    low_in: tuple
    low_out: tuple
    body: object

    def space(self, size_cap=64):
        return StateSpace(self.decls, size_cap=size_cap)


# ---------------------------------------------------------------- lexer

KEYWORDS = {"var", "low", "lowin", "lowout", "skip", "assume", "havoc",
            "rel", "if", "else", "while", "true", "false", "and", "or", "not"}

_SYMBOLS = [":=", ":in", "..", "[]", "->", "!=", "<=", ">=", "&&", "||",
            ";", "{", "}", "(", ")", "[", "]", ",", "=", "<", ">", "+",
            "-", "*", "!", ":"]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r})"


def tokenize(text):
    toks = []
    i = 0
    line = 1
    col = 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            word = m.group()
            kind = "kw" if word in KEYWORDS else "name"
            toks.append(Token(kind, word, line, col))
            col += len(word)
            i = m.end()
            continue
        m = _INT_RE.match(text, i)
        if m:
            toks.append(Token("int", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, text):
        t = self.peek()
        return t.text == text and t.kind in ("sym", "kw")

    def eat(self, text):
        if not self.at(text):
            t = self.peek()
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def fail(self, msg):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def name(self):
        t = self.peek()
        if t.kind != "name":
            self.fail(f"expected identifier, found {t.text!r}")
        return self.next().text

    def int_lit(self):
        neg = False
        if self.at("-"):
            self.next()
            neg = True
        t = self.peek()
        if t.kind != "int":
            self.fail(f"expected integer, found {t.text!r}")
        v = int(self.next().text)
        return -v if neg else v

    # ---- program

    def program(self):
        decls = []
        low = ()
        low_in = ()
        low_out = ()
        while self.at("var") or self.at("low") or self.at("lowin") or self.at("lowout"):
            if self.at("var"):
                self.next()
                nm = self.name()
                self.eat(":")
                lo = self.int_lit()
                self.eat("..")
                hi = self.int_lit()
                self.eat(";")
                decls.append((nm, lo, hi))
            else:
                which = self.next().text
                names = [self.name()]
                while self.at(","):
                    self.next()
                    names.append(self.name())
                self.eat(";")
                if which == "low":
                    low += tuple(names)
                elif which == "lowin":
                    low_in += tuple(names)
                else:
                    low_out += tuple(names)
        if not decls:
            self.fail("program must declare at least one variable")
        body = self.stmt()
        t = self.peek()
        if t.kind != "eof":
            self.fail(f"unexpected trailing input {t.text!r}")
        pf = ProgramFile(tuple(decls), low, low_in, low_out, body)
        _check_declared(pf)
        return pf

    # ---- statements

    def stmt(self):
        node = self.seq()
        while self.at("[]"):
            self.next()
            node = Choice(node, self.seq())
        return node

    def seq(self):
        first = self.unit()
        if self.at(";"):
            self.next()
            return Seq(first, self.seq())
        return first

    def unit(self):
        t = self.peek()
        if self.at("skip"):
            self.next()
            return Skip()
        if self.at("assume"):
            self.next()
            return Atom(Assume(self.bexpr()))
        if self.at("havoc"):
            self.next()
            return Atom(Havoc(self.name()))
        if self.at("rel"):
            self.next()
            return Atom(self.rel_atom())
        if self.at("if"):
            self.next()
            cond = self.bexpr()
            self.eat("{")
            then = self.stmt()
            self.eat("}")
            self.eat("else")
            self.eat("{")
            orelse = self.stmt()
            self.eat("}")
            return If(cond, then, orelse)
        if self.at("while"):
            self.next()
            cond = self.bexpr()
            self.eat("{")
            body = self.stmt()
            self.eat("}")
            return While(cond, body)
        if self.at("("):
            self.next()
            node = self.stmt()
            self.eat(")")
            return node
        if t.kind == "name":
            nm = self.next().text
            if self.at(":="):
                self.next()
                return Atom(Assign(nm, self.iexpr()))
            if self.at(":in"):
                self.next()
                lo = self.iexpr()
                self.eat("..")
                hi = self.iexpr()
                return Atom(NondetAssign(nm, lo, hi))
            self.fail(f"expected ':=' or ':in' after {nm!r}")
        self.fail(f"expected statement, found {t.text!r}")

    def rel_atom(self):
        self.eat("{")
        pairs = []
        if not self.at("}"):
            while True:
                src = self.state_literal()
                self.eat("->")
                dst = self.state_literal()
                pairs.append((src, dst))
                if self.at(","):
                    self.next()
                    continue
                break
        self.eat("}")
        return RelAtom(tuple(pairs))

    def state_literal(self):
        self.eat("{")
        items = []
        if not self.at("}"):
            while True:
                nm = self.name()
                self.eat("=")
                items.append((nm, self.int_lit()))
                if self.at(","):
                    self.next()
                    continue
                break
        self.eat("}")
        return tuple(sorted(items))

    # ---- boolean expressions

    def bexpr(self):
        node = self.band()
        while self.at("||") or self.at("or"):
            self.next()
            node = BoolBin("||", node, self.band())
        return node

    def band(self):
        node = self.bnot()
        while self.at("&&") or self.at("and"):
            self.next()
            node = BoolBin("&&", node, self.bnot())
        return node

    def bnot(self):
        if self.at("!") or self.at("not"):
            self.next()
            return Not(self.bnot())
        return self.batom()

    def batom(self):
        if self.at("true"):
            self.next()
            return BoolConst(True)
        if self.at("false"):
            self.next()
            return BoolConst(False)
        if self.at("("):
            # either a parenthesized bexpr or an iexpr inside a comparison
            save = self.pos
            try:
                self.next()
                node = self.bexpr()
                self.eat(")")
                return node
            except ParseError:
                self.pos = save
        left = self.iexpr()
        t = self.peek()
        if t.text in ("=", "!=", "<", "<=", ">", ">=") and t.kind == "sym":
            op = self.next().text
            return Cmp(op, left, self.iexpr())
        self.fail(f"expected comparison operator, found {t.text!r}")

    # ---- integer expressions

    def iexpr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.next().text
            node = IntBin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at("*"):
            self.next()
            node = IntBin("*", node, self.factor())
        return node

    def factor(self):
        t = self.peek()
        if self.at("-"):
            self.next()
            return IntNeg(self.factor())
        if t.kind == "int":
            return IntConst(int(self.next().text))
        if t.kind == "name":
            return IntVar(self.next().text)
        if self.at("("):
            self.next()
            node = self.iexpr()
            self.eat(")")
            return node
        self.fail(f"expected integer expression, found {t.text!r}")


def parse(text):
    """Parse program text into a ProgramFile."""
    return _Parser(text).program()


def parse_stmt(text, decls):
    """Parse a bare statement against existing declarations (for tests)."""
    p = _Parser(text)
    body = p.stmt()
    if p.peek().kind != "eof":
        p.fail("unexpected trailing input")
    pf = ProgramFile(tuple(decls), (), (), (), body)
    _check_declared(pf)
    return pf


def _check_declared(pf):
    declared = {n for n, _, _ in pf.decls}
    for nm in pf.low + pf.low_in + pf.low_out:
        if nm not in declared:
            raise UndeclaredVariable(nm)

    def visit_int(e):
        if isinstance(e, IntVar):
            if e.name not in declared:
                raise UndeclaredVariable(e.name)
        elif isinstance(e, IntNeg):
            visit_int(e.expr)
        elif isinstance(e, IntBin):
            visit_int(e.left)
            visit_int(e.right)

    def visit_bool(b):
        if isinstance(b, Cmp):
            visit_int(b.left)
            visit_int(b.right)
        elif isinstance(b, BoolBin):
            visit_bool(b.left)
            visit_bool(b.right)
        elif isinstance(b, Not):
            visit_bool(b.expr)

    def visit(node):
        if isinstance(node, Atom):
            a = node.atom
            if isinstance(a, Assign):
                if a.var not in declared:
                    raise UndeclaredVariable(a.var)
                visit_int(a.expr)
            elif isinstance(a, Assume):
                visit_bool(a.cond)
            elif isinstance(a, NondetAssign):
                if a.var not in declared:
                    raise UndeclaredVariable(a.var)
                visit_int(a.lo)
                visit_int(a.hi)
            elif isinstance(a, Havoc):
                if a.var not in declared:
                    raise UndeclaredVariable(a.var)
            elif isinstance(a, RelAtom):
                for src, dst in a.pairs:
                    for nm, _ in src + dst:
                        if nm not in declared:
                            raise UndeclaredVariable(nm)
        elif isinstance(node, Seq):
            visit(node.first)
            visit(node.rest)
        elif isinstance(node, Choice):
            visit(node.left)
            visit(node.right)
        elif isinstance(node, If):
            visit_bool(node.cond)
            visit(node.then)
            visit(node.orelse)
        elif isinstance(node, While):
            visit_bool(node.cond)
            visit(node.body)

    visit(pf.body)


# ---------------------------------------------------------------- pretty

def pp_int(e, level=0):
    if isinstance(e, IntConst):
        return str(e.value)
    if isinstance(e, IntVar):
        return e.name
    if isinstance(e, IntNeg):
        return "-" + pp_int(e.expr, 3)
    prec = 2 if e.op == "*" else 1
    s = f"{pp_int(e.left, prec)} {e.op} {pp_int(e.right, prec + 1)}"
    return f"({s})" if prec < level else s


def pp_bool(b, level=0):
    if isinstance(b, BoolConst):
        return "true" if b.value else "false"
    if isinstance(b, Cmp):
        return f"{pp_int(b.left)} {b.op} {pp_int(b.right)}"
    if isinstance(b, Not):
        inner = pp_bool(b.expr, 4)
        if isinstance(b.expr, (BoolConst, Not)):
            return "!" + inner
        return f"!({inner})"
    prec = 2 if b.op == "&&" else 1
    s = f"{pp_bool(b.left, prec)} {b.op} {pp_bool(b.right, prec + 1)}"
    return f"({s})" if prec < level else s


def _pp_state_literal(items):
    return "{" + ",".join(f"{n}={v}" for n, v in items) + "}"


def pp_stmt(node, level=0):
    if isinstance(node, Skip):
        return "skip"
    if isinstance(node, Atom):
        a = node.atom
        if isinstance(a, Assign):
            return f"{a.var} := {pp_int(a.expr)}"
        if isinstance(a, Assume):
            return f"assume {pp_bool(a.cond)}"
        if isinstance(a, NondetAssign):
            return f"{a.var} :in {pp_int(a.lo)}..{pp_int(a.hi)}"
        if isinstance(a, Havoc):
            return f"havoc {a.var}"
        if isinstance(a, RelAtom):
            body = ", ".join(
                f"{_pp_state_literal(s)} -> {_pp_state_literal(d)}"
                for s, d in a.pairs)
            return "rel { " + body + " }" if body else "rel { }"
    if isinstance(node, Seq):
        s = f"{pp_stmt(node.first, 2)} ; {pp_stmt(node.rest, 1)}"
        return f"({s})" if level > 1 else s
    if isinstance(node, Choice):
        s = f"{pp_stmt(node.left, 1)} [] {pp_stmt(node.right, 1)}"
        return f"({s})" if level > 0 else s
    if isinstance(node, If):
        return (f"if {pp_bool(node.cond)} {{ {pp_stmt(node.then)} }} "
                f"else {{ {pp_stmt(node.orelse)} }}")
    if isinstance(node, While):
        return f"while {pp_bool(node.cond)} {{ {pp_stmt(node.body)} }}"
    raise TypeError(f"not a statement: {node!r}")


def pp_program(pf):
    lines = [f"var {n}: {lo}..{hi};" for n, lo, hi in pf.decls]
    if pf.low:
        lines.append("low " + ", ".join(pf.low) + ";")
    if pf.low_in:
        lines.append("lowin " + ", ".join(pf.low_in) + ";")
    if pf.low_out:
        lines.append("lowout " + ", ".join(pf.low_out) + ";")
    lines.append(pp_stmt(pf.body))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- evaluation

def eval_int(e, env):
    if isinstance(e, IntConst):
        return e.value
    if isinstance(e, IntVar):
        return env[e.name]
    if isinstance(e, IntNeg):
        return -eval_int(e.expr, env)
    a = eval_int(e.left, env)
    b = eval_int(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    return a * b


def eval_bool_at(b, env):
    if isinstance(b, BoolConst):
        return b.value
    if isinstance(b, Cmp):
        x = eval_int(b.left, env)
        y = eval_int(b.right, env)
        return {"=": x == y, "!=": x != y, "<": x < y,
                "<=": x <= y, ">": x > y, ">=": x >= y}[b.op]
    if isinstance(b, Not):
        return not eval_bool_at(b.expr, env)
    if b.op == "&&":
        return eval_bool_at(b.left, env) and eval_bool_at(b.right, env)
    return eval_bool_at(b.left, env) or eval_bool_at(b.right, env)


def eval_bool(b, space):
    """Mask of the states satisfying b (guards are total)."""
    out = 0
    for s in space.states():
        if eval_bool_at(b, space.decode(s)):
            out |= 1 << s
    return out


# ---------------------------------------------------------------- elaboration

def elaborate_atom(a, space):
    """Relation denoted by an atom over the given space.

    Assignments whose result falls outside the declared range yield no
    transition from that state (partial atoms, not wrapping).
    """
    n = space.size
    if isinstance(a, Assign):
        lo, hi = space.var_range(a.var)
        rows = []
        for s in space.states():
            env = space.decode(s)
            v = eval_int(a.expr, env)
            if lo <= v <= hi:
                env[a.var] = v
                rows.append(1 << space.encode(env))
            else:
                rows.append(0)
        return Rel(space, rows)
    if isinstance(a, Assume):
        return Rel.coreflexive(space, eval_bool(a.cond, space))
    if isinstance(a, NondetAssign):
        lo, hi = space.var_range(a.var)
        rows = []
        for s in space.states():
            env = space.decode(s)
            vlo = max(lo, eval_int(a.lo, env))
            vhi = min(hi, eval_int(a.hi, env))
            row = 0
            for v in range(vlo, vhi + 1):
                env2 = dict(env)
                env2[a.var] = v
                row |= 1 << space.encode(env2)
            rows.append(row)
        return Rel(space, rows)
    if isinstance(a, Havoc):
        lo, hi = space.var_range(a.var)
        rows = []
        for s in space.states():
            env = space.decode(s)
            row = 0
            for v in range(lo, hi + 1):
                env2 = dict(env)
                env2[a.var] = v
                row |= 1 << space.encode(env2)
            rows.append(row)
        return Rel(space, rows)
    if isinstance(a, RelAtom):
        rows = [0] * n
        for src, dst in a.pairs:
            s = space.encode(dict(src))
            t = space.encode(dict(dst))
            rows[s] |= 1 << t
        return Rel(space, rows)
    raise TypeError(f"not an atom: {a!r}")


def iter_atoms(node):
    if isinstance(node, Atom):
        yield node.atom
    elif isinstance(node, Seq):
        yield from iter_atoms(node.first)
        yield from iter_atoms(node.rest)
    elif isinstance(node, Choice):
        yield from iter_atoms(node.left)
        yield from iter_atoms(node.right)
    elif isinstance(node, If):
        yield from iter_atoms(node.then)
        yield from iter_atoms(node.orelse)
    elif isinstance(node, While):
        yield from iter_atoms(node.body)


def is_choice_free(node):
    if isinstance(node, Choice):
        return False
    if isinstance(node, Seq):
        return is_choice_free(node.first) and is_choice_free(node.rest)
    if isinstance(node, If):
        return is_choice_free(node.then) and is_choice_free(node.orelse)
    if isinstance(node, While):
        return is_choice_free(node.body)
    return True


def atoms_deterministic(node, space):
    """True iff every elaborated atom is a partial function."""
    return all(elaborate_atom(a, space).is_partial_function()
               for a in iter_atoms(node))
