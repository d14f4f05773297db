"""Program denotations at the relation and transformer levels.

Loops are least fixpoints computed by Kleene iteration from the bottom
element; on a finite space both chains stabilize within size*size steps
(each strict step adds at least one pair).
"""

from .errors import IterationBudgetExceeded
from .lang import (Atom, Choice, If, Seq, Skip, While, elaborate_atom,
                   eval_bool)
from .relation import Rel
from .transformer import Transformer


def guard_rel(b, space):
    """Coreflexive relation of a guard."""
    return Rel.coreflexive(space, eval_bool(b, space))


def neg_mask(mask, space):
    return space.full_mask & ~mask


def sem_rel(node, space):
    """Relational denotation."""
    if isinstance(node, Skip):
        return Rel.identity(space)
    if isinstance(node, Atom):
        return elaborate_atom(node.atom, space)
    if isinstance(node, Seq):
        return sem_rel(node.first, space).compose(sem_rel(node.rest, space))
    if isinstance(node, Choice):
        return sem_rel(node.left, space).union(sem_rel(node.right, space))
    if isinstance(node, If):
        b = eval_bool(node.cond, space)
        then = Rel.coreflexive(space, b).compose(sem_rel(node.then, space))
        els = Rel.coreflexive(space, neg_mask(b, space)).compose(
            sem_rel(node.orelse, space))
        return then.union(els)
    if isinstance(node, While):
        b = eval_bool(node.cond, space)
        guard = Rel.coreflexive(space, b)
        notb = Rel.coreflexive(space, neg_mask(b, space))
        body = sem_rel(node.body, space)
        step = guard.compose(body)
        cur = Rel.empty(space)
        budget = space.size * space.size + 2
        for _ in range(budget):
            nxt = step.compose(cur).union(notb)
            if nxt == cur:
                return cur
            cur = nxt
        raise IterationBudgetExceeded("relational loop fixpoint")
    raise TypeError(f"not a statement: {node!r}")


def sem_tr(node, space):
    """Transformer denotation; extensionally the direct image of sem_rel."""
    if isinstance(node, Skip):
        return Transformer.identity(space)
    if isinstance(node, Atom):
        return Transformer.image(elaborate_atom(node.atom, space))
    if isinstance(node, Seq):
        return sem_tr(node.first, space).compose(sem_tr(node.rest, space))
    if isinstance(node, Choice):
        return sem_tr(node.left, space).join(sem_tr(node.right, space))
    if isinstance(node, If):
        b = eval_bool(node.cond, space)
        tb = Transformer.image(Rel.coreflexive(space, b))
        tnb = Transformer.image(Rel.coreflexive(space, neg_mask(b, space)))
        return tb.compose(sem_tr(node.then, space)).join(
            tnb.compose(sem_tr(node.orelse, space)))
    if isinstance(node, While):
        b = eval_bool(node.cond, space)
        tb = Transformer.image(Rel.coreflexive(space, b))
        tnb = Transformer.image(Rel.coreflexive(space, neg_mask(b, space)))
        tbody = sem_tr(node.body, space)
        step = tb.compose(tbody)
        cur = Transformer.bottom(space)
        budget = space.size * space.size + 2
        for _ in range(budget):
            nxt = step.compose(cur).join(tnb)
            if nxt.extensionally_equal(cur):
                return cur
            cur = nxt
        raise IterationBudgetExceeded("transformer loop fixpoint")
    raise TypeError(f"not a statement: {node!r}")
