"""Finite-state workbench for relational, transformer and hyper-level
semantics of a small imperative language."""

from ._kernels import backend as kernel_backend
from .family import (DEFAULT_EXPANSION_CAP, FamilySet, family_eq, family_le,
                     family_union, is_subset_closed, mask_of, powerset_family,
                     ssc, states_of)
from .hyper import (HEval, LoopVariant, guarded_join_apply, happly,
                    hrefines, hyper_bottom, inner_join_apply, lfp_demand,
                    loop_iterates, otimes_apply)
from .lang import (atoms_deterministic, elaborate_atom, eval_bool,
                   is_choice_free, parse, pp_program)
from .noninterference import (LowView, agr, ni_hyper, ni_possibilistic,
                              ni_relational, refinement_preserves)
from .relation import Rel, rel_recover
from .semantics import sem_rel, sem_tr
from .space import StateSpace, decode_state, encode_state
from .transformer import (Transformer, dom, is_monotone,
                          is_univ_disjunctive, psc_check)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EXPANSION_CAP", "FamilySet", "HEval", "LoopVariant", "LowView",
    "Rel", "StateSpace", "Transformer", "agr", "atoms_deterministic",
    "decode_state", "dom", "elaborate_atom", "encode_state", "eval_bool",
    "family_eq", "family_le", "family_union", "guarded_join_apply", "happly",
    "hrefines", "hyper_bottom", "inner_join_apply", "is_choice_free",
    "is_monotone", "is_subset_closed", "is_univ_disjunctive",
    "kernel_backend", "lfp_demand", "loop_iterates", "mask_of", "ni_hyper",
    "ni_possibilistic", "ni_relational", "otimes_apply", "parse",
    "powerset_family", "pp_program", "psc_check", "refinement_preserves",
    "rel_recover", "sem_rel", "sem_tr", "ssc", "states_of",
]
