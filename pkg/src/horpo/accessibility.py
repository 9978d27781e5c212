"""Accessible argument positions and the accessible-subterm relations."""
from __future__ import annotations

from typing import Sequence

from .terms import (
    App,
    Data,
    Fun,
    FunDecl,
    Term,
    Ty,
    alpha_eq,
    data_types_in,
    free_vars,
    strict_subterms,
)
from .typeorder import (
    SortOrder,
    is_minimal_type,
    occurs_negatively,
    occurs_positively,
    ty_eq,
    ty_ge,
)

APP_SYM = "@"


def acc_indices(decl: FunDecl, order: SortOrder) -> frozenset[int]:
    """1-based argument positions of `decl` that are accessible.

    Position i is accessible when every data type in the argument type sits at
    or below the (data) output type, and those equivalent to the output occur
    only positively. Symbols with a non-data output have no accessible
    positions (the treatment the application operator gets).
    """
    out = decl.out_ty
    if not isinstance(out, Data):
        return frozenset()
    acc = set()
    for i, arg_ty in enumerate(decl.arg_tys, start=1):
        ok = True
        for dt in data_types_in(arg_ty):
            if not ty_ge(order, out, dt):
                ok = False
                break
            if ty_eq(order, dt, out):
                if not occurs_positively(order, dt, arg_ty) or occurs_negatively(
                    order, dt, arg_ty
                ):
                    ok = False
                    break
        if ok:
            acc.add(i)
    return frozenset(acc)


class AccTable:
    """Accessible positions per symbol, computed once per signature."""

    def __init__(self, decls: Sequence[FunDecl], order: SortOrder):
        self._table: dict[str, frozenset[int]] = {
            d.name: acc_indices(d, order) for d in decls
        }
        self._table[APP_SYM] = frozenset()

    def __getitem__(self, sym: str) -> frozenset[int]:
        return self._table[sym]


def accessible(acc: AccTable, u: Term, s: Term) -> bool:
    """True iff `u` is reachable from the algebraic term `s` through
    accessible argument positions."""
    if not isinstance(s, Fun):
        return False
    for i in sorted(acc[s.sym]):
        arg = s.args[i - 1]
        if alpha_eq(u, arg):
            return True
        if isinstance(arg, Fun) and accessible(acc, u, arg):
            return True
    return False


def acc_gt(
    acc: AccTable,
    order: SortOrder,
    min_types: Sequence[Ty],
    s: Term,
    v: Term,
) -> bool:
    """The strict accessible-subterm relation.

    `s` must be headed by a function symbol or an application; `v` qualifies
    if it is accessible in `s`, or if it is a strict subterm of minimal type
    whose free variables are all free in `s`.
    """
    if isinstance(s, Fun) and accessible(acc, v, s):
        return True
    if isinstance(s, (Fun, App)):
        if is_minimal_type(order, min_types, v.ty) and free_vars(v) <= free_vars(s):
            return any(alpha_eq(v, u) for u in strict_subterms(s))
    return False


def acc_ge(
    acc: AccTable,
    order: SortOrder,
    min_types: Sequence[Ty],
    s: Term,
    v: Term,
) -> bool:
    return alpha_eq(s, v) or acc_gt(acc, order, min_types, s, v)


def acc_candidates(
    acc: AccTable,
    order: SortOrder,
    min_types: Sequence[Ty],
    s: Term,
    strict: bool,
) -> list[Term]:
    """Deterministic enumeration of all w with s acc-above w.

    Pre-order over subterm positions, deduplicated up to alpha; the reflexive
    candidate (s itself) comes first unless `strict`.
    """
    out: list[Term] = []
    if not strict:
        out.append(s)
    if isinstance(s, (Fun, App)):
        fv_s = free_vars(s)
        for v in strict_subterms(s):
            if any(alpha_eq(v, w) for w in out):
                continue
            if isinstance(s, Fun) and accessible(acc, v, s):
                out.append(v)
            elif is_minimal_type(order, min_types, v.ty) and free_vars(v) <= fv_s:
                out.append(v)
    return out
