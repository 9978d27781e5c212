"""Simply typed algebraic lambda-terms: types, signatures, typing, substitution.

Terms are immutable trees. A typing pass (`typecheck`) returns a copy of the
term with every node annotated with its type; all downstream code assumes
annotated terms and never re-infers.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Mapping

# Reserved separator for generated names; rejected in user identifiers.
FRESH_SEP = "#"


class TypingError(Exception):
    """A raw term does not type-check against the signature."""


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Data:
    """A sort applied to type arguments (a data type)."""

    sort: str
    args: tuple["Ty", ...] = ()


@dataclass(frozen=True)
class Arrow:
    dom: "Ty"
    cod: "Ty"


Ty = Data | Arrow


def arrow(*tys: Ty) -> Ty:
    """Right-associated arrow type from a nonempty list of types."""
    if not tys:
        raise ValueError("arrow() needs at least one type")
    out = tys[-1]
    for ty in reversed(tys[:-1]):
        out = Arrow(ty, out)
    return out


def ty_str(ty: Ty) -> str:
    if isinstance(ty, Data):
        if ty.args:
            return "%s(%s)" % (ty.sort, ",".join(ty_str(a) for a in ty.args))
        return ty.sort
    dom = ty_str(ty.dom)
    if isinstance(ty.dom, Arrow):
        dom = "(%s)" % dom
    return "%s -> %s" % (dom, ty_str(ty.cod))


def ty_size(ty: Ty) -> int:
    if isinstance(ty, Data):
        return 1 + sum(ty_size(a) for a in ty.args)
    return 1 + ty_size(ty.dom) + ty_size(ty.cod)


def ty_subterms(ty: Ty) -> Iterator[Ty]:
    """All type subterms including the type itself, pre-order."""
    yield ty
    if isinstance(ty, Data):
        for a in ty.args:
            yield from ty_subterms(a)
    else:
        yield from ty_subterms(ty.dom)
        yield from ty_subterms(ty.cod)


def data_types_in(ty: Ty) -> Iterator[Data]:
    """Every data type occurring anywhere inside `ty` (including itself)."""
    for sub in ty_subterms(ty):
        if isinstance(sub, Data):
            yield sub


def arrow_depth(ty: Ty) -> int:
    """Number of leading arrows, i.e. the maximal argument count."""
    n = 0
    while isinstance(ty, Arrow):
        n += 1
        ty = ty.cod
    return n


# ---------------------------------------------------------------------------
# Signature


@dataclass(frozen=True)
class SortDecl:
    name: str
    arity: int = 0


@dataclass(frozen=True)
class FunDecl:
    name: str
    arg_tys: tuple[Ty, ...]
    out_ty: Ty

    @property
    def arity(self) -> int:
        return len(self.arg_tys)


class Signature:
    """Declared sorts and function symbols with lookup tables."""

    def __init__(self, sorts: tuple[SortDecl, ...], funs: tuple[FunDecl, ...]):
        self.sorts = tuple(sorts)
        self.funs = tuple(funs)
        self.sort_by_name: dict[str, SortDecl] = {}
        for s in self.sorts:
            if s.name in self.sort_by_name:
                raise TypingError("duplicate sort %r" % s.name)
            if s.arity < 0:
                raise TypingError("negative arity for sort %r" % s.name)
            self.sort_by_name[s.name] = s
        self.fun_by_name: dict[str, FunDecl] = {}
        for f in self.funs:
            if f.name in self.fun_by_name:
                raise TypingError("duplicate function symbol %r" % f.name)
            self.fun_by_name[f.name] = f
        for f in self.funs:
            for ty in (*f.arg_tys, f.out_ty):
                self.check_type(ty)

    def check_type(self, ty: Ty) -> None:
        """Verify every sort in `ty` is declared with the right arity."""
        for sub in ty_subterms(ty):
            if isinstance(sub, Data):
                decl = self.sort_by_name.get(sub.sort)
                if decl is None:
                    raise TypingError("undeclared sort %r" % sub.sort)
                if len(sub.args) != decl.arity:
                    raise TypingError(
                        "sort %r expects %d argument(s), got %d"
                        % (sub.sort, decl.arity, len(sub.args))
                    )

    def fun(self, name: str) -> FunDecl:
        decl = self.fun_by_name.get(name)
        if decl is None:
            raise TypingError("undeclared function symbol %r" % name)
        return decl


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str
    ty: Ty | None = None


@dataclass(frozen=True)
class Abs:
    var: str
    var_ty: Ty
    body: "Term"
    ty: Ty | None = None


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"
    ty: Ty | None = None


@dataclass(frozen=True)
class Fun:
    sym: str
    args: tuple["Term", ...] = ()
    ty: Ty | None = None


Term = Var | Abs | App | Fun


class Category(Enum):
    ABSTRACTION = "abstraction"
    PREALGEBRAIC = "prealgebraic"
    NEUTRAL = "neutral"


def categorize(t: Term) -> Category:
    if isinstance(t, Abs):
        return Category.ABSTRACTION
    if isinstance(t, Fun):
        return Category.PREALGEBRAIC
    return Category.NEUTRAL


def term_str(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Fun):
        if t.args:
            return "%s(%s)" % (t.sym, ",".join(term_str(a) for a in t.args))
        return t.sym
    if isinstance(t, App):
        return "@(%s,%s)" % (term_str(t.fn), term_str(t.arg))
    return "\\%s:%s.%s" % (t.var, ty_str(t.var_ty), term_str(t.body))


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    if isinstance(t, App):
        return 1 + term_size(t.fn) + term_size(t.arg)
    return 1 + sum(term_size(a) for a in t.args)


def count_abstractions(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Abs):
        return 1 + count_abstractions(t.body)
    if isinstance(t, App):
        return count_abstractions(t.fn) + count_abstractions(t.arg)
    return sum(count_abstractions(a) for a in t.args)


def subterms(t: Term) -> Iterator[Term]:
    """All subterms including `t` itself, pre-order, descending under binders."""
    yield t
    if isinstance(t, Abs):
        yield from subterms(t.body)
    elif isinstance(t, App):
        yield from subterms(t.fn)
        yield from subterms(t.arg)
    elif isinstance(t, Fun):
        for a in t.args:
            yield from subterms(a)


def strict_subterms(t: Term) -> Iterator[Term]:
    it = subterms(t)
    next(it)
    return it


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    out: frozenset[str] = frozenset()
    for a in t.args:
        out |= free_vars(a)
    return out


def all_names(t: Term) -> frozenset[str]:
    """Every identifier occurring in `t`, free or bound, binders included."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return all_names(t.body) | {t.var}
    if isinstance(t, App):
        return all_names(t.fn) | all_names(t.arg)
    out: frozenset[str] = frozenset()
    for a in t.args:
        out |= all_names(a)
    return out


def fresh_var(base: str, avoid: frozenset[str] | set[str]) -> str:
    """Deterministic fresh name: `base#k` for the least unused k."""
    stem = base.split(FRESH_SEP, 1)[0]
    k = 0
    while True:
        cand = "%s%s%d" % (stem, FRESH_SEP, k)
        if cand not in avoid:
            return cand
        k += 1


# ---------------------------------------------------------------------------
# Typing (returns an annotated copy)


def typecheck(
    sig: Signature,
    env: Mapping[str, Ty],
    t: Term,
    ty_eq: Callable[[Ty, Ty], bool] | None = None,
) -> Term:
    """Type the raw term `t` under `env`, annotating every node.

    `ty_eq` relaxes the equality used at application and argument positions
    (types equivalent under the sort ordering); the default is syntactic
    equality, which is what rule checking uses.
    """
    eq = ty_eq if ty_eq is not None else lambda a, b: a == b

    def go(env: dict[str, Ty], t: Term) -> Term:
        if isinstance(t, Var):
            ty = env.get(t.name)
            if ty is None:
                raise TypingError("unbound variable %r" % t.name)
            return Var(t.name, ty)
        if isinstance(t, Fun):
            decl = sig.fun(t.sym)
            if len(t.args) != decl.arity:
                raise TypingError(
                    "symbol %r expects %d argument(s), got %d"
                    % (t.sym, decl.arity, len(t.args))
                )
            args = tuple(go(env, a) for a in t.args)
            for i, (a, want) in enumerate(zip(args, decl.arg_tys)):
                if not eq(a.ty, want):
                    raise TypingError(
                        "argument %d of %r has type %s, expected %s"
                        % (i + 1, t.sym, ty_str(a.ty), ty_str(want))
                    )
            return Fun(t.sym, args, decl.out_ty)
        if isinstance(t, App):
            fn = go(env, t.fn)
            if not isinstance(fn.ty, Arrow):
                raise TypingError(
                    "cannot apply term of type %s" % ty_str(fn.ty)
                )
            arg = go(env, t.arg)
            if not eq(fn.ty.dom, arg.ty):
                raise TypingError(
                    "application domain mismatch: %s vs %s"
                    % (ty_str(fn.ty.dom), ty_str(arg.ty))
                )
            return App(fn, arg, fn.ty.cod)
        sig.check_type(t.var_ty)
        inner = dict(env)
        inner[t.var] = t.var_ty
        body = go(inner, t.body)
        return Abs(t.var, t.var_ty, body, Arrow(t.var_ty, body.ty))

    return go(dict(env), t)


def infer_type(
    sig: Signature,
    env: Mapping[str, Ty],
    t: Term,
    ty_eq: Callable[[Ty, Ty], bool] | None = None,
) -> Ty:
    return typecheck(sig, env, t, ty_eq=ty_eq).ty


# ---------------------------------------------------------------------------
# Substitution and alpha-equivalence


def substitute(t: Term, subst: Mapping[str, Term]) -> Term:
    """Capture-avoiding substitution; bound variables are renamed when needed."""
    if not subst:
        return t
    range_fv: frozenset[str] = frozenset(subst.keys())
    for r in subst.values():
        range_fv |= free_vars(r)

    def go(t: Term, sub: dict[str, Term]) -> Term:
        if isinstance(t, Var):
            return sub.get(t.name, t)
        if isinstance(t, Fun):
            return Fun(t.sym, tuple(go(a, sub) for a in t.args), t.ty)
        if isinstance(t, App):
            return App(go(t.fn, sub), go(t.arg, sub), t.ty)
        sub = {k: v for k, v in sub.items() if k != t.var}
        if not any(k in free_vars(t.body) for k in sub):
            return t
        x, body = t.var, t.body
        if x in range_fv:
            z = fresh_var(x, range_fv | all_names(body))
            body = go(body, {x: Var(z, t.var_ty)})
            x = z
        return Abs(x, t.var_ty, go(body, sub), t.ty)

    return go(t, dict(subst))


def alpha_eq(s: Term, t: Term) -> bool:
    """Equality up to renaming of bound variables (binder types must match)."""

    def go(
        s: Term, t: Term, ms: dict[str, int], mt: dict[str, int], depth: int
    ) -> bool:
        if type(s) is not type(t):
            return False
        if isinstance(s, Var):
            a, b = ms.get(s.name), mt.get(t.name)
            if a is None and b is None:
                return s.name == t.name
            return a == b
        if isinstance(s, Fun):
            return (
                s.sym == t.sym
                and len(s.args) == len(t.args)
                and all(go(a, b, ms, mt, depth) for a, b in zip(s.args, t.args))
            )
        if isinstance(s, App):
            return go(s.fn, t.fn, ms, mt, depth) and go(s.arg, t.arg, ms, mt, depth)
        if s.var_ty != t.var_ty:
            return False
        ms2 = dict(ms)
        ms2[s.var] = depth
        mt2 = dict(mt)
        mt2[t.var] = depth
        return go(s.body, t.body, ms2, mt2, depth + 1)

    return go(s, t, {}, {}, 0)


def alpha_key(t: Term) -> str:
    """Canonical string for `t` modulo bound-variable names (memo keys)."""
    parts: list[str] = []

    def go(t: Term, bound: dict[str, int], depth: int) -> None:
        if isinstance(t, Var):
            k = bound.get(t.name)
            parts.append("%%%d" % k if k is not None else t.name)
        elif isinstance(t, Fun):
            parts.append(t.sym)
            parts.append("(")
            for a in t.args:
                go(a, bound, depth)
                parts.append(",")
            parts.append(")")
        elif isinstance(t, App):
            parts.append("@(")
            go(t.fn, bound, depth)
            parts.append(",")
            go(t.arg, bound, depth)
            parts.append(")")
        else:
            parts.append("\\:%s." % ty_str(t.var_ty))
            inner = dict(bound)
            inner[t.var] = depth
            go(t.body, inner, depth + 1)

    go(t, {}, 0)
    return "".join(parts)
