"""Call-by-value CPS conversion into ANF terms, for contrast with ANF.

User functions take two parameters, the argument and the return
continuation.  Continuations are ordinary ``letfun``-bound functions; no
administrative redex is contracted, and each emitted continuation is
counted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    AClosV,
    AConV,
    AnfExpr,
    AnfValue,
    App,
    Case,
    ClosV,
    Con,
    ConV,
    CtorTable,
    Fun,
    Halt,
    IllFormedError,
    Let,
    LetCon,
    LetFun,
    Match,
    NameSupply,
    Proj,
    SrcExpr,
    SrcValue,
    TailCall,
    Var,
    check_src,
)


@dataclass(frozen=True)
class CpsOutput:
    expr: AnfExpr
    supply_after: NameSupply
    admin_count: int


class _Cps:
    def __init__(self, s: NameSupply, ctors: CtorTable):
        self.s = s
        self.ctors = ctors
        self.admin = 0

    def fresh(self) -> str:
        x, self.s = self.s.fresh()
        return x

    def cont(self, param: str, body: AnfExpr, name: str, rest: AnfExpr) -> AnfExpr:
        self.admin += 1
        return LetFun(name, (param,), body, rest)

    def go(self, e: SrcExpr, xs: tuple, k: str) -> AnfExpr:
        if isinstance(e, Var):
            if not 0 <= e.index < len(xs):
                raise IllFormedError(f"de Bruijn index {e.index} out of range")
            return TailCall(k, (xs[e.index],))

        if isinstance(e, Fun):
            x = self.fresh()
            j = self.fresh()
            f = self.fresh()
            body = self.go(e.body, (x, *xs), j)
            return LetFun(f, (x, j), body, TailCall(k, (f,)))

        if isinstance(e, App):
            k1, m = self.fresh(), self.fresh()
            k2, n = self.fresh(), self.fresh()
            arg = self.go(e.arg, xs, k2)
            inner = self.cont(n, TailCall(m, (n, k)), k2, arg)
            fn = self.go(e.fn, xs, k1)
            return self.cont(m, inner, k1, fn)

        if isinstance(e, Let):
            k1, x1 = self.fresh(), self.fresh()
            body = self.go(e.body, (x1, *xs), k)
            bound = self.go(e.bound, xs, k1)
            return self.cont(x1, body, k1, bound)

        if isinstance(e, Con):
            if self.ctors.arity(e.tag) != len(e.args):
                raise IllFormedError(f"{e.tag} expects {self.ctors.arity(e.tag)} arguments")
            return self.seq(e.args, xs, [], lambda ys: self.alloc(e.tag, ys, k))

        if isinstance(e, Match):
            k0, y = self.fresh(), self.fresh()
            branches = []
            for tag, body in e.branches:
                zs = [self.fresh() for _ in range(self.ctors.arity(tag))]
                code = self.go(body, (*reversed(zs), *xs), k)
                for i in reversed(range(len(zs))):
                    code = Proj(zs[i], y, i, code)
                branches.append((tag, code))
            scrut = self.go(e.scrutinee, xs, k0)
            return self.cont(y, Case(y, tuple(branches)), k0, scrut)

        raise IllFormedError(f"not a source expression: {e!r}")

    def alloc(self, tag, ys, k):
        z = self.fresh()
        return LetCon(z, tag, tuple(ys), TailCall(k, (z,)))

    def seq(self, es, xs, done, finish):
        if not es:
            return finish(done)
        kn, y = self.fresh(), self.fresh()
        rest = self.seq(es[1:], xs, [*done, y], finish)
        first = self.go(es[0], xs, kn)
        return self.cont(y, rest, kn, first)


def cps_exp(e: SrcExpr, xs, k: str, s: NameSupply, ctors: CtorTable) -> CpsOutput:
    """CPS-convert ``e`` so that its value is passed to the continuation ``k``."""
    c = _Cps(s, ctors)
    expr = c.go(e, tuple(xs), k)
    return CpsOutput(expr, c.s, c.admin)


def cps_program(e: SrcExpr, ctors: CtorTable, s: NameSupply | None = None) -> AnfExpr:
    """``letfun k (x) = halt x in [e]_k`` for a closed term."""
    return cps_program_output(e, ctors, s).expr


def cps_program_output(e: SrcExpr, ctors: CtorTable, s: NameSupply | None = None) -> CpsOutput:
    s = NameSupply() if s is None else s
    check_src(e, 0, ctors)
    k, s = s.fresh()
    x, s = s.fresh()
    out = cps_exp(e, (), k, s, ctors)
    return CpsOutput(LetFun(k, (x,), Halt(x), out.expr), out.supply_after, out.admin_count)


def admin_redex_count(out: CpsOutput) -> int:
    return out.admin_count


def cps_translate_val(v: SrcValue, s: NameSupply, ctors: CtorTable) -> tuple[AnfValue, NameSupply]:
    """Value translation matching the CPS calling convention ``f (x, j)``."""
    if isinstance(v, ConV):
        if ctors.arity(v.tag) != len(v.fields):
            raise IllFormedError(f"{v.tag} expects {ctors.arity(v.tag)} fields")
        fields = []
        for fv in v.fields:
            tv, s = cps_translate_val(fv, s, ctors)
            fields.append(tv)
        return AConV(v.tag, tuple(fields)), s
    if isinstance(v, ClosV):
        x, s = s.fresh()
        j, s = s.fresh()
        f, s = s.fresh()
        names, s = s.fresh_many(len(v.env))
        env = {}
        for name, cv in zip(names, v.env):
            env[name], s = cps_translate_val(cv, s, ctors)
        out = cps_exp(v.body, (x, *names), j, s, ctors)
        return AClosV(env, f, (x, j), out.expr), out.supply_after
    raise TypeError(f"not a source value: {v!r}")
