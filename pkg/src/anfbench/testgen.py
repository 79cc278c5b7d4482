"""Seeded generation of closed, well-formed source terms, plus shrinking.

Terms are generated against a simple-type discipline (one data sort ``D``
holding every constructor, and arrows) so that closed generated programs
can never get stuck; the output itself is untyped.  Trial ``i`` of a
campaign draws from ``Random(derive_seed(seed, i))``, so trials can be
replayed and run in any order.
"""

from __future__ import annotations

import hashlib
import random
from collections.abc import Callable
from dataclasses import dataclass, field

from .eval_src import Val, eval_src
from .syntax import (
    DEFAULT_CTORS,
    App,
    ClosV,
    Con,
    ConV,
    CtorTable,
    Fun,
    Let,
    Match,
    SrcExpr,
    SrcValue,
    Var,
    src_size,
    well_formed_src,
)

D = "D"  # the data sort; arrow types are (arg, result) pairs


def arrow(a, b):
    return (a, b)


def derive_seed(seed: int, trial: int, salt: str = "") -> int:
    h = hashlib.blake2b(f"{seed}:{trial}:{salt}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class GenConfig:
    max_depth: int = 6
    max_ctor_args: int = 2
    app_bias: float = 0.25
    let_bias: float = 0.2
    match_bias: float = 0.12
    ctors: CtorTable = field(default=DEFAULT_CTORS)
    seed: int = 0
    max_size: int = 80
    fun_type_prob: float = 0.2
    open_vars: int = 3

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        weights = (self.app_bias, self.let_bias, self.match_bias)
        if min(weights) < 0 or sum(weights) > 1:
            raise ValueError("biases must be non-negative and sum to at most 1")
        if not self.ctors.nullary():
            raise ValueError("the constructor table needs a nullary constructor")


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.budget = cfg.max_size
        self.nullary = cfg.ctors.nullary()
        self.ctor_choices = [t for t, a in cfg.ctors.items() if a <= cfg.max_ctor_args]

    def rand_type(self, order: int = 1):
        if order <= 0 or self.rng.random() < 0.7:
            return D
        a = self.rand_type(order - 1)
        return arrow(a, D if self.rng.random() < 0.7 else self.rand_type(order - 1))

    def leaf(self, ty, scope):
        hits = [i for i, t in enumerate(scope) if t == ty]
        if hits:
            return Var(self.rng.choice(hits))
        if ty == D:
            return Con(self.rng.choice(self.nullary))
        return Fun(self.leaf(ty[1], (ty[0], *scope)))

    def expr(self, ty, scope: tuple, depth: int) -> SrcExpr:
        self.budget -= 1
        if depth <= 1 or self.budget <= 0:
            return self.leaf(ty, scope)
        cfg = self.cfg
        rest = 1.0 - cfg.app_bias - cfg.let_bias - cfg.match_bias
        options: list[tuple[str, float]] = [
            ("app", cfg.app_bias),
            ("let", cfg.let_bias),
            ("match", cfg.match_bias),
        ]
        if any(t == ty for t in scope):
            options.append(("var", rest / 3))
        if ty == D:
            options.append(("con", 2 * rest / 3))
        else:
            options.append(("fun", 2 * rest / 3))
        kinds, weights = zip(*options)
        kind = self.rng.choices(kinds, weights)[0]
        d = depth - 1
        if kind == "var":
            return self.leaf(ty, scope)
        if kind == "fun":
            return Fun(self.expr(ty[1], (ty[0], *scope), d))
        if kind == "con":
            tag = self.rng.choice(self.ctor_choices)
            arity = self.cfg.ctors[tag]
            return Con(tag, tuple(self.expr(D, scope, d) for _ in range(arity)))
        if kind == "app":
            a = self.rand_type()
            return App(self.expr(arrow(a, ty), scope, d), self.expr(a, scope, d))
        if kind == "let":
            a = self.rand_type()
            return Let(self.expr(a, scope, d), self.expr(ty, (a, *scope), d))
        scrut = self.expr(D, scope, d)
        branches = []
        for tag, arity in self.cfg.ctors.items():
            branches.append((tag, self.expr(ty, (D,) * arity + scope, max(1, d - 1))))
        return Match(scrut, tuple(branches))

    def top_type(self):
        return arrow(D, D) if self.rng.random() < self.cfg.fun_type_prob else D

    def data_value(self, depth: int) -> ConV:
        tags = list(self.cfg.ctors) if depth > 0 else self.nullary
        tag = self.rng.choice(tags)
        return ConV(tag, tuple(self.data_value(depth - 1) for _ in range(self.cfg.ctors[tag])))

    def value(self, ty) -> SrcValue:
        if ty == D:
            return self.data_value(2)
        saved = self.budget
        self.budget = min(self.cfg.max_size, 12)
        term = Fun(self.expr(ty[1], (ty[0],), max(1, min(3, self.cfg.max_depth - 1))))
        self.budget = saved
        if self.rng.random() < 0.5:
            return ClosV((), term.body)
        # close over a let-bound datum so captured environments are exercised
        datum = self.data_value(1)
        shifted = _shift(term, 1, 0, self.cfg.ctors)
        res, _ = eval_src((), Let(_value_term(datum), shifted), 1000)
        assert isinstance(res, Val)
        return res.value


def _value_term(v: ConV) -> SrcExpr:
    return Con(v.tag, tuple(_value_term(f) for f in v.fields))


def gen_src(cfg: GenConfig, trial: int) -> SrcExpr:
    """Closed, well-formed source term for ``trial``; deterministic in (seed, trial)."""
    g = _Gen(cfg, random.Random(derive_seed(cfg.seed, trial)))
    return g.expr(g.top_type(), (), cfg.max_depth)


def gen_open(cfg: GenConfig, trial: int) -> tuple[tuple, SrcExpr]:
    """An environment of closed values and a term whose free indices it binds."""
    g = _Gen(cfg, random.Random(derive_seed(cfg.seed, trial, "open")))
    n = g.rng.randint(1, max(1, cfg.open_vars))
    types = tuple(g.rand_type() for _ in range(n))
    env = tuple(g.value(t) for t in types)
    return env, g.expr(g.top_type(), types, cfg.max_depth)


def gen_value(cfg: GenConfig, rng: random.Random, ty=None) -> SrcValue:
    """A closed source value of type ``ty`` (random when omitted)."""
    g = _Gen(cfg, rng)
    return g.value(g.rand_type() if ty is None else ty)


# --------------------------------------------------------------------------
# de Bruijn shifting


def _shift(e: SrcExpr, delta: int, cutoff: int, ctors: CtorTable) -> SrcExpr:
    if isinstance(e, Var):
        return Var(e.index + delta) if e.index >= cutoff else e
    if isinstance(e, Let):
        return Let(_shift(e.bound, delta, cutoff, ctors), _shift(e.body, delta, cutoff + 1, ctors))
    if isinstance(e, Fun):
        return Fun(_shift(e.body, delta, cutoff + 1, ctors))
    if isinstance(e, App):
        return App(_shift(e.fn, delta, cutoff, ctors), _shift(e.arg, delta, cutoff, ctors))
    if isinstance(e, Con):
        return Con(e.tag, tuple(_shift(a, delta, cutoff, ctors) for a in e.args))
    if isinstance(e, Match):
        return Match(
            _shift(e.scrutinee, delta, cutoff, ctors),
            tuple((t, _shift(b, delta, cutoff + ctors.arity(t), ctors)) for t, b in e.branches),
        )
    raise TypeError(e)


def _uses(e: SrcExpr, lo: int, hi: int, ctors: CtorTable) -> bool:
    """Does ``e`` mention a free index in ``[lo, hi)``?"""
    if isinstance(e, Var):
        return lo <= e.index < hi
    if isinstance(e, Let):
        return _uses(e.bound, lo, hi, ctors) or _uses(e.body, lo + 1, hi + 1, ctors)
    if isinstance(e, Fun):
        return _uses(e.body, lo + 1, hi + 1, ctors)
    if isinstance(e, App):
        return _uses(e.fn, lo, hi, ctors) or _uses(e.arg, lo, hi, ctors)
    if isinstance(e, Con):
        return any(_uses(a, lo, hi, ctors) for a in e.args)
    if isinstance(e, Match):
        if _uses(e.scrutinee, lo, hi, ctors):
            return True
        return any(_uses(b, lo + ctors.arity(t), hi + ctors.arity(t), ctors) for t, b in e.branches)
    raise TypeError(e)


def _strengthen(e: SrcExpr, count: int, ctors: CtorTable) -> SrcExpr | None:
    """Remove ``count`` innermost binders from the scope of ``e``, if unused."""
    if count == 0:
        return e
    if _uses(e, 0, count, ctors):
        return None
    return _shift(e, -count, count, ctors)


# --------------------------------------------------------------------------
# shrinking


class _Shrinker:
    def __init__(self, ctors: CtorTable):
        self.ctors = ctors
        self.small = Con(ctors.nullary()[0]) if ctors.nullary() else None

    def candidates(self, e: SrcExpr):
        """Strictly smaller one-move variants of ``e``, biggest steps first."""
        if self.small is not None and src_size(e) > 1:
            yield self.small
        if isinstance(e, Let):
            body = _strengthen(e.body, 1, self.ctors)
            if body is not None:
                yield body
            yield e.bound
        elif isinstance(e, Fun):
            body = _strengthen(e.body, 1, self.ctors)
            if body is not None:
                yield body
        elif isinstance(e, App):
            yield e.fn
            yield e.arg
        elif isinstance(e, Con):
            yield from e.args
        elif isinstance(e, Match):
            yield e.scrutinee
            for t, b in e.branches:
                nb = _strengthen(b, self.ctors.arity(t), self.ctors)
                if nb is not None:
                    yield nb
        # one move inside a child
        if isinstance(e, Let):
            for c in self.candidates(e.bound):
                yield Let(c, e.body)
            for c in self.candidates(e.body):
                yield Let(e.bound, c)
        elif isinstance(e, Fun):
            for c in self.candidates(e.body):
                yield Fun(c)
        elif isinstance(e, App):
            for c in self.candidates(e.fn):
                yield App(c, e.arg)
            for c in self.candidates(e.arg):
                yield App(e.fn, c)
        elif isinstance(e, Con):
            for i, a in enumerate(e.args):
                for c in self.candidates(a):
                    yield Con(e.tag, e.args[:i] + (c,) + e.args[i + 1 :])
        elif isinstance(e, Match):
            for c in self.candidates(e.scrutinee):
                yield Match(c, e.branches)
            for i, (t, b) in enumerate(e.branches):
                for c in self.candidates(b):
                    yield Match(e.scrutinee, e.branches[:i] + ((t, c),) + e.branches[i + 1 :])


def shrink(
    e: SrcExpr,
    failing: Callable[[SrcExpr], bool],
    ctors: CtorTable = DEFAULT_CTORS,
    depth: int = 0,
    max_steps: int = 10_000,
) -> SrcExpr:
    """Greedily minimise ``e`` while ``failing`` stays true.

    Every accepted move strictly reduces size and preserves well-formedness
    at binding depth ``depth``.
    """
    sh = _Shrinker(ctors)
    steps = 0
    progress = True
    while progress and steps < max_steps:
        progress = False
        size = src_size(e)
        for cand in sh.candidates(e):
            steps += 1
            if steps >= max_steps:
                break
            if src_size(cand) >= size or not well_formed_src(cand, depth, ctors):
                continue
            if failing(cand):
                e = cand
                progress = True
                break
    return e
