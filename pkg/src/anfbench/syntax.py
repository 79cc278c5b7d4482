"""Abstract syntax for the source (de Bruijn) and ANF (named) languages.

Also home to 1-hole contexts, the constructor table, fresh-name supplies,
well-formedness, free variables and alpha-equivalence.  Every node is an
immutable dataclass; list arguments are coerced to tuples on construction.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Union


class AnfBenchError(Exception):
    """Base class for errors raised by this package."""


class IllFormedError(AnfBenchError):
    """A term violates scoping or constructor arity."""


class UnknownConstructor(IllFormedError):
    pass


class StuckError(AnfBenchError):
    """Evaluation cannot proceed (distinct from running out of fuel)."""


class DuplicateNameError(AnfBenchError):
    pass


def _tuple(obj, name):
    val = getattr(obj, name)
    if not isinstance(val, tuple):
        object.__setattr__(obj, name, tuple(val))


# --------------------------------------------------------------------------
# Constructor table


class CtorTable(Mapping):
    """Immutable mapping from constructor tag to arity."""

    def __init__(self, entries: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[str, int] = {}
        for tag, arity in items:
            if tag in table:
                raise ValueError(f"duplicate constructor tag {tag!r}")
            if arity < 0:
                raise ValueError(f"negative arity for {tag!r}")
            table[tag] = int(arity)
        self._table = table

    def __getitem__(self, tag: str) -> int:
        return self._table[tag]

    def __iter__(self) -> Iterator[str]:
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __repr__(self) -> str:
        return f"CtorTable({self._table!r})"

    def __hash__(self) -> int:
        # Mapping equality ignores order, so the hash must too
        return hash(frozenset(self._table.items()))

    def arity(self, tag: str) -> int:
        try:
            return self._table[tag]
        except KeyError:
            raise UnknownConstructor(f"unknown constructor {tag!r}") from None

    def nullary(self) -> list[str]:
        return [t for t, a in self._table.items() if a == 0]


DEFAULT_CTORS = CtorTable({"Tt": 0, "Ff": 0, "Box": 1, "Pair": 2})


# --------------------------------------------------------------------------
# Fresh names


_NAME_RE = re.compile(r"^([A-Za-z_]+)(\d+)$")


@dataclass(frozen=True)
class NameSupply:
    """Co-finite set ``{prefix + str(m) | m >= next, m not in used}``.

    ``used`` only ever holds counters above ``next``; it is needed when names
    are removed out of counter order (the relational checker does this).
    """

    next: int = 0
    prefix: str = "v"
    used: frozenset = field(default=frozenset())

    def __post_init__(self):
        if self.used and not isinstance(self.used, frozenset):
            object.__setattr__(self, "used", frozenset(self.used))

    def counter_of(self, name: str) -> int | None:
        m = _NAME_RE.match(name)
        if m is None or m.group(1) != self.prefix:
            return None
        digits = m.group(2)
        if len(digits) > 1 and digits[0] == "0":
            return None
        return int(digits)

    def __contains__(self, name: str) -> bool:
        n = self.counter_of(name)
        return n is not None and n >= self.next and n not in self.used

    def remove(self, name: str) -> NameSupply:
        n = self.counter_of(name)
        if n is None or n < self.next or n in self.used:
            raise ValueError(f"{name} is not in the supply")
        if n != self.next:
            return NameSupply(self.next, self.prefix, self.used | {n})
        nxt = n + 1
        used = set(self.used)
        while nxt in used:
            used.discard(nxt)
            nxt += 1
        return NameSupply(nxt, self.prefix, frozenset(used))

    def fresh(self) -> tuple[str, NameSupply]:
        name = f"{self.prefix}{self.next}"
        return name, self.remove(name)

    def fresh_many(self, count: int) -> tuple[list[str], NameSupply]:
        names = []
        s = self
        for _ in range(count):
            x, s = s.fresh()
            names.append(x)
        return names, s

    def consumed_since(self, earlier: NameSupply) -> set[str]:
        """Names present in ``earlier`` but no longer in ``self``."""
        out = set()
        for m in range(earlier.next, self.next):
            name = f"{self.prefix}{m}"
            if name in earlier and name not in self:
                out.add(name)
        for m in self.used:
            name = f"{self.prefix}{m}"
            if name in earlier:
                out.add(name)
        return out


# --------------------------------------------------------------------------
# Source language


@dataclass(frozen=True, slots=True)
class Var:
    index: int


@dataclass(frozen=True, slots=True)
class Let:
    bound: SrcExpr
    body: SrcExpr


@dataclass(frozen=True, slots=True)
class Fun:
    body: SrcExpr


@dataclass(frozen=True, slots=True)
class App:
    fn: SrcExpr
    arg: SrcExpr


@dataclass(frozen=True, slots=True)
class Con:
    tag: str
    args: tuple = ()

    def __post_init__(self):
        _tuple(self, "args")


@dataclass(frozen=True, slots=True)
class Match:
    scrutinee: SrcExpr
    branches: tuple = ()  # of (tag, SrcExpr)

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((t, b) for t, b in self.branches))


SrcExpr = Union[Var, Let, Fun, App, Con, Match]


@dataclass(frozen=True, slots=True)
class ConV:
    tag: str
    fields: tuple = ()

    def __post_init__(self):
        _tuple(self, "fields")


@dataclass(frozen=True, slots=True)
class ClosV:
    env: tuple
    body: SrcExpr

    def __post_init__(self):
        _tuple(self, "env")


SrcValue = Union[ConV, ClosV]


# --------------------------------------------------------------------------
# ANF language.  Variables are plain strings.


@dataclass(frozen=True, slots=True)
class LetCon:
    x: str
    tag: str
    ys: tuple
    cont: AnfExpr

    def __post_init__(self):
        _tuple(self, "ys")


@dataclass(frozen=True, slots=True)
class Proj:
    x: str
    y: str
    index: int
    cont: AnfExpr


@dataclass(frozen=True, slots=True)
class LetFun:
    f: str
    params: tuple
    fbody: AnfExpr
    cont: AnfExpr

    def __post_init__(self):
        _tuple(self, "params")


@dataclass(frozen=True, slots=True)
class LetApp:
    x: str
    f: str
    ys: tuple
    cont: AnfExpr

    def __post_init__(self):
        _tuple(self, "ys")


@dataclass(frozen=True, slots=True)
class Case:
    y: str
    branches: tuple  # of (tag, AnfExpr)

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((t, b) for t, b in self.branches))


@dataclass(frozen=True, slots=True)
class TailCall:
    f: str
    ys: tuple

    def __post_init__(self):
        _tuple(self, "ys")


@dataclass(frozen=True, slots=True)
class Halt:
    x: str


AnfExpr = Union[LetCon, Proj, LetFun, LetApp, Case, TailCall, Halt]


@dataclass(frozen=True, slots=True)
class AConV:
    tag: str
    fields: tuple = ()

    def __post_init__(self):
        _tuple(self, "fields")


@dataclass(frozen=True, slots=True, eq=True)
class AClosV:
    env: dict
    f: str
    params: tuple
    body: AnfExpr

    def __post_init__(self):
        _tuple(self, "params")
        if not isinstance(self.env, dict):
            object.__setattr__(self, "env", dict(self.env))

    __hash__ = None  # env is a dict


AnfValue = Union[AConV, AClosV]


# --------------------------------------------------------------------------
# 1-hole contexts


@dataclass(frozen=True, slots=True)
class Hole:
    pass


HOLE = Hole()


@dataclass(frozen=True, slots=True)
class LetConC:
    x: str
    tag: str
    ys: tuple
    inner: Ctx

    def __post_init__(self):
        _tuple(self, "ys")


@dataclass(frozen=True, slots=True)
class ProjC:
    x: str
    y: str
    index: int
    inner: Ctx


@dataclass(frozen=True, slots=True)
class LetAppC:
    x: str
    f: str
    ys: tuple
    inner: Ctx

    def __post_init__(self):
        _tuple(self, "ys")


@dataclass(frozen=True, slots=True)
class LetFunC:
    f: str
    params: tuple
    fbody: AnfExpr
    inner: Ctx

    def __post_init__(self):
        _tuple(self, "params")


@dataclass(frozen=True, slots=True)
class JoinFunC:
    """``letfun f (param) = <hole-bearing inner> in rest``."""

    f: str
    param: str
    inner: Ctx
    rest: AnfExpr


Ctx = Union[Hole, LetConC, ProjC, LetAppC, LetFunC, JoinFunC]


def _unwind(c: Ctx) -> list:
    frames = []
    while not isinstance(c, Hole):
        frames.append(c)
        c = c.inner
    return frames


def _rewrap(frame, inner):
    if isinstance(frame, LetConC):
        return LetConC(frame.x, frame.tag, frame.ys, inner)
    if isinstance(frame, ProjC):
        return ProjC(frame.x, frame.y, frame.index, inner)
    if isinstance(frame, LetAppC):
        return LetAppC(frame.x, frame.f, frame.ys, inner)
    if isinstance(frame, LetFunC):
        return LetFunC(frame.f, frame.params, frame.fbody, inner)
    if isinstance(frame, JoinFunC):
        return JoinFunC(frame.f, frame.param, inner, frame.rest)
    raise TypeError(f"not a context frame: {frame!r}")


def _fill(frame, e: AnfExpr) -> AnfExpr:
    if isinstance(frame, LetConC):
        return LetCon(frame.x, frame.tag, frame.ys, e)
    if isinstance(frame, ProjC):
        return Proj(frame.x, frame.y, frame.index, e)
    if isinstance(frame, LetAppC):
        return LetApp(frame.x, frame.f, frame.ys, e)
    if isinstance(frame, LetFunC):
        return LetFun(frame.f, frame.params, frame.fbody, e)
    if isinstance(frame, JoinFunC):
        return LetFun(frame.f, (frame.param,), e, frame.rest)
    raise TypeError(f"not a context frame: {frame!r}")


def plug(c: Ctx, e: AnfExpr) -> AnfExpr:
    """Replace the unique hole of ``c`` with ``e``."""
    for frame in reversed(_unwind(c)):
        e = _fill(frame, e)
    return e


def compose(c1: Ctx, c2: Ctx) -> Ctx:
    """The context ``c1 ∘ c2``: plug(compose(c1, c2), e) == plug(c1, plug(c2, e))."""
    for frame in reversed(_unwind(c1)):
        c2 = _rewrap(frame, c2)
    return c2


def compose_all(ctxs: Iterable[Ctx]) -> Ctx:
    out: Ctx = HOLE
    for c in reversed(list(ctxs)):
        out = compose(c, out)
    return out


def hole_count(c) -> int:
    """Number of holes anywhere in a context (including stored subterms)."""
    if isinstance(c, Hole):
        return 1
    if isinstance(c, (LetConC, ProjC, LetAppC)):
        return hole_count(c.inner)
    if isinstance(c, LetFunC):
        return hole_count(c.inner) + _expr_holes(c.fbody)
    if isinstance(c, JoinFunC):
        return hole_count(c.inner) + _expr_holes(c.rest)
    return _expr_holes(c)


def _expr_holes(e) -> int:
    if isinstance(e, Hole):
        return 1
    if isinstance(e, (LetCon, Proj, LetApp)):
        return _expr_holes(e.cont)
    if isinstance(e, LetFun):
        return _expr_holes(e.fbody) + _expr_holes(e.cont)
    if isinstance(e, Case):
        return sum(_expr_holes(b) for _, b in e.branches)
    return 0


# --------------------------------------------------------------------------
# Well-formedness and sizes


def well_formed_src(e: SrcExpr, depth: int, ctors: CtorTable) -> bool:
    try:
        check_src(e, depth, ctors)
    except IllFormedError:
        return False
    return True


def check_src(e: SrcExpr, depth: int, ctors: CtorTable) -> None:
    """Raise IllFormedError unless every index is bound and arities agree."""
    stack = [(e, depth)]
    while stack:
        e, d = stack.pop()
        if isinstance(e, Var):
            if not 0 <= e.index < d:
                raise IllFormedError(f"de Bruijn index {e.index} out of range (depth {d})")
        elif isinstance(e, Let):
            stack.append((e.bound, d))
            stack.append((e.body, d + 1))
        elif isinstance(e, Fun):
            stack.append((e.body, d + 1))
        elif isinstance(e, App):
            stack.append((e.fn, d))
            stack.append((e.arg, d))
        elif isinstance(e, Con):
            if ctors.arity(e.tag) != len(e.args):
                raise IllFormedError(
                    f"{e.tag} expects {ctors.arity(e.tag)} arguments, got {len(e.args)}"
                )
            stack.extend((a, d) for a in e.args)
        elif isinstance(e, Match):
            stack.append((e.scrutinee, d))
            seen = set()
            for tag, body in e.branches:
                if tag in seen:
                    raise IllFormedError(f"duplicate branch for {tag}")
                seen.add(tag)
                stack.append((body, d + ctors.arity(tag)))
        else:
            raise IllFormedError(f"not a source expression: {e!r}")


def src_size(e: SrcExpr) -> int:
    if isinstance(e, Var):
        return 1
    if isinstance(e, Let):
        return 1 + src_size(e.bound) + src_size(e.body)
    if isinstance(e, Fun):
        return 1 + src_size(e.body)
    if isinstance(e, App):
        return 1 + src_size(e.fn) + src_size(e.arg)
    if isinstance(e, Con):
        return 1 + sum(src_size(a) for a in e.args)
    if isinstance(e, Match):
        return 1 + src_size(e.scrutinee) + sum(src_size(b) for _, b in e.branches)
    raise TypeError(e)


def src_nodes(e: SrcExpr) -> Iterator[SrcExpr]:
    """Pre-order traversal of all subterms."""
    stack = [e]
    while stack:
        e = stack.pop()
        yield e
        if isinstance(e, Let):
            stack += [e.body, e.bound]
        elif isinstance(e, Fun):
            stack.append(e.body)
        elif isinstance(e, App):
            stack += [e.arg, e.fn]
        elif isinstance(e, Con):
            stack.extend(reversed(e.args))
        elif isinstance(e, Match):
            stack.extend(b for _, b in reversed(e.branches))
            stack.append(e.scrutinee)


# --------------------------------------------------------------------------
# Free variables and binders of ANF terms


def free_vars_anf(e: AnfExpr) -> set[str]:
    if isinstance(e, LetCon):
        return set(e.ys) | (free_vars_anf(e.cont) - {e.x})
    if isinstance(e, Proj):
        return {e.y} | (free_vars_anf(e.cont) - {e.x})
    if isinstance(e, LetFun):
        inner = free_vars_anf(e.fbody) - set(e.params) - {e.f}
        return inner | (free_vars_anf(e.cont) - {e.f})
    if isinstance(e, LetApp):
        return {e.f, *e.ys} | (free_vars_anf(e.cont) - {e.x})
    if isinstance(e, Case):
        out = {e.y}
        for _, b in e.branches:
            out |= free_vars_anf(b)
        return out
    if isinstance(e, TailCall):
        return {e.f, *e.ys}
    if isinstance(e, Halt):
        return {e.x}
    raise TypeError(f"not an ANF expression: {e!r}")


def binders_anf(e) -> list[str]:
    """Every binding occurrence, in pre-order, including contexts' binders."""
    out: list[str] = []
    stack = [e]
    while stack:
        e = stack.pop()
        if isinstance(e, (LetCon, LetConC, Proj, ProjC, LetApp, LetAppC)):
            out.append(e.x)
            stack.append(e.cont if hasattr(e, "cont") else e.inner)
        elif isinstance(e, LetFun):
            out.append(e.f)
            out.extend(e.params)
            stack += [e.cont, e.fbody]
        elif isinstance(e, LetFunC):
            out.append(e.f)
            out.extend(e.params)
            stack += [e.inner, e.fbody]
        elif isinstance(e, JoinFunC):
            out += [e.f, e.param]
            stack += [e.rest, e.inner]
        elif isinstance(e, Case):
            stack.extend(b for _, b in reversed(e.branches))
    return out


# --------------------------------------------------------------------------
# Alpha-equivalence


def _same_var(a: str, b: str, m1: dict, m2: dict) -> bool:
    la, lb = m1.get(a), m2.get(b)
    if la is None and lb is None:
        return a == b
    return la == lb


def _bind(m1: dict, m2: dict, xs1, xs2, level: int):
    m1, m2 = dict(m1), dict(m2)
    for a, b in zip(xs1, xs2):
        m1[a] = level
        m2[b] = level
        level += 1
    return m1, m2, level


def _vars_eq(as_, bs, m1, m2) -> bool:
    return len(as_) == len(bs) and all(_same_var(a, b, m1, m2) for a, b in zip(as_, bs))


def _aeq(e1, e2, m1: dict, m2: dict, lvl: int) -> bool:
    while True:
        if type(e1) is not type(e2):
            return False
        if isinstance(e1, (Halt,)):
            return _same_var(e1.x, e2.x, m1, m2)
        if isinstance(e1, Hole):
            return True
        if isinstance(e1, TailCall):
            return _same_var(e1.f, e2.f, m1, m2) and _vars_eq(e1.ys, e2.ys, m1, m2)
        if isinstance(e1, Case):
            if not _same_var(e1.y, e2.y, m1, m2) or len(e1.branches) != len(e2.branches):
                return False
            for (t1, b1), (t2, b2) in zip(e1.branches, e2.branches):
                if t1 != t2 or not _aeq(b1, b2, m1, m2, lvl):
                    return False
            return True
        if isinstance(e1, (LetCon, LetConC)):
            if e1.tag != e2.tag or not _vars_eq(e1.ys, e2.ys, m1, m2):
                return False
        elif isinstance(e1, (Proj, ProjC)):
            if e1.index != e2.index or not _same_var(e1.y, e2.y, m1, m2):
                return False
        elif isinstance(e1, (LetApp, LetAppC)):
            if not _same_var(e1.f, e2.f, m1, m2) or not _vars_eq(e1.ys, e2.ys, m1, m2):
                return False
        elif isinstance(e1, (LetFun, LetFunC)):
            if len(e1.params) != len(e2.params):
                return False
            n1, n2, nl = _bind(m1, m2, (e1.f, *e1.params), (e2.f, *e2.params), lvl)
            if not _aeq(e1.fbody, e2.fbody, n1, n2, nl):
                return False
            m1, m2, lvl = _bind(m1, m2, (e1.f,), (e2.f,), lvl)
            e1 = e1.cont if isinstance(e1, LetFun) else e1.inner
            e2 = e2.cont if isinstance(e2, LetFun) else e2.inner
            continue
        elif isinstance(e1, JoinFunC):
            n1, n2, _ = _bind(m1, m2, (e1.f,), (e2.f,), lvl)
            if not _aeq(e1.rest, e2.rest, n1, n2, lvl + 1):
                return False
            m1, m2, lvl = _bind(m1, m2, (e1.f, e1.param), (e2.f, e2.param), lvl)
            e1, e2 = e1.inner, e2.inner
            continue
        else:
            raise TypeError(f"not an ANF term or context: {e1!r}")
        m1, m2, lvl = _bind(m1, m2, (e1.x,), (e2.x,), lvl)
        e1 = e1.cont if hasattr(e1, "cont") else e1.inner
        e2 = e2.cont if hasattr(e2, "cont") else e2.inner


def alpha_eq(e1, e2) -> bool:
    """Equality up to consistent renaming of bound variables.

    Works on ANF expressions and on contexts alike; free variables must match
    exactly.
    """
    return _aeq(e1, e2, {}, {}, 0)


def alpha_eq_val(v1: AnfValue, v2: AnfValue) -> bool:
    """Alpha-equivalence lifted to values.

    Closures compare their code up to renaming and the captured values of
    the code's free variables pointwise.
    """
    if isinstance(v1, AConV) and isinstance(v2, AConV):
        return (
            v1.tag == v2.tag
            and len(v1.fields) == len(v2.fields)
            and all(alpha_eq_val(a, b) for a, b in zip(v1.fields, v2.fields))
        )
    if isinstance(v1, AClosV) and isinstance(v2, AClosV):
        code1 = LetFun(v1.f, v1.params, v1.body, Halt(v1.f))
        code2 = LetFun(v2.f, v2.params, v2.body, Halt(v2.f))
        pairs = _free_var_pairs(code1, code2)
        if pairs is None:
            return False
        for a, b in pairs:
            if (a in v1.env) != (b in v2.env):
                return False
            if a in v1.env and not alpha_eq_val(v1.env[a], v2.env[b]):
                return False
        return True
    return False


def _free_var_pairs(e1, e2):
    """Find the free-variable correspondence making ``e1`` and ``e2`` alpha-equal.

    Returns a list of (free var of e1, free var of e2) pairs, or None.
    """
    pairs: dict[str, str] = {}
    back: dict[str, str] = {}

    def same(a, b, m1, m2):
        la, lb = m1.get(a), m2.get(b)
        if la is None and lb is None:
            if pairs.setdefault(a, b) != b or back.setdefault(b, a) != a:
                return False
            return True
        return la == lb

    def go(e1, e2, m1, m2, lvl):
        if type(e1) is not type(e2):
            return False
        if isinstance(e1, Halt):
            return same(e1.x, e2.x, m1, m2)
        if isinstance(e1, TailCall):
            return (
                same(e1.f, e2.f, m1, m2)
                and len(e1.ys) == len(e2.ys)
                and all(same(a, b, m1, m2) for a, b in zip(e1.ys, e2.ys))
            )
        if isinstance(e1, Case):
            return (
                same(e1.y, e2.y, m1, m2)
                and len(e1.branches) == len(e2.branches)
                and all(
                    t1 == t2 and go(b1, b2, m1, m2, lvl)
                    for (t1, b1), (t2, b2) in zip(e1.branches, e2.branches)
                )
            )
        if isinstance(e1, LetCon):
            ok = e1.tag == e2.tag and len(e1.ys) == len(e2.ys)
            ok = ok and all(same(a, b, m1, m2) for a, b in zip(e1.ys, e2.ys))
        elif isinstance(e1, Proj):
            ok = e1.index == e2.index and same(e1.y, e2.y, m1, m2)
        elif isinstance(e1, LetApp):
            ok = same(e1.f, e2.f, m1, m2) and len(e1.ys) == len(e2.ys)
            ok = ok and all(same(a, b, m1, m2) for a, b in zip(e1.ys, e2.ys))
        elif isinstance(e1, LetFun):
            if len(e1.params) != len(e2.params):
                return False
            n1, n2, nl = _bind(m1, m2, (e1.f, *e1.params), (e2.f, *e2.params), lvl)
            if not go(e1.fbody, e2.fbody, n1, n2, nl):
                return False
            n1, n2, nl = _bind(m1, m2, (e1.f,), (e2.f,), lvl)
            return go(e1.cont, e2.cont, n1, n2, nl)
        else:
            return False
        if not ok:
            return False
        n1, n2, nl = _bind(m1, m2, (e1.x,), (e2.x,), lvl)
        return go(e1.cont, e2.cont, n1, n2, nl)

    return list(pairs.items()) if go(e1, e2, {}, {}, 0) else None
