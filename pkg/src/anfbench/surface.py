"""S-expression surface syntax for terms, contexts, values and environments.

Source terms::

    (var N) (lam E) (app E E) (let E E) (con TAG E...) (match E (TAG E)...)

ANF terms::

    (letcon X TAG (Y...) E) (proj X Y I E) (letfun F (X...) E E)
    (letapp X F (Y...) E) (case Y (TAG E)...) (tailcall F Y...) (halt X)

Contexts reuse the ANF forms with a context in continuation position and
add ``(hole)`` and ``(joinfun F X C E)``.  Values are written
``(conv TAG V...)``; source closures ``(closv (V...) E)``; ANF closures
``(closv (env (X V)...) F (X...) E)``.  A source environment is
``(values V...)`` and an ANF environment ``(env (X V)...)``.

Rendering is single-line and deterministic, and ``parse(render(v)) == v``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .syntax import (
    HOLE,
    AClosV,
    AConV,
    AnfBenchError,
    App,
    Case,
    ClosV,
    Con,
    ConV,
    CtorTable,
    Fun,
    Halt,
    Hole,
    JoinFunC,
    Let,
    LetApp,
    LetAppC,
    LetCon,
    LetConC,
    LetFun,
    LetFunC,
    Match,
    Proj,
    ProjC,
    TailCall,
    Var,
)

KINDS = ("source", "anf", "context", "src-value", "anf-value", "src-env", "anf-env")


class ParseError(AnfBenchError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass
class _Atom:
    text: str
    line: int
    col: int


@dataclass
class _List:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r"\s+|;[^\n]*|(\()|(\))|([^\s()]+)")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


def _read(text: str):
    stack: list[_List] = []
    top: list = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the pattern matches any char
            raise ParseError("unexpected character", line, pos - line_start + 1)
        col = pos - line_start + 1
        if m.group(1):
            stack.append(_List([], line, col))
        elif m.group(2):
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            (stack[-1].items if stack else top).append(done)
        elif m.group(3):
            (stack[-1].items if stack else top).append(_Atom(m.group(3), line, col))
        chunk = m.group(0)
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    if stack:
        raise ParseError("unclosed '('", stack[-1].line, stack[-1].col)
    return top


def _err(node, msg):
    raise ParseError(msg, node.line, node.col)


def _ident(node) -> str:
    if not isinstance(node, _Atom) or not _IDENT.match(node.text):
        _err(node, "expected an identifier")
    return node.text


def _nat(node) -> int:
    if not isinstance(node, _Atom) or not node.text.isdigit():
        _err(node, "expected a natural number")
    return int(node.text)


def _head(node, forms) -> str:
    if not isinstance(node, _List) or not node.items:
        _err(node, f"expected one of ({' '.join(forms)})")
    h = node.items[0]
    if not isinstance(h, _Atom) or h.text not in forms:
        _err(h, f"expected one of ({' '.join(forms)})")
    return h.text


def _nargs(node, n, form):
    if len(node.items) - 1 != n:
        _err(node, f"'{form}' takes {n} arguments, got {len(node.items) - 1}")


def _ident_list(node) -> tuple:
    if not isinstance(node, _List):
        _err(node, "expected a parenthesised list of identifiers")
    return tuple(_ident(a) for a in node.items)


class _Parser:
    def __init__(self, ctors: CtorTable | None):
        self.ctors = ctors

    def check_arity(self, node, tag, n):
        if self.ctors is None:
            return
        if tag not in self.ctors:
            _err(node, f"unknown constructor {tag}")
        if self.ctors[tag] != n:
            _err(node, f"arity mismatch: {tag} expects {self.ctors[tag]}, got {n}")

    def check_branch(self, node, tag):
        if self.ctors is not None and tag not in self.ctors:
            _err(node, f"unknown constructor {tag}")

    def branches(self, nodes, sub):
        out = []
        seen = set()
        for b in nodes:
            if not isinstance(b, _List) or len(b.items) != 2:
                _err(b, "expected a branch (TAG E)")
            tag = _ident(b.items[0])
            self.check_branch(b, tag)
            if tag in seen:
                _err(b, f"duplicate branch for {tag}")
            seen.add(tag)
            out.append((tag, sub(b.items[1])))
        return tuple(out)

    def source(self, node):
        forms = ("var", "lam", "app", "let", "con", "match")
        h = _head(node, forms)
        it = node.items
        if h == "var":
            _nargs(node, 1, h)
            return Var(_nat(it[1]))
        if h == "lam":
            _nargs(node, 1, h)
            return Fun(self.source(it[1]))
        if h == "app":
            _nargs(node, 2, h)
            return App(self.source(it[1]), self.source(it[2]))
        if h == "let":
            _nargs(node, 2, h)
            return Let(self.source(it[1]), self.source(it[2]))
        if h == "con":
            if len(it) < 2:
                _err(node, "'con' needs a tag")
            tag = _ident(it[1])
            self.check_arity(node, tag, len(it) - 2)
            return Con(tag, tuple(self.source(a) for a in it[2:]))
        if len(it) < 2:
            _err(node, "'match' needs a scrutinee")
        return Match(self.source(it[1]), self.branches(it[2:], self.source))

    def anf(self, node, ctx=False):
        forms = ["letcon", "proj", "letfun", "letapp"]
        forms += ["hole", "joinfun"] if ctx else ["case", "tailcall", "halt"]
        h = _head(node, forms)
        it = node.items
        k = self.ctx if ctx else self.anf
        if h == "letcon":
            _nargs(node, 4, h)
            tag = _ident(it[2])
            ys = _ident_list(it[3])
            self.check_arity(node, tag, len(ys))
            cls = LetConC if ctx else LetCon
            return cls(_ident(it[1]), tag, ys, k(it[4]))
        if h == "proj":
            _nargs(node, 4, h)
            cls = ProjC if ctx else Proj
            return cls(_ident(it[1]), _ident(it[2]), _nat(it[3]), k(it[4]))
        if h == "letfun":
            _nargs(node, 4, h)
            cls = LetFunC if ctx else LetFun
            return cls(_ident(it[1]), _ident_list(it[2]), self.anf(it[3]), k(it[4]))
        if h == "letapp":
            _nargs(node, 4, h)
            cls = LetAppC if ctx else LetApp
            return cls(_ident(it[1]), _ident(it[2]), _ident_list(it[3]), k(it[4]))
        if h == "case":
            if len(it) < 2:
                _err(node, "'case' needs a variable")
            return Case(_ident(it[1]), self.branches(it[2:], self.anf))
        if h == "tailcall":
            if len(it) < 2:
                _err(node, "'tailcall' needs a function")
            return TailCall(_ident(it[1]), tuple(_ident(a) for a in it[2:]))
        if h == "halt":
            _nargs(node, 1, h)
            return Halt(_ident(it[1]))
        if h == "hole":
            _nargs(node, 0, h)
            return HOLE
        _nargs(node, 4, h)
        return JoinFunC(_ident(it[1]), _ident(it[2]), self.ctx(it[3]), self.anf(it[4]))

    def ctx(self, node):
        return self.anf(node, ctx=True)

    def src_value(self, node):
        h = _head(node, ("conv", "closv"))
        it = node.items
        if h == "conv":
            if len(it) < 2:
                _err(node, "'conv' needs a tag")
            tag = _ident(it[1])
            self.check_arity(node, tag, len(it) - 2)
            return ConV(tag, tuple(self.src_value(a) for a in it[2:]))
        _nargs(node, 2, h)
        if not isinstance(it[1], _List):
            _err(it[1], "expected a list of captured values")
        return ClosV(tuple(self.src_value(a) for a in it[1].items), self.source(it[2]))

    def anf_value(self, node):
        h = _head(node, ("conv", "closv"))
        it = node.items
        if h == "conv":
            if len(it) < 2:
                _err(node, "'conv' needs a tag")
            tag = _ident(it[1])
            self.check_arity(node, tag, len(it) - 2)
            return AConV(tag, tuple(self.anf_value(a) for a in it[2:]))
        _nargs(node, 4, h)
        return AClosV(self.anf_env(it[1]), _ident(it[2]), _ident_list(it[3]), self.anf(it[4]))

    def src_env(self, node):
        _head(node, ("values",))
        return tuple(self.src_value(a) for a in node.items[1:])

    def anf_env(self, node):
        _head(node, ("env",))
        env = {}
        for b in node.items[1:]:
            if not isinstance(b, _List) or len(b.items) != 2:
                _err(b, "expected a binding (X VALUE)")
            env[_ident(b.items[0])] = self.anf_value(b.items[1])
        return env


def parse(text: str, kind: str = "source", ctors: CtorTable | None = None):
    """Parse exactly one s-expression of the given kind.

    Raises ParseError (with line and column) on malformed input, and on
    constructor arity mismatches when ``ctors`` is given.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    nodes = _read(text)
    if len(nodes) != 1:
        where = nodes[1] if len(nodes) > 1 else None
        raise ParseError(
            f"expected exactly one expression, found {len(nodes)}",
            where.line if where else 1,
            where.col if where else 1,
        )
    p = _Parser(ctors)
    handler = {
        "source": p.source,
        "anf": p.anf,
        "context": p.ctx,
        "src-value": p.src_value,
        "anf-value": p.anf_value,
        "src-env": p.src_env,
        "anf-env": p.anf_env,
    }[kind]
    return handler(nodes[0])


def parse_many(text: str):
    """Split text into top-level s-expressions, returned as source strings."""
    out = []
    depth = 0
    start = None
    for m in _TOKEN.finditer(text):
        if m.group(1):
            if depth == 0:
                start = m.start()
            depth += 1
        elif m.group(2):
            depth -= 1
            if depth == 0:
                out.append(text[start : m.end()])
        elif m.group(3) and depth == 0:
            out.append(m.group(3))
    return out


# --------------------------------------------------------------------------
# Rendering


def _names(xs) -> str:
    return "(" + " ".join(xs) + ")"


def render(obj) -> str:
    """Single-line rendering of any term, context, value or environment.

    Tuples/lists render as a source environment ``(values ...)`` and dicts as
    an ANF environment ``(env ...)``.
    """
    parts: list[str] = []
    _render(obj, parts)
    return "".join(parts)


def _render(o, out: list) -> None:
    w = out.append
    if isinstance(o, Var):
        w(f"(var {o.index})")
    elif isinstance(o, Fun):
        w("(lam ")
        _render(o.body, out)
        w(")")
    elif isinstance(o, (App, Let)):
        w("(app " if isinstance(o, App) else "(let ")
        _render(o.fn if isinstance(o, App) else o.bound, out)
        w(" ")
        _render(o.arg if isinstance(o, App) else o.body, out)
        w(")")
    elif isinstance(o, (Con, ConV, AConV)):
        w("(con " if isinstance(o, Con) else "(conv ")
        w(o.tag)
        for a in o.args if isinstance(o, Con) else o.fields:
            w(" ")
            _render(a, out)
        w(")")
    elif isinstance(o, (Match, Case)):
        if isinstance(o, Match):
            w("(match ")
            _render(o.scrutinee, out)
        else:
            w(f"(case {o.y}")
        for tag, b in o.branches:
            w(f" ({tag} ")
            _render(b, out)
            w(")")
        w(")")
    elif isinstance(o, (LetCon, LetConC)):
        w(f"(letcon {o.x} {o.tag} {_names(o.ys)} ")
        _render(o.cont if isinstance(o, LetCon) else o.inner, out)
        w(")")
    elif isinstance(o, (Proj, ProjC)):
        w(f"(proj {o.x} {o.y} {o.index} ")
        _render(o.cont if isinstance(o, Proj) else o.inner, out)
        w(")")
    elif isinstance(o, (LetFun, LetFunC)):
        w(f"(letfun {o.f} {_names(o.params)} ")
        _render(o.fbody, out)
        w(" ")
        _render(o.cont if isinstance(o, LetFun) else o.inner, out)
        w(")")
    elif isinstance(o, (LetApp, LetAppC)):
        w(f"(letapp {o.x} {o.f} {_names(o.ys)} ")
        _render(o.cont if isinstance(o, LetApp) else o.inner, out)
        w(")")
    elif isinstance(o, TailCall):
        w("(tailcall " + " ".join((o.f, *o.ys)) + ")")
    elif isinstance(o, Halt):
        w(f"(halt {o.x})")
    elif isinstance(o, Hole):
        w("(hole)")
    elif isinstance(o, JoinFunC):
        w(f"(joinfun {o.f} {o.param} ")
        _render(o.inner, out)
        w(" ")
        _render(o.rest, out)
        w(")")
    elif isinstance(o, ClosV):
        w("(closv (")
        for i, v in enumerate(o.env):
            if i:
                w(" ")
            _render(v, out)
        w(") ")
        _render(o.body, out)
        w(")")
    elif isinstance(o, AClosV):
        w("(closv ")
        _render(o.env, out)
        w(f" {o.f} {_names(o.params)} ")
        _render(o.body, out)
        w(")")
    elif isinstance(o, dict):
        w("(env")
        for x in sorted(o):
            w(f" ({x} ")
            _render(o[x], out)
            w(")")
        w(")")
    elif isinstance(o, (tuple, list)):
        w("(values")
        for v in o:
            w(" ")
            _render(v, out)
        w(")")
    else:
        raise TypeError(f"cannot render {o!r}")


# --------------------------------------------------------------------------
# Constructor table files


def parse_ctor_table(text: str) -> CtorTable:
    """``TAG ARITY`` per line; ``#`` starts a comment."""
    entries = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not _IDENT.match(parts[0]) or not parts[1].isdigit():
            raise ParseError("expected 'TAG ARITY'", lineno, 1)
        if parts[0] in seen:
            raise ParseError(f"duplicate constructor {parts[0]}", lineno, 1)
        seen.add(parts[0])
        entries.append((parts[0], int(parts[1])))
    return CtorTable(entries)


def load_ctor_table(path: str | Path) -> CtorTable:
    return parse_ctor_table(Path(path).read_text(encoding="utf-8"))


def render_ctor_table(ctors: CtorTable) -> str:
    return "".join(f"{tag} {arity}\n" for tag, arity in ctors.items())
