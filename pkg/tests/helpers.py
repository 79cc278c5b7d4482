"""Shared strategies and samplers for the test suite."""

import random

from hypothesis import strategies as st

from anfbench.anf import anf_program, translate_env, translate_val
from anfbench.harness import compile_open, env_names
from anfbench.logrel import AnfConfig
from anfbench.syntax import (
    DEFAULT_CTORS,
    Case,
    Halt,
    Hole,
    JoinFunC,
    LetAppC,
    LetConC,
    LetFunC,
    NameSupply,
    ProjC,
    TailCall,
)
from anfbench.testgen import D, GenConfig, arrow, gen_open, gen_src, gen_value

NAMES = ["a", "b", "c", "f", "g", "x", "y", "z"]

names = st.sampled_from(NAMES)
name_lists = st.lists(names, max_size=3).map(tuple)


def _ctx_frame(inner):
    return st.one_of(
        st.builds(lambda x, ys, c: LetConC(x, "Pair", ys, c), names, st.tuples(names, names), inner),
        st.builds(lambda x, ys, c: LetConC(x, "Tt", (), c), names, st.just(()), inner),
        st.builds(ProjC, names, names, st.integers(0, 1), inner),
        st.builds(LetAppC, names, names, name_lists, inner),
        st.builds(lambda f, ps, c: LetFunC(f, ps, Halt(ps[0] if ps else f), c), names, name_lists, inner),
        st.builds(
            lambda j, x, c, y: JoinFunC(j, x, c, Case(y, (("Tt", TailCall(j, (y,))), ("Ff", Halt(y))))),
            names,
            names,
            inner,
            names,
        ),
    )


contexts = st.recursive(st.just(Hole()), _ctx_frame, max_leaves=6)
anf_leaves = st.one_of(st.builds(Halt, names), st.builds(TailCall, names, name_lists))


def sample_terms(n, seed=0, **kw):
    cfg = GenConfig(seed=seed, **kw)
    return [gen_src(cfg, i) for i in range(n)]


def anf_configs(n, seed=0):
    """Closed programs and open terms under translated environments."""
    cfg = GenConfig(seed=seed)
    out = []
    for i in range(n):
        if i % 2 == 0:
            out.append(AnfConfig({}, anf_program(gen_src(cfg, i), DEFAULT_CTORS)))
        else:
            env, e = gen_open(cfg, i)
            sigma, _ = translate_env(env_names(len(env)), env, NameSupply(0, "w"), DEFAULT_CTORS)
            out.append(AnfConfig(sigma, compile_open(e, len(env), DEFAULT_CTORS)))
    return out


def letapp_configs(n, seed=0):
    """(sigma, f, y) with sigma[f] a translated closure and sigma[y] a datum."""
    rng = random.Random(seed)
    cfg = GenConfig(seed=seed)
    out = []
    for _ in range(n):
        v = gen_value(cfg, rng, arrow(D, D))
        arg = gen_value(cfg, rng, D)
        f, s = translate_val(v, NameSupply(0, "u"), DEFAULT_CTORS)
        y, _ = translate_val(arg, s, DEFAULT_CTORS)
        out.append({"f": f, "y": y})
    return out
