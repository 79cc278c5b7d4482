"""Observation relation and a bounded step-indexed logical relation on ANF.

The closure clause of the logical relation quantifies over all smaller
step indices and all related argument vectors.  Here that quantifier is
sampled: argument pairs come from translating one random source value twice
under different name supplies, so each pair is related by construction.
A passing check is reported as ``HoldsUpToBounds``, never as a proof.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field

from .anf import translate_val
from .eval_anf import eval_anf
from .eval_src import OOT
from .surface import render
from .syntax import (
    DEFAULT_CTORS,
    AClosV,
    AConV,
    AnfExpr,
    AnfValue,
    ClosV,
    ConV,
    CtorTable,
    NameSupply,
    SrcValue,
    StuckError,
)
from .testgen import GenConfig, derive_seed, gen_value


def obs_rel(v: SrcValue, tv: AnfValue) -> bool:
    """Same outermost constructors all the way down; closures always related."""
    if isinstance(v, ConV) and isinstance(tv, AConV):
        return (
            v.tag == tv.tag
            and len(v.fields) == len(tv.fields)
            and all(obs_rel(a, b) for a, b in zip(v.fields, tv.fields))
        )
    return isinstance(v, ClosV) and isinstance(tv, AClosV)


@dataclass(frozen=True)
class AnfConfig:
    env: dict
    expr: AnfExpr


@dataclass(frozen=True)
class LogRelConfig:
    eval_budget: int = 10_000
    witness_budget: int = 100_000
    closure_samples: int = 2
    sample_seed: int = 0
    ctors: CtorTable = field(default=DEFAULT_CTORS)

    def __post_init__(self):
        if min(self.eval_budget, self.witness_budget, self.closure_samples) < 1:
            raise ValueError("LogRelConfig counts must be at least 1")


@dataclass(frozen=True)
class HoldsUpToBounds:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class Fails:
    witness: str

    def __bool__(self):
        return False


Verdict = HoldsUpToBounds | Fails

HOLDS = HoldsUpToBounds()


def _replay(cfg: LogRelConfig, k: int) -> str:
    return (
        f"k={k} eval_budget={cfg.eval_budget} witness_budget={cfg.witness_budget} "
        f"samples={cfg.closure_samples} seed={cfg.sample_seed}"
    )


def sample_indices(k: int) -> list[int]:
    """Step indices checked below ``k``: all of them when few, else 0, k/2 and k-1."""
    if k <= 4:
        return list(range(k))
    return sorted({0, k // 2, k - 1})


@functools.lru_cache(maxsize=4096)
def related_args(seed: int, arity: int, sample: int, ctors: CtorTable = DEFAULT_CTORS):
    """A pair of argument vectors related by construction.

    Depends only on (seed, arity, sample), never on the step index, so a
    failure found at index ``i`` is found again at every larger index.
    """
    rng = random.Random(derive_seed(seed, sample, f"args/{arity}"))
    gcfg = GenConfig(ctors=ctors, max_depth=3)
    left, right = [], []
    for _ in range(arity):
        v = gen_value(gcfg, rng)
        a, _ = translate_val(v, NameSupply(0), ctors)
        b, _ = translate_val(v, NameSupply(1000), ctors)
        left.append(a)
        right.append(b)
    return tuple(left), tuple(right)


def _bind_call(clo: AClosV, args) -> dict:
    env = dict(clo.env)
    env.update(zip(clo.params, args))
    env[clo.f] = clo
    return env


def val_rel_bounded(k: int, v1: AnfValue, v2: AnfValue, cfg: LogRelConfig) -> Verdict:
    if isinstance(v1, AConV) and isinstance(v2, AConV):
        if v1.tag != v2.tag or len(v1.fields) != len(v2.fields):
            return Fails(f"constructor {v1.tag}/{len(v1.fields)} vs {v2.tag}/{len(v2.fields)}")
        for i, (a, b) in enumerate(zip(v1.fields, v2.fields)):
            verdict = val_rel_bounded(k, a, b, cfg)
            if not verdict:
                return Fails(f"field {i} of {v1.tag}: {verdict.witness}")
        return HOLDS
    if isinstance(v1, AClosV) and isinstance(v2, AClosV):
        if k == 0:
            return HOLDS
        for j in range(cfg.closure_samples):
            args1, args2 = related_args(cfg.sample_seed, len(v1.params), j, cfg.ctors)
            if len(v2.params) != len(args2):
                return Fails(
                    f"closure {v1.f} takes {len(v1.params)} arguments, {v2.f} takes {len(v2.params)}"
                )
            for i in sample_indices(k):
                c1 = AnfConfig(_bind_call(v1, args1), v1.body)
                c2 = AnfConfig(_bind_call(v2, args2), v2.body)
                verdict = exp_rel_bounded(i, c1, c2, cfg)
                if not verdict:
                    return Fails(
                        f"closures {v1.f}/{v2.f} at index {i}, args "
                        f"{render(args1)}: {verdict.witness}"
                    )
        return HOLDS
    return Fails(f"unrelated shapes: {type(v1).__name__} vs {type(v2).__name__}")


def exp_rel_bounded(k: int, c1: AnfConfig, c2: AnfConfig, cfg: LogRelConfig) -> Verdict:
    """Every bounded evaluation of ``c1`` is matched by one of ``c2``."""
    try:
        r1, _ = eval_anf(c1.env, c1.expr, cfg.eval_budget)
    except StuckError:
        # a stuck left side has no result to match
        return HOLDS
    if r1 is OOT:
        return HOLDS
    try:
        r2, used = eval_anf(c2.env, c2.expr, cfg.witness_budget)
    except StuckError as exc:
        return Fails(f"right side stuck ({exc}) on {render(c2.expr)}; {_replay(cfg, k)}")
    if r2 is OOT:
        return Fails(f"no terminating right evaluation within budget; {_replay(cfg, k)}")
    verdict = val_rel_bounded(k, r1.value, r2.value, cfg)
    if not verdict:
        return Fails(
            f"results {render(r1.value)} vs {render(r2.value)} unrelated: "
            f"{verdict.witness}; {_replay(cfg, k)}"
        )
    return HOLDS
