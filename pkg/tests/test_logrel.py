import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anfbench.anf import translate_val
from anfbench.eval_anf import eval_anf
from anfbench.harness import run_theorem_trial
from anfbench.logrel import (
    HOLDS,
    AnfConfig,
    Fails,
    HoldsUpToBounds,
    LogRelConfig,
    exp_rel_bounded,
    obs_rel,
    related_args,
    sample_indices,
    val_rel_bounded,
)
from anfbench.syntax import (
    DEFAULT_CTORS,
    AClosV,
    AConV,
    ClosV,
    ConV,
    Halt,
    LetApp,
    LetCon,
    LetFun,
    NameSupply,
    TailCall,
    Var,
)
from anfbench.testgen import GenConfig, gen_open, gen_value

from helpers import anf_configs, letapp_configs

CFG = LogRelConfig()
TT, FF = AConV("Tt"), AConV("Ff")
ID = AClosV({}, "f", ("x",), Halt("x"))
CONST_TT = AClosV({}, "g", ("x",), LetCon("t", "Tt", (), Halt("t")))
CONST_FF = AClosV({}, "g", ("x",), LetCon("t", "Ff", (), Halt("t")))
LOOP = LetFun("f", ("x",), TailCall("f", ("x",)), LetApp("r", "f", ("y",), Halt("r")))


# --- observation relation ---------------------------------------------------------


def test_obs_rel_examples():
    assert obs_rel(ConV("Tt"), TT)
    assert obs_rel(ClosV((), Var(0)), CONST_FF)
    assert not obs_rel(ConV("Tt"), FF)
    assert not obs_rel(ConV("Tt"), ID)
    assert not obs_rel(ClosV((), Var(0)), TT)
    assert obs_rel(ConV("Box", (ClosV((), Var(0)),)), AConV("Box", (ID,)))
    assert not obs_rel(ConV("Box", (ConV("Tt"),)), AConV("Box", (FF,)))


def test_obs_rel_reflexive_on_translations():
    rng = random.Random(0)
    for i in range(300):
        v = gen_value(GenConfig(), rng)
        assert obs_rel(v, translate_val(v, NameSupply(i), DEFAULT_CTORS)[0])


# --- value relation -------------------------------------------------------------------


def test_val_rel_examples():
    assert val_rel_bounded(3, TT, TT, CFG) == HOLDS
    assert val_rel_bounded(0, CONST_TT, CONST_FF, CFG) == HOLDS
    assert isinstance(val_rel_bounded(2, TT, ID, CFG), Fails)
    assert isinstance(val_rel_bounded(1, CONST_TT, CONST_FF, CFG), Fails)
    assert val_rel_bounded(5, ID, AClosV({}, "h", ("z",), Halt("z")), CFG) == HOLDS


def test_arity_mismatch_fails():
    two = AClosV({}, "f", ("x", "y"), Halt("x"))
    verdict = val_rel_bounded(1, ID, two, CFG)
    assert isinstance(verdict, Fails) and "arguments" in verdict.witness


def test_sample_indices():
    assert sample_indices(0) == []
    assert sample_indices(4) == [0, 1, 2, 3]
    assert sample_indices(9) == [0, 4, 8]


def test_related_args_do_not_depend_on_index():
    a = related_args(5, 2, 1, DEFAULT_CTORS)
    assert a == related_args(5, 2, 1, DEFAULT_CTORS)
    for left, right in zip(*a):
        assert type(left) is type(right)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(0, 20),
    st.sampled_from(["Tt", "Ff", "Box", "Pair"]),
    st.sampled_from(["Tt", "Ff", "Box", "Pair"]),
    st.integers(1, 50),
    st.integers(1, 5),
    st.integers(0, 99),
)
def test_constructor_mismatch_always_fails(k, t1, t2, budget, samples, seed):
    cfg = LogRelConfig(budget, budget, samples, seed)
    arity = DEFAULT_CTORS.arity
    v1 = AConV(t1, (TT,) * arity(t1))
    v2 = AConV(t2, (TT,) * arity(t2))
    if t1 != t2:
        assert isinstance(val_rel_bounded(k, v1, v2, cfg), Fails)
    assert isinstance(val_rel_bounded(k, v1, ID, cfg), Fails)
    if arity(t1):
        assert isinstance(val_rel_bounded(k, v1, AConV(t1, (FF,) * arity(t1)), cfg), Fails)


def test_failures_persist_as_k_grows():
    rng = random.Random(4)
    closures = []
    while len(closures) < 30:
        v = gen_value(GenConfig(), rng)
        if isinstance(v, ClosV):
            closures.append(translate_val(v, NameSupply(), DEFAULT_CTORS)[0])
    flips = 0
    for a in closures:
        for b in closures[:10]:
            verdicts = [bool(val_rel_bounded(k, a, b, CFG)) for k in range(9)]
            first_fail = verdicts.index(False) if False in verdicts else None
            if first_fail is not None:
                flips += 1
                assert not any(verdicts[first_fail:])
    assert flips > 0


def test_config_validation():
    with pytest.raises(ValueError):
        LogRelConfig(closure_samples=0)


# --- expression relation ---------------------------------------------------------


def test_oot_left_is_trivial():
    c1 = AnfConfig({"y": TT}, LOOP)
    c2 = AnfConfig({}, Halt("unbound"))
    assert exp_rel_bounded(8, c1, c2, CFG) == HOLDS


def test_right_side_must_terminate():
    c1 = AnfConfig({"y": TT}, Halt("y"))
    verdict = exp_rel_bounded(2, c1, AnfConfig({"y": TT}, LOOP), LogRelConfig(witness_budget=500))
    assert isinstance(verdict, Fails) and "witness_budget=500" in verdict.witness


def test_right_side_stuck_fails():
    verdict = exp_rel_bounded(1, AnfConfig({"y": TT}, Halt("y")), AnfConfig({}, Halt("y")), CFG)
    assert isinstance(verdict, Fails)


def test_redex_example():
    sigma = {"f": ID, "y": TT}
    ek = LetCon("z", "Box", ("x",), Halt("z"))
    left = AnfConfig({**sigma, "x": TT}, ek)
    right = AnfConfig(sigma, LetApp("x", "f", ("y",), ek))
    assert isinstance(exp_rel_bounded(4, left, right, CFG), HoldsUpToBounds)


CONFIGS = anf_configs(60, seed=2)


@pytest.mark.parametrize("k", [0, 1, 4, 8])
def test_bounded_reflexivity(k):
    for c in CONFIGS:
        assert exp_rel_bounded(k, c, c, CFG), c


def test_reduce_app_both_directions():
    for sigma in letapp_configs(40, seed=6):
        (r, _) = eval_anf(sigma, LetApp("x", "f", ("y",), Halt("x")), 10_000)
        for ek in (Halt("x"), LetCon("z", "Box", ("x",), Halt("z"))):
            redex = AnfConfig(sigma, LetApp("x", "f", ("y",), ek))
            contractum = AnfConfig({**sigma, "x": r.value}, ek)
            assert exp_rel_bounded(3, redex, contractum, CFG)
            assert exp_rel_bounded(3, contractum, redex, CFG)


def test_theorem_instances():
    cfg = GenConfig(seed=12)
    for i in range(40):
        env, e = gen_open(cfg, i)
        outcome = run_theorem_trial(e, env, DEFAULT_CTORS, k=2)
        assert not outcome.failed, outcome
