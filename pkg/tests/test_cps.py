import pytest

from anfbench.anf import anf_program
from anfbench.cps import admin_redex_count, cps_exp, cps_program, cps_program_output, cps_translate_val
from anfbench.eval_anf import eval_anf
from anfbench.eval_src import Val, eval_src
from anfbench.logrel import obs_rel
from anfbench.syntax import (
    DEFAULT_CTORS,
    AConV,
    App,
    ClosV,
    Con,
    ConV,
    Fun,
    Halt,
    IllFormedError,
    Let,
    LetApp,
    LetCon,
    LetFun,
    Match,
    NameSupply,
    TailCall,
    Var,
    src_nodes,
)

from helpers import sample_terms

C = DEFAULT_CTORS
TERMS = sample_terms(300, seed=8)


def test_var_case():
    out = cps_exp(Var(0), ("a",), "k", NameSupply(), C)
    assert out.expr == TailCall("k", ("a",)) and admin_redex_count(out) == 0


def test_app_case():
    out = cps_exp(App(Var(0), Var(1)), ("x1", "x2"), "k", NameSupply(), C)
    inner = LetFun("v2", ("v3",), TailCall("v1", ("v3", "k")), TailCall("v2", ("x2",)))
    assert out.expr == LetFun("v0", ("v1",), inner, TailCall("v0", ("x1",)))
    assert admin_redex_count(out) == 2


def test_fun_case():
    out = cps_exp(Fun(Var(0)), (), "k", NameSupply(), C)
    assert out.expr == LetFun("v2", ("v0", "v1"), TailCall("v1", ("v0",)), TailCall("k", ("v2",)))
    assert out.admin_count == 0


def test_program_wraps_halting_continuation():
    expected = LetFun("v0", ("v1",), Halt("v1"), LetCon("v2", "Tt", (), TailCall("v0", ("v2",))))
    assert cps_program(Con("Tt"), C) == expected


def test_end_to_end_application():
    r, _ = eval_anf({}, cps_program(App(Fun(Var(0)), Con("Tt")), C), 1000)
    assert r == Val(AConV("Tt"))


def test_open_term_rejected():
    with pytest.raises(IllFormedError):
        cps_program(Var(0), C)


@pytest.mark.parametrize(
    "e, n",
    [
        (Var(0), 0),
        (App(Var(0), Var(1)), 2),
        (App(App(Var(0), Var(1)), Var(2)), 4),
        (Let(Var(0), Var(0)), 1),
        (Con("Pair", (Var(0), Var(1))), 2),
        (Match(Var(0), (("Tt", Var(0)),)), 1),
    ],
)
def test_admin_counts(e, n):
    assert cps_exp(e, ("a", "b", "c"), "k", NameSupply(), C).admin_count == n


def test_admin_count_monotone_on_app_chains():
    counts = []
    e = Var(0)
    for _ in range(6):
        e = App(e, Var(0))
        counts.append(cps_exp(e, ("a",), "k", NameSupply(), C).admin_count)
    assert counts == sorted(counts) and len(set(counts)) == len(counts)


def test_admin_count_covers_nontrivial_apps():
    for e in TERMS:
        nontrivial = sum(
            1
            for n in src_nodes(e)
            if isinstance(n, App) and not (isinstance(n.fn, Var) and isinstance(n.arg, Var))
        )
        assert cps_program_output(e, C).admin_count >= nontrivial


def test_semantic_preservation_and_agreement_with_anf():
    for e in TERMS:
        r, _ = eval_src((), e, 100_000, C)
        rc, _ = eval_anf({}, cps_program(e, C), 16 * 100_000 + 64)
        ra, _ = eval_anf({}, anf_program(e, C), 16 * 100_000 + 64)
        assert obs_rel(r.value, rc.value)
        assert obs_rel(r.value, ra.value)


def test_translated_closure_uses_cps_convention():
    tv, _ = cps_translate_val(ClosV((ConV("Ff"),), Var(1)), NameSupply(), C)
    assert tv.params == ("v0", "v1") and tv.f == "v2"
    # call it with a halting continuation
    env = {"clo": tv, "arg": AConV("Tt")}
    prog = LetFun("k", ("x",), Halt("x"), TailCall("clo", ("arg", "k")))
    r, _ = eval_anf(env, prog, 100)
    assert r == Val(AConV("Ff"))


def test_cps_never_uses_letapp():
    for e in TERMS[:100]:
        stack = [cps_program(e, C)]
        while stack:
            t = stack.pop()
            assert not isinstance(t, LetApp)
            for attr in ("cont", "fbody"):
                if hasattr(t, attr):
                    stack.append(getattr(t, attr))
            if hasattr(t, "branches"):
                stack.extend(b for _, b in t.branches)
