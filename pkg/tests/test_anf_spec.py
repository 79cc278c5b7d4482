import dataclasses
import random

import pytest

from anfbench.anf import anf_exp
from anfbench.anf_spec import Accepted, JudgmentQuery, Rejected, RejectReason, check_judgment
from anfbench.syntax import DEFAULT_CTORS, NameSupply, binders_anf
from anfbench.testgen import GenConfig, gen_open

from helpers import sample_terms
from spec_mutations import ACCEPTED, MUTATIONS

C = DEFAULT_CTORS
TERMS = sample_terms(300, seed=77)


def check(e, xs, s, ctx, r):
    return check_judgment(JudgmentQuery(s, e, xs, ctx, r), C)


def rename(node, m):
    """Rename every occurrence of the names in ``m`` (tags never collide with them)."""
    if isinstance(node, str):
        return m.get(node, node)
    if isinstance(node, tuple):
        return tuple(rename(x, m) for x in node)
    if dataclasses.is_dataclass(node):
        return dataclasses.replace(
            node, **{f.name: rename(getattr(node, f.name), m) for f in dataclasses.fields(node)}
        )
    return node


@pytest.mark.parametrize("label, e, xs, s, ctx, r", ACCEPTED, ids=[a[0] for a in ACCEPTED])
def test_accepted_fixtures(label, e, xs, s, ctx, r):
    verdict = check(e, xs, s, ctx, r)
    assert isinstance(verdict, Accepted)
    assert verdict.supply_after.next >= s.next


@pytest.mark.parametrize("label, e, xs, s, ctx, r, reason", MUTATIONS, ids=[m[0] for m in MUTATIONS])
def test_mutations_rejected_with_reason(label, e, xs, s, ctx, r, reason):
    verdict = check(e, xs, s, ctx, r)
    assert isinstance(verdict, Rejected)
    assert verdict.reason is reason


def test_fixture_suite_is_large_enough():
    assert len(MUTATIONS) >= 20
    assert {m[-1] for m in MUTATIONS} == set(RejectReason)


def test_app_output_supply_removes_result():
    verdict = check(*ACCEPTED[2][1:])
    assert "v9" not in verdict.supply_after and "v0" in verdict.supply_after


def test_checker_accepts_transform_output():
    for i, e in enumerate(TERMS):
        s = NameSupply(i % 13)
        out = anf_exp(e, (), s, C)
        verdict = check(e, (), s, out.ctx, out.result)
        assert isinstance(verdict, Accepted), (e, verdict)
        assert verdict.supply_after == out.supply_after


def test_checker_accepts_open_terms():
    cfg = GenConfig(seed=4)
    for i in range(60):
        env, e = gen_open(cfg, i)
        xs = tuple(f"x{k + 1}" for k in range(len(env)))
        out = anf_exp(e, xs, NameSupply(), C)
        assert check(e, xs, NameSupply(), out.ctx, out.result)


def test_alpha_flexibility():
    rng = random.Random(3)
    for e in TERMS[:150]:
        s = NameSupply()
        out = anf_exp(e, (), s, C)
        bs = binders_anf(out.ctx)
        targets = rng.sample(range(500, 5000), len(bs))
        m = {b: f"v{n}" for b, n in zip(bs, targets)}
        verdict = check(e, (), s, rename(out.ctx, m), m.get(out.result, out.result))
        assert isinstance(verdict, Accepted), (e, m)


def test_sampled_mutations_rejected():
    rng = random.Random(9)
    checked = 0
    for e in TERMS:
        s = NameSupply(100)
        out = anf_exp(e, (), s, C)
        bs = binders_anf(out.ctx)
        # a wrong result var is always caught
        assert not check(e, (), s, out.ctx, "v99")
        if not bs:
            continue
        # one binder flipped to a name from before the supply
        victim = rng.choice(bs)
        stale = rename(out.ctx, {victim: "v3"})
        res = "v3" if out.result == victim else out.result
        verdict = check(e, (), s, stale, res)
        assert isinstance(verdict, Rejected) and verdict.reason is RejectReason.NON_FRESH_BINDER
        checked += 1
    assert checked > 100
