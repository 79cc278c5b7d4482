"""Hand-written judgments for the relational checker.

``ACCEPTED`` are valid derivations (some with names the transform would
never pick).  ``MUTATIONS`` each break one rule and carry the reason code
the checker must report.
"""

from anfbench.anf_spec import RejectReason as R
from anfbench.syntax import (
    App,
    Case,
    Con,
    Fun,
    Halt,
    Hole,
    JoinFunC,
    Let,
    LetAppC,
    LetConC,
    LetFunC,
    Match,
    NameSupply,
    Proj,
    TailCall,
    Var,
)

H = Hole()
S0 = NameSupply(0)

ID = Fun(Var(0))
APP = App(Var(0), Var(1))
APP_LAMS = App(Fun(Var(0)), Fun(Var(0)))
BOX = Con("Box", (Con("Tt"),))
MATCH = Match(BOX, (("Box", Var(0)),))


def _match_ctx(y="v0", j="v2", xr="v3", z="v4", idx=0, jump="v2", branch_tag="Box"):
    case = Case(y, ((branch_tag, Proj(z, "v0", idx, TailCall(jump, (z,)))),))
    return LetConC("v1", "Tt", (), LetConC("v0", "Box", ("v1",), JoinFunC(j, xr, H, case)))


def _lams_ctx(first="v1", second="v3", call=("v1", "v3")):
    fa = LetFunC(first, ("v0" if first == "v1" else "v2",), Halt("v0" if first == "v1" else "v2"), H)
    fb = LetFunC(second, ("v2" if second == "v3" else "v0",), Halt("v2" if second == "v3" else "v0"), H)
    return LetFunC(
        fa.f, fa.params, fa.fbody,
        LetFunC(fb.f, fb.params, fb.fbody, LetAppC("v4", call[0], (call[1],), H)),
    )


# (label, e, xs, supply, ctx, result)
ACCEPTED = [
    ("var", Var(1), ("a", "b"), S0, H, "b"),
    ("app", APP, ("x1", "x2"), S0, LetAppC("v0", "x1", ("x2",), H), "v0"),
    ("app-unordered-name", APP, ("x1", "x2"), S0, LetAppC("v9", "x1", ("x2",), H), "v9"),
    ("lam", ID, (), S0, LetFunC("v1", ("v0",), Halt("v0"), H), "v1"),
    ("lam-swapped-draws", ID, (), S0, LetFunC("v0", ("v1",), Halt("v1"), H), "v0"),
    ("app-of-lams", APP_LAMS, (), S0, _lams_ctx(), "v4"),
    ("con", BOX, (), S0, LetConC("v1", "Tt", (), LetConC("v0", "Box", ("v1",), H)), "v0"),
    ("let", Let(Con("Tt"), Var(0)), (), S0, LetConC("v0", "Tt", (), H), "v0"),
    ("match", MATCH, (), S0, _match_ctx(), "v3"),
]

# (label, e, xs, supply, ctx, result, reason)
MUTATIONS = [
    ("var-wrong-result", Var(1), ("a", "b"), S0, H, "a", R.RESULT_VAR_MISMATCH),
    ("var-out-of-range", Var(5), ("a", "b"), S0, H, "a", R.INDEX_OUT_OF_RANGE),
    ("var-extra-frame", Var(0), ("a",), S0, LetConC("v0", "Tt", (), H), "a", R.SHAPE_MISMATCH),
    ("lam-stale-binder", ID, (), NameSupply(5), LetFunC("v1", ("v0",), Halt("v0"), H), "v1", R.NON_FRESH_BINDER),
    ("lam-foreign-binder", ID, (), S0, LetFunC("f", ("v0",), Halt("v0"), H), "f", R.NON_FRESH_BINDER),
    ("lam-reused-binder", ID, (), S0, LetFunC("v0", ("v0",), Halt("v0"), H), "v0", R.SUPPLY_VIOLATION),
    ("lam-body-result", ID, (), S0, LetFunC("v1", ("v0",), Halt("v7"), H), "v1", R.RESULT_VAR_MISMATCH),
    ("lam-two-params", ID, (), S0, LetFunC("v2", ("v0", "v1"), Halt("v0"), H), "v2", R.SHAPE_MISMATCH),
    ("lam-no-halt", ID, (), S0, LetFunC("v1", ("v0",), TailCall("v0", ("v0",)), H), "v1", R.SHAPE_MISMATCH),
    ("lam-wrong-result", ID, (), S0, LetFunC("v1", ("v0",), Halt("v0"), H), "v0", R.RESULT_VAR_MISMATCH),
    ("app-swapped-call", APP, ("x1", "x2"), S0, LetAppC("v0", "x2", ("x1",), H), "v0", R.RESULT_VAR_MISMATCH),
    ("app-binder-from-env", APP, ("x1", "x2"), S0, LetAppC("x1", "x1", ("x2",), H), "x1", R.NON_FRESH_BINDER),
    ("app-missing-call", APP, ("x1", "x2"), S0, H, "v0", R.SHAPE_MISMATCH),
    ("app-permuted-segments", APP_LAMS, (), S0, _lams_ctx("v3", "v1"), "v4", R.RESULT_VAR_MISMATCH),
    ("con-wrong-tag", Con("Tt"), (), S0, LetConC("v0", "Ff", (), H), "v0", R.SHAPE_MISMATCH),
    ("con-extra-field", Con("Tt"), (), S0, LetConC("v0", "Tt", ("v9",), H), "v0", R.ARITY_MISMATCH),
    ("con-unknown-tag", Con("Nope"), (), S0, LetConC("v0", "Nope", (), H), "v0", R.ARITY_MISMATCH),
    ("con-duplicate-binder", BOX, (), S0, LetConC("v1", "Tt", (), LetConC("v1", "Box", ("v1",), H)), "v1", R.SUPPLY_VIOLATION),
    ("con-wrong-field", BOX, (), S0, LetConC("v1", "Tt", (), LetConC("v0", "Box", ("v5",), H)), "v0", R.RESULT_VAR_MISMATCH),
    ("let-wrong-result", Let(Con("Tt"), Var(0)), (), S0, LetConC("v0", "Tt", (), H), "v1", R.RESULT_VAR_MISMATCH),
    ("match-case-on-wrong-var", MATCH, (), S0, _match_ctx(y="v1"), "v3", R.RESULT_VAR_MISMATCH),
    ("match-wrong-field-index", MATCH, (), S0, _match_ctx(idx=1), "v3", R.SHAPE_MISMATCH),
    ("match-jumps-elsewhere", MATCH, (), S0, _match_ctx(jump="v9"), "v3", R.RESULT_VAR_MISMATCH),
    ("match-foreign-join", MATCH, (), S0, _match_ctx(j="j"), "v3", R.NON_FRESH_BINDER),
    ("match-branch-tags", MATCH, (), S0, _match_ctx(branch_tag="Tt"), "v3", R.SHAPE_MISMATCH),
    ("match-no-join", MATCH, (), S0, LetConC("v1", "Tt", (), LetConC("v0", "Box", ("v1",), H)), "v0", R.SHAPE_MISMATCH),
    ("match-field-reuses-join", MATCH, (), S0, _match_ctx(z="v2"), "v3", R.SUPPLY_VIOLATION),
]
