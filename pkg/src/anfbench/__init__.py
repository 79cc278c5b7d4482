"""Executable semantics, ANF/CPS conversions and differential testing for a small lambda calculus."""

from .anf import AnfOutput, anf_exp, anf_program, translate_env, translate_val
from .anf_spec import Accepted, JudgmentQuery, Rejected, RejectReason, check_judgment
from .cps import CpsOutput, admin_redex_count, cps_exp, cps_program, cps_program_output
from .eval_anf import eval_anf
from .eval_src import OOT, Val, eval_src
from .harness import (
    CampaignReport,
    CampaignSpec,
    TrialOutcome,
    run_alpha_trial,
    run_campaign,
    run_divergence_trial,
    run_refine_trial,
    run_spec_trial,
)
from .logrel import (
    AnfConfig,
    Fails,
    HoldsUpToBounds,
    LogRelConfig,
    exp_rel_bounded,
    obs_rel,
    val_rel_bounded,
)
from .surface import ParseError, parse, render
from .syntax import (
    DEFAULT_CTORS,
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
    IllFormedError,
    JoinFunC,
    Let,
    LetApp,
    LetAppC,
    LetCon,
    LetConC,
    LetFun,
    LetFunC,
    Match,
    NameSupply,
    Proj,
    ProjC,
    StuckError,
    TailCall,
    Var,
    alpha_eq,
    compose,
    free_vars_anf,
    plug,
    well_formed_src,
)
from .testgen import GenConfig, gen_src, shrink

__version__ = "0.1.0"
