"""quantal: conduct, replay, analyze and simulate go/no-go sensitivity tests."""

from .confidence import AL15, AL49, ConfidenceRow, lims
from .numerics import (InfoMatrix, MleResult, OverlapStatus, PavFit,
                       TrialRecord, TrialSet, classify_overlap, fit_mle,
                       info_matrix, kstar, log_likelihood, pav)
from .phase1 import Phase1Config, Procedure, UdtrRule, phase1_next, udtr_rule
from .refine import RefineConfig, RmjState, doptimal_next, f3point8, rmj_init, rmj_step
from .session import SessionConfig, TestSession, run_batch, round_to_reso, apply_log_transform
from .simulate import SimConfig, SimTruth, sim_truth, simulate_test, sweep

__version__ = "0.1.0"

__all__ = [
    "AL15", "AL49", "ConfidenceRow", "lims",
    "InfoMatrix", "MleResult", "OverlapStatus", "PavFit", "TrialRecord",
    "TrialSet", "classify_overlap", "fit_mle", "info_matrix", "kstar",
    "log_likelihood", "pav",
    "Phase1Config", "Procedure", "UdtrRule", "phase1_next", "udtr_rule",
    "RefineConfig", "RmjState", "doptimal_next", "f3point8", "rmj_init", "rmj_step",
    "SessionConfig", "TestSession", "run_batch", "round_to_reso", "apply_log_transform",
    "SimConfig", "SimTruth", "sim_truth", "simulate_test", "sweep",
]
