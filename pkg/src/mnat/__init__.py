"""Maximization of M-natural-concave functions: exact, noisy and adversarial settings."""

__version__ = "0.1.0"

from .errors import MnatError
from .lattice import (
    NEG_INFINITY,
    POS_INFINITY,
    FeasibleRegion,
    FunctionValuation,
    TableValuation,
    Valuation,
    enumerate_feasible,
    rescale,
    restrict,
)
from .matroids import Matroid, explicit_matroid, partition_matroid, uniform_matroid
from .valuations import matroid_distance, oxs_maxflow, separable_concave
from .mchecker import brute_force_max, check_exchange, check_prop_ab, local_error
from .greedy import audit_robustness, greedy_exact, greedy_with_selector
from .bandit import BanditConfig, NoiseSpec, estimate_regret, etc_run, greedy_bandit, moss_run
from .adversarial import distinguisher, mwu_learner, per_round_greedy_learner, play
