"""Finite-horizon stochastic dynamic pricing: optimal and suboptimal policies."""

from .dp import SolverConfig, ValuePolicyTable, solve_bellman
from .model import (DemandFunction, Degenerate, Discrete, ModelError, PricingProblem,
                    ShiftedBeta, example_problem)
from .policies import (BellmanPolicy, CECPolicy, OLFCConfig, OLFCConvergenceError, OLFCPolicy,
                       cec_price, make_policy)
from .sim import ComparisonSamples, paired_compare, simulate
from .stats import ComparisonStats, histogram, quantile, relative_l2, summarise

__all__ = [
    "BellmanPolicy", "CECPolicy", "ComparisonSamples", "ComparisonStats", "DemandFunction",
    "Degenerate", "Discrete", "ModelError", "OLFCConfig", "OLFCConvergenceError", "OLFCPolicy",
    "PricingProblem", "ShiftedBeta", "SolverConfig", "ValuePolicyTable", "cec_price",
    "example_problem", "histogram", "make_policy", "paired_compare", "quantile", "relative_l2",
    "simulate", "solve_bellman", "summarise",
]
