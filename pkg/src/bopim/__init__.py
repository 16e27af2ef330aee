"""Influence maximization on temporal networks via Bayesian optimization with a sparse linear surrogate."""

from .baselines import ExactEvaluator, MonteCarloEvaluator, celf, greedy_celf, random_baseline
from .diffusion import SpreadEstimate, estimate_spread, exact_spread, simulate_si
from .errors import BopimError, ConfigError, InputError
from .metrics_uq import (
    interval_coverage,
    mape,
    mape_se,
    posterior_box_stats,
    topk_inclusion_proportions,
    validate_surrogate,
)
from .optimizer import BopimConfig, RunResult, acquire, run_bopim, sample_seed_degree_proportional
from .shrinkage_gibbs import Dataset, GibbsConfig, PosteriorDraws, fit, predict
from .temporal_graph import TemporalGraph, aggregate, aggregate_degrees, load_graph, parse_contacts

__version__ = "0.1.0"

__all__ = [
    "BopimConfig",
    "BopimError",
    "ConfigError",
    "Dataset",
    "ExactEvaluator",
    "GibbsConfig",
    "InputError",
    "MonteCarloEvaluator",
    "PosteriorDraws",
    "RunResult",
    "SpreadEstimate",
    "TemporalGraph",
    "acquire",
    "aggregate",
    "aggregate_degrees",
    "celf",
    "estimate_spread",
    "exact_spread",
    "fit",
    "greedy_celf",
    "interval_coverage",
    "load_graph",
    "mape",
    "mape_se",
    "parse_contacts",
    "posterior_box_stats",
    "predict",
    "random_baseline",
    "run_bopim",
    "sample_seed_degree_proportional",
    "simulate_si",
    "topk_inclusion_proportions",
    "validate_surrogate",
]
