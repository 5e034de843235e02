"""Exact DTMC/MDP engine for a compartmental epidemic model with testing and quarantine."""

__version__ = "0.1.0"

from .model import (Action, NormalizationError, Parameters, SimpleState, State,  # noqa: E402
                    transition_distribution, simplified_transition_distribution)
from .statespace import build_dtmc, build_reachable, enumerate_all  # noqa: E402
from .policy import adaptive_policy, constant_policy, AdaptiveConfig  # noqa: E402
from .solver import converge, query_probability  # noqa: E402
