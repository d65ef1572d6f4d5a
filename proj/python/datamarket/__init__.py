"""Fixed-price data market: instances, equilibrium analysis, learning."""

import json

from ._core import (
    DEFAULT_BUDGET,
    FORMAT_VERSION,
    BudgetError,
    ParseError,
    UnsupportedModelError,
    alpha_corollary,
    confidence_radius,
    run_cli,
)
from . import _core

__all__ = [
    "DEFAULT_BUDGET",
    "FORMAT_VERSION",
    "BudgetError",
    "ParseError",
    "UnsupportedModelError",
    "alpha_corollary",
    "analyze",
    "best_response_dynamics",
    "confidence_radius",
    "dumps",
    "generate",
    "load",
    "run_cli",
    "simulate",
    "validate",
]


def _text(instance):
    return instance if isinstance(instance, str) else json.dumps(instance)


def generate(kind="thm1", **params):
    """Build an instance dict from a generator kind and its parameters."""
    spec = dict(params, kind=kind)
    return json.loads(_core.generate_json(json.dumps(spec)))


def load(path):
    """Read an instance file; malformed files raise ParseError."""
    with open(path) as f:
        return json.loads(_core.canonical_json(f.read()))


def dumps(instance):
    """Canonical instance text, identical to what the CLI writes."""
    return _core.canonical_json(_text(instance))


def analyze(instance, budget=DEFAULT_BUDGET):
    return json.loads(_core.analyze_json(_text(instance), budget))


def validate(instance):
    return json.loads(_core.validate_json(_text(instance)))


def best_response_dynamics(instance, start, order=None, max_rounds=1000):
    text = _text(instance)
    if order is None:
        order = list(range(len(start)))
    return json.loads(_core.dynamics_json(text, list(start), list(order), max_rounds))


def simulate(instance, horizon=1000, seed=0, learners=("zooming",), alpha=None,
             curves=False, budget=DEFAULT_BUDGET):
    """Run the repeated market and return final regrets (and curves on request)."""
    if isinstance(learners, str):
        learners = [learners]
    alpha_arg = "" if alpha is None else str(alpha)
    return _core.simulate_summary(_text(instance), horizon, seed, list(learners),
                                  alpha_arg, curves, budget)
