"""Exact price of anarchy for generalized congestion and welfare games."""

import json

from ._core import (
    BasisPair,
    SolverError,
    ValidationError,
    VerificationError,
    bpr_basis,
    characterize,
    enumerate_equilibria,
    from_congestion,
    is_nash,
    marginal_contribution_welfare,
    optimize_class,
    optimize_fixed_incentive,
    optimize_rule,
    perception_basis,
    polynomial_basis,
    polynomial_marginal_cost_basis,
    random_concave_welfare,
    run_cli,
    worst_case_game,
)


def worst_case(pairs, eta=1e-3):
    """Worst-case game for a cost class, decoded into a dict."""
    return json.loads(worst_case_game(pairs, eta))


def oracle(game):
    """Exhaustive equilibrium scan; game may be a dict or JSON text."""
    text = game if isinstance(game, str) else json.dumps(game)
    return enumerate_equilibria(text)


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
