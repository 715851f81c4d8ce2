"""Python bindings for the invstack library."""

import json

from . import _core
from ._core import InvstackError, inducibility_gap, logit_distance, quantal_response, sample_plan, solve_sse

__all__ = [
    "InvstackError",
    "inducibility_gap",
    "learn",
    "logit_distance",
    "quantal_response",
    "robust_strategy",
    "run_experiment",
    "sample_plan",
    "solve_sse",
    "synth_game",
    "synth_security_game",
]


def _rows(flat, rows, cols):
    return [flat[i * cols:(i + 1) * cols] for i in range(rows)]


def _game_dict(text):
    g = json.loads(text)
    for key in ("U", "V"):
        if g[key] and not isinstance(g[key][0], list):
            g[key] = _rows(g[key], g["m"], g["n"])
    return g


def synth_game(m, n, alpha, lam, seed):
    """Random game as a dict with keys m, n, lambda, U, V (nested rows)."""
    return _game_dict(_core.synth_game(m, n, alpha, lam, seed))


def synth_security_game(n, lam, seed):
    return _game_dict(_core.synth_security_game(n, lam, seed))


def learn(game, T, seed=0, algo="pure", threshold=0.95, min_samples=100, pseudo_count=1.0):
    """Run a learner against a game dict; returns V_hat, phi, rho, strategies, replacements."""
    text = game if isinstance(game, str) else json.dumps(game)
    return _core.learn(text, algo, T, seed, threshold, min_samples, pseudo_count)


def robust_strategy(U, V_hat, eps):
    return _core.robust_strategy(U, V_hat, eps)


def run_experiment(config):
    """Run an experiment config (dict or JSON text); returns one dict per record."""
    text = config if isinstance(config, str) else json.dumps(config)
    return _core.run_experiment(text)
