"""Swiss-system pairing via maximum weight perfect matching."""

import json

try:
    from . import _swiss_mwm as _core
except ImportError:  # build tree: the extension sits next to the package
    import _swiss_mwm as _core

SwissError = _core.SwissError

SYSTEMS = ("Dutch", "Burstein", "Monrad", "Random", "Random2")


def error_code(exc):
    """Code prefix of a SwissError message, e.g. "NoLegalPairing"."""
    return str(exc).split(":", 1)[0]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def pair(tournament, seed=1, system=None, beta=None):
    """Next-round pairing of a tournament document (dict or JSON text)."""
    return json.loads(_core.pair(_text(tournament), seed, system, beta))


def run_experiment(config=None, **overrides):
    """Runs an experiment; returns a dict with rows, summary and csv."""
    cfg = dict(config or {})
    cfg.update(overrides)
    return json.loads(_core.run_experiment(json.dumps(cfg)))


def correlation_study(config=None, **overrides):
    cfg = dict(config or {})
    cfg.update(overrides)
    return json.loads(_core.correlation_study(json.dumps(cfg)))


def max_weight_perfect_matching(vertex_count, edges):
    """Returns (pairs, total weight) for edges given as (u, v, weight)."""
    pairs, total = _core.max_weight_perfect_matching(vertex_count, [tuple(e) for e in edges])
    return [tuple(p) for p in pairs], total


outcome_distribution = _core.outcome_distribution
kendall_tau = _core.kendall_tau
spearman_rho = _core.spearman_rho
ndcg = _core.ndcg
replication_seed = _core.replication_seed

__all__ = [
    "SYSTEMS",
    "SwissError",
    "correlation_study",
    "error_code",
    "kendall_tau",
    "max_weight_perfect_matching",
    "ndcg",
    "outcome_distribution",
    "pair",
    "replication_seed",
    "run_experiment",
    "spearman_rho",
]
