"""Collective solution ranking on multi-relational networks.

Typed social-decision graphs (humans, domains, problems, solutions) plus
grammar-constrained particle swarms: direct democracy, representative
democracy, dynamically distributed democracy, dictatorship, and domain
ranking for problem categorization, in deterministic or Monte Carlo mode.
"""

from ._swarmrank import (
    Error,
    Grammar,
    Network,
    __version__,
    builtin_grammar,
    builtin_grammar_names,
    compute_uses_weights,
    load_scenario,
    load_scenario_file,
    parse_grammar,
    rank_domains,
    rank_solutions,
    save_scenario,
    select_dictator,
    select_outcome,
    serialize_grammar,
)

__all__ = [
    "Error",
    "Grammar",
    "Network",
    "__version__",
    "builtin_grammar",
    "builtin_grammar_names",
    "compute_uses_weights",
    "load_scenario",
    "load_scenario_file",
    "parse_grammar",
    "rank_domains",
    "rank_solutions",
    "save_scenario",
    "select_dictator",
    "select_outcome",
    "serialize_grammar",
]
