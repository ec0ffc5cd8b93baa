"""Discrete-event MANET simulator comparing MEA-DSR with DSR."""

from ._meadsr import (
    ConfigError,
    InvariantViolation,
    Protocol,
    ScenarioConfig,
    connections,
    metrics_from_trace,
    mobility_scenario,
    parse_config,
    run_experiment,
    select_alternate_route,
    select_primary_route,
    serialize_config,
    shared_intermediates,
    simulate,
    sweep,
    update_min_bat_lev,
)

__all__ = [
    "ConfigError",
    "InvariantViolation",
    "Protocol",
    "ScenarioConfig",
    "connections",
    "metrics_from_trace",
    "mobility_scenario",
    "parse_config",
    "run_experiment",
    "select_alternate_route",
    "select_primary_route",
    "serialize_config",
    "shared_intermediates",
    "simulate",
    "sweep",
    "update_min_bat_lev",
]
