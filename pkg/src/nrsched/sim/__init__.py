from nrsched.sim.config import ConfigError, SimulationConfig, load_config, parse_config_text
from nrsched.sim.engine import (
    ReplicationState,
    RunArtifact,
    SlotRecord,
    SolverError,
    run_experiment,
    run_replication,
    run_slot,
)
from nrsched.sim.output import emit_results

__all__ = [
    "ConfigError", "SimulationConfig", "load_config", "parse_config_text", "ReplicationState",
    "RunArtifact", "SlotRecord", "SolverError", "run_experiment", "run_replication", "run_slot",
    "emit_results",
]
