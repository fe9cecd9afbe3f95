"""posbg: attacker/defender alert-threshold game toolkit.

A simulation engine for a simultaneous-move security game on a noisy alert
channel, defender and attacker decision rules under three knowledge regimes,
a deterministic Monte Carlo sweep harness, and an exact finite-horizon
evaluator for small stochastic games with hidden opponent types.
"""

__version__ = "0.1.0"

from posbg.agents import (
    BetaPosterior,
    FullKnowledgeAttacker,
    LifespanVariant,
    PartialKnowledgeAttacker,
    PartialKnowledgePlan,
    ThresholdDefender,
    ZkSessionResult,
    compute_lifespan,
    compute_threshold,
    defender_act,
    fk_attacker_act,
    joint_alert_rate,
    pk_attacker_act,
    run_zk_session,
    zk_plan,
    zk_update,
)
from posbg.engine import (
    AttackerAction,
    DefenderAction,
    EndedBy,
    EpisodeResult,
    GameParams,
    GameState,
    TieBreak,
    TraceRow,
    draw_alert,
    resolve_end,
    run_episode,
    step,
)
from posbg.hba import (
    FiniteSBG,
    History,
    TypePosterior,
    action_values,
    expected_payoff,
    hba_action,
    load_game,
    q_value,
    type_posterior,
)
from posbg.rng import RandomSource, derive_seed
from posbg.sweep import (
    AttackerModelKind,
    CellConfig,
    CellStats,
    GridSpec,
    SweepReport,
    ZkAggregate,
    fk_expected_score,
    make_grid,
    nb_arrival_tail,
    run_cell,
    run_sweep,
)

__all__ = [
    "AttackerAction",
    "AttackerModelKind",
    "BetaPosterior",
    "CellConfig",
    "CellStats",
    "DefenderAction",
    "EndedBy",
    "EpisodeResult",
    "FiniteSBG",
    "FullKnowledgeAttacker",
    "GameParams",
    "GameState",
    "GridSpec",
    "History",
    "LifespanVariant",
    "PartialKnowledgeAttacker",
    "PartialKnowledgePlan",
    "RandomSource",
    "SweepReport",
    "ThresholdDefender",
    "TieBreak",
    "TraceRow",
    "TypePosterior",
    "ZkAggregate",
    "ZkSessionResult",
    "action_values",
    "compute_lifespan",
    "compute_threshold",
    "defender_act",
    "derive_seed",
    "draw_alert",
    "expected_payoff",
    "fk_attacker_act",
    "fk_expected_score",
    "hba_action",
    "joint_alert_rate",
    "load_game",
    "make_grid",
    "nb_arrival_tail",
    "pk_attacker_act",
    "q_value",
    "resolve_end",
    "run_cell",
    "run_episode",
    "run_sweep",
    "run_zk_session",
    "step",
    "type_posterior",
    "zk_plan",
    "zk_update",
    "__version__",
]
