"""Stochastic Michaelis-Menten kinetics in the total quasi-steady-state regime:
exact simulation, limit ODE, fluctuation SDE and their verification."""

from .core import (
    ConfigError,
    CopyState,
    ExperimentConfig,
    RateConstants,
    ScaledState,
    ScalingRegime,
    SQSSA,
    TQSSA,
    Trajectory,
    fig1_config,
    load_config,
)
from .ssa import JumpCapExceeded, simulate, simulate_zv
from .tqssa import equilibria, solve_det_sqssa, solve_det_tqssa, solve_flln_ode

__all__ = [
    "ConfigError", "CopyState", "ExperimentConfig", "RateConstants", "ScaledState", "ScalingRegime",
    "SQSSA", "TQSSA", "Trajectory", "fig1_config", "load_config",
    "JumpCapExceeded", "simulate", "simulate_zv",
    "equilibria", "solve_det_sqssa", "solve_det_tqssa", "solve_flln_ode",
]
