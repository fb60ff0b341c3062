"""UAV-assisted target tracking with joint sensing, communication, and control.

Closed-loop simulator and optimization toolkit: kinematic models, statistical
echo/rate models, an extended Kalman filter with analytic Jacobian,
closed-form transmit beamformers, a receding-horizon convex controller with a
dense barrier solver, LQG and clairvoyant-MPC benchmarks, and a Monte Carlo
evaluation harness with CSV/figure reporting.
"""

from .config import ScenarioConfig, load_config, preset_config
from .simkit import EpisodeTrace, TrialMetrics, compute_metrics, run_episode, run_monte_carlo

__all__ = [
    "ScenarioConfig",
    "load_config",
    "preset_config",
    "EpisodeTrace",
    "TrialMetrics",
    "compute_metrics",
    "run_episode",
    "run_monte_carlo",
]

__version__ = "0.1.0"
