"""Gaussian multi-armed bandit simulations under the randomized batch UCB rule."""

from .bandit_core import BatchGrid, ThetaParams, arm_means, sample_batch_income
from .errors import ConfigurationError, PreconditionError
from .experiment import LossCurve, SweepConfig, emit_csv, read_curve_csv, run_sweep
from .invariant_engine import (
    CoupleReport,
    InvariantState,
    couple_check,
    invariant_bound,
    run_invariant_episode,
    transform_bound,
)
from .mc_harness import LossEstimate, ReplicationOutcome, estimate_loss, run_episode, scaled_loss, unscale_loss
from .rng import Stream, mix_seed
from .svgplot import emit_plot
from .ucb_policy import PolicyConfig, PolicyState, sample_perturbation, select_arm, ucb_bound, update

__version__ = "0.1.0"
