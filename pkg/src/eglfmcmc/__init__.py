"""Error-guided likelihood-free MCMC.

Posterior inference for simulators with intractable likelihoods: a classifier
is trained on (error, parameter) tuples to estimate the likelihood-to-evidence
ratio of the scalar simulation error, and a Metropolis-Hastings chain
conditioned on an error value samples the error-conditioned posterior.
Includes a rejection-ABC baseline and the built-in benchmark problems.
"""

from .abc import AbcConfig, AbcResult, ZeroAcceptancesError, abc_rejection, replay_draw
from .classifier import (
    CheckpointError,
    NetParams,
    OptimizerState,
    TrainConfig,
    TrainResult,
    forward,
    forward_logit,
    init_optimizer,
    joint_loss_and_grad,
    load_checkpoint,
    log_ratio,
    new_net,
    optimizer_step,
    save_checkpoint,
    selu,
    train,
)
from .dataset import (
    ErrorDataset,
    ScalingError,
    ScalingSpec,
    apply_scaling,
    build_dataset,
    invert_scaling,
    l1_distance,
    read_dataset_csv,
    write_dataset_csv,
)
from .sampler import (
    Chain,
    ChainConfig,
    ProposalSpec,
    default_proposal,
    mh_transition,
    read_chain_csv,
    run_chain,
    write_chain_csv,
)
from .simulators import (
    PROBLEMS,
    Prior,
    Problem,
    circle_simulate,
    get_problem,
    linear_simulate,
    prior_log_density,
    prior_sample,
    prior_sample_n,
    toy_error_posterior,
    toy_simulate,
)

__version__ = "0.1.0"
