"""Partition priors, cluster-count diagnostics and merge-truncate-merge post-processing."""

from ._core import (
    BracketError,
    DomainError,
    NumericError,
    PrecisionError,
    ProcessSpec,
    __version__,
    cnk,
    cnk_curve,
    experiments,
    log_eppf,
    mtm_apply,
    mtm_calibrate,
    prior_kn,
    prior_mean_kn,
    rate_overfitted,
    regularization_path,
    run_experiment,
    sample_posterior,
    simulate_data,
    solve_param_for_ekn,
    wasserstein,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
