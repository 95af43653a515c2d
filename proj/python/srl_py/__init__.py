"""Structured reinforcement learning: CO-layers, perturbed Fenchel-Young
losses and the experiment harness."""

from ._core import (
    fy_loss_and_grad,
    gaussian_perturb,
    gen_data,
    grid_path_actions,
    grid_path_argmax,
    mnl_probs,
    parse_config,
    ranking_argmax,
    run_training,
    smoothed_max_estimate,
    smsp_expert,
    smsp_total_completion,
    softmax_target,
    softmax_target_counted,
    summarize_directory,
    topk_argmax,
)

__all__ = [
    "fy_loss_and_grad",
    "gaussian_perturb",
    "gen_data",
    "grid_path_actions",
    "grid_path_argmax",
    "mnl_probs",
    "parse_config",
    "ranking_argmax",
    "run_training",
    "smoothed_max_estimate",
    "smsp_expert",
    "smsp_total_completion",
    "softmax_target",
    "softmax_target_counted",
    "summarize_directory",
    "topk_argmax",
]
