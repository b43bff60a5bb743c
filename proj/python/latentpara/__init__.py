"""Latent-space PPO paraphrase attacks on referring segmentation models."""

from ._core import (
    ConfigError,
    OracleError,
    __version__,
    clipped_surrogate,
    compute_reward,
    cosine_similarity,
    csr,
    default_config,
    importance_ratio,
    mask_iou,
    nnr,
    normalize_advantages,
    pearson_all_dims,
    regex_consistency,
    relative_iou_drop,
    softplus,
    sr_curve,
    synth_bench,
    synth_bench_config,
)

__all__ = [
    "ConfigError",
    "OracleError",
    "__version__",
    "clipped_surrogate",
    "compute_reward",
    "cosine_similarity",
    "csr",
    "default_config",
    "importance_ratio",
    "mask_iou",
    "nnr",
    "normalize_advantages",
    "pearson_all_dims",
    "regex_consistency",
    "relative_iou_drop",
    "softplus",
    "sr_curve",
    "synth_bench",
    "synth_bench_config",
]
