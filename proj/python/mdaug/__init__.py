"""Deterministic 2D/3D volume augmentation engine with domain-shift experiment tooling."""

from ._core import (
    Mask,
    NiftiError,
    Preset,
    ValidationError,
    Volume,
    additive_brightness,
    argmax_decode,
    augment_sample,
    batch_norm_inference,
    batch_norm_train,
    builtin_preset_names,
    contrast_transform,
    dice,
    ensemble,
    gamma_transform,
    gaussian_blur,
    gaussian_noise,
    instance_norm,
    instance_norm_grad,
    inverse_gamma_transform,
    load_preset,
    mean_dice,
    multiplicative_brightness,
    one_hot,
    plan_bn_experiment,
    plan_cross_domain,
    plan_fraction_sweep,
    plan_five_fold,
    plan_holdout_four,
    preset_from_json,
    read_mask,
    read_volume,
    resample,
    resample_mask,
    write_mask,
    write_volume,
    z_spacing_target,
    zscore_normalize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
