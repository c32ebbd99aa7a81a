"""Worst-case regularization toolkit."""

from ._core import (
    ConfigError,
    InfeasibleError,
    PreconditionError,
    add_noise,
    bump_pair,
    differentiate,
    error_bound,
    holder_norm,
    integrate,
    minimize,
    modulus_constants,
    regularize,
    run,
    sine_pair,
    step_size,
    sup_norm,
)

__all__ = [
    "ConfigError",
    "InfeasibleError",
    "PreconditionError",
    "add_noise",
    "bump_pair",
    "differentiate",
    "error_bound",
    "holder_norm",
    "integrate",
    "minimize",
    "modulus_constants",
    "regularize",
    "run",
    "sine_pair",
    "step_size",
    "sup_norm",
]
