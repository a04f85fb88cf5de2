"""Approximate optimal one-dimensional Monge transport via a regularized dual construction."""

from ._core import *  # noqa: F401,F403
from ._core import MongeError, ProblemSpec, Params, solve

__all__ = ["MongeError", "ProblemSpec", "Params", "solve", "tent_spec"]


def tent_spec(alpha: float = 1.0) -> ProblemSpec:
    """Uniform source on [6, 8] and target [0, 5]; the limit density is a tent on [3, 5]."""
    return ProblemSpec(source=(6.0, 8.0), target=(0.0, 5.0), alpha=alpha)
