"""Elementwise shrinkage operators.

Both operators accept scalars or arrays and act componentwise.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import ParameterError


class HardShrinkMode(str, enum.Enum):
    """Threshold rule for :func:`hard_shrink`.

    ``EXACT`` thresholds at ``sqrt(2 * b)``, the true minimiser of
    ``b * [t != 0] + (t - x)**2 / 2``. ``PAPER`` thresholds at ``b`` itself,
    kept for reproducing results that used the literal rule.
    """

    EXACT = "exact"
    PAPER = "paper"


def _check_threshold(tau, name):
    if np.any(np.asarray(tau) < 0):
        raise ParameterError(f"{name} must be nonnegative, got {tau!r}")


def soft_shrink(x, tau):
    """``sign(x) * max(|x| - tau, 0)``, the prox of ``tau * |t|``."""
    _check_threshold(tau, "tau")
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)
    return out if out.ndim else float(out)


def hard_threshold(beta_over_rho, mode=HardShrinkMode.EXACT) -> float:
    _check_threshold(beta_over_rho, "beta_over_rho")
    if HardShrinkMode(mode) is HardShrinkMode.EXACT:
        return float(np.sqrt(2.0 * beta_over_rho))
    return float(beta_over_rho)


def hard_shrink(x, beta_over_rho, mode=HardShrinkMode.EXACT):
    """Zero every entry with ``|x| <= threshold``; keep the rest unchanged.

    Ties at the threshold go to zero: both candidates attain the same
    objective and the sparser one is preferred.
    """
    tau = hard_threshold(beta_over_rho, mode)
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.abs(x) > tau, x, 0.0)
    return out if out.ndim else float(out)
