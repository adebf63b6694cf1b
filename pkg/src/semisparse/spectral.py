"""Exact FFT solves of periodic screened systems.

The u-update of every model is a linear system ``M u = rhs`` where ``M`` is
a sum of a multiple of the identity (or of the inverse Laplacian) and
weighted ``A^T A`` terms of periodic difference stacks. All such ``M`` are
block-circulant, hence diagonal in the 2-D DFT basis with the per-bin
values returned by :func:`build_denominator`.

Denominators are full ``(H, W)`` grids in ``numpy.fft.fft2`` layout; the
solve itself uses the real FFT and reads the first ``W // 2 + 1`` columns.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .diffops import laplacian_symbol, operator_symbol
from .errors import DimensionError, ParameterError, SingularityError


def build_denominator(w0, w1, w2, symbol1, symbol2) -> np.ndarray:
    """Per-bin eigenvalues of ``w0*I + w1*D^T D + w2*A^T A``.

    ``symbol1`` is the first-order symbol and ``symbol2`` the symbol of the
    highest-order stack (second order in the base model).
    """
    if min(w0, w1, w2) < 0:
        raise ParameterError("denominator weights must be nonnegative")
    if w0 == w1 == w2 == 0:
        raise SingularityError("all weights are zero")
    denom = w0 + w1 * np.asarray(symbol1) + w2 * np.asarray(symbol2)
    if not np.all(denom > 0):
        raise SingularityError("system is singular (identity weight must be positive)")
    return denom


def build_denominator_hinv(lam, rho2, rho3, symbol1, symbol2, laplacian=None) -> np.ndarray:
    """Per-bin values of ``lam*(-Lap)^+ + rho2*D^T D + rho3*A^T A``.

    The pseudo-inverse Laplacian is undefined on constants, so the
    zero-frequency bin is set to 1. Solutions are expected to have their
    mean pinned separately (see ``mean`` in :func:`solve_screened`).
    """
    if lam <= 0:
        raise ParameterError("lambda must be positive")
    if rho2 < 0 or rho3 < 0:
        raise ParameterError("penalties must be nonnegative")
    lap = symbol1 if laplacian is None else laplacian
    inv = np.zeros_like(lap)
    nz = lap > 0
    inv[nz] = 1.0 / lap[nz]
    denom = lam * inv + rho2 * symbol1 + rho3 * symbol2
    denom[0, 0] = 1.0
    return denom


def inverse_laplacian_multiplier(width, height) -> np.ndarray:
    """Fourier multiplier of the pseudo-inverse of the negative Laplacian."""
    lap = laplacian_symbol(width, height)
    out = np.zeros_like(lap)
    nz = lap > 0
    out[nz] = 1.0 / lap[nz]
    return out


def apply_multiplier(field, multiplier) -> np.ndarray:
    """Apply a real, even Fourier multiplier to the last two axes of ``field``."""
    field = np.asarray(field, dtype=np.float64)
    h, w = field.shape[-2:]
    if multiplier.shape != (h, w):
        raise DimensionError(f"multiplier {multiplier.shape} does not match field {(h, w)}")
    spec = np.fft.rfft2(field) * multiplier[:, : w // 2 + 1]
    return np.fft.irfft2(spec, s=(h, w))


def solve_screened(rhs, denom, mean=None) -> np.ndarray:
    """Solve the circulant system with eigenvalues ``denom``.

    Parameters
    ----------
    rhs : ndarray, shape (..., H, W)
    denom : ndarray, shape (H, W)
    mean : float or ndarray, optional
        If given, the zero-frequency component of the solution is replaced so
        that its mean over the last two axes equals ``mean``.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    h, w = rhs.shape[-2:]
    if denom.shape != (h, w):
        raise DimensionError(f"denominator {denom.shape} does not match right-hand side {(h, w)}")
    spec = np.fft.rfft2(rhs) / denom[:, : w // 2 + 1]
    if mean is not None:
        spec[..., 0, 0] = np.asarray(mean) * (h * w)
    return np.fft.irfft2(spec, s=(h, w))


def _readonly(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=32)
def cached_denominator(height, width, w0, w1, w2, order) -> np.ndarray:
    """Read-only denominator for ``w0*I + w1*D^T D + w2*A_order^T A_order``."""
    s1 = operator_symbol(1, width, height)
    sn = operator_symbol(order, width, height)
    return _readonly(build_denominator(w0, w1, w2, s1, sn))


@lru_cache(maxsize=32)
def cached_denominator_hinv(height, width, lam, rho2, rho3, order) -> np.ndarray:
    s1 = operator_symbol(1, width, height)
    sn = operator_symbol(order, width, height)
    return _readonly(build_denominator_hinv(lam, rho2, rho3, s1, sn))


@lru_cache(maxsize=8)
def cached_inverse_laplacian(height, width) -> np.ndarray:
    return _readonly(inverse_laplacian_multiplier(width, height))
