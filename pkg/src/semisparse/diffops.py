"""Periodic forward-difference operator stacks and their Fourier symbols.

A difference stack of order ``k`` holds the ``2**k`` compositions of the
first-order operators ``Dx`` (along the last axis, columns) and ``Dy``
(along the second-to-last axis, rows). Components are ordered
lexicographically by axis word, e.g. ``xx, xy, yx, yy`` for ``k = 2``.
The stack axis is prepended, so a field of shape ``(..., H, W)`` yields a
stack of shape ``(2**k, ..., H, W)``.

Partial differences commute, so components sharing the same number of x
and y factors are evaluated once and shared; ``xy`` and ``yx`` are
bitwise equal.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .errors import ConfigurationError, DimensionError

SUPPORTED_ORDERS = (1, 2, 3)


def _check_order(order):
    if order not in SUPPORTED_ORDERS:
        raise ConfigurationError(f"difference order must be one of {SUPPORTED_ORDERS}, got {order!r}")


def stack_labels(order: int) -> list[str]:
    """Axis words of the stack components, in storage order."""
    _check_order(order)
    return ["".join(w) for w in product("xy", repeat=order)]


def dx(u):
    return np.roll(u, -1, axis=-1) - u


def dy(u):
    return np.roll(u, -1, axis=-2) - u


def dx_t(p):
    return np.roll(p, 1, axis=-1) - p


def dy_t(p):
    return np.roll(p, 1, axis=-2) - p


def _power(u, nx, ny, fx, fy):
    for _ in range(ny):
        u = fy(u)
    for _ in range(nx):
        u = fx(u)
    return u


def diff_stack(u, order: int) -> np.ndarray:
    """Stack of all order-``order`` forward differences of ``u``.

    Examples
    --------
    >>> diff_stack(np.arange(4.0)[None, :], 1)[0, 0]
    array([ 1.,  1.,  1., -3.])
    """
    _check_order(order)
    u = np.asarray(u, dtype=np.float64)
    if u.ndim < 2:
        raise DimensionError(f"field must be at least 2-D, got shape {u.shape}")
    cache = {}
    out = np.empty((2 ** order,) + u.shape)
    for i, word in enumerate(product("xy", repeat=order)):
        key = (word.count("x"), word.count("y"))
        if key not in cache:
            cache[key] = _power(u, *key, dx, dy)
        out[i] = cache[key]
    return out


def diff_adjoint(stack) -> np.ndarray:
    """Apply the transpose of the stacked operator to ``stack``.

    The order is inferred from the number of components.
    """
    stack = np.asarray(stack, dtype=np.float64)
    n = stack.shape[0]
    order = {2: 1, 4: 2, 8: 3}.get(n)
    if order is None:
        raise DimensionError(f"stack must have 2, 4 or 8 components, got {n}")
    # group components with the same operator before differencing
    groups = {}
    for comp, word in zip(stack, product("xy", repeat=order)):
        key = (word.count("x"), word.count("y"))
        groups[key] = groups[key] + comp if key in groups else comp.copy()
    out = np.zeros(stack.shape[1:])
    for key in sorted(groups):
        out += _power(groups[key], *key, dx_t, dy_t)
    return out


def _axis_symbols(width, height):
    sx = 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(width) / width)
    sy = 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(height) / height)
    return sx[np.newaxis, :], sy[:, np.newaxis]


def operator_symbol(order: int, width: int, height: int) -> np.ndarray:
    """Eigenvalues of ``A^T A`` for the order-``order`` stack, on the FFT grid.

    Returns a ``(height, width)`` array laid out like ``numpy.fft.fft2``
    output. Since each component is a product of commuting difference
    operators, the sum over all ``2**k`` words factors as
    ``(|Dx|^2 + |Dy|^2)**k``.
    """
    _check_order(order)
    sx, sy = _axis_symbols(width, height)
    s = sx + sy
    s[0, 0] = 0.0
    return s ** order


def laplacian_symbol(width: int, height: int) -> np.ndarray:
    """Symbol of the periodic negative Laplacian ``Dx^T Dx + Dy^T Dy``."""
    return operator_symbol(1, width, height)


def gradient_magnitude(u) -> np.ndarray:
    """Per-pixel Euclidean norm of the forward-difference gradient."""
    g = diff_stack(u, 1)
    return np.sqrt(g[0] ** 2 + g[1] ** 2)
