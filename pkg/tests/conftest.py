"""Shared fixtures and independent dense-matrix oracles.

The dense operators are built entry by entry from index arithmetic, with no
use of the library's difference code, so they can serve as references.
"""
import numpy as np
import pytest


def dense_dx(h, w):
    """Matrix of the periodic forward difference along columns, on a
    row-major flattened (h, w) grid."""
    n = h * w
    m = np.zeros((n, n))
    for i in range(h):
        for j in range(w):
            k = i * w + j
            m[k, k] -= 1.0
            m[k, i * w + (j + 1) % w] += 1.0
    return m


def dense_dy(h, w):
    n = h * w
    m = np.zeros((n, n))
    for i in range(h):
        for j in range(w):
            k = i * w + j
            m[k, k] -= 1.0
            m[k, ((i + 1) % h) * w + j] += 1.0
    return m


def dense_stack(h, w, order):
    """Vertically stacked dense operator, components in x/y word order."""
    from itertools import product

    ops = {"x": dense_dx(h, w), "y": dense_dy(h, w)}
    blocks = []
    for word in product("xy", repeat=order):
        m = np.eye(h * w)
        for ch in word:
            m = ops[ch] @ m
        blocks.append(m)
    return np.vstack(blocks)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
