"""Quality measures for structure/texture decompositions.

Ground truth is rarely available for real images, so quality is judged by
how weakly the two layers are related at a given smoothing level:

* ``str_db``: structure-to-texture energy ratio in dB, used as the common
  operating point when comparing methods.
* ``c0``: Pearson correlation between structure and texture.
* ``c1``: Pearson correlation between the structure's gradient magnitude
  and the texture magnitude (edges and oscillations should not overlap).

Colour images are measured channel by channel and averaged.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .decomposer import DecomposeConfig, decompose
from .diffops import diff_stack, gradient_magnitude
from .errors import DegenerateInputError, DimensionError, ParameterError, TuningError
from .grid import as_channel_image

NONZERO_THRESHOLD = 1e-6


def _planar(img):
    return as_channel_image(img).data


def str_db(u, v) -> float:
    """``10 log10(||u||^2 / ||v||^2)`` over all channels jointly."""
    u, v = _planar(u), _planar(v)
    if u.shape != v.shape:
        raise DimensionError(f"structure {u.shape} and texture {v.shape} differ")
    ev = float(np.sum(v * v))
    if ev == 0.0:
        raise DegenerateInputError("texture is identically zero; ratio is infinite")
    return 10.0 * math.log10(float(np.sum(u * u)) / ev)


def correlation(x, y) -> float:
    """Pearson correlation ``cov(x, y) / sqrt(var(x) var(y))``."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise DimensionError(f"sample sizes differ: {x.size} vs {y.size}")
    if x.size < 2:
        raise DegenerateInputError("need at least two samples")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("zero variance")
    r = float(np.dot(xc, yc)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _channel_mean(pairs, name):
    vals = []
    for c, (x, y) in enumerate(pairs):
        try:
            vals.append(correlation(x, y))
        except DegenerateInputError:
            warnings.warn(f"{name}: channel {c} has zero variance and is skipped", RuntimeWarning,
                          stacklevel=3)
    if not vals:
        raise DegenerateInputError(f"{name}: every channel is constant")
    return float(np.mean(vals))


def structure_texture_correlations(u, v):
    """Return ``(c0, c1)`` averaged over channels.

    ``c1`` correlates the forward-difference gradient magnitude of ``u`` with
    ``|v|``. Channels with zero variance in either operand are skipped.
    """
    u, v = _planar(u), _planar(v)
    if u.shape != v.shape:
        raise DimensionError(f"structure {u.shape} and texture {v.shape} differ")
    c0 = _channel_mean(zip(u, v), "c0")
    c1 = _channel_mean(((gradient_magnitude(uc), np.abs(vc)) for uc, vc in zip(u, v)), "c1")
    return c0, c1


def sparsity_profile(u, max_order: int = 2, tau0: float = NONZERO_THRESHOLD) -> dict:
    """Number of difference entries with magnitude above ``tau0``, per order.

    A piecewise-polynomial image of degree below ``n`` has a sparse order-n
    profile while lower orders stay dense.
    """
    if max_order not in (1, 2, 3):
        raise ParameterError(f"max_order must be 1, 2 or 3, got {max_order!r}")
    u = _planar(u)
    return {k: int(np.count_nonzero(np.abs(diff_stack(u, k)) > tau0))
            for k in range(1, max_order + 1)}


@dataclass
class MetricsReport:
    str_db: float
    c0: float
    c1: float
    sparsity_profile: dict = field(default_factory=dict)
    wall_time: float = 0.0


def evaluate(u, v, wall_time: float = 0.0, max_order: int = 2) -> MetricsReport:
    c0, c1 = structure_texture_correlations(u, v)
    return MetricsReport(str_db=str_db(u, v), c0=c0, c1=c1,
                         sparsity_profile=sparsity_profile(u, max_order),
                         wall_time=wall_time)


def _tune_one(f, target, cfg, tunable, tol, max_probes, bracket, first_step):
    if tunable not in ("lam", "alpha", "beta", "gamma"):
        raise ParameterError(f"cannot tune {tunable!r}")
    if getattr(cfg, tunable) is None or getattr(cfg, tunable) <= 0:
        raise ParameterError(f"{tunable!r} is unset or zero for this configuration")
    lo, hi = math.log10(bracket[0]), math.log10(bracket[1])
    best = None
    seen = {}

    def probe(logx, c=None):
        nonlocal best
        c = c or cfg.replace(**{tunable: 10.0 ** logx})
        res = decompose(f, c)
        s = str_db(res.structure, res.texture)
        seen[logx] = s
        if best is None or abs(s - target) < abs(best[2] - target):
            best = (c, res, s)
        return abs(s - target) <= tol

    def fail(msg):
        raise TuningError(msg, best=best[0], best_str=best[2])

    start = math.log10(getattr(cfg, tunable))
    x0 = min(max(start, lo), hi)
    # an in-bracket start is probed as given so a matched cfg comes back unchanged
    if probe(x0, cfg if x0 == start else None):
        return best
    below = seen[x0] < target
    # Expand outwards in doubling log steps on both sides until some probe
    # lands on the other side of the target. The ratio is only piecewise
    # monotone (the L0 support changes in jumps), so the straddle nearest
    # the start is preferred over a global scan.
    pair = None
    inner = {+1: x0, -1: x0}
    step = first_step
    while pair is None and len(seen) < max_probes:
        moved = False
        for side in (+1, -1):
            x = min(max(x0 + side * step, lo), hi)
            if x == inner[side]:
                continue
            moved = True
            if probe(x):
                return best
            if (seen[x] < target) != below:
                pair = (inner[side], x)
                break
            inner[side] = x
            if len(seen) >= max_probes:
                break
        if not moved:
            break
        step *= 2.0
    if pair is None:
        fail(f"target {target:.2f} dB outside [{min(seen.values()):.2f}, "
             f"{max(seen.values()):.2f}] reached with {tunable} in {bracket}")
    a, b = pair
    while len(seen) < max_probes and abs(b - a) > 1e-9:
        mid = 0.5 * (a + b)
        if probe(mid):
            return best
        if (seen[mid] < target) == (seen[a] < target):
            a = mid
        else:
            b = mid
    fail(f"no {tunable} within {tol} dB of {target:.2f} dB after {len(seen)} probes "
         f"(best {best[2]:.2f} dB)")


def tune_str(f, target, cfg: DecomposeConfig, tunable="alpha", tol=0.1, max_probes=30,
             bracket=(1e-5, 10.0), first_step=0.125):
    """Adjust one weight until the STR of the decomposition is within ``tol`` dB.

    The starting value is probed first, so an already-matched configuration
    costs a single decomposition. The search then steps away from it on
    both sides in log scale (``first_step`` decades, doubling each round,
    clipped to ``bracket``) until a probe falls on the other side of
    ``target``, and bisects that interval. At most ``max_probes``
    decompositions are run per weight.

    ``tunable`` may be a sequence of weight names; if the first cannot reach
    the target (STR can jump when the L0 support changes) the next one is
    tuned starting from the closest configuration found so far.

    Returns ``(config, result, str)`` of the accepted probe.
    """
    names = (tunable,) if isinstance(tunable, str) else tuple(tunable)
    if not names:
        raise ParameterError("no weight to tune")
    err = None
    for name in names:
        try:
            return _tune_one(f, target, cfg, name, tol, max_probes, bracket, first_step)
        except TuningError as exc:
            if err is None or abs(exc.best_str - target) < abs(err.best_str - target):
                err = exc
            cfg = err.best
    raise err


def match_str(f, target, cfg: DecomposeConfig, tunable="alpha", **kw) -> DecomposeConfig:
    """Configuration whose decomposition of ``f`` has STR within 0.1 dB of ``target``.

    Raises :class:`TuningError` (carrying the closest configuration) when no
    weight in ``[1e-5, 10]`` reaches the target.
    """
    return tune_str(f, target, cfg, tunable, **kw)[0]
