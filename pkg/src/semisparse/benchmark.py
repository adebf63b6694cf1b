"""Batch evaluation of decomposition settings over an image corpus.

Every configuration is first brought to a common smoothing level by tuning
one weight until the structure-to-texture ratio hits a target (see
:func:`semisparse.metrics.tune_str`), then scored with the correlation
metrics. The config file is plain ``key = value`` blocks::

    [benchmark]
    target_str = 19.23
    tune = alpha, lam     ; weights to try in turn, or "none"

    [ours]
    model = l1
    lambda = 0.005
    alpha = 0.006
    beta = 0.001

    [tv-l1]
    model = l1
    beta = 0

Keys of a configuration block are the :class:`DecomposeConfig` fields;
``lambda`` and ``hard_shrink`` are accepted as aliases of ``lam`` and
``hard_shrink_mode``.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from .decomposer import DecomposeConfig, decompose
from .errors import ConfigurationError, DegenerateInputError, ParameterError, SemiSparseError
from .imageio import read_image
from .metrics import str_db, structure_texture_correlations, tune_str

IMAGE_SUFFIXES = (".png", ".ppm", ".pgm", ".pnm")

_ALIASES = {"lambda": "lam", "hard_shrink": "hard_shrink_mode", "max_iter": "max_iters"}
_INT_KEYS = {"p", "order", "max_iters"}
_STR_KEYS = {"model", "hard_shrink_mode"}

CSV_COLUMNS = ("image", "config", "model", "lam", "alpha", "beta", "gamma", "p",
               "tuned", "iterations", "converged", "str_db", "c0", "c1",
               "wall_time_s", "status", "error")
METRIC_KEYS = ("str_db", "c0", "c1", "iterations", "wall_time_s")


@dataclass
class BenchmarkSettings:
    target_str: float = 19.23
    tune: list | None = field(default_factory=lambda: ["alpha"])
    tol: float = 0.1
    max_probes: int = 30
    configs: dict = field(default_factory=dict)


def _config_from_section(name, section) -> DecomposeConfig:
    known = {f.name for f in fields(DecomposeConfig)}
    kw = {}
    for key, raw in section.items():
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ConfigurationError(f"[{name}]: unknown key {key!r}")
        try:
            if key in _STR_KEYS:
                kw[key] = raw.strip()
            elif key in _INT_KEYS:
                kw[key] = int(raw)
            else:
                kw[key] = float(raw)
        except ValueError:
            raise ConfigurationError(f"[{name}]: bad value for {key!r}: {raw!r}") from None
    try:
        return DecomposeConfig(**kw)
    except ParameterError as exc:
        raise ConfigurationError(f"[{name}]: {exc}") from exc


def parse_settings(text: str) -> BenchmarkSettings:
    """Parse a benchmark config from its text."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(str(exc)) from exc
    settings = BenchmarkSettings()
    if cp.has_section("benchmark"):
        sec = cp["benchmark"]
        try:
            settings.target_str = sec.getfloat("target_str", settings.target_str)
            settings.tol = sec.getfloat("tol", settings.tol)
            settings.max_probes = sec.getint("max_probes", settings.max_probes)
        except ValueError as exc:
            raise ConfigurationError(f"[benchmark]: {exc}") from None
        if "tune" in sec:
            names = [_ALIASES.get(t.strip(), t.strip()) for t in sec["tune"].split(",") if t.strip()]
            settings.tune = None if not names or names[0].lower() in ("none", "off") else names
        extra = set(sec) - {"target_str", "tol", "max_probes", "tune"}
        if extra:
            raise ConfigurationError(f"[benchmark]: unknown keys {sorted(extra)}")
    for name in cp.sections():
        if name != "benchmark":
            settings.configs[name] = _config_from_section(name, cp[name])
    if not settings.configs:
        raise ConfigurationError("config file defines no decomposition settings")
    return settings


def load_settings(path) -> BenchmarkSettings:
    return parse_settings(Path(path).read_text())


def find_images(corpus) -> list:
    corpus = Path(corpus)
    if not corpus.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus}")
    return sorted(p for p in corpus.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def _safe(fn, *args):
    """Metric value, or None where it is undefined (e.g. a flat texture)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            return fn(*args)
        except DegenerateInputError:
            return None


def run_one(image_path, name, cfg, settings, timing=True) -> dict:
    """Tune, decompose and score one image under one configuration.

    Failures are caught and recorded in the returned row.
    """
    row = dict.fromkeys(CSV_COLUMNS)
    row.update(image=Path(image_path).name, config=name, model=cfg.model, status="ok", error="")
    try:
        f = read_image(image_path)
        if settings.tune:
            cfg, res, s = tune_str(f, settings.target_str, cfg, settings.tune,
                                   tol=settings.tol, max_probes=settings.max_probes)
        else:
            res = decompose(f, cfg)
            s = _safe(str_db, res.structure, res.texture)
        corr = _safe(structure_texture_correlations, res.structure, res.texture)
        row.update(iterations=res.iterations, converged=res.converged, str_db=s,
                   c0=corr and corr[0], c1=corr and corr[1],
                   wall_time_s=res.wall_time if timing else 0.0)
    except (SemiSparseError, OSError, ValueError) as exc:
        best = getattr(exc, "best", None)
        if best is not None:
            cfg = best
        row.update(status="failed", error=f"{type(exc).__name__}: {exc}",
                   str_db=getattr(exc, "best_str", None))
    row.update(lam=cfg.lam, alpha=cfg.alpha, beta=cfg.beta, gamma=cfg.gamma, p=cfg.p,
               tuned=cfg_tuned_name(settings))
    return row


def cfg_tuned_name(settings):
    return "+".join(settings.tune) if settings.tune else ""


def aggregate(rows) -> dict:
    """Per-config means over successful rows."""
    out = {}
    for name in dict.fromkeys(r["config"] for r in rows):
        mine = [r for r in rows if r["config"] == name]
        ok = [r for r in mine if r["status"] == "ok"]
        agg = {"rows": len(mine), "ok": len(ok), "failed": len(mine) - len(ok),
               "converged": sum(bool(r["converged"]) for r in ok)}
        for key in METRIC_KEYS:
            vals = [float(r[key]) for r in ok if r[key] is not None]
            agg[key] = math.fsum(vals) / len(vals) if vals else None
        out[name] = agg
    return out


def run_benchmark(corpus, settings: BenchmarkSettings, threads=1, timing=True):
    """Run every image against every configuration.

    Returns ``(rows, aggregates)``; rows are ordered by image, then by
    configuration in file order.
    """
    images = find_images(corpus)
    if not images:
        raise FileNotFoundError(f"no images ({', '.join(IMAGE_SUFFIXES)}) in {corpus}")
    jobs = [(img, name, cfg) for img in images for name, cfg in settings.configs.items()]

    def work(job):
        return run_one(*job, settings, timing)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, jobs))
    else:
        rows = [work(j) for j in jobs]
    return rows, aggregate(rows)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def report_to_json(rows, aggregates, settings) -> str:
    doc = {"target_str": settings.target_str, "tune": settings.tune,
           "configs": {k: v.as_dict() for k, v in settings.configs.items()},
           "aggregates": aggregates, "rows": rows}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
