"""Error metrics for univariate rules and multivariate surrogates.

Random inputs come from NumPy's ``Philox`` counter-based generator.  Each
uniform variate is ``(k + 1/2) / 2**53`` for a 53-bit integer ``k``, and
every family is sampled by inverting its CDF, so a given seed yields the
same draws on every platform.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .leja1d import clenshaw_curtis_weights, format_float
from .orthopoly import WeightSpec

__all__ = [
    "MetricReport", "metric_grid", "one_d_metrics", "uniform_variates", "sample_spec",
    "sample_inputs", "mc_rmse", "moment_errors", "METRIC_GRID_SIZE",
]

METRIC_GRID_SIZE = 10**4
_TWO53 = float(2**53)


@dataclass
class MetricReport:
    """One row of error metrics; unused fields stay ``nan``."""

    l2_error: float = math.nan
    max_error: float = math.nan
    quad_error: float = math.nan
    rmse: float = math.nan
    mean_error: float = math.nan
    variance_error: float = math.nan
    n_samples: int = 0
    seed: int = -1

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def row(self) -> list[str]:
        out = []
        for k, v in asdict(self).items():
            out.append(str(v) if isinstance(v, int) else format_float(v))
        return out

    def to_csv_row(self, header: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.columns())
        w.writerow(self.row())
        return buf.getvalue()


def metric_grid(n: int = METRIC_GRID_SIZE):
    """``n``-point Clenshaw-Curtis nodes on [-1, 1] with unit-mass weights."""
    if n < 2:
        raise ValueError("metric grid needs at least two points")
    x = -np.cos(np.pi * np.arange(n) / (n - 1))
    return x, clenshaw_curtis_weights(n)


def one_d_metrics(approx: Callable, truth: Callable, n: int = METRIC_GRID_SIZE):
    """Discrete l2, max and quadrature errors of ``approx - truth`` on [-1, 1]."""
    x, v = metric_grid(n)
    delta = np.asarray(approx(x), dtype=float) - np.asarray(truth(x), dtype=float)
    delta = np.broadcast_to(delta, x.shape)
    l2 = math.sqrt(max(float(np.sum(v * delta**2)), 0.0))
    return l2, float(np.max(np.abs(delta))), abs(float(np.sum(v * delta)))


# -- sampling -------------------------------------------------------------


def uniform_variates(rng: np.random.Generator, shape) -> np.ndarray:
    """Open-interval uniforms on a 2**-53 lattice."""
    k = rng.integers(0, 2**53, size=shape, dtype=np.int64)
    return (k.astype(float) + 0.5) / _TWO53


def _tabulated_ppf(spec: WeightSpec, u):
    pts, vals = (np.asarray(t, dtype=float) for t in spec.table)
    f = np.maximum(vals, 0.0)
    h = np.diff(pts)
    seg = 0.5 * h * (f[:-1] + f[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    r = u * cum[-1]
    i = np.clip(np.searchsorted(cum, r, side="right") - 1, 0, h.size - 1)
    rem = r - cum[i]
    f0 = f[i]
    slope = (f[i + 1] - f0) / h[i]
    # root of f0 t + slope t^2 / 2 = rem, in the cancellation-free form
    disc = np.sqrt(np.maximum(f0 * f0 + 2 * slope * rem, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(f0 + disc > 0, 2 * rem / (f0 + disc), 0.0)
    return pts[i] + np.clip(t, 0.0, h[i])


def _canonical_ppf(spec: WeightSpec, u):
    fam = spec.family
    if fam == "jacobi":
        return 2.0 * stats.beta.ppf(u, spec.beta + 1, spec.alpha + 1) - 1.0
    if fam == "hermite":
        if spec.exponent == 2 and spec.mu == 0:
            return special.ndtri(u) / math.sqrt(2.0)
        p = spec.exponent
        r = special.gammaincinv((2 * spec.mu + 1) / p, np.abs(2 * u - 1)) ** (1 / p)
        return np.where(u < 0.5, -r, r)
    if fam == "laguerre":
        return special.gammaincinv(spec.s + 1, u)
    return _tabulated_ppf(spec, u)


def sample_spec(spec: WeightSpec, u) -> np.ndarray:
    """Map uniforms ``u`` through the inverse CDF of ``spec``."""
    return np.asarray(spec.from_canonical(_canonical_ppf(spec, np.asarray(u, dtype=float))))


def sample_inputs(specs: Sequence[WeightSpec], n: int, seed: int) -> np.ndarray:
    """``n`` joint draws from independent ``specs`` as an ``(n, d)`` array."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.Generator(np.random.Philox(seed))
    U = uniform_variates(rng, (n, len(specs)))
    X = np.empty_like(U)
    for k, spec in enumerate(specs):
        X[:, k] = sample_spec(spec, U[:, k])
    return X


def mc_rmse(surrogate: Callable, model, n_samples: int = 100_000, seed: int = 0,
            specs: Sequence[WeightSpec] | None = None) -> float:
    """Root-mean-square surrogate error over seeded random inputs.

    ``model`` is a :class:`~lejagrid.models.Model` (whose ``specs`` give the
    input distribution) or any callable together with ``specs``.
    """
    specs = specs if specs is not None else model.specs
    X = sample_inputs(specs, n_samples, seed)
    diff = np.asarray(surrogate(X), dtype=float) - np.asarray(model(X), dtype=float)
    return math.sqrt(float(np.mean(diff**2)))


def moment_errors(surrogate, reference_mean: float, reference_var: float):
    """Absolute errors in the surrogate's mean and variance."""
    mean, var = surrogate.moments()
    return abs(mean - reference_mean), abs(var - reference_var)
