"""Dimension-adaptive sparse grid refinement driven by variance indicators.

The driver keeps an accepted set ``L`` and an active set ``A``.  Every
active subspace is evaluated when it is activated, so its indicator
``gamma_l`` (the variance of its own PCE contribution) is known.  Each
iteration accepts the active subspace with the largest indicator and
activates its admissible forward neighbours.  The loop stops once the
model-evaluation budget is reached or ``eta = sum_A gamma`` drops to the
tolerance.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .leja1d import format_float, make_rule
from .sparsegrid import SparseGrid, forward_neighbors

__all__ = ["AdaptiveConfig", "AdaptiveResult", "LogRow", "indicator", "refine", "terminate",
           "run_adaptive", "LOG_FIELDS", "format_index"]

LOG_FIELDS = ("iteration", "index", "gamma", "eta", "evaluations", "rmse", "mean", "variance")


@dataclass(frozen=True)
class AdaptiveConfig:
    """Stopping rules and grid options for :func:`run_adaptive`.

    Attributes
    ----------
    budget
        Maximum number of model evaluations (``None`` for no limit).  The
        batch of neighbours activated in the final iteration is always
        completed, so the count may overshoot by less than one batch.
    tol
        Stop once ``eta <= tol``.  The default 0 stops only when every active
        indicator vanishes exactly; a positive value is needed when no
        budget is set.
    rule, growth
        Univariate rule kind (``"leja"`` or ``"cc"``) and Leja growth.
    initial
        Optional downward-closed starting set ``L``; the default starts from
        the zero index alone.
    cost_weighted
        Divide indicators by subspace size when ranking.
    seed
        Seed used for the monitoring samples.
    """

    budget: int | None = 100
    tol: float = 0.0
    rule: str = "leja"
    growth: str | None = None
    initial: tuple | None = None
    cost_weighted: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.tol is None or self.tol < 0:
            raise ValueError("tol must be a nonnegative number")
        if self.budget is None and self.tol <= 0:
            raise ValueError("at least one stopping rule (budget or tol > 0) is required")
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be >= 1")


@dataclass
class LogRow:
    iteration: int
    index: tuple
    gamma: float
    eta: float
    evaluations: int
    rmse: float
    mean: float
    variance: float

    def cells(self) -> list[str]:
        return [str(self.iteration), format_index(self.index), format_float(self.gamma),
                format_float(self.eta), str(self.evaluations), format_float(self.rmse),
                format_float(self.mean), format_float(self.variance)]


@dataclass
class AdaptiveResult:
    grid: SparseGrid
    log: list[LogRow] = field(default_factory=list)

    @property
    def order(self) -> list[tuple]:
        return list(self.grid.accepted)

    def log_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(LOG_FIELDS)
        for row in self.log:
            w.writerow(row.cells())
        return buf.getvalue()


def format_index(idx) -> str:
    return ":".join(str(v) for v in idx)


def indicator(idx, grid: SparseGrid) -> float:
    return grid.indicator(idx)


def refine(idx, grid: SparseGrid) -> list[tuple]:
    return grid.refine(idx)


def terminate(active_gammas: Sequence[float], N: int, config: AdaptiveConfig) -> bool:
    """True iff the budget is spent or the active indicators sum to at most ``tol``."""
    if config.budget is not None and N >= config.budget:
        return True
    if len(active_gammas) == 0:
        return True
    return float(sum(active_gammas)) <= config.tol


class _Monitor:
    """Incremental surrogate predictions on fixed validation samples."""

    def __init__(self, grid: SparseGrid, X: np.ndarray, y: np.ndarray):
        self.cache = grid.basis_cache(X)
        self.y = y
        self.pred = np.zeros_like(y)

    def add(self, sub):
        self.pred += self.cache.subspace_values(sub)

    def rmse(self) -> float:
        return math.sqrt(float(np.mean((self.pred - self.y) ** 2)))


def _priority(grid: SparseGrid, idx, cost_weighted: bool) -> float:
    sub = grid.subspaces[idx]
    return sub.gamma / sub.num_points if cost_weighted else sub.gamma


def run_adaptive(model, config: AdaptiveConfig = AdaptiveConfig(), rules=None,
                 validation: tuple | None = None,
                 callback: Callable[[LogRow, SparseGrid], None] | None = None) -> AdaptiveResult:
    """Build a dimension-adaptive sparse grid surrogate of ``model``.

    Parameters
    ----------
    model
        Callable on ``(n, d)`` arrays with a ``specs`` attribute, unless
        ``rules`` is given explicitly.
    validation
        Optional ``(X, y)`` samples; the RMSE column of the log is filled
        from incremental surrogate predictions on them.
    """
    if rules is None:
        rules = [make_rule(config.rule, s, config.growth) for s in model.specs]
    grid = SparseGrid(rules)
    monitor = _Monitor(grid, *validation) if validation is not None else None
    result = AdaptiveResult(grid)

    def record(it, idx):
        row = LogRow(it, idx, grid.indicator(idx), grid.eta(), grid.n_evaluations,
                     monitor.rmse() if monitor else math.nan, grid.mean(), grid.variance())
        result.log.append(row)
        if callback is not None:
            callback(row, grid)

    def accept(idx):
        sub = grid.accept(idx)
        if monitor:
            monitor.add(sub)

    def activate_neighbors(idx):
        for nb in forward_neighbors(idx):
            if grid.is_admissible(nb):
                grid.activate(nb, model)

    # the zero subspace has no variance, so it is accepted unconditionally
    start = [tuple([0] * grid.d)]
    if config.initial is not None:
        start = sorted({tuple(int(v) for v in i) for i in config.initial},
                       key=lambda i: (sum(i), i))
    it = 0
    for idx in start:
        grid.activate(idx, model)
        accept(idx)
    for idx in start:
        activate_neighbors(idx)
    record(it, start[-1])

    while not terminate([grid.subspaces[i].gamma for i in grid.active], grid.n_evaluations, config):
        it += 1
        best = min(grid.active, key=lambda i: (-_priority(grid, i, config.cost_weighted), i))
        accept(best)
        activate_neighbors(best)
        record(it, best)
    return result
