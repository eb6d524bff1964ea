"""Refinement ladders for node-distribution and univariate convergence studies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import orthopoly as op
from .equilibrium import fekete_determinant_ratio, kolmogorov_distance, law_for
from .leja1d import (build_sequence, classical_barycentric, clenshaw_curtis_nodes,
                     growth_count, lagrange_basis)
from .metrics import one_d_metrics
from .models import oscillatory_f2, runge_f1
from .orthopoly import WeightSpec

__all__ = ["DistributionRow", "ConvergenceRow", "verify_distribution", "converge_1d",
           "ONE_D_FUNCTIONS", "DEFAULT_LADDER"]

DEFAULT_LADDER = (25, 50, 100, 200)
ONE_D_FUNCTIONS: dict[str, Callable] = {"f1": runge_f1, "f2": oscillatory_f2}


@dataclass(frozen=True)
class DistributionRow:
    N: int
    kolmogorov_distance: float
    fekete_ratio: float


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    N: int
    l2_error: float
    max_error: float
    quad_error: float
    max_surplus: float


def verify_distribution(spec: WeightSpec, ladder: Sequence[int] = DEFAULT_LADDER,
                        seq=None) -> list[DistributionRow]:
    """Equilibrium diagnostics of the Leja nodes of ``spec`` over ``ladder``.

    For each ``N`` the first ``N`` nodes, contracted by ``k_N``, are compared
    with the limit law, and the first ``N + 1`` nodes give the normalized
    weighted Vandermonde determinant.
    """
    law = law_for(spec)
    ladder = [int(n) for n in ladder]
    if not ladder or min(ladder) < 1:
        raise ValueError("ladder entries must be positive")
    if seq is None or len(seq) < max(ladder) + 1:
        seq = build_sequence(spec, max(ladder) + 1, seq)
    rows = []
    for N in ladder:
        ks = kolmogorov_distance(law.contract(seq.nodes[:N], N), law)
        rows.append(DistributionRow(N, ks, fekete_determinant_ratio(seq, law, N)))
    return rows


def _ladder_nodes(rule: str, growth: str, max_level: int) -> tuple[np.ndarray, list[int]]:
    counts = [growth_count(growth, l) for l in range(max_level + 1)]
    if rule == "leja":
        return np.asarray(build_sequence(op.uniform(), counts[-1]).nodes), counts
    if rule == "cc":
        if growth != "doubling":
            raise ValueError("Clenshaw-Curtis rules only support doubling growth")
        order = [0.0]
        for l in range(1, max_level + 1):
            prev = set(clenshaw_curtis_nodes(l - 1).tolist())
            order += [v for v in clenshaw_curtis_nodes(l).tolist() if v not in prev]
        return np.asarray(order), counts
    raise ValueError(f"unknown rule {rule!r}")


def converge_1d(func: str | Callable, rule: str = "leja", max_level: int = 7,
                growth: str = "doubling") -> list[ConvergenceRow]:
    """Interpolation errors and hierarchical surpluses on [-1, 1] per level.

    The surplus at a level is the largest ``|f - I_{l-1} f|`` over the nodes
    that level adds; at level 0 it is ``|f(z_0)|``.
    """
    if isinstance(func, str):
        try:
            f = ONE_D_FUNCTIONS[func]
        except KeyError:
            raise KeyError(f"unknown 1D model {func!r}; choose from {sorted(ONE_D_FUNCTIONS)}") from None
    else:
        f = func
    nodes, counts = _ladder_nodes(rule, growth, max_level)
    data = f(nodes)
    rows = []
    prev = 0
    for level, n in enumerate(counts):
        x = nodes[:n]
        bary = classical_barycentric(x)
        interp = lambda t, x=x, bary=bary, y=data[:n]: lagrange_basis(x, t, bary) @ y
        if prev == 0:
            surplus = float(np.max(np.abs(data[:n])))
        else:
            xp = nodes[:prev]
            old = lagrange_basis(xp, nodes[prev:n], classical_barycentric(xp)) @ data[:prev]
            surplus = float(np.max(np.abs(data[prev:n] - old)))
        l2, mx, quad = one_d_metrics(interp, f)
        rows.append(ConvergenceRow(level, n, l2, mx, quad, surplus))
        prev = n
    return rows
