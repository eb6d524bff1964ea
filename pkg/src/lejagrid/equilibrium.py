"""Limiting node distributions of contracted weighted Leja and Gauss nodes.

For the classical families the empirical measure of ``k_N``-contracted
nodes tends to the weighted equilibrium measure of the limit weight
``vt``:

=========  ==================  ===========  ========================
family     support             k_n          vt
=========  ==================  ===========  ========================
jacobi     [-1, 1]             1            1
laguerre   [0, 4]              1/n          exp(-t/2)
hermite    [-b(a), b(a)]       n**(-1/a)    exp(-|t|**a / 2)
=========  ==================  ===========  ========================

with ``b(a) = (2**(a-1) * B(a/2, a/2))**(1/a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special
from scipy.optimize import brentq

from .orthopoly import WeightSpec

__all__ = [
    "EquilibriumLaw", "hermite_support_radius", "law_for", "equilibrium_cdf",
    "equilibrium_pdf", "contraction_factor", "kolmogorov_distance",
    "fekete_determinant_ratio", "affine_transform_law", "gauss_lobatto_nodes",
]


def hermite_support_radius(alpha: float) -> float:
    return (2 ** (alpha - 1) * special.beta(alpha / 2, alpha / 2)) ** (1 / alpha)


def _hermite_pdf_closed(alpha, t, b):
    t = np.abs(t)
    r = np.sqrt(np.maximum(b * b - t * t, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log((b + r) / t)
    pi = math.pi
    if alpha == 1:
        return lg / pi**2
    if alpha == 2:
        return r / pi
    if alpha == 3:
        return 3 / pi**2 * (b * r + np.where(t > 0, t * t * lg, 0.0))
    if alpha == 4:
        return r * (2 * t * t + b * b) / pi
    if alpha == 5:
        return 5 / (3 * pi**2) * (b * (3 * t * t + 2 * b * b) * r
                                  + np.where(t > 0, 3 * t**4 * lg, 0.0))
    if alpha == 6:
        return 3 / (8 * pi) * r * (8 * t**4 + 4 * b * b * t * t + 3 * b**4)
    raise ValueError(alpha)


def _hermite_pdf_numeric(alpha, t, b):
    # u = sqrt(t^2 + s^2) removes the inverse-square-root endpoint singularity
    def one(tt):
        tt = abs(tt)
        if tt >= b:
            return 0.0
        top = math.sqrt(b * b - tt * tt)
        if tt == 0 and alpha < 2:
            if alpha <= 1:
                return math.inf
            return alpha / (math.pi * b**alpha) * top ** (alpha - 1) / (alpha - 1)
        g = lambda s: (tt * tt + s * s) ** ((alpha - 2) / 2)
        opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
        if alpha >= 2:
            val = integrate.quad(g, 0.0, top, **opts)[0]
        else:
            # scaled pieces: s = t*r on [0, t], then log s up to the top, where
            # the integrand behaves like s^(alpha-2)
            e = (alpha - 2) / 2
            cut = min(tt, top)
            val = cut ** (alpha - 1) * integrate.quad(lambda r: ((tt / cut) ** 2 + r * r) ** e,
                                                      0.0, 1.0, **opts)[0]
            if top > cut:
                val += integrate.quad(lambda u: math.exp((alpha - 1) * u)
                                      * (1 + (tt * math.exp(-u)) ** 2) ** e,
                                      math.log(cut), math.log(top), **opts)[0]
        return alpha / (math.pi * b**alpha) * val
    return np.vectorize(one, otypes=[float])(t)


@dataclass(frozen=True)
class EquilibriumLaw:
    """Equilibrium measure of a classical family, optionally affinely mapped.

    ``scale`` and ``shift`` describe ``s = scale * t + shift`` applied to the
    canonical variable ``t`` of the tables.
    """

    family: str
    alpha: float = 2.0
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.family not in ("jacobi", "laguerre", "hermite"):
            raise ValueError(f"no closed-form equilibrium law for {self.family!r}")
        if self.family == "hermite" and self.alpha <= 0:
            raise ValueError("Hermite exponent must be positive")
        if self.scale == 0:
            raise ValueError("affine scale must be nonzero")

    @property
    def closed_form(self) -> bool:
        return self.family != "hermite" or self.alpha in (1, 2, 3, 4, 5, 6)

    @property
    def canonical_support(self) -> tuple[float, float]:
        if self.family == "jacobi":
            return (-1.0, 1.0)
        if self.family == "laguerre":
            return (0.0, 4.0)
        b = hermite_support_radius(self.alpha)
        return (-b, b)

    @property
    def support(self) -> tuple[float, float]:
        a, b = (self.scale * t + self.shift for t in self.canonical_support)
        return (min(a, b), max(a, b))

    def _t(self, s):
        return (np.asarray(s, dtype=float) - self.shift) / self.scale

    def _canonical_pdf(self, t):
        a, b = self.canonical_support
        inside = (t > a) & (t < b)
        tc = np.where(inside, t, 0.5 * (a + b) + 0.25 * (b - a))
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.family == "jacobi":
                f = 1 / (math.pi * np.sqrt(1 - tc * tc))
            elif self.family == "laguerre":
                f = np.sqrt((4 - tc) / tc) / (2 * math.pi)
            elif self.closed_form:
                f = _hermite_pdf_closed(self.alpha, t, b)
            else:
                f = _hermite_pdf_numeric(self.alpha, t, b)
        return np.where(inside, f, 0.0)

    def _canonical_cdf(self, t):
        a, b = self.canonical_support
        tc = np.clip(t, a, b)
        if self.family == "jacobi":
            F = 0.5 + np.arcsin(tc) / math.pi
        elif self.family == "laguerre":
            F = 2 / math.pi * np.arcsin(np.sqrt(tc) / 2) + np.sqrt(tc * (4 - tc)) / (2 * math.pi)
        elif self.closed_form:
            with np.errstate(invalid="ignore"):
                tf = np.where(tc == 0, 0.0, tc * _hermite_pdf_closed(self.alpha, tc, b))
            F = 0.5 + np.arcsin(tc / b) / math.pi + tf / self.alpha
        else:
            F = np.vectorize(self._hermite_cdf_numeric, otypes=[float])(tc)
        return np.clip(np.where(t <= a, 0.0, np.where(t >= b, 1.0, F)), 0.0, 1.0)

    def _hermite_cdf_numeric(self, t):
        b = hermite_support_radius(self.alpha)
        if t <= -b:
            return 0.0
        if t >= b:
            return 1.0
        a = self.alpha
        f = lambda u: float(_hermite_pdf_numeric(a, u, b))
        if a < 1:
            # the density grows like c0 u^(a-1) at the origin
            c0 = a / (math.pi * b**a) * math.sqrt(math.pi) * special.gamma((1 - a) / 2) \
                / (2 * special.gamma(1 - a / 2))
            g = lambda u: f(u) * u ** (1 - a) if u > 0 else c0
            half, _ = integrate.quad(g, 0.0, abs(t), weight="alg", wvar=(a - 1, 0.0),
                                     epsabs=1e-10, limit=200)
        else:
            half, _ = integrate.quad(f, 0.0, abs(t), epsabs=1e-10, limit=200)
        return 0.5 + math.copysign(half, t)

    def pdf(self, s):
        return self._canonical_pdf(self._t(s)) / abs(self.scale)

    def cdf(self, s):
        F = self._canonical_cdf(self._t(s))
        return F if self.scale > 0 else 1.0 - F

    def ppf(self, q):
        """Quantile function by bracketed root finding."""
        lo, hi = self.support

        def one(qq):
            if qq <= 0:
                return lo
            if qq >= 1:
                return hi
            return brentq(lambda s: float(self.cdf(s)) - qq, lo, hi, xtol=1e-15, rtol=1e-15)
        return np.vectorize(one, otypes=[float])(q)

    def contraction(self, n: int) -> float:
        if n < 1:
            raise ValueError("n must be >= 1")
        if self.family == "jacobi":
            return 1.0
        if self.family == "laguerre":
            return 1.0 / n
        return n ** (-1.0 / self.alpha)

    def contract(self, nodes, n: int | None = None) -> np.ndarray:
        """Apply ``k_n`` in the canonical variable (``n`` defaults to len(nodes))."""
        nodes = np.asarray(nodes, dtype=float)
        k = self.contraction(nodes.size if n is None else n)
        return self.scale * (k * self._t(nodes)) + self.shift

    def log_limit_weight(self, s):
        """``log vt`` at ``s``; ``-inf`` outside the family's domain."""
        t = self._t(s)
        if self.family == "jacobi":
            return np.where(np.abs(t) <= 1, 0.0, -np.inf)
        if self.family == "laguerre":
            return np.where(t >= 0, -t / 2, -np.inf)
        return -np.abs(t) ** self.alpha / 2


def law_for(spec: WeightSpec) -> EquilibriumLaw:
    """Limit law of the contracted nodes of ``spec`` in its physical variable."""
    if spec.family == "tabulated":
        raise ValueError("tabulated weights have no closed-form equilibrium law")
    alpha = spec.exponent if spec.family == "hermite" else 2.0
    return EquilibriumLaw(spec.family, alpha, spec.scale, spec.shift)


def equilibrium_cdf(law: EquilibriumLaw, t):
    return law.cdf(t)


def equilibrium_pdf(law: EquilibriumLaw, t):
    return law.pdf(t)


def contraction_factor(law: EquilibriumLaw, n: int) -> float:
    return law.contraction(n)


def affine_transform_law(law: EquilibriumLaw, A: float, B: float) -> EquilibriumLaw:
    """Law of ``A * X + B`` for ``X`` distributed by ``law``."""
    if A == 0:
        raise ValueError("affine scale A must be nonzero")
    return EquilibriumLaw(law.family, law.alpha, A * law.scale, A * law.shift + B)


def kolmogorov_distance(nodes, law: EquilibriumLaw) -> float:
    """Sup distance between the empirical CDF of ``nodes`` and ``law``.

    The nodes must already be contracted.
    """
    x = np.sort(np.asarray(nodes, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("need at least one node")
    F = law.cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def fekete_determinant_ratio(nodes, law: EquilibriumLaw, N: int) -> float:
    """Normalized weighted Vandermonde determinant of the first ``N+1`` nodes.

    ``[V(z_0..z_N) prod vt(z_j)^N]^(2/(N^2+N))`` with ``z_j`` contracted by
    ``k_N``, evaluated in log space.  ``nodes`` may be a sequence object
    exposing ``.nodes``.
    """
    x = np.asarray(getattr(nodes, "nodes", nodes), dtype=float)
    if N < 1:
        raise ValueError("N must be >= 1")
    if x.size < N + 1:
        raise ValueError(f"need {N + 1} nodes, got {x.size}")
    z = law.contract(x[:N + 1], N)
    d = np.abs(z[:, None] - z[None, :])[np.triu_indices(N + 1, 1)]
    if np.any(d == 0):
        raise ValueError("coincident contracted nodes")
    logdet = np.log(d).sum() + N * np.sum(law.log_limit_weight(z))
    return float(np.exp(2.0 * logdet / (N * N + N)))


def gauss_lobatto_nodes(n_points: int) -> np.ndarray:
    """Legendre-Gauss-Lobatto nodes, the unweighted Fekete points of [-1, 1]."""
    if n_points < 2:
        raise ValueError("Lobatto rules need at least two nodes")
    inner = special.roots_jacobi(n_points - 2, 1.0, 1.0)[0] if n_points > 2 else np.empty(0)
    return np.concatenate([[-1.0], inner, [1.0]])
