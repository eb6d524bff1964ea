"""Univariate weights, orthonormal polynomial recurrences and Gauss rules.

Every weight is a probability density: the canonical weight of each family
is normalized to unit mass and may be moved to a physical variable by an
affine map ``x = scale * z + shift``.

Recurrences are stored in orthonormal form::

    z p_k(z) = sqrt(b[k+1]) p_{k+1}(z) + a[k] p_k(z) + sqrt(b[k]) p_{k-1}(z)

with ``b[0]`` the total mass of the weight (1 for densities), so ``p_0 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special
from scipy.linalg import eigh_tridiagonal, LinAlgError

FAMILIES = ("jacobi", "hermite", "laguerre", "tabulated")


class NeedsStieltjesError(ValueError):
    """No closed-form recurrence exists for the requested weight."""


class OrthogonalityLossError(ArithmeticError):
    """The discretized Stieltjes procedure produced a nonpositive b_k."""


@dataclass(frozen=True)
class WeightSpec:
    """A univariate probability density from one of the supported families.

    Canonical weights (before the affine map):

    * ``jacobi``    ``(1 - z)**alpha * (1 + z)**beta`` on ``[-1, 1]``
    * ``hermite``   ``|z|**(2 mu) * exp(-|z|**exponent)`` on the real line
    * ``laguerre``  ``z**s * exp(-z)`` on ``[0, inf)``
    * ``tabulated`` piecewise-linear density through ``table`` samples

    The physical variable is ``x = scale * z + shift``.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0
    exponent: float = 2.0
    mu: float = 0.0
    s: float = 0.0
    scale: float = 1.0
    shift: float = 0.0
    table: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if self.scale == 0 or not np.isfinite(self.scale):
            raise ValueError("affine scale must be finite and nonzero")
        if self.family == "jacobi" and (self.alpha <= -1 or self.beta <= -1):
            raise ValueError("Jacobi parameters must satisfy alpha, beta > -1")
        if self.family == "hermite":
            if self.exponent < 1:
                raise ValueError("Hermite exponent must be >= 1")
            if self.mu <= -0.5:
                raise ValueError("Hermite mu must be > -1/2")
        if self.family == "laguerre" and self.s <= -1:
            raise ValueError("Laguerre parameter must satisfy s > -1")
        if self.family == "tabulated":
            if self.table is None:
                raise ValueError("tabulated weight needs (points, values)")
            pts, vals = (np.asarray(t, dtype=float) for t in self.table)
            if pts.ndim != 1 or pts.shape != vals.shape or pts.size < 2:
                raise ValueError("table must hold two equal-length 1D arrays")
            if np.any(np.diff(pts) <= 0):
                raise ValueError("table points must be strictly increasing")
            if np.any(vals < 0) or not np.any(vals > 0):
                raise ValueError("table values must be nonnegative, not all 0")
        norm = self.log_normalization
        if not np.isfinite(norm):
            raise ValueError("weight normalization is not finite")

    # -- geometry ---------------------------------------------------------

    @property
    def canonical_domain(self) -> tuple[float, float]:
        if self.family == "jacobi":
            return (-1.0, 1.0)
        if self.family == "hermite":
            return (-math.inf, math.inf)
        if self.family == "laguerre":
            return (0.0, math.inf)
        pts = self.table[0]
        return (float(pts[0]), float(pts[-1]))

    @property
    def domain(self) -> tuple[float, float]:
        lo, hi = (self.from_canonical(t) for t in self.canonical_domain)
        return (min(lo, hi), max(lo, hi))

    @property
    def bounded(self) -> bool:
        return all(np.isfinite(self.canonical_domain))

    def to_canonical(self, x):
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def from_canonical(self, z):
        out = self.scale * np.asarray(z, dtype=float) + self.shift
        return float(out) if out.ndim == 0 else out

    # -- canonical weight -------------------------------------------------

    @property
    def log_normalization(self) -> float:
        """Log of the integral of the unnormalized canonical weight."""
        if self.family == "jacobi":
            a, b = self.alpha, self.beta
            return (a + b + 1) * math.log(2.0) + special.betaln(a + 1, b + 1)
        if self.family == "hermite":
            p = self.exponent
            return math.log(2.0 / p) + special.gammaln((2 * self.mu + 1) / p)
        if self.family == "laguerre":
            return special.gammaln(self.s + 1)
        pts, vals = (np.asarray(t, dtype=float) for t in self.table)
        return math.log(np.trapezoid(vals, pts))

    def log_sqrt_weight(self, z, deriv: int = 0):
        """``log v(z)`` (or its first/second derivative) for canonical ``z``.

        ``v`` is the square root of the *unnormalized* canonical weight; the
        constant offset is irrelevant to every consumer.  Returns ``+inf``
        at integrable singularities and ``-inf`` at zeros of the weight.
        """
        z = np.asarray(z, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.family == "jacobi":
                out = (_xlog_term(self.alpha, 1 - z, deriv, sign=-1)
                       + _xlog_term(self.beta, 1 + z, deriv, sign=1)) / 2
                out = np.where(np.abs(z) > 1, -np.inf if deriv == 0 else np.nan, out)
            elif self.family == "hermite":
                p, mu = self.exponent, self.mu
                az = np.abs(z)
                if deriv == 0:
                    out = _xlog_term(2 * mu, az, 0) / 2 - az**p / 2
                elif deriv == 1:
                    out = mu / z - 0.5 * p * np.sign(z) * az ** (p - 1)
                else:
                    curv = 0.5 * p * (p - 1) * az ** (p - 2) if p != 1 else 0.0
                    out = -mu / z**2 - curv
            elif self.family == "laguerre":
                if deriv == 0:
                    out = _xlog_term(self.s, z, 0) / 2 - z / 2
                elif deriv == 1:
                    out = self.s / (2 * z) - 0.5
                else:
                    out = -self.s / (2 * z**2)
                out = np.where(z < 0, -np.inf if deriv == 0 else np.nan, out)
            else:
                if deriv != 0:
                    raise NotImplementedError("tabulated weights have no analytic derivative")
                pts, vals = self.table
                w = np.interp(z, pts, vals, left=0.0, right=0.0)
                out = 0.5 * np.log(w)
        return out

    def pdf(self, x):
        """Normalized density in the physical variable."""
        z = self.to_canonical(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            logw = 2 * self.log_sqrt_weight(z) - self.log_normalization
            return np.exp(logw) / abs(self.scale)

    def sqrt_weight(self, x):
        """``v = sqrt(w)`` of the normalized physical density."""
        return np.sqrt(self.pdf(x))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        out = {"family": self.family, "scale": self.scale, "shift": self.shift}
        if self.family == "jacobi":
            out.update(alpha=self.alpha, beta=self.beta)
        elif self.family == "hermite":
            out.update(exponent=self.exponent, mu=self.mu)
        elif self.family == "laguerre":
            out.update(s=self.s)
        else:
            out["table"] = [list(map(float, t)) for t in self.table]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "WeightSpec":
        data = dict(data)
        if data.get("table") is not None:
            data["table"] = tuple(tuple(t) for t in data["table"])
        return cls(**data)


def _xlog_term(power, base, deriv, sign=1):
    """``power * log(base)`` and derivatives, with ``0 * log 0 = 0``."""
    if power == 0:
        return np.zeros_like(base)
    if deriv == 0:
        return power * np.log(base)
    if deriv == 1:
        return sign * power / base
    return -power / base**2


def jacobi(alpha: float = 0.0, beta: float = 0.0, lower: float = -1.0,
           upper: float = 1.0) -> WeightSpec:
    """Beta-type density ``(1-z)^alpha (1+z)^beta`` moved to ``[lower, upper]``."""
    return WeightSpec("jacobi", alpha=alpha, beta=beta,
                      scale=(upper - lower) / 2, shift=(upper + lower) / 2)


def uniform(lower: float = -1.0, upper: float = 1.0) -> WeightSpec:
    return jacobi(0.0, 0.0, lower, upper)


def hermite(exponent: float = 2.0, mu: float = 0.0, scale: float = 1.0,
            shift: float = 0.0) -> WeightSpec:
    """Generalized Hermite density ``|z|^(2 mu) exp(-|z|^exponent)``."""
    return WeightSpec("hermite", exponent=exponent, mu=mu, scale=scale, shift=shift)


def gaussian(mean: float = 0.0, std: float = 1.0) -> WeightSpec:
    """Normal density, represented as an ``exp(-z^2)`` Hermite weight."""
    return hermite(2.0, 0.0, scale=math.sqrt(2.0) * std, shift=mean)


def laguerre(s: float = 0.0, scale: float = 1.0, shift: float = 0.0) -> WeightSpec:
    return WeightSpec("laguerre", s=s, scale=scale, shift=shift)


def tabulated(points: Sequence[float], values: Sequence[float]) -> WeightSpec:
    return WeightSpec("tabulated", table=(tuple(map(float, points)),
                                          tuple(map(float, values))))


def oscillatory_bessel_weight(num: int = 20001) -> WeightSpec:
    """Tabulated ``1/2 I_0(1+z) + J_0(50+50z)`` on ``[-1, 1]``."""
    z = np.linspace(-1.0, 1.0, num)
    return tabulated(z, 0.5 * special.i0(1 + z) + special.j0(50 + 50 * z))


# -- recurrences ------------------------------------------------------------


@dataclass(frozen=True)
class Recurrence:
    """Orthonormal three-term recurrence coefficients ``a[0:n]``, ``b[0:n]``.

    Supports polynomials of degree ``0..n-1`` and Gauss rules with up to
    ``n`` nodes.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1 or a.size == 0:
            raise ValueError("a and b must be nonempty 1D arrays of equal length")
        if np.any(b <= 0):
            raise ValueError("recurrence needs b[k] > 0 for all k")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __len__(self):
        return self.a.size

    def affine(self, scale: float, shift: float) -> "Recurrence":
        """Recurrence of the pushed-forward weight under ``x = scale*z + shift``."""
        b = self.b * scale**2
        b[0] = self.b[0]
        return Recurrence(scale * self.a + shift, b)


def _jacobi_closed(alpha, beta, n):
    k = np.arange(n, dtype=float)
    ab = alpha + beta
    a = np.empty(n)
    b = np.empty(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        a[:] = (beta**2 - alpha**2) / ((2 * k + ab) * (2 * k + ab + 2))
    a[0] = (beta - alpha) / (ab + 2)
    b[0] = 1.0
    if n > 1:
        b[1] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
    if n > 2:
        k = k[2:]
        t = 2 * k + ab
        b[2:] = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (t**2 * (t + 1) * (t - 1))
    return a, b


def _hermite_closed(mu, n):
    k = np.arange(n, dtype=float)
    b = k / 2 + mu * (k % 2)
    b[0] = 1.0
    return np.zeros(n), b


def _laguerre_closed(s, n):
    k = np.arange(n, dtype=float)
    b = k * (k + s)
    b[0] = 1.0
    return 2 * k + s + 1, b


def recurrence_coefficients(spec: WeightSpec, n: int, method: str = "auto") -> Recurrence:
    """Orthonormal recurrence of length ``n`` for ``spec`` (physical variable).

    Closed forms cover Jacobi, Laguerre and Hermite with exponent 2.  With
    ``method="auto"`` the other weights are discretized and passed through
    :func:`stieltjes_discretized`; ``method="closed"`` raises
    :class:`NeedsStieltjesError` instead.
    """
    if n < 1:
        raise ValueError("recurrence length must be >= 1")
    fam = spec.family
    if fam == "jacobi":
        a, b = _jacobi_closed(spec.alpha, spec.beta, n)
    elif fam == "laguerre":
        a, b = _laguerre_closed(spec.s, n)
    elif fam == "hermite" and spec.exponent == 2:
        a, b = _hermite_closed(spec.mu, n)
    else:
        if method == "closed":
            raise NeedsStieltjesError(
                f"no closed-form recurrence for {fam} weight {spec!r}; "
                "discretize it and call stieltjes_discretized")
        if fam == "hermite":
            pts, roots = hermite_discretization(spec.exponent, spec.mu, degree=n,
                                                panels=60 + n // 2, sqrt=True)
            rec = stieltjes_discretized((pts, roots / math.sqrt(np.dot(roots, roots))), n,
                                        sqrt_masses=True)
        else:
            pts, masses = trapezoid_discretization(*spec.table)
            rec = stieltjes_discretized((pts, masses / masses.sum()), n)
        return rec.affine(spec.scale, spec.shift)
    return Recurrence(a, b).affine(spec.scale, spec.shift)


def trapezoid_discretization(points, values):
    """Discrete measure (points, masses) from the trapezoid rule on samples."""
    x = np.asarray(points, dtype=float)
    w = np.asarray(values, dtype=float)
    h = np.diff(x)
    q = np.zeros_like(x)
    q[:-1] += h / 2
    q[1:] += h / 2
    return x, q * w


def hermite_discretization(exponent: float, mu: float, panels: int = 60,
                           order: int = 24, tail: float = 1e-14, degree: int = 0,
                           sqrt: bool = False):
    """Composite Gauss discretization of ``|z|^(2mu) exp(-|z|^p)``.

    The half line is truncated at a radius ``R`` with ``R^p >= 40``, which
    leaves a tail mass far below ``tail``.  ``R`` is enlarged until the
    relative tail of the ``z^(2 degree)`` moment is below 1e-17 and ``R``
    lies well outside the zeros of the degree ``2 degree`` polynomial, so
    recurrences up to ``degree`` are unaffected by the cut.  ``panels``
    uniform panels cover ``[0, R]``, the first graded toward the origin; the
    innermost piece uses a Gauss-Jacobi rule that absorbs the ``z^(2mu)``
    factor.  With ``sqrt=True`` the square roots of the masses are returned,
    formed directly so that they survive where the masses would underflow.
    """
    a_ = (2 * mu + 1) / exponent
    top = special.gammainccinv((2 * mu + 1 + 2 * degree) / exponent, 1e-17)
    # the zeros of p_degree fill roughly [-c n^(1/p), c n^(1/p)] with c the
    # equilibrium support radius; keep a wide margin beyond it
    c = (2 ** (exponent - 1) * special.beta(exponent / 2, exponent / 2)) ** (1 / exponent)
    edge = 1.5 * c * (2 * degree + 2 * mu + 1) ** (1 / exponent)
    radius = max(max(40.0, float(top)) ** (1.0 / exponent), edge)
    tail_mass = special.gammaincc(a_, radius**exponent)
    if tail_mass > tail:
        raise ValueError("truncation radius leaves too much tail mass")
    # uniform panels resolve the oscillatory bulk; the first one is split
    # geometrically toward the origin, where |z|^p and |z|^(2mu) are singular
    h = radius / panels
    edges = np.concatenate([[0.0], h * np.geomspace(1e-8, 1.0, 24)[:-1],
                            np.linspace(h, radius, panels)])
    gx, gw = special.roots_legendre(order)
    jx, jw = special.roots_jacobi(order, 0.0, 2 * mu)
    pts, masses = [], []
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        half = (hi - lo) / 2
        if i == 0:
            z = lo + half * (jx + 1)
            pre = jw * half ** (2 * mu + 1)
        else:
            z = lo + half * (gx + 1)
            pre = gw * half * z ** (2 * mu)
        m = np.sqrt(pre) * np.exp(-z**exponent / 2) if sqrt else pre * np.exp(-z**exponent)
        pts.append(z)
        masses.append(m)
    z = np.concatenate(pts)
    m = np.concatenate(masses)
    return np.concatenate([-z[::-1], z]), np.concatenate([m[::-1], m])


def stieltjes_discretized(weight_samples, n: int, sqrt_masses: bool = False) -> Recurrence:
    """Discretized Stieltjes procedure.

    Parameters
    ----------
    weight_samples : (points, masses)
        A discrete measure.  The caller is responsible for choosing it fine
        enough that moments up to degree ``2n`` are converged.
    n : int
        Number of recurrence coefficients.
    sqrt_masses : bool
        The second array holds square roots of the masses.

    Raises
    ------
    OrthogonalityLossError
        If some ``b[k]`` with ``k >= 1`` comes out nonpositive.
    """
    x, lam = (np.asarray(t, dtype=float) for t in weight_samples)
    if np.any(lam < 0):
        raise ValueError("discrete masses must be nonnegative")
    root = lam if sqrt_masses else np.sqrt(lam)
    if n < 1:
        raise ValueError("recurrence length must be >= 1")
    a = np.empty(n)
    b = np.empty(n)
    b[0] = np.dot(root, root)
    # iterate on sqrt(lam) * p_k, which has unit norm and cannot overflow in
    # the far tail where p_k is huge and lam tiny
    u_prev = np.zeros_like(x)
    u = root / math.sqrt(b[0])
    for k in range(n):
        a[k] = np.dot(x * u, u)
        if k + 1 == n:
            break
        q = (x - a[k]) * u - math.sqrt(b[k]) * u_prev if k else (x - a[k]) * u
        b[k + 1] = np.dot(q, q)
        if not b[k + 1] > 0:
            raise OrthogonalityLossError(
                f"b[{k + 1}] = {b[k + 1]:.3e}: discretization too coarse")
        u_prev, u = u, q / math.sqrt(b[k + 1])
    return Recurrence(a, b)


def eval_orthonormal(rec: Recurrence, degree: int, z) -> np.ndarray:
    """Values ``p_0(z), ..., p_degree(z)`` stacked on a trailing axis."""
    if degree >= len(rec):
        raise ValueError(f"degree {degree} needs a recurrence of length {degree + 1}")
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape + (degree + 1,))
    out[..., 0] = 1.0 / math.sqrt(rec.b[0])
    if degree >= 1:
        out[..., 1] = (z - rec.a[0]) * out[..., 0] / math.sqrt(rec.b[1])
    for k in range(1, degree):
        out[..., k + 1] = ((z - rec.a[k]) * out[..., k]
                           - math.sqrt(rec.b[k]) * out[..., k - 1]) / math.sqrt(rec.b[k + 1])
    return out


def gauss_rule(rec: Recurrence, N: int):
    """N-point Gauss rule from the symmetric tridiagonal Jacobi matrix."""
    if N < 1:
        raise ValueError("need at least one Gauss node")
    if N > len(rec):
        raise ValueError(f"{N}-point rule needs a recurrence of length {N}")
    try:
        x, vec = eigh_tridiagonal(rec.a[:N], np.sqrt(rec.b[1:N]))
    except LinAlgError as exc:
        raise LinAlgError(f"Jacobi matrix eigensolver failed: {exc}") from exc
    return x, rec.b[0] * vec[0, :] ** 2
