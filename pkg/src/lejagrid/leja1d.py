"""Weighted Leja sequences, barycentric interpolation and interpolatory quadrature.

A weighted Leja sequence greedily maximizes ``v(z) * prod_n |z - z_n|`` where
``v`` is the square root of the density.  All optimization happens on the
canonical variable of the :class:`~lejagrid.orthopoly.WeightSpec` and in log
space; nodes are mapped to the physical variable afterwards.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .orthopoly import Recurrence, WeightSpec, eval_orthonormal, recurrence_coefficients

TIE_RTOL = 1e-12
NODE_RTOL = 1e-14
_EPS = np.finfo(float).eps


class LejaOptimizationError(RuntimeError):
    pass


# -- objective ----------------------------------------------------------------


def _objective(spec, z, x):
    """log v(x) + sum log|x - z_n| for canonical nodes ``z``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        g = spec.log_sqrt_weight(x)
        if z.size:
            g = g + np.log(np.abs(x[:, None] - z[None, :])).sum(axis=1)
    return g


def _objective_derivs(spec, z, x):
    d = x[:, None] - z[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / d
        d1 = spec.log_sqrt_weight(x, 1) + inv.sum(axis=1)
        d2 = spec.log_sqrt_weight(x, 2) - (inv * inv).sum(axis=1)
    return d1, d2


def _select(xs, gs):
    """Pick the maximizer: ties within TIE_RTOL go to the smallest |x|, then x >= 0."""
    xs = np.asarray(xs, dtype=float)
    gs = np.asarray(gs, dtype=float)
    if not np.any(np.isfinite(gs) | (gs == np.inf)):
        raise LejaOptimizationError("Leja objective is -inf everywhere")
    gmax = gs.max()
    if gmax == np.inf:
        tied = gs == np.inf
    else:
        tied = gs >= gmax - TIE_RTOL * max(1.0, abs(gmax))
    cx = xs[tied]
    mags = np.abs(cx)
    mmin = mags.min()
    near = mags <= mmin * (1 + TIE_RTOL) + 1e-300
    cx = cx[near]
    nonneg = cx[cx >= 0]
    if nonneg.size:
        return float(nonneg[np.argmin(np.abs(nonneg))])
    return float(cx[np.argmin(np.abs(cx))])


def _newton_brackets(spec, z, lo, hi, maxiter=200):
    """Vectorized safeguarded Newton on g' over brackets with g'(lo) > 0 > g'(hi)."""
    lo = lo.copy()
    hi = hi.copy()
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        d1, d2 = _objective_derivs(spec, z, x)
        pos = d1 > 0
        flat = d1 == 0
        lo = np.where(pos | flat, x, lo)
        hi = np.where(pos & ~flat, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - d1 / d2
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = (np.abs(xn - x) <= 4 * _EPS * np.maximum(np.abs(x), 1e-300)) | (d1 == 0)
        x = xn
        if np.all(done | (hi - lo <= 4 * _EPS * np.maximum(np.abs(lo), np.abs(hi)))):
            break
    return x


def _tail_bracket(spec, z, edge, direction):
    """Finite point beyond ``edge`` where g' has the sign of a decreasing tail."""
    step = max(1.0, abs(edge))
    for _ in range(200):
        x = edge + direction * step
        d1, _ = _objective_derivs(spec, z, np.array([x]))
        if direction * d1[0] < 0:
            return x
        step *= 2.0
    raise LejaOptimizationError("tail bracket did not terminate")


def _next_closed_form(spec, z):
    lo, hi = spec.canonical_domain
    nodes = set(z.tolist())
    special = [p for p in (lo, hi, 0.0) if math.isfinite(p) and lo <= p <= hi]
    open_special = [p for p in special if p not in nodes]
    if open_special:
        lv = spec.log_sqrt_weight(np.array(open_special))
        if np.any(lv == np.inf):
            pts = np.array(open_special)[lv == np.inf]
            return _select(pts, np.full(pts.size, np.inf))
    bps = np.array(sorted(nodes | set(special)))
    lv_bps = spec.log_sqrt_weight(bps)
    closed = np.array([(p not in nodes) and np.isfinite(v) for p, v in zip(bps, lv_bps)])

    # open end of an interval means g -> -inf there
    lefts = list(bps[:-1])
    rights = list(bps[1:])
    left_closed = list(closed[:-1])
    right_closed = list(closed[1:])
    if lo == -math.inf:
        lefts.insert(0, _tail_bracket(spec, z, bps[0], -1))
        rights.insert(0, bps[0])
        left_closed.insert(0, False)
        right_closed.insert(0, bool(closed[0]))
    if hi == math.inf:
        lefts.append(bps[-1])
        rights.append(_tail_bracket(spec, z, bps[-1], 1))
        left_closed.append(bool(closed[-1]))
        right_closed.append(False)
    L = np.array(lefts, dtype=float)
    R = np.array(rights, dtype=float)
    lc = np.array(left_closed, dtype=bool)
    rc = np.array(right_closed, dtype=bool)

    keep = np.ones(L.size, dtype=bool)
    if np.any(lc):
        d1, _ = _objective_derivs(spec, z, L[lc])
        keep[np.flatnonzero(lc)[d1 <= 0]] = False
    if np.any(rc):
        d1, _ = _objective_derivs(spec, z, R[rc])
        keep[np.flatnonzero(rc)[d1 >= 0]] = False
    roots = _newton_brackets(spec, z, L[keep], R[keep]) if np.any(keep) else np.empty(0)
    cands = np.concatenate([roots, bps[closed]])
    return _select(cands, _objective(spec, z, cands))


def _next_generic(spec, z, ngrid=33, window=3.0):
    lo, hi = spec.canonical_domain
    bps = np.unique(np.concatenate([z, [lo, hi]]))
    cands, vals = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        grid = np.linspace(a, b, ngrid + 2)
        inner = grid[1:-1]
        cands.append(inner)
        vals.append(_objective(spec, z, inner))
    for end in (lo, hi):
        if end not in z:
            cands.append(np.array([end]))
            vals.append(_objective(spec, z, [end]))
    xs = np.concatenate(cands)
    gs = np.concatenate(vals)
    best = gs.max()
    polished_x, polished_g = [xs], [gs]
    h = np.diff(bps)
    for a, b, hh in zip(bps[:-1], bps[1:], h):
        mask = (xs > a) & (xs < b)
        if not np.any(mask) or gs[mask].max() < best - window:
            continue
        i = np.argmax(np.where(mask, gs, -np.inf))
        step = hh / (ngrid + 1)
        res = minimize_scalar(lambda t: -_objective(spec, z, t)[0], method="bounded",
                              bounds=(max(a, xs[i] - step), min(b, xs[i] + step)),
                              options={"xatol": 1e-14 * max(1.0, abs(xs[i]))})
        polished_x.append(np.array([res.x]))
        polished_g.append(_objective(spec, z, res.x))
    return _select(np.concatenate(polished_x), np.concatenate(polished_g))


def _next_canonical(spec: WeightSpec, z: np.ndarray) -> float:
    if spec.family == "tabulated":
        return _next_generic(spec, z)
    return _next_closed_form(spec, z)


# -- sequences --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LejaSequence:
    """Nodes of a weighted Leja sequence in construction order.

    ``canonical`` holds the nodes in the canonical variable of ``spec``;
    :attr:`nodes` are their physical images.
    """

    spec: WeightSpec
    canonical: np.ndarray

    def __post_init__(self):
        z = np.array(self.canonical, dtype=float).ravel()
        if np.unique(z).size != z.size:
            raise ValueError("Leja nodes must be pairwise distinct")
        z.setflags(write=False)
        object.__setattr__(self, "canonical", z)

    def __len__(self):
        return self.canonical.size

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.atleast_1d(self.spec.from_canonical(self.canonical))
        x.setflags(write=False)
        return x

    @cached_property
    def barycentric(self) -> np.ndarray:
        return barycentric_weights(self)

    @cached_property
    def recurrence(self) -> Recurrence:
        return recurrence_coefficients(self.spec, max(len(self), 1))

    def prefix(self, k: int) -> "LejaSequence":
        return LejaSequence(self.spec, self.canonical[:k])

    def quadrature_weights(self, k: int | None = None) -> np.ndarray:
        seq = self if k is None or k == len(self) else self.prefix(k)
        return quadrature_weights(seq, self.recurrence)

    def interpolate(self, data, x):
        return interpolate(self, data, x)


def next_leja_point(seq: LejaSequence) -> float:
    """Next physical node of ``seq`` (``seq`` may be empty)."""
    return float(seq.spec.from_canonical(_next_canonical(seq.spec, seq.canonical)))


def build_sequence(spec: WeightSpec, N: int, start: LejaSequence | None = None) -> LejaSequence:
    """Greedy weighted Leja sequence with ``N`` nodes.

    ``start`` optionally supplies an existing prefix to continue from;
    the result is identical to a fresh build.
    """
    if N < 1:
        raise ValueError("a Leja sequence needs N >= 1")
    z = [] if start is None else list(start.canonical[:N])
    while len(z) < N:
        z.append(_next_canonical(spec, np.asarray(z, dtype=float)))
    return LejaSequence(spec, np.asarray(z))


def _log_bary(x):
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    if np.any(d == 0):
        raise ValueError("duplicate interpolation nodes")
    logabs = -np.log(np.abs(d)).sum(axis=1)
    sign = np.prod(np.sign(d), axis=1)
    return logabs, sign


def barycentric_weights(seq: LejaSequence) -> np.ndarray:
    """v-weighted barycentric weights ``b_n / v(z_n)``, scaled to max |b| = 1."""
    logabs, sign = _log_bary(seq.nodes)
    logabs = logabs - seq.spec.log_sqrt_weight(seq.canonical)
    return sign * np.exp(logabs - logabs.max())


def classical_barycentric(nodes) -> np.ndarray:
    """Unweighted barycentric weights, scaled to max |b| = 1."""
    logabs, sign = _log_bary(np.asarray(nodes, dtype=float))
    return sign * np.exp(logabs - logabs.max())


def lagrange_basis(nodes, x, bary=None) -> np.ndarray:
    """Cardinal Lagrange functions on ``nodes`` evaluated at ``x``: shape (len(x), n)."""
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if bary is None:
        bary = classical_barycentric(nodes)
    if nodes.size == 1:
        return np.ones((x.size, 1))
    diff = x[:, None] - nodes[None, :]
    hit = np.abs(diff) <= NODE_RTOL * np.maximum(1.0, np.abs(nodes))[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = bary[None, :] / diff
        out = t / t.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    if np.any(rows):
        out[rows] = 0.0
        r, c = np.nonzero(hit)
        first = np.unique(r, return_index=True)[1]
        out[r[first], c[first]] = 1.0
    return out


def interpolate(seq: LejaSequence, data, x):
    """Weighted barycentric interpolant of ``data`` on ``seq`` at ``x``."""
    data = np.asarray(data, dtype=float)
    if data.shape != (len(seq),):
        raise ValueError("need one data value per node")
    scalar = np.ndim(x) == 0
    # b^v_n * v_n, formed in log space
    logabs, sign = _log_bary(seq.nodes)
    c = sign * np.exp(logabs - logabs.max())
    out = lagrange_basis(seq.nodes, x, bary=c) @ data
    return float(out[0]) if scalar else out


def quadrature_weights(seq: LejaSequence, rec: Recurrence) -> np.ndarray:
    """Interpolatory quadrature weights: solve ``V^T w = e_1``, ``V[n, m] = p_m(z_n)``."""
    n = len(seq)
    if len(rec) < n:
        raise ValueError("recurrence shorter than the node set")
    x = seq.nodes
    V = eval_orthonormal(rec, n - 1, x)
    # row scaling by v(z_n) balances the weighted Vandermonde
    d = seq.spec.sqrt_weight(x)
    d = np.where(np.isfinite(d) & (d > 0), d, 1.0)
    rhs = np.zeros(n)
    rhs[0] = math.sqrt(rec.b[0])
    try:
        y = np.linalg.solve((d[:, None] * V).T, rhs)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular Vandermonde system") from exc
    return d * y


def condition_number(weights) -> float:
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise ValueError("empty weight vector")
    total = w.sum()
    if total == 0:
        raise ZeroDivisionError("quadrature weights sum to zero")
    return float(np.abs(w).sum() / abs(total))


# -- Clenshaw-Curtis --------------------------------------------------------


def clenshaw_curtis_nodes(level: int) -> np.ndarray:
    """Ascending nested Clenshaw-Curtis nodes on [-1, 1]; level 0 is the midpoint."""
    if level < 0:
        raise ValueError("level must be >= 0")
    if level == 0:
        return np.zeros(1)
    n = 2**level
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    x[n // 2] = 0.0
    # enforce exact symmetry so nested levels share bit-identical nodes
    x[n // 2 + 1:] = -x[: n // 2][::-1]
    return x


def clenshaw_curtis_weights(N: int) -> np.ndarray:
    """Weights for N Chebyshev extrema ``-cos(k pi/(N-1))`` w.r.t. the uniform density."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return np.ones(1)
    if N == 2:
        return np.full(2, 0.5)
    n = N - 1
    odd = np.arange(1, n, 2)
    l = odd.size
    m = n - l
    v0 = np.concatenate([2.0 / odd / (odd - 2), [1.0 / odd[-1]], np.zeros(m)])
    v2 = -v0[:-1] - v0[:0:-1]
    g0 = -np.ones(n)
    g0[l] += n
    g0[m] += n
    g = g0 / (n**2 - 1 + n % 2)
    w = np.fft.ifft(v2 + g).real
    w = np.concatenate([w, w[:1]])
    return w / 2.0


# -- univariate hierarchical rules -------------------------------------------


def growth_count(growth: str, level: int) -> int:
    """Nodes m_l at a level: linear ``l+1`` or doubling ``1, 3, 5, 9, ...``."""
    if level < 0:
        return 0
    if growth == "linear":
        return level + 1
    if growth == "doubling":
        return 1 if level == 0 else 2**level + 1
    raise ValueError(f"unknown growth rule {growth!r}")


class _HierarchicalRule:
    kind = ""
    growth = ""

    def num_points(self, level: int) -> int:
        return growth_count(self.growth, level)

    def level_of(self, index: int) -> int:
        level = 0
        while self.num_points(level) <= index:
            level += 1
        return level

    def new_indices(self, level: int) -> range:
        return range(self.num_points(level - 1), self.num_points(level))


class LejaRule(_HierarchicalRule):
    """Nested Leja rule; the first ``m_l`` sequence nodes form level ``l``.

    ``canonical`` optionally seeds the rule with known canonical nodes, which
    are extended greedily on demand.
    """

    kind = "leja"

    def __init__(self, spec: WeightSpec, growth: str = "linear", canonical=None):
        growth_count(growth, 0)
        self.spec = spec
        self.growth = growth
        self._seq = None
        if canonical is not None and len(canonical):
            self._seq = LejaSequence(spec, np.asarray(canonical, dtype=float))

    def nodes(self, count: int) -> np.ndarray:
        if self._seq is None or len(self._seq) < count:
            self._seq = build_sequence(self.spec, count, self._seq)
        return self._seq.nodes[:count]

    def to_dict(self, count: int) -> dict:
        self.nodes(count)
        # canonical nodes: mapping physical values back would not be bit-exact
        return {"kind": self.kind, "growth": self.growth, "spec": self.spec.to_dict(),
                "canonical_nodes": [float(v).hex() for v in self._seq.canonical[:count]]}


class ClenshawCurtisRule(_HierarchicalRule):
    """Nested Clenshaw-Curtis rule on a bounded Jacobi-family domain.

    Nodes are stored in hierarchical order: midpoint, both endpoints, then
    each level's new nodes in ascending order.
    """

    kind = "cc"
    growth = "doubling"

    def __init__(self, spec: WeightSpec):
        if spec.family != "jacobi":
            raise ValueError("Clenshaw-Curtis rules need a bounded Jacobi-family weight")
        self.spec = spec
        self._canonical = np.zeros(1)
        self._level = 0

    def _extend(self, level):
        while self._level < level:
            self._level += 1
            full = clenshaw_curtis_nodes(self._level)
            prev = set(clenshaw_curtis_nodes(self._level - 1).tolist())
            new = np.array([v for v in full if v not in prev])
            self._canonical = np.concatenate([self._canonical, new])

    def nodes(self, count: int) -> np.ndarray:
        level = self.level_of(count - 1) if count > 0 else 0
        self._extend(level)
        return np.atleast_1d(self.spec.from_canonical(self._canonical[:count]))

    def to_dict(self, count: int) -> dict:
        return {"kind": self.kind, "growth": self.growth, "spec": self.spec.to_dict(),
                "nodes": [float(v).hex() for v in self.nodes(count)]}


def rule_from_dict(data: dict):
    spec = WeightSpec.from_dict(data["spec"])
    if data["kind"] == "cc":
        return ClenshawCurtisRule(spec)
    canonical = [float.fromhex(v) for v in data.get("canonical_nodes", [])]
    return LejaRule(spec, data.get("growth", "linear"), canonical=canonical)


def make_rule(kind: str, spec: WeightSpec, growth: str | None = None):
    if kind == "leja":
        return LejaRule(spec, growth or "linear")
    if kind == "cc":
        return ClenshawCurtisRule(spec)
    raise ValueError(f"unknown rule kind {kind!r}")


# -- CSV --------------------------------------------------------------------

CSV_FIELDS = ("node", "barycentric_weight", "quadrature_weight")


def format_float(v: float) -> str:
    return f"{v:.16e}"


def sequence_to_csv(seq: LejaSequence, fh=None, condition: bool = False) -> str:
    """Write node / barycentric weight / quadrature weight rows.

    With ``condition=True`` an extra column holds the condition number of the
    rule formed by each prefix of the sequence.
    """
    fh_ = io.StringIO() if fh is None else fh
    w = csv.writer(fh_, lineterminator="\n")
    header = list(CSV_FIELDS) + (["condition_number"] if condition else [])
    w.writerow(header)
    quad = seq.quadrature_weights()
    kappas = [condition_number(seq.quadrature_weights(k)) for k in range(1, len(seq) + 1)] \
        if condition else None
    for i in range(len(seq)):
        row = [seq.nodes[i], seq.barycentric[i], quad[i]]
        if condition:
            row.append(kappas[i])
        w.writerow([format_float(v) for v in row])
    return fh_.getvalue() if fh is None else ""


def sequence_from_csv(fh, spec: WeightSpec) -> LejaSequence:
    text = fh.read() if hasattr(fh, "read") else str(fh)
    rows = list(csv.DictReader(io.StringIO(text)))
    nodes = np.array([float(r["node"]) for r in rows])
    return LejaSequence(spec, spec.to_canonical(nodes))
