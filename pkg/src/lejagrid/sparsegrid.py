"""Hierarchical sparse grids built from nested univariate rules.

Univariate node ``j`` of dimension ``k`` belongs to the unique level ``l``
with ``m_{l-1} <= j < m_l``.  Its hierarchical basis function is the
Lagrange cardinal of node ``j`` on the first ``m_l`` nodes, so it vanishes
at every node of lower levels.  A subspace ``W_l`` is the tensor product of
the level-``l_k`` new nodes in each dimension, and its surpluses are
``f - f_L`` at those points.

Each subspace contribution is converted to the orthonormal tensor basis
(a polynomial chaos expansion).  Global coefficients are kept in a sparse
map keyed by a tuple of ``(dim, degree)`` pairs with ``degree > 0``; the
constant term has key ``()``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .leja1d import classical_barycentric, lagrange_basis, rule_from_dict
from .orthopoly import Recurrence, eval_orthonormal, recurrence_coefficients

__all__ = [
    "MultiIndex", "Subspace", "SparseGrid", "SparseGridSurrogate", "AdmissibilityError",
    "ModelEvaluationError", "isotropic_index_set", "hierarchical_new_points",
    "backward_neighbors", "forward_neighbors", "compute_surpluses", "evaluate",
    "subspace_to_pce", "moments", "build_isotropic",
]

MultiIndex = tuple

SCHEMA_VERSION = 1

# gather size (points x grid points) below which evaluation is vectorized
DENSE_LIMIT = 2_000_000


class AdmissibilityError(ValueError):
    pass


class ModelEvaluationError(RuntimeError):
    """A model call failed or returned a non-finite value at ``point``."""

    def __init__(self, point, cause=None):
        self.point = tuple(float(v) for v in point)
        msg = f"model evaluation failed at {self.point}"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)


def _as_index(idx) -> MultiIndex:
    t = tuple(int(v) for v in idx)
    if any(v < 0 for v in t):
        raise ValueError(f"negative level in {t}")
    return t


def isotropic_index_set(level: int, d: int) -> list[MultiIndex]:
    """All ``l`` with ``|l|_1 <= level``, ordered by total level then lexicographically."""
    if level < 0 or d < 1:
        raise ValueError("need level >= 0 and d >= 1")
    out = []
    for total in range(level + 1):
        for bars in itertools.combinations(range(total + d - 1), d - 1):
            cuts = (-1,) + bars + (total + d - 1,)
            out.append(tuple(cuts[i + 1] - cuts[i] - 1 for i in range(d)))
    out.sort(key=lambda ix: (sum(ix), tuple(-v for v in ix)))
    return out


def backward_neighbors(idx: MultiIndex) -> list[MultiIndex]:
    return [idx[:k] + (idx[k] - 1,) + idx[k + 1:] for k in range(len(idx)) if idx[k] > 0]


def forward_neighbors(idx: MultiIndex) -> list[MultiIndex]:
    return [idx[:k] + (idx[k] + 1,) + idx[k + 1:] for k in range(len(idx))]


def hierarchical_new_points(idx, rules):
    """New tensor points of subspace ``idx``.

    Returns ``(points, labels)`` where ``labels[i, k]`` is the univariate
    node index of ``points[i, k]`` in dimension ``k``.
    """
    idx = _as_index(idx)
    axes = [np.arange(r.num_points(l - 1), r.num_points(l)) for r, l in zip(rules, idx)]
    labels = np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, len(idx))
    pts = np.empty(labels.shape)
    for k, (r, l) in enumerate(zip(rules, idx)):
        pts[:, k] = r.nodes(r.num_points(l))[labels[:, k]]
    return pts, labels


@dataclass
class Subspace:
    """Hierarchical difference space ``W_l`` with its data.

    ``surpluses`` and ``pce`` are dense tensors over the active dimensions
    (those with ``l_k > 0``); ``pce[j_1, ..., j_a]`` multiplies
    ``prod p_{j_i}(z_{k_i})``.
    """

    index: MultiIndex
    points: np.ndarray
    labels: np.ndarray
    values: np.ndarray
    surpluses: np.ndarray
    active_dims: tuple
    pce: np.ndarray
    gamma: float

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    def pce_items(self):
        """Yield ``(key, coefficient)`` pairs in sparse global-key form."""
        dims = self.active_dims
        for pos in np.ndindex(self.pce.shape):
            key = tuple((k, j) for k, j in zip(dims, pos) if j > 0)
            yield key, float(self.pce[pos])


class _BasisCache:
    """Per-dimension hierarchical basis values at fixed sample points."""

    def __init__(self, grid: "SparseGrid", x: np.ndarray):
        self.grid = grid
        self.x = x
        self._cols: dict[tuple[int, int], np.ndarray] = {}

    def new_columns(self, k: int, level: int) -> np.ndarray:
        key = (k, level)
        if key not in self._cols:
            self._cols[key] = self.grid._cardinals(k, level, self.x[:, k])
        return self._cols[key]

    def subspace_values(self, sub: Subspace) -> np.ndarray:
        """``sum_i v_i Psi_i(x)`` for one subspace."""
        M = self.x.shape[0]
        dims = sub.active_dims
        if not dims:
            return np.full(M, float(sub.surpluses.reshape(-1)[0]))
        R = None
        for k in reversed(dims):
            cols = self.new_columns(k, sub.index[k])
            if R is None:
                R = np.tensordot(cols, sub.surpluses, axes=([1], [len(dims) - 1]))
            else:
                R = np.einsum("m...j,mj->m...", R, cols)
        return R


class SparseGrid:
    """Hierarchical sparse grid interpolant over accepted subspaces ``L``.

    Parameters
    ----------
    rules
        One nested univariate rule per dimension (``LejaRule`` or
        ``ClenshawCurtisRule``).
    """

    def __init__(self, rules: Sequence):
        if len(rules) < 1:
            raise ValueError("need at least one dimension")
        self.rules = list(rules)
        self.d = len(self.rules)
        self.subspaces: dict[MultiIndex, Subspace] = {}
        self.accepted: list[MultiIndex] = []
        self.active: list[MultiIndex] = []
        self._accepted_set: set[MultiIndex] = set()
        self.coefficients: dict[tuple, float] = {}
        self.cache: dict[tuple, float] = {}
        self._recs: list[Recurrence | None] = [None] * self.d
        self._pce_mats: dict[tuple[int, int], np.ndarray] = {}
        self._bary: dict[tuple[int, int], np.ndarray] = {}
        self._labels = np.zeros((0, self.d), dtype=np.int64)
        self._surp = np.zeros(0)
        self._rows: list[dict] = [dict() for _ in range(self.d)]

    # -- univariate helpers --------------------------------------------------

    @property
    def specs(self):
        return [r.spec for r in self.rules]

    def recurrence(self, k: int, n: int) -> Recurrence:
        rec = self._recs[k]
        if rec is None or len(rec) < n:
            size = max(n, 2 * len(rec) if rec is not None else 8)
            rec = recurrence_coefficients(self.rules[k].spec, size)
            self._recs[k] = rec
        return rec

    def _nodes(self, k: int, level: int) -> np.ndarray:
        r = self.rules[k]
        return r.nodes(r.num_points(level))

    def _cardinals(self, k: int, level: int, x) -> np.ndarray:
        """Hierarchical basis functions new at ``level`` evaluated at ``x``."""
        r = self.rules[k]
        nodes = self._nodes(k, level)
        key = (k, level)
        if key not in self._bary:
            self._bary[key] = classical_barycentric(nodes)
        L = lagrange_basis(nodes, x, self._bary[key])
        return L[:, r.num_points(level - 1):]

    def pce_matrix(self, k: int, level: int) -> np.ndarray:
        """``C`` with ``C[:, j]`` the orthonormal coefficients of cardinal ``j``.

        Only the columns new at ``level`` are returned.
        """
        key = (k, level)
        if key not in self._pce_mats:
            r = self.rules[k]
            nodes = self._nodes(k, level)
            m = nodes.size
            rec = self.recurrence(k, m)
            V = eval_orthonormal(rec, m - 1, nodes)
            # row scaling by v(x_n) balances the Vandermonde for unbounded weights
            dv = r.spec.sqrt_weight(nodes)
            dv = np.where(np.isfinite(dv) & (dv > 0), dv, 1.0)
            C = np.linalg.solve(dv[:, None] * V, np.diag(dv))
            self._pce_mats[key] = C[:, r.num_points(level - 1):]
        return self._pce_mats[key]

    # -- index-set logic -------------------------------------------------

    def is_admissible(self, idx) -> bool:
        idx = _as_index(idx)
        if len(idx) != self.d or idx in self.subspaces:
            return False
        return all(b in self._accepted_set for b in backward_neighbors(idx))

    def refine(self, idx) -> list[MultiIndex]:
        """Admissible forward neighbours of accepted ``idx`` not yet in ``L`` or ``A``."""
        idx = _as_index(idx)
        if idx not in self._accepted_set:
            raise ValueError(f"{idx} is not accepted")
        return [f for f in forward_neighbors(idx) if self.is_admissible(f)]

    # -- model evaluation ----------------------------------------------------

    def _evaluate_model(self, model: Callable, pts: np.ndarray) -> np.ndarray:
        keys = [tuple(p) for p in pts.tolist()]
        missing = [i for i, k in enumerate(keys) if k not in self.cache]
        if missing:
            X = pts[missing]
            try:
                y = np.asarray(model(X), dtype=float).reshape(-1)
                if y.size != len(missing):
                    raise ValueError(f"model returned {y.size} values for {len(missing)} points")
            except ModelEvaluationError:
                raise
            except Exception as exc:
                for p in X:
                    try:
                        model(p[None, :])
                    except Exception as inner:
                        raise ModelEvaluationError(p, inner) from inner
                raise ModelEvaluationError(X[0], exc) from exc
            bad = ~np.isfinite(y)
            if np.any(bad):
                raise ModelEvaluationError(X[np.argmax(bad)], "non-finite value")
            for i, v in zip(missing, y):
                self.cache[keys[i]] = float(v)
        return np.array([self.cache[k] for k in keys])

    @property
    def n_evaluations(self) -> int:
        return len(self.cache)

    # -- subspace construction -------------------------------------------

    def activate(self, idx, model: Callable | None = None, values=None) -> Subspace:
        """Evaluate the model on the new points of ``idx`` and add it to ``A``."""
        idx = _as_index(idx)
        if not self.is_admissible(idx):
            raise AdmissibilityError(f"{idx} is not admissible for the accepted set")
        pts, labels = hierarchical_new_points(idx, self.rules)
        if values is None:
            if model is None:
                raise ValueError("need a model or precomputed values")
            values = self._evaluate_model(model, pts)
        else:
            values = np.asarray(values, dtype=float).reshape(-1)
            if values.size != pts.shape[0]:
                raise ValueError("one value per new point required")
            for p, v in zip(pts.tolist(), values):
                self.cache.setdefault(tuple(p), float(v))
        surplus = values - self._evaluate_dense(pts, memoize=True)
        sub = self._make_subspace(idx, pts, labels, values, surplus)
        self.subspaces[idx] = sub
        self.active.append(idx)
        return sub

    def _make_subspace(self, idx, pts, labels, values, surplus) -> Subspace:
        dims = tuple(k for k in range(self.d) if idx[k] > 0)
        shape = tuple(self.rules[k].num_points(idx[k]) - self.rules[k].num_points(idx[k] - 1)
                      for k in dims)
        S = surplus.reshape(shape) if dims else surplus.reshape(())
        P = S
        for axis, k in enumerate(dims):
            C = self.pce_matrix(k, idx[k])
            P = np.moveaxis(np.tensordot(C, P, axes=([1], [axis])), 0, axis)
        P = np.asarray(P, dtype=float)
        gamma = float(np.sum(P**2) - P.reshape(-1)[0] ** 2)
        return Subspace(idx, pts, labels, values, np.asarray(S, dtype=float), dims, P, max(gamma, 0.0))

    def accept(self, idx) -> Subspace:
        """Move an active subspace into ``L`` and merge its PCE coefficients."""
        idx = _as_index(idx)
        if idx not in self.active:
            raise ValueError(f"{idx} is not active")
        self.active.remove(idx)
        self.accepted.append(idx)
        self._accepted_set.add(idx)
        sub = self.subspaces[idx]
        self._labels = np.concatenate([self._labels, sub.labels])
        self._surp = np.concatenate([self._surp, sub.surpluses.reshape(-1)])
        for key, c in sub.pce_items():
            self.coefficients[key] = self.coefficients.get(key, 0.0) + c
        return sub

    # -- queries ---------------------------------------------------------

    def basis_cache(self, x) -> _BasisCache:
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        return _BasisCache(self, x)

    def _point_table(self):
        return self._labels, self._surp

    def _node_rows(self, k: int, xs: np.ndarray, top: int, memoize: bool) -> np.ndarray:
        """Hierarchical basis functions ``0..top`` of dimension ``k`` at ``xs``.

        With ``memoize`` rows are kept per abscissa.  Surpluses are only
        ever evaluated at grid nodes, so that memo stays small.
        """
        r = self.rules[k]
        need = r.level_of(top)
        if not memoize:
            cols = [np.ones((xs.size, 1))]
            cols += [self._cardinals(k, lv, xs) for lv in range(1, need + 1)]
            return np.concatenate(cols, axis=1)[:, :top + 1]
        memo = self._rows[k]
        out = np.empty((xs.size, top + 1))
        for i, xv in enumerate(xs.tolist()):
            row = memo.get(xv)
            if row is None or row[0] < need:
                known = row[1] if row is not None else np.ones(1)
                start = row[0] + 1 if row is not None else 1
                parts = [known] + [self._cardinals(k, lv, np.array([xv]))[0]
                                   for lv in range(start, need + 1)]
                row = (need, np.concatenate(parts))
                memo[xv] = row
            out[i] = row[1][:top + 1]
        return out

    def _evaluate_dense(self, x: np.ndarray, memoize: bool = False) -> np.ndarray:
        labels, surp = self._point_table()
        out = np.zeros(x.shape[0])
        if surp.size == 0:
            return out
        prod = np.ones((x.shape[0], surp.size))
        for k in range(self.d):
            top = int(labels[:, k].max())
            if top == 0:
                continue
            prod *= self._node_rows(k, x[:, k], top, memoize)[:, labels[:, k]]
        return prod @ surp

    def evaluate(self, x, include_active: bool = False) -> np.ndarray:
        """Interpolant at ``x`` (shape ``(M, d)`` or ``(d,)``) using ``L``.

        Small batches gather over all grid points at once; large batches
        sum subspace by subspace over the active dimensions only.
        """
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = x.reshape(-1, self.d)
        if not include_active and x.shape[0] * max(len(self._point_table()[1]), 1) <= DENSE_LIMIT:
            out = self._evaluate_dense(x)
        else:
            cache = self.basis_cache(x)
            out = np.zeros(x.shape[0])
            members = self.accepted + (self.active if include_active else [])
            for idx in members:
                out += cache.subspace_values(self.subspaces[idx])
        return out[0] if single else out

    __call__ = evaluate

    def mean(self) -> float:
        return self.coefficients.get((), 0.0)

    def variance(self) -> float:
        return float(sum(c * c for k, c in self.coefficients.items() if k))

    def moments(self) -> tuple[float, float]:
        return self.mean(), self.variance()

    def indicator(self, idx) -> float:
        return self.subspaces[_as_index(idx)].gamma

    def eta(self) -> float:
        return float(sum(self.subspaces[i].gamma for i in self.active))

    def is_downward_closed(self) -> bool:
        return all(b in self._accepted_set for i in self.accepted for b in backward_neighbors(i))

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        counts = [1] * self.d
        for idx in self.subspaces:
            for k, l in enumerate(idx):
                counts[k] = max(counts[k], self.rules[k].num_points(l))
        hx = lambda a: [float(v).hex() for v in np.asarray(a).reshape(-1)]
        subs = []
        for idx in self.accepted + sorted(self.active):
            s = self.subspaces[idx]
            subs.append({"index": list(idx), "values": hx(s.values),
                         "surpluses": hx(s.surpluses), "pce": hx(s.pce),
                         "gamma": float(s.gamma).hex()})
        return {
            "schema_version": SCHEMA_VERSION,
            "dimension": self.d,
            "rules": [r.to_dict(c) for r, c in zip(self.rules, counts)],
            "accepted": [list(i) for i in self.accepted],
            "active": [list(i) for i in self.active],
            "subspaces": subs,
            "mean": self.mean(),
            "variance": self.variance(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "SparseGrid":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        grid = cls([rule_from_dict(r) for r in data["rules"]])
        fx = lambda a: np.array([float.fromhex(v) for v in a])
        stored = {tuple(s["index"]): s for s in data["subspaces"]}
        accepted = [tuple(i) for i in data["accepted"]]
        active = [tuple(i) for i in data["active"]]
        for idx in accepted + active:
            s = stored[idx]
            pts, labels = hierarchical_new_points(idx, grid.rules)
            values = fx(s["values"])
            dims = tuple(k for k in range(grid.d) if idx[k] > 0)
            shape = tuple(grid.rules[k].num_points(idx[k]) - grid.rules[k].num_points(idx[k] - 1)
                          for k in dims)
            pce_shape = tuple(grid.rules[k].num_points(idx[k]) for k in dims)
            sub = Subspace(idx, pts, labels, values, fx(s["surpluses"]).reshape(shape), dims,
                           fx(s["pce"]).reshape(pce_shape), float.fromhex(s["gamma"]))
            grid.subspaces[idx] = sub
            for p, v in zip(pts.tolist(), values):
                grid.cache[tuple(p)] = float(v)
            grid.active.append(idx)
            if idx in accepted:
                grid.accept(idx)
        grid.active = list(active)
        return grid

    @classmethod
    def from_json(cls, text: str) -> "SparseGrid":
        return cls.from_dict(json.loads(text))


SparseGridSurrogate = SparseGrid


# -- functional interface ----------------------------------------------------


def compute_surpluses(grid: SparseGrid, idx, model_values) -> np.ndarray:
    """``f - f_L`` at the new points of an admissible ``idx``."""
    idx = _as_index(idx)
    if not grid.is_admissible(idx):
        raise AdmissibilityError(f"{idx} is not admissible for the accepted set")
    pts, _ = hierarchical_new_points(idx, grid.rules)
    vals = np.asarray(model_values, dtype=float).reshape(-1)
    if vals.size != pts.shape[0]:
        raise ValueError("one value per new point required")
    return vals - grid.evaluate(pts)


def evaluate(grid: SparseGrid, z) -> np.ndarray:
    return grid.evaluate(z)


def subspace_to_pce(idx, grid: SparseGrid, recurrences=None) -> dict[tuple, float]:
    """Sparse orthonormal PCE coefficients of one subspace contribution.

    ``recurrences`` is accepted for interface symmetry; the grid caches its
    own per-dimension recurrences.
    """
    sub = grid.subspaces[_as_index(idx)]
    return dict(sub.pce_items())


def moments(grid: SparseGrid) -> tuple[float, float]:
    return grid.moments()


def build_isotropic(rules: Sequence, level: int, model: Callable) -> SparseGrid:
    """Isotropic sparse grid on ``{l : |l|_1 <= level}``."""
    grid = SparseGrid(rules)
    for idx in isotropic_index_set(level, grid.d):
        grid.activate(idx, model)
        grid.accept(idx)
    return grid
