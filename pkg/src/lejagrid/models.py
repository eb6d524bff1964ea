"""Benchmark models with declared parameter distributions.

Every model takes an array of shape ``(n, d)`` (or a single point of shape
``(d,)``) and returns ``n`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import orthopoly as op
from .orthopoly import WeightSpec

__all__ = [
    "Model", "runge_f1", "oscillatory_f2", "oscillator", "borehole", "resistor_network",
    "OSCILLATOR_BOX", "BOREHOLE_BOX", "REGISTRY", "get_model", "model_names",
]


@dataclass(frozen=True)
class Model:
    """A deterministic scalar model on a tensor-product parameter space."""

    name: str
    specs: tuple
    func: Callable[[np.ndarray], np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.specs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x.reshape(-1, self.dim)
        y = np.asarray(self.func(X), dtype=float).reshape(-1)
        return y[0] if single else y


def _cols(x, d):
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X[None, :] if X.size == d else X[:, None]
    if X.shape[-1] != d:
        raise ValueError(f"expected {d} parameters, got {X.shape[-1]}")
    return X.T


# -- 1D functions -------------------------------------------------------------


def runge_f1(z):
    z = np.asarray(z, dtype=float)
    return 1.0 / (1.0 + 101.0 * (z - math.pi / 4) ** 2)


def oscillatory_f2(z):
    z = np.asarray(z, dtype=float)
    return np.cos(1.0 + 100.0 * z**3)


# -- random oscillator --------------------------------------------------------

OSCILLATOR_BOX = {
    "gamma": (0.08, 0.12),
    "k": (0.03, 0.04),
    "f": (0.08, 0.12),
    "omega": (0.8, 1.2),
    "x0": (0.45, 0.55),
    "x1": (-0.05, 0.05),
}


def oscillator(z, T: float = 20.0):
    """Position at time ``T`` of ``x'' + gamma x' + k x = f cos(omega t)``.

    ``z`` columns are ``(gamma, k, f, omega, x0, x1)``.  Only the underdamped
    regime ``gamma**2 < 4 k`` is supported.
    """
    g, k, f, w, x0, x1 = _cols(z, 6)
    if np.any(g * g >= 4 * k):
        raise ValueError("oscillator parameters must be underdamped (gamma^2 < 4k)")
    det = (k - w * w) ** 2 + (g * w) ** 2
    forced = f != 0
    if np.any(forced & (det == 0)):
        raise ValueError("undamped resonance: k == omega^2 with gamma == 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        C = np.where(forced, f * (k - w * w) / det, 0.0)
        D = np.where(forced, f * g * w / det, 0.0)
    wd = np.sqrt(k - g * g / 4)
    A = x0 - C
    B = (x1 + g * A / 2 - D * w) / wd
    return (np.exp(-g * T / 2) * (A * np.cos(wd * T) + B * np.sin(wd * T))
            + C * np.cos(w * T) + D * np.sin(w * T))


# -- borehole -----------------------------------------------------------------

BOREHOLE_BOX = {
    "rw": (0.05, 0.15),
    "r": (100.0, 50000.0),
    "Tu": (63070.0, 115600.0),
    "Hu": (990.0, 1110.0),
    "Tl": (63.1, 116.0),
    "Hl": (700.0, 820.0),
    "L": (1120.0, 1680.0),
    "Kw": (9855.0, 12045.0),
}


def borehole(z):
    """Water flow through a borehole; columns ``(rw, r, Tu, Hu, Tl, Hl, L, Kw)``."""
    rw, r, Tu, Hu, Tl, Hl, L, Kw = _cols(z, 8)
    if np.any(r <= 0) or np.any(rw <= 0):
        raise ValueError("radii must be positive")
    lg = np.log(r / rw)
    return 2 * math.pi * Tu * (Hu - Hl) / (lg * (1 + 2 * L * Tu / (lg * rw**2 * Kw) + Tu / Tl))


# -- resistor ladder ----------------------------------------------------------


def resistor_network(z, V0: float = 1.0):
    """Output voltage of a P-section series/shunt ladder.

    Section ``j`` has series resistor ``R_{2j-1}`` followed by a shunt
    ``R_{2j}`` to ground; the output is the open-circuit voltage across the
    last shunt.  Columns of ``z`` are ``R_1 .. R_{2P}``.
    """
    R = np.asarray(z, dtype=float)
    if R.ndim == 1:
        R = R[None, :]
    if R.shape[1] % 2 or R.shape[1] == 0:
        raise ValueError("need an even, positive number of resistances")
    if np.any(R <= 0):
        raise ValueError("resistances must be positive")
    # Thevenin equivalent seen from each successive shunt node
    V = np.full(R.shape[0], float(V0))
    Rth = np.zeros(R.shape[0])
    for j in range(R.shape[1] // 2):
        Rth = Rth + R[:, 2 * j]
        sh = R[:, 2 * j + 1]
        V = V * sh / (Rth + sh)
        Rth = Rth * sh / (Rth + sh)
    return V


# -- registry -----------------------------------------------------------------


def _box_specs(box):
    return tuple(op.uniform(lo, hi) for lo, hi in box.values())


def _make_f1():
    return Model("f1", (op.uniform(),), lambda X: runge_f1(X[:, 0]))


def _make_f2():
    return Model("f2", (op.uniform(),), lambda X: oscillatory_f2(X[:, 0]))


def _make_oscillator(T: float = 20.0):
    return Model("oscillator", _box_specs(OSCILLATOR_BOX), lambda X: oscillator(X, T))


def _make_borehole():
    return Model("borehole", _box_specs(BOREHOLE_BOX), borehole)


def _make_resistor(P: int = 20, mean: float = 1.0, std: float = 0.005, V0: float = 1.0):
    specs = tuple(op.gaussian(mean, std) for _ in range(2 * P))
    return Model("resistor", specs, lambda X: resistor_network(X, V0))


def _make_quadratic():
    # z1^2 + 3 z2 on the uniform square
    return Model("quadratic", (op.uniform(), op.uniform()), lambda X: X[:, 0] ** 2 + 3 * X[:, 1])


REGISTRY: dict[str, Callable[..., Model]] = {
    "f1": _make_f1,
    "f2": _make_f2,
    "oscillator": _make_oscillator,
    "borehole": _make_borehole,
    "resistor": _make_resistor,
    "quadratic": _make_quadratic,
}


def model_names() -> list[str]:
    return sorted(REGISTRY)


def get_model(name: str, **kwargs) -> Model:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {model_names()}") from None
    return factory(**kwargs)
