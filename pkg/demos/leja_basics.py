"""Weighted Leja sequences in one dimension.

Builds nested Leja nodes for a few weights, interpolates the Runge-type
function ``f1`` and integrates it with the sequence's quadrature weights.

    python3 demos/leja_basics.py
"""

import numpy as np

from lejagrid import leja1d as lj
from lejagrid import orthopoly as op
from lejagrid.models import runge_f1

for name, spec in [("uniform", op.uniform()), ("gaussian", op.gaussian()),
                   ("laguerre", op.laguerre()), ("freud |z|^4", op.hermite(4))]:
    seq = lj.build_sequence(spec, 6)
    print(f"{name:12s}", np.array2string(seq.nodes, precision=4))

# nested: growing the sequence never moves old nodes
seq = lj.build_sequence(op.uniform(), 65)
x = np.linspace(-1, 1, 2001)
for n in (9, 17, 33, 65):
    s = seq.prefix(n)
    err = np.max(np.abs(s.interpolate(runge_f1(s.nodes), x) - runge_f1(x)))
    w = s.quadrature_weights()
    print(f"N={n:3d}  max error {err:.2e}  quadrature {w @ runge_f1(s.nodes):.12f}"
          f"  kappa {lj.condition_number(w):.3f}")

# reference value of the mean of f1 under the uniform density
ref = np.arctan(np.sqrt(101) * (1 - np.pi / 4)) + np.arctan(np.sqrt(101) * (1 + np.pi / 4))
print("exact mean", ref / (2 * np.sqrt(101)))
