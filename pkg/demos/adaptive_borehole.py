"""Dimension-adaptive interpolation of the borehole model.

Runs Leja and Clenshaw-Curtis adaptive grids with the same budget, prints the
RMSE trace and which input directions got refined, then saves and reloads the
Leja surrogate.

    python3 demos/adaptive_borehole.py
"""

import tempfile
from pathlib import Path

import numpy as np

from lejagrid import adaptive as ad
from lejagrid import metrics as mt
from lejagrid.models import BOREHOLE_BOX, get_model
from lejagrid.sparsegrid import SparseGrid

model = get_model("borehole")
X = mt.sample_inputs(model.specs, 20_000, seed=0)
y = model(X)

for rule in ("leja", "cc"):
    res = ad.run_adaptive(model, ad.AdaptiveConfig(budget=1000, rule=rule), validation=(X, y))
    print(f"{rule}: {res.grid.n_evaluations} evaluations, {len(res.order)} subspaces")
    for row in res.log[:: max(1, len(res.log) // 6)] + res.log[-1:]:
        print(f"  N={row.evaluations:5d}  rmse {row.rmse:.3e}  mean {row.mean:.6f}")
    if rule == "leja":
        leja = res

depth = np.max(np.array(leja.order), axis=0)
print("deepest level per input:", dict(zip(BOREHOLE_BOX, depth.tolist())))

path = Path(tempfile.mkdtemp()) / "borehole.json"
path.write_text(leja.grid.to_json())
back = SparseGrid.from_json(path.read_text())
print("reloaded surrogate matches:", np.array_equal(back(X[:100]), leja.grid(X[:100])))
