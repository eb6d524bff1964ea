"""How contracted Leja nodes fill out their equilibrium law.

For each family the first N nodes are scaled by the contraction factor and
compared with the limit law through the Kolmogorov distance.  The normalized
Vandermonde determinant ratio is printed next to it.

    python3 demos/node_distribution.py
"""

from lejagrid import orthopoly as op
from lejagrid.studies import verify_distribution

ladder = (25, 50, 100, 200)
for name, spec in [("jacobi(0,0)", op.uniform()), ("jacobi(1,2)", op.jacobi(1, 2)),
                   ("hermite a=2", op.hermite()), ("hermite a=4", op.hermite(4)),
                   ("laguerre", op.laguerre())]:
    print(name)
    for row in verify_distribution(spec, ladder):
        print(f"  N={row.N:4d}  KS {row.kolmogorov_distance:.4f}  det ratio {row.fekete_ratio:.4f}")
