"""Comparison of estimation strategies across system sizes.

Columns: the explicit ensemble's worst-case sharpness, the tree-mapping
qubit parent, the shadow-derived compatibility threshold, and the spectral
upper bound.  The construction tracks the square-root law while the qubit
route decays linearly, which is the whole point.
"""

from majorana_jm.baselines import comparison_rows
from majorana_jm.io import comparison_csv

for half_degree in (1, 2):
    rows = comparison_rows(range(2, 13), half_degree, construction_seed=7)
    print(f"degree-{2 * half_degree} observables:")
    print(comparison_csv(rows))
