# %% [markdown]
# # Every relative entropy sits between D_min and D_max
#
# Draw random qubit pairs and evaluate the Umegaki entropy along with the
# sandwiched, Petz and geometric Renyi families. Each value lands between
# the min- and max-relative entropies.

# %%
import math

import numpy as np

from resmex import d_max, d_min, renyi, umegaki
from resmex.qstate import random_density

rho = random_density(2, seed=1).matrix
sigma = random_density(2, seed=2).matrix
print(f"D_min = {d_min(rho, sigma):.6f}")
print(f"D_max = {d_max(rho, sigma):.6f}")

# %%
rows = [("umegaki", umegaki(rho, sigma))]
for alpha in (0.5, 0.7, 2.0, 5.0, math.inf):
    rows.append((f"sandwiched {alpha}", renyi("sandwiched", alpha, rho, sigma)))
for alpha in (0.5, 2.0):
    rows.append((f"petz {alpha}", renyi("petz", alpha, rho, sigma)))
    rows.append((f"geometric {alpha}", renyi("geometric", alpha, rho, sigma)))
for name, value in rows:
    print(f"{name:18s} {value:.6f}")

# %% [markdown]
# Sandwiched below Petz below geometric at the same order:

# %%
for alpha in (0.5, 2.0):
    s, p, g = (renyi(v, alpha, rho, sigma) for v in ("sandwiched", "petz", "geometric"))
    print(f"alpha={alpha}: {s:.6f} <= {p:.6f} <= {g:.6f}")

# %% [markdown]
# The same check over many pairs, as a property suite:

# %%
from resmex import SuiteConfig, run_suite

print(run_suite(SuiteConfig("sandwich", trials=200, dims=(2, 3, 4))).summary())
