# %% [markdown]
# # Distances between subnormalized states
#
# A subnormalized state gets the missing weight `1 - Tr` as an extra
# classical flag. The closed forms below match the base measures evaluated
# on those embeddings.

# %%
import numpy as np

from resmex import extension as ex
from resmex.divergence import fidelity, trace_distance
from resmex.qstate import random_density

rho = 0.6 * random_density(3, seed=3).matrix
sigma = 0.9 * random_density(3, seed=4).matrix

for name, closed, base in [
    ("trace distance", ex.generalized_trace_distance, "trace_distance"),
    ("fidelity", ex.generalized_fidelity, "fidelity"),
    ("umegaki", ex.extended_umegaki, "umegaki"),
    ("D_max", ex.extended_d_max, "dmax"),
]:
    print(f"{name:15s} closed {closed(rho, sigma):.9f}   embedded {ex.extend_subnormalized(base, rho, sigma):.9f}")

# %% [markdown]
# The purified distance `sqrt(1 - F^2)` is a metric that upper-bounds the
# generalized trace distance.

# %%
omega = 0.8 * random_density(3, seed=5).matrix
pd = ex.purified_distance
print(f"P(rho, sigma)           = {pd(rho, sigma):.6f}")
print(f"P(rho, omega) + P(omega, sigma) = {pd(rho, omega) + pd(omega, sigma):.6f}")
print(f"generalized trace dist. = {ex.generalized_trace_distance(rho, sigma):.6f}")

# %% [markdown]
# On a normalized pair the closed form agrees with a direct search over
# purifications of `sigma`.

# %%
from resmex.suites import uhlmann_purified_distance

a, b = random_density(2, seed=6).matrix, random_density(2, seed=7).matrix
print(f"closed form {pd(a, b):.9f}   Uhlmann search {uhlmann_purified_distance(a, b, 2000, rng=0):.9f}")
print(f"base measures: T = {trace_distance(a, b):.6f}, F = {fidelity(a, b):.6f}")
