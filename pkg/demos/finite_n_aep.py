# %% [markdown]
# # Information spectrum at finite blocklength
#
# For `rho = diag(.9, .1)` and `sigma = diag(.5, .5)` the rate
# `D_s^eps(rho^n || sigma^n) / n` approaches the relative entropy as `n`
# grows. The D_max rate stays above it.

# %%
import numpy as np

from resmex import regularized_rate, umegaki

rho, sigma = np.diag([0.9, 0.1]), np.diag([0.5, 0.5])
truth = umegaki(rho, sigma)
spectrum = regularized_rate("ds", rho, sigma, 10, epsilon=0.05)
dmax = regularized_rate("dmax", rho, sigma, 10)

print(f"D(rho||sigma) = {truth:.6f}")
print(" n   D_s rate    gap      D_max rate")
for (n, rate), (_, top) in zip(spectrum.pairs(), dmax.pairs()):
    print(f"{n:2d}  {rate:9.6f}  {abs(rate - truth):8.6f}  {top:9.6f}")

# %% [markdown]
# The hypothesis-testing divergence brackets the same quantity.

# %%
hyp = regularized_rate("dh", rho, sigma, 10, epsilon=0.05)
for (n, h), (_, s) in zip(hyp.pairs(), spectrum.pairs()):
    print(f"{n:2d}  D_s {s:8.5f} <= D_h {h:8.5f}")
