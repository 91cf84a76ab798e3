# %% [markdown]
# # Schmidt number from the partial transpose
#
# On 2x2 and 2x3 cuts a state has Schmidt number 1 exactly when its partial
# transpose is positive. For the Werner family
# `p |Phi+><Phi+| + (1 - p) I/4` the smallest partial-transpose eigenvalue
# is `(1 - 3p)/4`, so the number flips at `p = 1/3`.

# %%
import numpy as np

from resmex import convex_roof_search, schmidt_number_ppt
from resmex.entangle import partial_transpose

phi = np.array([1, 0, 0, 1]) / np.sqrt(2)


def werner(p):
    return p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4


for p in (0.2, 1 / 3 - 1e-9, 1 / 3 + 1e-9, 0.6):
    low = np.linalg.eigvalsh(partial_transpose(werner(p), "2x2"))[0]
    print(f"p={p:.10f}  min eig {low:+.3e}  Schmidt number {schmidt_number_ppt(werner(p), '2x2')}")

# %% [markdown]
# Entanglement of formation through a convex-roof search, compared with the
# two-qubit concurrence formula.

# %%
def concurrence_formula(rho):
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    ev = np.sort(np.sqrt(np.clip(np.linalg.eigvals(rho @ yy @ rho.conj() @ yy).real, 0, None)))[::-1]
    c = max(0.0, ev[0] - ev[1] - ev[2] - ev[3])
    x = (1 + np.sqrt(1 - c * c)) / 2
    return 0.0 if c == 0 else float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


for p in (0.5, 0.8):
    bound = convex_roof_search("entropy", werner(p), "2x2", trials=100, seed=0)
    print(f"p={p}: search {bound.value:.8f}  formula {concurrence_formula(werner(p)):.8f}")
