"""Entanglement measures and their extensions to mixed states.

Pure states are handled exactly through the Schmidt decomposition. For mixed
states the Schmidt number is decided by the partial-transpose test on the
cuts where that test is conclusive (2x2, 2x3, 3x2), and averaged pure-state
monotones are bounded from above by searching over ensemble decompositions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import BadCut, BadEnsembleSize, BadEpsilon, UnsupportedCut
from .extension import UPPER, ExtensionBound, purified_distance
from .qstate import (
    TOL_PSD,
    PureState,
    _support,
    as_matrix,
    derived_seed,
    haar_isometry,
    partial_trace,
    purify,
    rng_stream,
)

SCHMIDT_CUTOFF = 1e-10
PPT_DECISIVE = {(2, 2), (2, 3), (3, 2)}
# BFGS restarts from the current best decomposition
REFINE_ROUNDS = 3


@dataclass(frozen=True)
class BipartiteCut:
    dim_a: int
    dim_b: int

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @classmethod
    def parse(cls, text: str) -> "BipartiteCut":
        """Read ``"AxB"`` such as ``"2x3"``."""
        m = re.fullmatch(r"\s*(\d+)\s*[xX*]\s*(\d+)\s*", text)
        if not m:
            raise BadCut(f"cut must look like AxB, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    rank: int


def _cut(cut) -> BipartiteCut:
    if isinstance(cut, BipartiteCut):
        return cut
    if isinstance(cut, str):
        return BipartiteCut.parse(cut)
    a, b = cut
    return BipartiteCut(int(a), int(b))


def _vector(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return psi.vector
    return np.asarray(psi, dtype=complex).ravel()


def _check(dim: int, cut: BipartiteCut) -> None:
    if cut.dim_a < 1 or cut.dim_b < 1 or cut.dim != dim:
        raise BadCut(f"cut {cut.dim_a}x{cut.dim_b} does not factor dimension {dim}")


def schmidt_decompose(psi, cut, cutoff: float = SCHMIDT_CUTOFF) -> SchmidtData:
    v = _vector(psi)
    cut = _cut(cut)
    _check(v.size, cut)
    s = np.linalg.svd(v.reshape(cut.dim_a, cut.dim_b), compute_uv=False)
    return SchmidtData(s, int(np.sum(s > cutoff)))


def _entropy_bits(probs: np.ndarray) -> np.ndarray:
    p = np.clip(probs, 0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def entanglement_entropy(psi, cut) -> float:
    """Entropy (bits) of the squared Schmidt coefficients."""
    return float(_entropy_bits(schmidt_decompose(psi, cut).coefficients ** 2))


def schmidt_rank(psi, cut) -> float:
    return float(schmidt_decompose(psi, cut).rank)


def partial_transpose(rho, cut) -> np.ndarray:
    """Transpose the second factor."""
    m = as_matrix(rho)
    cut = _cut(cut)
    _check(m.shape[0], cut)
    a, b = cut.dim_a, cut.dim_b
    return m.reshape(a, b, a, b).transpose(0, 3, 2, 1).reshape(a * b, a * b)


def schmidt_number_ppt(rho, cut) -> int:
    """Schmidt number on cuts where the partial-transpose test is exact.

    Returns 1 when the partial transpose is positive semidefinite (tolerance
    relative to the spectral norm of ``rho``), 2 otherwise. Larger cuts raise
    :class:`UnsupportedCut` instead of returning a bound.
    """
    m = as_matrix(rho)
    cut = _cut(cut)
    _check(m.shape[0], cut)
    if (cut.dim_a, cut.dim_b) not in PPT_DECISIVE:
        raise UnsupportedCut(f"partial transpose is not decisive on a {cut.dim_a}x{cut.dim_b} cut")
    scale = float(np.linalg.eigvalsh(m)[-1])
    lowest = float(np.linalg.eigvalsh(partial_transpose(m, cut))[0])
    return 1 if lowest >= -TOL_PSD * scale else 2


# -- decompositions ---------------------------------------------------------

MONOTONES: dict[str, Callable] = {
    "entropy": entanglement_entropy,
    "schmidt-rank": schmidt_rank,
}


def _monotone(m) -> Callable:
    if callable(m):
        return m
    try:
        return MONOTONES[m]
    except KeyError:
        raise ValueError(f"unknown monotone {m!r}; choose from {sorted(MONOTONES)}") from None


def _average(monotone, mixing, roots, vecs, cut) -> float:
    """``sum_x p_x M(psi_x)`` for the ensemble ``psi~_x = sum_i U_xi sqrt(l_i) e_i``."""
    unnorm = (mixing * roots) @ vecs.T
    weights = np.real(np.sum(unnorm * unnorm.conj(), axis=1))
    keep = weights > 1e-15
    unnorm, weights = unnorm[keep], weights[keep]
    states = unnorm / np.sqrt(weights)[:, None]
    if monotone is entanglement_entropy:
        s = np.linalg.svd(states.reshape(-1, cut.dim_a, cut.dim_b), compute_uv=False)
        values = _entropy_bits(s**2)
    else:
        values = np.array([monotone(psi, cut) for psi in states])
    return float(weights @ values)


def _hermitian(x: np.ndarray, m: int) -> np.ndarray:
    """Hermitian ``m x m`` matrix from ``m*m`` real parameters."""
    iu = np.triu_indices(m, 1)
    n = iu[0].size
    h = np.zeros((m, m), complex)
    h[iu] = x[:n] + 1j * x[n : 2 * n]
    h = h + h.conj().T
    h[np.diag_indices(m)] = x[2 * n :]
    return h


def convex_roof_search(
    monotone, rho, cut, ensemble_size: int | None = None, trials: int = 500, seed=0, refine: int = 300
) -> ExtensionBound:
    """Upper bound on the convex roof of a pure-state monotone.

    Decompositions ``rho = sum_x psi~_x psi~_x^dag`` come from ``m x rank``
    isometries ``U`` applied to the scaled eigenvectors of ``rho``. Each trial
    draws a Haar isometry; the best one is then refined by BFGS over
    ``exp(iH) U`` with ``H`` Hermitian, for at most ``refine`` iterations per
    round.
    """
    f = _monotone(monotone)
    m = as_matrix(rho)
    cut = _cut(cut)
    _check(m.shape[0], cut)
    lam, vecs = _support(m)
    k = lam.size
    size = ensemble_size if ensemble_size is not None else max(k, 2 * k)
    if size < k:
        raise BadEnsembleSize(f"ensemble size {size} is below rank {k}")
    roots = np.sqrt(lam)
    best, best_u, best_i = math.inf, None, -1
    for i in range(trials):
        u = haar_isometry(size, k, rng_stream(seed, i))
        val = _average(f, u, roots, vecs, cut)
        if val < best:
            best, best_u, best_i = val, u, i
    rounds = 0
    while refine and k > 1 and rounds < REFINE_ROUNDS:
        rounds += 1

        def objective(x, u=best_u):
            return _average(f, scipy.linalg.expm(1j * _hermitian(x, size)) @ u, roots, vecs, cut)

        res = scipy.optimize.minimize(objective, np.zeros(size * size), method="BFGS", options={"maxiter": refine})
        if not res.fun < best - 1e-13:
            break
        best, best_u = float(res.fun), scipy.linalg.expm(1j * _hermitian(res.x, size)) @ best_u
    witness = {"trials": trials, "ensemble_size": size, "best_trial": best_i, "refine_rounds": rounds}
    return ExtensionBound(best, UPPER, witness)


def _perturbed(rho: np.ndarray, j: int, seed, scale: float) -> np.ndarray:
    psi = purify(rho).vector
    rng = rng_stream(seed, 1_000_000 + j)
    g = rng.standard_normal(psi.size) + 1j * rng.standard_normal(psi.size)
    phi = psi + scale * g / np.linalg.norm(g)
    phi = phi / np.linalg.norm(phi)
    d = rho.shape[0]
    return partial_trace(np.outer(phi, phi.conj()), [d, d], [0])


def smoothed_extension(
    monotone,
    rho,
    cut,
    epsilon: float,
    trials: int = 200,
    seed=0,
    candidates: int = 24,
    ensemble_size: int | None = None,
) -> ExtensionBound:
    """Convex-roof search minimized over a sampled purified-distance ball.

    Candidate states follow a fixed schedule of perturbed purifications that
    does not depend on ``epsilon``; those within purified distance
    ``epsilon`` are kept, ``rho`` itself always among them. The value is
    therefore non-increasing in ``epsilon`` for a fixed seed.
    """
    if not 0 <= epsilon < 1:
        raise BadEpsilon(f"epsilon must lie in [0, 1), got {epsilon}")
    m = as_matrix(rho)
    cut = _cut(cut)
    _check(m.shape[0], cut)
    scales = np.geomspace(1e-3, 1.0, candidates) if candidates else []
    pool = [(0, m, 0.0)]
    for j, sc in enumerate(scales, start=1):
        cand = _perturbed(m, j, seed, float(sc))
        dist = purified_distance(m, cand)
        if dist <= epsilon:
            pool.append((j, cand, dist))
    best, best_j, best_d = math.inf, 0, 0.0
    for j, cand, dist in pool:
        val = convex_roof_search(monotone, cand, cut, ensemble_size, trials, derived_seed(seed, 2_000_000 + j)).value
        if val < best:
            best, best_j, best_d = val, j, dist
    witness = {"accepted": len(pool), "best_candidate": best_j, "distance": best_d}
    return ExtensionBound(best, UPPER, witness)
