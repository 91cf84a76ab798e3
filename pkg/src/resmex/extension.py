"""Optimal extensions of resource measures to larger domains.

Three families live here:

* closed forms on subnormalized operators, obtained by evaluating a
  divergence on the direct sums ``rho (+) (1 - Tr rho)``;
* classical-to-quantum extensions, bracketed by a measured lower bound and a
  pencil-eigenbasis upper bound;
* finite-n regularization traces ``(1/n) Q(rho^n || sigma^n)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import scipy.optimize

from .divergence import (
    PENCIL,
    _pair,
    REGISTRY,
    bind,
    classical_divergence,
    d_max,
    fidelity,
    measure,
    pencil_weights,
    support_contained,
    trace_distance,
    umegaki,
)
from .errors import BadConfig, BadTrace, DimCap
from .qstate import (
    DIM_CAP,
    TOL_TR,
    PureState,
    _support,
    as_matrix,
    direct_sum_flag,
    haar_isometry,
    rng_stream,
    tensor_power,
)

inf = math.inf

EXACT = "exact"
UPPER = "upper"
LOWER = "lower"

# traces within this of one are treated as exactly normalized
FLAG_FLOOR = 1e-12


@dataclass(frozen=True)
class ExtensionBound:
    """A value together with how it relates to the true extension."""

    value: float
    direction: str
    witness: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.direction not in (EXACT, UPPER, LOWER):
            raise ValueError(f"unknown bound direction {self.direction!r}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class RegularizationTrace:
    ns: tuple
    rates: tuple

    def __post_init__(self):
        ns, rates = tuple(int(n) for n in self.ns), tuple(float(r) for r in self.rates)
        if len(ns) != len(rates):
            raise BadConfig("ns and rates differ in length")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise BadConfig("n must be strictly increasing")
        if not all(math.isfinite(r) for r in rates):
            raise BadConfig("regularized rates must be finite")
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "rates", rates)

    def pairs(self):
        return list(zip(self.ns, self.rates))


# -- subnormalized operators ------------------------------------------------

def _traces(rho, sigma):
    a, b = _pair(rho, sigma)
    ta, tb = float(np.real(np.trace(a))), float(np.real(np.trace(b)))
    for t in (ta, tb):
        if t > 1 + TOL_TR or t < -TOL_TR:
            raise BadTrace(f"trace {t:.12g} outside [0, 1]")
    return a, b, ta, tb


def _flag(t: float) -> float:
    f = 1.0 - t
    return 0.0 if f <= FLAG_FLOOR else f


def embed(m) -> np.ndarray:
    """``m (+) (1 - Tr m)``, a normalized operator of dimension ``dim + 1``."""
    m = as_matrix(m)
    return direct_sum_flag(m, _flag(float(np.real(np.trace(m)))))


def extend_subnormalized(divergence, rho, sigma, alpha=None, epsilon=None) -> float:
    """Maximal extension of a divergence to subnormalized operators.

    ``divergence`` is a registry name or a two-argument callable; it is
    evaluated on the direct-sum embeddings.
    """
    a, b, _, _ = _traces(rho, sigma)
    f = divergence if callable(divergence) else bind(divergence, alpha, epsilon)
    return f(embed(a), embed(b))


def generalized_trace_distance(rho, sigma) -> float:
    a, b, ta, tb = _traces(rho, sigma)
    return trace_distance(a, b) + 0.5 * abs(ta - tb)


def generalized_fidelity(rho, sigma) -> float:
    a, b, ta, tb = _traces(rho, sigma)
    if np.array_equal(a, b):
        # identical inputs: avoid the rounding of the singular-value sum
        return 1.0
    return min(1.0, fidelity(a, b) + math.sqrt(_flag(ta) * _flag(tb)))


def purified_distance(rho, sigma) -> float:
    return math.sqrt(max(0.0, 1.0 - generalized_fidelity(rho, sigma) ** 2))


def extended_umegaki(rho, sigma) -> float:
    a, b, ta, tb = _traces(rho, sigma)
    base = umegaki(a, b)
    if math.isinf(base):
        return inf
    fa, fb = _flag(ta), _flag(tb)
    if fa == 0:
        return base
    if fb == 0:
        return inf
    return base + fa * math.log2(fa / fb)


def extended_d_max(rho, sigma) -> float:
    a, b, ta, tb = _traces(rho, sigma)
    fa, fb = _flag(ta), _flag(tb)
    if fa == 0:
        ratio = -inf
    elif fb == 0:
        return inf
    else:
        ratio = math.log2(fa / fb)
    return max(d_max(a, b), ratio)


CLOSED_FORMS: dict[str, Callable] = {
    "generalized-trace-distance": generalized_trace_distance,
    "generalized-fidelity": generalized_fidelity,
    "purified-distance": purified_distance,
    "extended-umegaki": extended_umegaki,
    "extended-dmax": extended_d_max,
}


# -- classical to quantum ---------------------------------------------------

def _classical(spec):
    """Normalize a classical divergence spec to ``(variant, alpha)``."""
    if isinstance(spec, str):
        return spec, None
    variant, alpha = spec
    return variant, alpha


_RENYI = ("renyi", "petz", "sandwiched", "geometric")


def ansatz_is_exact(spec) -> bool:
    """Whether the pencil ansatz is known to equal the maximal extension."""
    variant, alpha = _classical(spec)
    variant = variant.lower()
    if variant in ("kl", "umegaki", "dmax"):
        return True
    if variant in _RENYI:
        a = float(alpha)
        return 0 < a < 1 or 1 < a <= 2 or a == 1
    return False


def _pure_matrix(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return np.outer(psi.vector, psi.vector.conj())
    arr = np.asarray(psi, dtype=complex)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return as_matrix(arr)


def maximal_classical_extension_pure(classical, psi, sigma) -> ExtensionBound:
    """Maximal extension of a classical divergence at a pure first argument.

    Equals the classical value on ``(1, 0)`` against ``(s, 1 - s)`` with
    ``s = 2^(-D_max(psi || sigma))``; for relative entropies that is
    ``D_max`` itself. A support violation gives ``inf``.
    """
    variant, alpha = _classical(classical)
    p = _pure_matrix(psi)
    dm = d_max(p, sigma)
    if math.isinf(dm):
        return ExtensionBound(inf, EXACT, {"s": 0.0})
    s = min(1.0, 2.0**-dm)
    value = classical_divergence(variant, alpha, [1.0, 0.0], [s, 1.0 - s])
    return ExtensionBound(value, EXACT, {"s": s})


def _clean(p, q):
    p = np.clip(np.asarray(p, float), 0, None)
    q = np.clip(np.asarray(q, float), 0, None)
    p[p < 1e-14] = 0.0
    q[q < 1e-14] = 0.0
    return p, q


def maximal_classical_extension_ansatz(classical, rho, sigma) -> ExtensionBound:
    """Upper bound (exact for Renyi orders in (0, 2]) from the pencil eigenbasis.

    With ``sigma^{-1/2} rho sigma^{-1/2} = sum_x r_x |psi_x><psi_x|`` and
    ``q_x = <psi_x|sigma|psi_x>`` this returns ``D(q*r || q)``.
    """
    variant, alpha = _classical(classical)
    a, b = _pair(rho, sigma)
    if not support_contained(a, b):
        return ExtensionBound(inf, EXACT, {})
    r, p, q = pencil_weights(a, b)
    p, q = _clean(p, q)
    value = classical_divergence(variant, alpha, p, q)
    direction = EXACT if ansatz_is_exact(classical) else UPPER
    return ExtensionBound(value, direction, {"r": r.tolist(), "q": q.tolist()})


def _real_stack(ms):
    return np.concatenate([np.real(ms).reshape(len(ms), -1), np.imag(ms).reshape(len(ms), -1)], axis=1).T


def _search_trial(rng, x, basis, mu, variant, alpha):
    """One random frame; returns the classical value or ``None`` if infeasible."""
    k = x.shape[0]
    if rng.uniform() < 0.5:
        # pure Haar frame with enough effects to span the Hermitian operators
        t = 0.0
        extra = haar_isometry(int(rng.integers(k * k, k * k + k + 1)), k, rng)
    else:
        t = float(rng.uniform(0.0, 1.0))
        extra = haar_isometry(int(rng.integers(k, k * k + 1)), k, rng)
    # both blocks have frame operator I, so the stacked rows form a rank-one POVM
    frame = np.vstack([math.sqrt(t) * basis.conj().T, math.sqrt(1 - t) * extra])
    effects = np.einsum("xi,xj->xij", frame.conj(), frame)
    target = np.concatenate([np.real(x).ravel(), np.imag(x).ravel()])
    r, resid = scipy.optimize.nnls(_real_stack(effects), target)
    if resid > 1e-10 * max(np.linalg.norm(x), 1e-300):
        return None
    q = np.real(np.einsum("xi,i,xi->x", frame.conj(), mu, frame))
    p, q = _clean(q * r, q)
    return classical_divergence(variant, alpha, p, q)


def maximal_classical_extension_search(
    classical, rho, sigma, trials: int = 200, seed=0, workers: int | None = None
) -> ExtensionBound:
    """Randomized search over feasible points of the maximal extension.

    A feasible point is a rank-one POVM ``{E_x}`` on ``supp(sigma)`` and
    weights ``r >= 0`` with ``sum_x r_x E_x = sigma^{-1/2} rho sigma^{-1/2}``.
    Frames mix the pencil eigenbasis with a Haar-random tight frame, ``r``
    is solved by nonnegative least squares, and only exact solutions are
    kept. The result is the minimum of these values and the ansatz.
    """
    variant, alpha = _classical(classical)
    a, b = _pair(rho, sigma)
    base = maximal_classical_extension_ansatz(classical, a, b)
    if math.isinf(base.value):
        return ExtensionBound(inf, UPPER, {"feasible": 0, "trials": trials})
    ws, vs = _support(b)
    s = vs / np.sqrt(ws)
    x = s.conj().T @ a @ s
    _, basis = np.linalg.eigh(x)

    def run(i):
        return _search_trial(rng_stream(seed, i), x, basis, ws, variant, alpha)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(run, range(trials)))
    else:
        values = [run(i) for i in range(trials)]
    feasible = [v for v in values if v is not None]
    best = min(feasible, default=inf)
    witness = {
        "ansatz": base.value,
        "feasible": len(feasible),
        "trials": trials,
        "best_search": best,
        "improved": bool(best < base.value - 1e-12),
    }
    return ExtensionBound(min(base.value, best), UPPER, witness)


def minimal_classical_extension_lower(classical, rho, sigma, strategy=PENCIL) -> ExtensionBound:
    """Measured lower bound on the minimal extension; the witness holds the POVM."""
    variant, alpha = _classical(classical)
    value, povm = measure(variant, alpha, rho, sigma, strategy)
    return ExtensionBound(value, LOWER, {"povm": povm, "outcomes": len(povm.effects)})


# -- regularization ---------------------------------------------------------

def _quantity(quantity, alpha, epsilon, classical) -> Callable:
    if callable(quantity):
        return quantity
    if quantity in REGISTRY:
        return bind(quantity, alpha, epsilon)
    if quantity == "measured":
        spec = classical or ("renyi", alpha)
        return lambda r, s: minimal_classical_extension_lower(spec, r, s).value
    if quantity == "ansatz":
        spec = classical or ("renyi", alpha)
        return lambda r, s: maximal_classical_extension_ansatz(spec, r, s).value
    raise BadConfig(f"unknown quantity {quantity!r}")


def regularized_rate(
    quantity, rho, sigma, n_max: int, alpha=None, epsilon=None, classical=None, cap: int = DIM_CAP
) -> RegularizationTrace:
    """``(n, Q(rho^n || sigma^n) / n)`` for ``n = 1 .. n_max``."""
    a, b = _pair(rho, sigma)
    if n_max < 1:
        raise BadConfig("n_max must be at least 1")
    if a.shape[0] ** n_max > cap:
        raise DimCap(f"dimension {a.shape[0]}^{n_max} exceeds cap {cap}")
    f = _quantity(quantity, alpha, epsilon, classical)
    ns, rates = [], []
    for n in range(1, n_max + 1):
        ns.append(n)
        rates.append(f(tensor_power(a, n, cap), tensor_power(b, n, cap)) / n)
    return RegularizationTrace(tuple(ns), tuple(rates))


def describe(bound: ExtensionBound) -> dict[str, Any]:
    """JSON-friendly view of a bound (POVM witnesses reduced to their size)."""
    wit = {}
    for k, v in bound.witness.items():
        if k == "povm":
            continue
        wit[k] = v
    return {"value": bound.value, "direction": bound.direction, "witness": wit}
