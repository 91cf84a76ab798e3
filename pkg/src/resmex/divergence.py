"""Quantum and classical divergences, all in log base 2.

Values are plain floats on the extended half-line: ``math.inf`` marks a
support violation (or orthogonality, where that is the convention). Inputs
may be :class:`~resmex.qstate.DensityState` objects or raw arrays; the
formulas are evaluated as written, so subnormalized operators are accepted
wherever the extension module needs them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    AlphaOutOfRange,
    BadEpsilon,
    DimMismatch,
    IndeterminateValue,
    SupportViolation,
)
from .qstate import (
    SUPPORT_CUTOFF,
    Povm,
    _heig,
    _projector,
    _same_dim,
    _support,
    as_matrix,
    haar_unitary,
    matrix_power_on_support,
)

inf = math.inf

TOL_DIV = 1e-8
CONTAINMENT_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-9
# probabilities below this are read as exact zeros after a measurement
PROB_FLOOR = 1e-14
# offset (in log2 units) below the information-spectrum threshold for the
# smoothed D_min construction
SMOOTHING_DELTA = 1e-9
FIDELITY_CUTOFF = 1e-14


def ext_sub(a: float, b: float) -> float:
    """``a - b`` on the extended reals; ``inf - inf`` is an error."""
    if math.isinf(a) and math.isinf(b) and (a > 0) == (b > 0):
        raise IndeterminateValue("inf - inf is undefined")
    return a - b


def _pair(rho, sigma):
    a, b = as_matrix(rho), as_matrix(sigma)
    _same_dim(a, b)
    return a, b


def _max_abs_eig(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    w = np.linalg.eigvalsh(m)
    return float(max(abs(w[0]), abs(w[-1])))


def support_contained(rho, sigma, tol: float = CONTAINMENT_TOL) -> bool:
    """Whether ``supp(rho)`` lies inside ``supp(sigma)``.

    Tested as ``||(I - P) rho (I - P)||_inf <= tol`` with ``P`` the support
    projector of ``sigma``. Borderline cases count as violations.
    """
    a, b = _pair(rho, sigma)
    _, v = _support(b)
    comp = np.eye(a.shape[0]) - _projector(v)
    return _max_abs_eig(comp @ a @ comp) <= tol


def support_overlap(rho, sigma) -> float:
    """``Tr[P_rho sigma]``, the quantity behind ``d_min``."""
    a, b = _pair(rho, sigma)
    _, u = _support(a)
    return float(np.real(np.trace(u.conj().T @ b @ u)))


def orthogonal(rho, sigma, tol: float = ORTHOGONALITY_TOL) -> bool:
    a, b = _pair(rho, sigma)
    _, u = _support(a)
    _, v = _support(b)
    return float(np.sum(np.abs(u.conj().T @ v) ** 2)) <= tol


def _ordered(a, b):
    """Fixed argument order so symmetric quantities agree bitwise under swapping."""
    return (b, a) if a.tobytes() > b.tobytes() else (a, b)


def trace_distance(rho, sigma) -> float:
    a, b = _ordered(*_pair(rho, sigma))
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def fidelity(rho, sigma) -> float:
    """Root fidelity ``||sqrt(rho) sqrt(sigma)||_1``."""
    a, b = _ordered(*_pair(rho, sigma))
    # eigenvalues at rounding level are dropped before the square root
    ra = matrix_power_on_support(a, 0.5, cutoff=FIDELITY_CUTOFF)
    rb = matrix_power_on_support(b, 0.5, cutoff=FIDELITY_CUTOFF)
    return float(np.sum(np.linalg.svd(ra @ rb, compute_uv=False)))


def umegaki(rho, sigma, cutoff: float = SUPPORT_CUTOFF) -> float:
    """``Tr[rho log rho] - Tr[rho log sigma]`` evaluated on supports."""
    a, b = _pair(rho, sigma)
    if not support_contained(a, b):
        return inf
    wr, _ = _support(a, cutoff)
    ws, vs = _support(b, cutoff)
    if wr.size == 0:
        return 0.0
    diag = np.real(np.einsum("ij,ik,kj->j", vs.conj(), a, vs))
    return float(np.sum(wr * np.log2(wr)) - np.sum(np.log2(ws) * diag))


def d_min(rho, sigma) -> float:
    """``-log Tr[P_rho sigma]``; infinite once the overlap is at most 1e-9."""
    overlap = support_overlap(rho, sigma)
    if overlap <= ORTHOGONALITY_TOL:
        return inf
    return -math.log2(overlap)


def d_max(rho, sigma) -> float:
    """``log min{t : t sigma >= rho}``; subnormalized operators allowed."""
    a, b = _pair(rho, sigma)
    if not support_contained(a, b):
        return inf
    ws, vs = _support(b)
    if ws.size == 0:
        return -inf
    s = vs / np.sqrt(ws)
    top = np.linalg.eigvalsh(s.conj().T @ a @ s)[-1]
    if top <= 0:
        return -inf
    return math.log2(top)


def pencil(rho, sigma):
    """Eigenstructure of ``sigma^{-1/2} rho sigma^{-1/2}`` on ``supp(sigma)``.

    Returns ``(r, vecs, q)``: eigenvalues (ascending, clipped at zero), the
    corresponding eigenvectors in the ambient space, and ``q_x =
    <psi_x|sigma|psi_x>``.
    """
    a, b = _pair(rho, sigma)
    ws, vs = _support(b)
    s = vs / np.sqrt(ws)
    r, w = _heig(s.conj().T @ a @ s)
    q = ws @ np.abs(w) ** 2
    return np.clip(r, 0, None), vs @ w, q


def pencil_weights(rho, sigma):
    """Nonzero pencil eigenvalues ``r`` with weights ``p = q r`` and ``q``.

    Computed on ``supp(rho)`` from ``sqrt(L) U^dag sigma^{-1} U sqrt(L)``
    (``rho = U L U^dag``), which avoids the noisy zero eigenvalues of the
    full pencil when ``rho`` is rank deficient. The mass of ``sigma`` outside
    those directions is lumped into one final outcome with ``r = 0``.
    Assumes ``supp(rho)`` lies inside ``supp(sigma)``.
    """
    a, b = _pair(rho, sigma)
    wr, ur = _support(a)
    ws, vs = _support(b)
    if wr.size == 0:
        total = float(np.sum(ws))
        return np.zeros(1), np.zeros(1), np.array([total])
    t = (vs.conj().T @ ur) * np.sqrt(wr)
    r, w = _heig(t.conj().T @ (t / ws[:, None]))
    p = wr @ np.abs(w) ** 2
    q = p / r
    rest = float(np.sum(ws)) - float(np.sum(q))
    if rest > 1e-14 * float(np.sum(ws)):
        r, p, q = np.append(r, 0.0), np.append(p, 0.0), np.append(q, rest)
    return r, p, q


def _check_alpha(variant: str, alpha: float) -> None:
    ok = {
        "petz": 0 < alpha < 1 or 1 < alpha <= 2,
        "sandwiched": 0 <= alpha < 1 or alpha > 1,
        "geometric": 0 < alpha < 1 or 1 < alpha <= 2,
    }[variant]
    if not ok:
        raise AlphaOutOfRange(f"alpha={alpha} outside the validity window of {variant}")


def _petz(a, b, alpha):
    if alpha > 1 and not support_contained(a, b):
        return inf
    if alpha < 1 and orthogonal(a, b):
        return inf
    wr, ur = _support(a)
    ws, vs = _support(b)
    overlap = np.abs(ur.conj().T @ vs) ** 2
    q = float(wr**alpha @ overlap @ ws ** (1 - alpha))
    return math.log2(q) / (alpha - 1)


def _sandwiched(a, b, alpha):
    if alpha > 1:
        if not support_contained(a, b):
            return inf
    elif orthogonal(a, b):
        return inf
    if alpha >= 0.5:
        s = matrix_power_on_support(b, (1 - alpha) / (2 * alpha))
        w = np.linalg.eigvalsh(s @ a @ s)
        q = float(np.sum(np.clip(w, 0, None) ** alpha))
    else:
        r = matrix_power_on_support(a, alpha / (2 * (1 - alpha)))
        w = np.linalg.eigvalsh(r @ b @ r)
        q = float(np.sum(np.clip(w, 0, None) ** (1 - alpha)))
    return math.log2(q) / (alpha - 1)


def _geometric(a, b, alpha):
    if not support_contained(a, b):
        return inf
    r, p, _ = pencil_weights(a, b)
    keep = p > 0
    total = float(np.sum(p[keep] * r[keep] ** (alpha - 1)))
    if total <= 0:
        return inf
    return math.log2(total) / (alpha - 1)


def renyi(variant: str, alpha: float, rho, sigma) -> float:
    """Quantum Renyi divergence of order ``alpha``.

    ``variant`` is ``"petz"``, ``"sandwiched"`` or ``"geometric"``.
    ``alpha = 1`` routes to :func:`umegaki` (rejected for geometric);
    sandwiched ``alpha = inf`` is :func:`d_max` and ``alpha = 1/2`` is
    ``-2 log F``. Below ``1/2`` the sandwiched branch uses the
    argument-swapped closed form.
    """
    a, b = _pair(rho, sigma)
    variant = variant.lower()
    if variant not in ("petz", "sandwiched", "geometric"):
        raise ValueError(f"unknown Renyi variant {variant!r}")
    alpha = float(alpha)
    if alpha == 1:
        if variant == "geometric":
            raise AlphaOutOfRange("geometric Renyi divergence is not defined at alpha=1 here")
        return umegaki(a, b)
    if variant == "sandwiched" and math.isinf(alpha) and alpha > 0:
        return d_max(a, b)
    _check_alpha(variant, alpha)
    if variant == "petz":
        return _petz(a, b, alpha)
    if variant == "geometric":
        return _geometric(a, b, alpha)
    if alpha == 0.5:
        if orthogonal(a, b):
            return inf
        return -2 * math.log2(fidelity(a, b))
    return _sandwiched(a, b, alpha)


# -- classical --------------------------------------------------------------

_CLASSICAL_RENYI = ("renyi", "petz", "sandwiched", "geometric")


def _probs(p) -> np.ndarray:
    probs = getattr(p, "probs", p)
    return np.asarray(probs, dtype=float).ravel()


def classical_renyi(alpha: float, p, q) -> float:
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise DimMismatch(f"dimension mismatch: {p.size} vs {q.size}")
    alpha = float(alpha)
    pos = p > 0
    if alpha == 1:
        if np.any(pos & (q <= 0)):
            return inf
        return float(np.sum(p[pos] * np.log2(p[pos] / q[pos])))
    if math.isinf(alpha):
        if np.any(pos & (q <= 0)):
            return inf
        return math.log2(float(np.max(p[pos] / q[pos])))
    if alpha > 1:
        if np.any(pos & (q <= 0)):
            return inf
        total = float(np.sum(p[pos] ** alpha * q[pos] ** (1 - alpha)))
    else:
        both = pos & (q > 0)
        total = float(np.sum(p[both] ** alpha * q[both] ** (1 - alpha)))
        if total <= 0:
            return inf
    return math.log2(total) / (alpha - 1)


def classical_divergence(variant: str, alpha, p, q) -> float:
    """Classical counterpart of a named divergence on probability vectors.

    Renyi-type variants (``renyi``, ``petz``, ``sandwiched``, ``geometric``)
    all reduce to the classical Renyi divergence; ``kl``/``umegaki`` is
    Kullback-Leibler. Zero entries follow ``0 log 0 = 0``.
    """
    variant = variant.lower()
    pv, qv = _probs(p), _probs(q)
    if pv.shape != qv.shape:
        raise DimMismatch(f"dimension mismatch: {pv.size} vs {qv.size}")
    if variant in ("kl", "umegaki"):
        return classical_renyi(1.0, pv, qv)
    if variant in _CLASSICAL_RENYI:
        return classical_renyi(alpha, pv, qv)
    if variant == "dmin":
        s = float(np.sum(qv[pv > 0]))
        return inf if s <= 0 else -math.log2(s)
    if variant == "dmax":
        return classical_renyi(inf, pv, qv)
    if variant == "trace_distance":
        return 0.5 * float(np.sum(np.abs(pv - qv)))
    if variant == "fidelity":
        return float(np.sum(np.sqrt(pv * qv)))
    raise ValueError(f"unknown classical divergence {variant!r}")


# -- measured divergences ---------------------------------------------------

@dataclass(frozen=True)
class RandomProjective:
    """Best of ``trials`` Haar-random projective measurements."""

    trials: int
    seed: int | None = None


PENCIL = "pencil_eigenbasis"


def _outcomes(povm: Povm, a, b):
    p = povm.probabilities(a)
    q = povm.probabilities(b)
    p[np.abs(p) < PROB_FLOOR] = 0.0
    q[np.abs(q) < PROB_FLOOR] = 0.0
    return np.clip(p, 0, None), np.clip(q, 0, None)


def pencil_povm(rho, sigma) -> Povm:
    """Projective measurement in the pencil eigenbasis, plus ``I - P_sigma``."""
    a, b = _pair(rho, sigma)
    _, vecs, _ = pencil(a, b)
    effects = [np.outer(v, v.conj()) for v in vecs.T]
    rest = np.eye(a.shape[0]) - _projector(vecs)
    if vecs.shape[1] < a.shape[0]:
        effects.append(rest)
    return Povm(tuple(effects))


def measure(variant: str, alpha, rho, sigma, strategy=PENCIL):
    """Like :func:`measured_divergence` but also returns the POVM used."""
    a, b = _pair(rho, sigma)
    if isinstance(strategy, Povm):
        if strategy.dim != a.shape[0]:
            raise DimMismatch(f"POVM dim {strategy.dim} vs state dim {a.shape[0]}")
        povms = [strategy]
    elif isinstance(strategy, RandomProjective):
        rng = np.random.default_rng(strategy.seed)
        povms = []
        for _ in range(strategy.trials):
            u = haar_unitary(a.shape[0], rng)
            povms.append(Povm(tuple(np.outer(c, c.conj()) for c in u.T)))
    elif strategy in (PENCIL, "pencil"):
        povms = [pencil_povm(a, b)]
    else:
        raise ValueError(f"unknown measurement strategy {strategy!r}")
    best, witness = -inf, None
    for povm in povms:
        val = classical_divergence(variant, alpha, *_outcomes(povm, a, b))
        if val > best:
            best, witness = val, povm
    return best, witness


def measured_divergence(variant: str, alpha, rho, sigma, strategy=PENCIL) -> float:
    """Classical divergence of the outcome statistics of a measurement.

    ``strategy`` is ``"pencil_eigenbasis"``, a :class:`RandomProjective`
    (best of several Haar bases) or an explicit :class:`~resmex.qstate.Povm`.
    Any single measurement is feasible for the supremum defining the minimal
    quantum extension, so the result is a lower bound on it.
    """
    return measure(variant, alpha, rho, sigma, strategy)[0]


# -- one-shot quantities ----------------------------------------------------

def _check_epsilon(eps: float) -> None:
    if not 0 < eps < 1:
        raise BadEpsilon(f"epsilon must lie in (0, 1), got {eps}")


def pencil_breakpoints(rho, sigma) -> np.ndarray:
    """Sorted distinct finite positive roots ``t`` of ``det(rho - t sigma)``."""
    a, b = _pair(rho, sigma)
    ab = scipy.linalg.eigvals(a, b, homogeneous_eigvals=True)
    num, den = ab[0], ab[1]
    scale = max(np.max(np.abs(num)), np.max(np.abs(den)), 1e-300)
    ok = np.abs(den) > 1e-12 * scale
    t = num[ok] / den[ok]
    t = np.real(t[np.abs(t.imag) <= 1e-9 * np.maximum(1.0, np.abs(t.real))])
    t = np.sort(t[t > 0])
    if t.size == 0:
        return t
    keep = np.concatenate([[True], np.diff(t) > 1e-12 * t[1:]])
    return t[keep]


class _Spectrum:
    """Eigen-split of ``rho - t sigma`` into positive, zero and negative parts."""

    def __init__(self, a, b, t):
        m = a - t * b
        w, v = _heig(m)
        tol = 1e-13 * max(np.max(np.abs(a)), t * np.max(np.abs(b)), 1e-300)
        self.pos = v[:, w > tol]
        self.zero = v[:, np.abs(w) <= tol]
        self.a = a
        self.b = b

    def weight(self, vecs, op) -> float:
        return float(np.real(np.einsum("ij,ik,kj->", vecs.conj(), op, vecs)))

    @property
    def rho_gt(self) -> float:
        return self.weight(self.pos, self.a)

    @property
    def rho_zero(self) -> float:
        return self.weight(self.zero, self.a)


def _first_true(xs, pred) -> int:
    """Smallest index with ``pred`` true for a monotone predicate, else len."""
    lo, hi = 0, len(xs)
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(xs[mid]):
            hi = mid
        else:
            lo = mid + 1
    return lo


def d_s_epsilon(rho, sigma, eps: float) -> float:
    """Information-spectrum divergence ``sup{R : Tr(rho {rho <= 2^R sigma}) <= eps}``.

    ``t -> Tr(rho {rho <= t sigma})`` is nondecreasing, jumping only at the
    pencil breakpoints, so the supremum is located among the breakpoints and
    refined by bisection when it falls strictly between two of them.
    """
    _check_epsilon(eps)
    a, b = _pair(rho, sigma)
    total = float(np.real(np.trace(a)))

    def tail(t):
        return total - _Spectrum(a, b, t).rho_gt

    bps = list(pencil_breakpoints(a, b))
    k = _first_true(bps, lambda t: tail(t) > eps)
    if k == len(bps):
        top = bps[-1] if bps else 1.0
        big = top * 1e8
        if tail(big) <= eps:
            return inf
        lo, hi = top, big
    else:
        hi = bps[k]
        lo = bps[k - 1] if k > 0 else hi * 2.0**-40
        just_below = hi * (1 - 1e-9)
        if tail(just_below) <= eps:
            return math.log2(hi)
        hi = just_below
    llo, lhi = math.log2(lo), math.log2(hi)
    for _ in range(200):
        if lhi - llo < 1e-12:
            break
        mid = 0.5 * (llo + lhi)
        if tail(2.0**mid) <= eps:
            llo = mid
        else:
            lhi = mid
    return 0.5 * (llo + lhi)


def optimal_test(rho, sigma, eps: float) -> np.ndarray:
    """Neyman-Pearson test minimizing ``Tr[sigma T]`` subject to ``Tr[rho T] >= 1 - eps``.

    ``T = {rho > t sigma} + w P_0`` with ``P_0`` the null space of
    ``rho - t sigma`` and ``w`` fixing the type-I constraint with equality.
    """
    _check_epsilon(eps)
    a, b = _pair(rho, sigma)
    target = 1.0 - eps
    d = a.shape[0]
    _, vs = _support(b)
    comp = np.eye(d) - _projector(vs)
    if np.real(np.trace(comp @ a)) >= target:
        return comp

    bps = list(pencil_breakpoints(a, b))
    k = _first_true(bps, lambda t: _Spectrum(a, b, t).rho_gt <= target)
    if k < len(bps):
        spec = _Spectrum(a, b, bps[k])
        if spec.rho_gt + spec.rho_zero >= target:
            return _mix(spec, target)
        lo, hi = (bps[k - 1] if k > 0 else 0.0), bps[k]
    else:
        lo = bps[-1] if bps else 0.0
        hi = max(2 * lo, 1.0)
        for _ in range(200):
            if _Spectrum(a, b, hi).rho_gt <= target:
                break
            lo, hi = hi, 2 * hi
    for _ in range(200):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if _Spectrum(a, b, mid).rho_gt >= target:
            lo = mid
        else:
            hi = mid
    return _mix(_Spectrum(a, b, lo), target)


def _mix(spec: _Spectrum, target: float) -> np.ndarray:
    test = _projector(spec.pos)
    gt, zero = spec.rho_gt, spec.rho_zero
    if zero > 0 and gt < target:
        # uniform weight over the null space
        test = test + min(1.0, (target - gt) / zero) * _projector(spec.zero)
    return test


def d_h_epsilon(rho, sigma, eps: float) -> float:
    """Hypothesis-testing divergence ``-log min{Tr[sigma T] : Tr[rho T] >= 1 - eps}``."""
    a, b = _pair(rho, sigma)
    test = optimal_test(a, b, eps)
    beta = float(np.real(np.vdot(test, b)))
    if beta <= 0:
        return inf
    return -math.log2(beta)


def d_min_epsilon_lower(rho, sigma, eps: float, return_projector: bool = False):
    """Certified lower bound on the epsilon-smoothed ``D_min``.

    Uses the projector ``P = {rho > 2^(lambda - delta) sigma}`` at
    ``lambda = d_s_epsilon(rho, sigma, eps**2 / 2)``; the normalized
    ``P rho P`` lies in the epsilon trace-distance ball around ``rho`` by the
    gentle-measurement bound, so ``-log Tr[P sigma]`` is attained inside it.
    """
    _check_epsilon(eps)
    a, b = _pair(rho, sigma)
    if not support_contained(a, b):
        raise SupportViolation("smoothed D_min bound needs supp(rho) inside supp(sigma)")
    lam = d_s_epsilon(a, b, eps**2 / 2)
    proj = _projector(_Spectrum(a, b, 2.0 ** (lam - SMOOTHING_DELTA)).pos)
    beta = float(np.real(np.vdot(proj, b)))
    value = inf if beta <= 0 else -math.log2(beta)
    return (value, proj) if return_projector else value


# -- registry ---------------------------------------------------------------

@dataclass(frozen=True)
class DivergenceSpec:
    """Registry entry describing how to evaluate a named divergence."""

    name: str
    func: Callable
    needs_alpha: bool = False
    needs_epsilon: bool = False
    relative_entropy: bool = False
    reverse: bool = False  # fidelity-like: grows under processing
    classical: str | None = None


def _alpha_call(variant):
    def f(rho, sigma, alpha):
        return renyi(variant, alpha, rho, sigma)

    return f


REGISTRY: dict[str, DivergenceSpec] = {
    s.name: s
    for s in [
        DivergenceSpec("umegaki", umegaki, relative_entropy=True, classical="kl"),
        DivergenceSpec("dmin", d_min, relative_entropy=True, classical="dmin"),
        DivergenceSpec("dmax", d_max, relative_entropy=True, classical="dmax"),
        DivergenceSpec("petz", _alpha_call("petz"), needs_alpha=True, relative_entropy=True, classical="renyi"),
        DivergenceSpec("sandwiched", _alpha_call("sandwiched"), needs_alpha=True, relative_entropy=True, classical="renyi"),
        DivergenceSpec("geometric", _alpha_call("geometric"), needs_alpha=True, relative_entropy=True, classical="renyi"),
        DivergenceSpec("trace_distance", trace_distance, classical="trace_distance"),
        DivergenceSpec("fidelity", fidelity, reverse=True, classical="fidelity"),
        DivergenceSpec("ds", d_s_epsilon, needs_epsilon=True),
        DivergenceSpec("dh", d_h_epsilon, needs_epsilon=True),
        DivergenceSpec("dmin_eps", d_min_epsilon_lower, needs_epsilon=True),
    ]
}


def compute(name: str, rho, sigma, alpha=None, epsilon=None) -> float:
    """Evaluate a registered divergence by name."""
    try:
        spec = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown divergence {name!r}; choose from {sorted(REGISTRY)}") from None
    if spec.needs_alpha:
        if alpha is None:
            raise AlphaOutOfRange(f"{name} needs an alpha")
        return spec.func(rho, sigma, alpha)
    if spec.needs_epsilon:
        if epsilon is None:
            raise BadEpsilon(f"{name} needs an epsilon")
        return spec.func(rho, sigma, epsilon)
    return spec.func(rho, sigma)


def bind(name: str, alpha=None, epsilon=None) -> Callable:
    """Two-argument callable for a registered divergence."""
    def f(rho, sigma):
        return compute(name, rho, sigma, alpha=alpha, epsilon=epsilon)

    f.__name__ = name if alpha is None else f"{name}[{alpha}]"
    return f
