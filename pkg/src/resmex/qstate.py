"""Linear-algebra substrate: states, channels, POVMs, random ensembles.

Every function here is pure. Matrices are plain ``numpy`` arrays; the small
dataclasses below attach the metadata (trace class, channel kind) that the
divergence and extension code needs, and accept arrays wherever a state is
expected so that interactive use stays lightweight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    BadPovm,
    BadShape,
    BadTrace,
    DimCap,
    DimMismatch,
    NotHermitian,
    NotPositive,
    ZeroState,
)

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_TR = 1e-9
TOL_TP = 1e-8
TOL_RECON = 1e-10
SUPPORT_CUTOFF = 1e-10
DIM_CAP = 4096

# largest eigenvalue at or below this is treated as the zero operator
_ZERO_EIG = 1e-14

NORMALIZED = "normalized"
SUBNORMALIZED = "subnormalized"
CPTP = "cptp"
TNI = "tni"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityState:
    """A (sub)normalized density operator.

    Construct through :func:`validate_state` when the input is untrusted; the
    constructor itself only checks the shape.
    """

    matrix: np.ndarray
    trace_class: str = NORMALIZED

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise BadShape(f"density matrix must be square, got shape {m.shape}")
        if self.trace_class not in (NORMALIZED, SUBNORMALIZED):
            raise BadShape(f"unknown trace_class {self.trace_class!r}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray

    def __post_init__(self):
        v = _frozen(np.ravel(self.vector))
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > TOL_TR:
            raise BadTrace(f"pure state must have unit norm, got {norm:.3e}")
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def density(self) -> DensityState:
        return DensityState(np.outer(self.vector, self.vector.conj()))


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely positive map in Kraus form, ``rho -> sum_k K rho K^dag``."""

    kraus: tuple
    kind: str = CPTP

    def __post_init__(self):
        ks = tuple(_frozen(k) for k in self.kraus)
        if not ks:
            raise BadShape("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ks):
            raise BadShape("Kraus operators must be matrices of a common shape")
        if self.kind not in (CPTP, TNI):
            raise BadShape(f"unknown channel kind {self.kind!r}")
        gram = sum(k.conj().T @ k for k in ks)
        eye = np.eye(shape[1])
        if self.kind == CPTP:
            err = np.max(np.abs(gram - eye))
            if err > TOL_TP:
                raise BadTrace(f"Kraus operators not trace preserving (deviation {err:.3e})")
        else:
            top = np.linalg.eigvalsh(gram)[-1]
            if top > 1 + TOL_TP:
                raise BadTrace(f"Kraus operators increase trace (largest eigenvalue {top:.6f})")
        object.__setattr__(self, "kraus", ks)

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        p.setflags(write=False)
        if np.any(p < 0):
            raise NotPositive(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > TOL_TR:
            raise BadTrace(f"probabilities sum to {p.sum():.12g}")
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return self.probs.shape[0]

    def density(self) -> DensityState:
        return DensityState(np.diag(self.probs).astype(complex))


@dataclass(frozen=True, eq=False)
class Povm:
    effects: tuple

    def __post_init__(self):
        es = tuple(_frozen(e) for e in self.effects)
        if not es:
            raise BadPovm("a POVM needs at least one effect")
        d = es[0].shape[0]
        for i, e in enumerate(es):
            if e.shape != (d, d):
                raise BadPovm(f"effect {i} has shape {e.shape}, expected {(d, d)}")
            if np.max(np.abs(e - e.conj().T)) > TOL_HERM * max(1.0, np.max(np.abs(e))):
                raise BadPovm(f"effect {i} is not Hermitian")
            if np.linalg.eigvalsh(e)[0] < -TOL_PSD:
                raise BadPovm(f"effect {i} is not positive semidefinite")
        err = np.max(np.abs(sum(es) - np.eye(d)))
        if err > TOL_TP:
            raise BadPovm(f"effects do not sum to identity (deviation {err:.3e})")
        object.__setattr__(self, "effects", es)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def probabilities(self, rho) -> np.ndarray:
        m = as_matrix(rho)
        if m.shape[0] != self.dim:
            raise DimMismatch(f"POVM acts on dim {self.dim}, state has dim {m.shape[0]}")
        return np.array([np.real(np.vdot(e, m)) for e in self.effects])


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


StateLike = Union[DensityState, PureState, np.ndarray, Sequence]


def as_matrix(x: StateLike) -> np.ndarray:
    """Return the density matrix behind any state-like input."""
    if isinstance(x, DensityState):
        return x.matrix
    if isinstance(x, PureState):
        return np.outer(x.vector, x.vector.conj())
    if isinstance(x, ClassicalDistribution):
        return np.diag(x.probs).astype(complex)
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadShape(f"expected a square matrix, got shape {m.shape}")
    return m


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def hermitian_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def _scale(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def validate_state(
    matrix,
    trace_class: str = NORMALIZED,
    tol_herm: float = TOL_HERM,
    tol_psd: float = TOL_PSD,
    tol_tr: float = TOL_TR,
) -> DensityState:
    """Check the density-operator invariants and wrap ``matrix``.

    Nothing is symmetrized or renormalized. Hermiticity and positivity
    tolerances are relative to the size of the matrix, the trace tolerance is
    absolute.

    Raises:
        NotHermitian, NotPositive, BadTrace: naming the measured violation.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadShape(f"density matrix must be square, got shape {m.shape}")
    scale = _scale(m)
    herr = hermitian_error(m)
    if herr > tol_herm * scale:
        raise NotHermitian(f"max |A - A^dag| = {herr:.3e} exceeds {tol_herm * scale:.3e}")
    lo = float(np.linalg.eigvalsh(m)[0]) if m.size else 0.0
    if lo < -tol_psd * scale:
        raise NotPositive(f"smallest eigenvalue {lo:.3e} below -{tol_psd * scale:.3e}")
    tr = float(np.real(np.trace(m)))
    if trace_class == NORMALIZED:
        if abs(tr - 1.0) > tol_tr:
            raise BadTrace(f"trace {tr:.12g} is not 1 within {tol_tr:g}")
    elif trace_class == SUBNORMALIZED:
        if tr < -tol_tr or tr > 1.0 + tol_tr:
            raise BadTrace(f"trace {tr:.12g} outside [0, 1] within {tol_tr:g}")
    else:
        raise BadShape(f"unknown trace_class {trace_class!r}")
    return DensityState(m, trace_class)


def sanitize(matrix, normalize: bool = False) -> np.ndarray:
    """Nearest Hermitian PSD matrix (test-data generation only)."""
    m = np.asarray(matrix, dtype=complex)
    m = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(m)
    m = (v * np.clip(w, 0, None)) @ v.conj().T
    if normalize:
        m = m / np.real(np.trace(m))
    return m


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-10)
        if idx.size:
            c = col[idx[0]]
            vecs[:, j] = col * (abs(c) / c)
    return vecs


def eigh(matrix, tol_herm: float = TOL_HERM) -> EigenDecomposition:
    """Hermitian eigendecomposition, eigenvalues in descending order.

    Eigenvectors follow a fixed phase convention: the first component with
    modulus above 1e-10 is made real and positive.
    """
    m = as_matrix(matrix)
    herr = hermitian_error(m)
    if herr > tol_herm * _scale(m):
        raise NotHermitian(f"max |A - A^dag| = {herr:.3e}")
    w, v = np.linalg.eigh(m)
    w, v = w[::-1], v[:, ::-1]
    return EigenDecomposition(w, _fix_phases(v))


def _heig(m: np.ndarray):
    """Ascending eigenpairs of the Hermitian part, no validation."""
    return np.linalg.eigh(m)


def _support(m: np.ndarray, cutoff: float = SUPPORT_CUTOFF):
    """Eigenpairs spanning the support; empty arrays for the zero operator."""
    w, v = _heig(m)
    top = w[-1] if w.size else 0.0
    if top <= _ZERO_EIG:
        return w[:0], v[:, :0]
    keep = w > cutoff * top
    return w[keep], v[:, keep]


def _projector(vecs: np.ndarray) -> np.ndarray:
    return vecs @ vecs.conj().T


def support_projector(rho: StateLike, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Projector onto eigenvectors with eigenvalue above ``cutoff * lambda_max``."""
    m = as_matrix(rho)
    w, v = _support(m, cutoff)
    if w.size == 0:
        raise ZeroState("operator has no eigenvalue above the support cutoff")
    return _projector(v)


def matrix_power_on_support(rho: StateLike, exponent: float, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Apply ``x -> x**exponent`` on the support and zero elsewhere.

    Negative exponents therefore give pseudo-inverse powers. ``cutoff`` is
    relative to the largest eigenvalue; pass ``0`` to keep every strictly
    positive eigenvalue.
    """
    m = as_matrix(rho)
    w, v = _heig(m)
    top = w[-1] if w.size else 0.0
    if top <= 0:
        return np.zeros_like(m)
    keep = w > cutoff * top
    w, v = w[keep], v[:, keep]
    return (v * w**exponent) @ v.conj().T


def apply_channel(ch: QuantumChannel, rho: StateLike) -> DensityState:
    m = as_matrix(rho)
    if m.shape[0] != ch.in_dim:
        raise DimMismatch(f"channel input dim {ch.in_dim}, state dim {m.shape[0]}")
    out = sum(k @ m @ k.conj().T for k in ch.kraus)
    normalized = ch.kind == CPTP and (
        not isinstance(rho, DensityState) or rho.trace_class == NORMALIZED
    )
    return DensityState(out, NORMALIZED if normalized else SUBNORMALIZED)


def _trace_class(*states) -> str:
    for s in states:
        if isinstance(s, DensityState) and s.trace_class == SUBNORMALIZED:
            return SUBNORMALIZED
    return NORMALIZED


def tensor(a: StateLike, b: StateLike, cap: int = DIM_CAP) -> DensityState:
    ma, mb = as_matrix(a), as_matrix(b)
    d = ma.shape[0] * mb.shape[0]
    if d > cap:
        raise DimCap(f"tensor product dimension {d} exceeds cap {cap}")
    return DensityState(np.kron(ma, mb), _trace_class(a, b))


def tensor_power(rho: StateLike, n: int, cap: int = DIM_CAP) -> DensityState:
    m = as_matrix(rho)
    if n < 1:
        raise BadShape("tensor power needs n >= 1")
    if m.shape[0] ** n > cap:
        raise DimCap(f"dimension {m.shape[0]}^{n} exceeds cap {cap}")
    out = m
    for _ in range(n - 1):
        out = np.kron(out, m)
    return DensityState(out, _trace_class(rho))


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem of ``dims`` not listed in ``keep``."""
    m = as_matrix(m)
    dims = list(dims)
    n = len(dims)
    if int(np.prod(dims)) != m.shape[0]:
        raise DimMismatch(f"subsystem dims {dims} do not multiply to {m.shape[0]}")
    keep = sorted(keep)
    t = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace the highest axes first so lower indices stay valid
    for k, i in enumerate(sorted(traced, reverse=True)):
        nleft = n - k
        t = np.trace(t, axis1=i, axis2=i + nleft)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


def purify(rho: StateLike) -> PureState:
    """Canonical purification ``(sqrt(rho) x I) sum_k |k>|k>`` on ``dim**2``."""
    m = as_matrix(rho)
    root = matrix_power_on_support(m, 0.5, cutoff=0.0)
    vec = root.reshape(-1)
    return PureState(vec / np.linalg.norm(vec))


# -- random ensembles --------------------------------------------------------

def rng_stream(seed, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def derived_seed(seed, index: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """Haar-distributed isometry (``rows >= cols``) via phase-corrected QR."""
    if rows < cols:
        raise BadShape(f"isometry needs rows >= cols, got {rows} x {cols}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, rows, cols))
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    return haar_isometry(dim, dim, seed)


def random_density(dim: int, rank: int | None = None, seed=None) -> DensityState:
    """Ginibre-induced random state ``G G^dag / Tr``."""
    rank = dim if rank is None else rank
    if dim < 1 or not 1 <= rank <= dim:
        raise BadShape(f"need 1 <= rank <= dim, got rank={rank}, dim={dim}")
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, dim, rank)
    m = g @ g.conj().T
    return DensityState(m / np.real(np.trace(m)))


def random_pure(dim: int, seed=None) -> PureState:
    if dim < 1:
        raise BadShape("dim must be positive")
    rng = np.random.default_rng(seed)
    v = _ginibre(rng, dim, 1).ravel()
    return PureState(v / np.linalg.norm(v))


def random_channel(in_dim: int, out_dim: int, env_dim: int, seed=None) -> QuantumChannel:
    """Stinespring channel from a Haar isometry ``in -> out (x) env``."""
    if env_dim < 1 or out_dim * env_dim < in_dim:
        raise BadShape(f"need env_dim >= 1 and out*env >= in, got {in_dim}->{out_dim}x{env_dim}")
    v = haar_isometry(out_dim * env_dim, in_dim, seed).reshape(out_dim, env_dim, in_dim)
    return QuantumChannel(tuple(v[:, e, :] for e in range(env_dim)), CPTP)


def random_tni_map(in_dim: int, out_dim: int, env_dim: int, seed=None) -> QuantumChannel:
    """Trace-non-increasing map: a random channel with each Kraus operator damped."""
    rng = np.random.default_rng(seed)
    ch = random_channel(in_dim, out_dim, env_dim, rng)
    damp = np.sqrt(rng.uniform(0.0, 1.0, size=env_dim))
    return QuantumChannel(tuple(c * k for c, k in zip(damp, ch.kraus)), TNI)


def random_povm(dim: int, outcomes: int, seed=None) -> Povm:
    """Random POVM.

    For ``outcomes <= dim`` a Haar basis is coarse-grained round-robin into
    projective effects; for more outcomes the effects are the rank-one
    Naimark compressions of a Haar isometry.
    """
    if outcomes < 1:
        raise BadShape("need at least one outcome")
    rng = np.random.default_rng(seed)
    if outcomes <= dim:
        u = haar_unitary(dim, rng)
        effects = [np.zeros((dim, dim), complex) for _ in range(outcomes)]
        for i in range(dim):
            effects[i % outcomes] += np.outer(u[:, i], u[:, i].conj())
    else:
        v = haar_isometry(outcomes, dim, rng)
        effects = [np.outer(v[x].conj(), v[x]) for x in range(outcomes)]
    return Povm(tuple(effects))


def dephasing_channel(dim: int) -> QuantumChannel:
    kraus = []
    for i in range(dim):
        k = np.zeros((dim, dim), complex)
        k[i, i] = 1
        kraus.append(k)
    return QuantumChannel(tuple(kraus), CPTP)


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel((np.eye(dim, dtype=complex),), CPTP)


def direct_sum_flag(m, flag: float) -> np.ndarray:
    """``m (+) flag`` with the scalar appended as the last diagonal entry."""
    m = as_matrix(m)
    d = m.shape[0]
    out = np.zeros((d + 1, d + 1), complex)
    out[:d, :d] = m
    out[d, d] = flag
    return out
