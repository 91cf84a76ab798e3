"""Randomized property suites with reproducible seeds.

Each suite draws its inputs from an independent stream derived from
``(seed, trial index)`` and reports a *margin*: the largest amount by which
any checked inequality (or equality) is violated. Negative margins mean the
property holds with room to spare. A trial passes when its margin is at most
the configured slack.

Trials run ``trials`` times per entry of ``dims``. Wall time is reported
separately from the deterministic content, so two reports from the same
config compare equal.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.optimize

from . import divergence as dv
from . import extension as ex
from .entangle import BipartiteCut, schmidt_decompose, schmidt_number_ppt
from .errors import BadConfig, UnknownSuite
from .qstate import (
    _ginibre,
    apply_channel,
    derived_seed,
    haar_unitary,
    purify,
    random_channel,
    random_density,
    random_pure,
    random_tni_map,
    rng_stream,
    tensor,
    tensor_power,
)

inf = math.inf

SANDWICH_ALPHAS = (0.5, 0.7, 2.0, 5.0, inf)
GEOMETRIC_ALPHAS = (0.5, 2.0)
EQ1_EPSILONS = (0.1, 0.25, 0.5, 0.9)
HYPO_PAIRS = ((0.1, 0.05), (0.3, 0.1))


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    trials: int = 100
    dims: tuple = (2, 3)
    seed: int = 0
    slack: float | None = None
    extra: dict = field(default_factory=dict)
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "extra", dict(self.extra))
        if self.suite not in SUITES:
            raise UnknownSuite(f"unknown suite {self.suite!r}; available: {', '.join(sorted(SUITES))}")
        if self.trials < 1:
            raise BadConfig("trials must be at least 1")
        if not self.dims or any(not 2 <= d <= 16 for d in self.dims):
            raise BadConfig(f"dims must be a nonempty subset of [2, 16], got {self.dims}")
        if self.slack is not None and not self.slack > 0:
            raise BadConfig("slack must be positive")
        SUITES[self.suite].validate(self)

    @property
    def effective_slack(self) -> float:
        return SUITES[self.suite].slack if self.slack is None else float(self.slack)

    def echo(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "dims": list(self.dims),
            "seed": self.seed,
            "slack": self.effective_slack,
            "extra": _jsonable(self.extra),
        }


@dataclass(frozen=True)
class TrialRecord:
    index: int
    dim: int
    seed: int
    margin: float
    passed: bool
    diagnostics: dict


@dataclass
class PropertyReport:
    config: dict
    records: list
    wall_time: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.records)

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    @property
    def max_violation(self) -> float:
        return max((r.margin for r in self.records), default=-inf)

    def summary(self) -> str:
        status = "pass" if self.all_passed else "FAIL"
        return (
            f"{self.config['suite']}: {self.passed}/{self.total} {status} "
            f"(max margin {_fmt(self.max_violation)}, slack {_fmt(self.config['slack'])})"
        )

    def content(self) -> dict:
        """Deterministic part of the report."""
        return {
            "config": self.config,
            "records": [_jsonable(asdict(r)) for r in self.records],
            "aggregate": {
                "passed": self.passed,
                "total": self.total,
                "max_violation": _jsonable(self.max_violation),
            },
        }

    def to_json(self) -> str:
        out = self.content()
        out["aggregate"]["wall_time"] = self.wall_time
        return json.dumps(out, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        keys = sorted({k for r in self.records for k in r.diagnostics if _scalar(r.diagnostics[k])})
        w = csv.writer(buf)
        w.writerow(["suite", "trial", "dim", "seed", "margin", "pass", *keys])
        for r in self.records:
            w.writerow(
                [self.config["suite"], r.index, r.dim, r.seed, _fmt(r.margin), int(r.passed)]
                + [_fmt(r.diagnostics.get(k, "")) for k in keys]
            )
        return buf.getvalue()


def _scalar(v) -> bool:
    return isinstance(v, (int, float, bool, np.floating, np.integer))


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{float(v):.12g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# -- helpers ----------------------------------------------------------------

def _excess(lhs: float, rhs: float) -> float:
    """How far ``lhs <= rhs`` is violated; ``inf <= inf`` holds."""
    if lhs == rhs:
        return 0.0 if math.isinf(lhs) else lhs - rhs
    return lhs - rhs


def _gap(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b)


def _full_rank(dim: int, rng, floor: float = 0.01) -> np.ndarray:
    """Random state with smallest eigenvalue at least ``floor``."""
    g = random_density(dim, seed=rng).matrix
    t = float(rng.uniform(min(1.0, 2 * floor * dim), 1.0))
    return (1 - t) * g + t * np.eye(dim) / dim


def _lmin(m) -> float:
    return float(np.linalg.eigvalsh(m)[0])


def _specnorm(m) -> float:
    w = np.linalg.eigvalsh(m)
    return float(max(abs(w[0]), abs(w[-1])))


def _rank(dim: int, rng) -> int:
    return int(rng.integers(1, dim + 1))


def relative_entropy_panel(alphas_s=SANDWICH_ALPHAS, alphas_g=GEOMETRIC_ALPHAS, petz=(0.5, 2.0)) -> dict:
    """Named two-argument callables for every relative-entropy variant."""
    out = {"umegaki": dv.umegaki, "dmin": dv.d_min, "dmax": dv.d_max}
    for a in alphas_s:
        out[f"sandwiched[{_fmt(a)}]"] = dv.bind("sandwiched", a)
    for a in alphas_g:
        out[f"geometric[{_fmt(a)}]"] = dv.bind("geometric", a)
    for a in petz:
        out[f"petz[{_fmt(a)}]"] = dv.bind("petz", a)
    return out


# -- suites -----------------------------------------------------------------

@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable  # (config, dim, rng) -> (margin, diagnostics)
    slack: float
    about: str
    validate: Callable = lambda cfg: None
    plan: Callable | None = None  # config -> list of dims, one per trial


def _sandwich(cfg, dim, rng):
    rho = random_density(dim, seed=rng).matrix
    sigma = random_density(dim, seed=rng).matrix
    lo, hi = dv.d_min(rho, sigma), dv.d_max(rho, sigma)
    diag = {"dmin": lo, "dmax": hi}
    panel = {"umegaki": dv.umegaki}
    for a in cfg.extra.get("sandwiched_alphas", SANDWICH_ALPHAS):
        panel[f"sandwiched[{_fmt(a)}]"] = dv.bind("sandwiched", a)
    for a in cfg.extra.get("geometric_alphas", GEOMETRIC_ALPHAS):
        panel[f"geometric[{_fmt(a)}]"] = dv.bind("geometric", a)
    margin = -inf
    for name, f in panel.items():
        v = f(rho, sigma)
        diag[name] = v
        margin = max(margin, _excess(lo, v), _excess(v, hi))
    return margin, diag


DPI_DEFAULT = (
    "umegaki", "dmin", "dmax", "petz[0.5]", "petz[2]", "sandwiched[0.5]", "sandwiched[0.7]",
    "sandwiched[2]", "sandwiched[inf]", "geometric[0.5]", "geometric[2]", "trace_distance",
    "fidelity", "dh[0.1]",
)

SUBNORM_FORMS = {
    "generalized-trace-distance": (ex.generalized_trace_distance, False),
    "generalized-fidelity": (ex.generalized_fidelity, True),
    "purified-distance": (ex.purified_distance, False),
    "extended-umegaki": (ex.extended_umegaki, False),
    "extended-dmax": (ex.extended_d_max, False),
    "extended-sandwiched[2]": (lambda r, s: ex.extend_subnormalized("sandwiched", r, s, alpha=2.0), False),
}


def _parse_named(token: str):
    """``"sandwiched[2]"`` -> callable plus reverse flag."""
    name, _, arg = token.partition("[")
    arg = arg.rstrip("]")
    spec = dv.REGISTRY.get(name)
    if spec is None:
        raise BadConfig(f"unknown divergence {token!r}")
    if spec.needs_alpha:
        f = dv.bind(name, alpha=float(arg))
    elif spec.needs_epsilon:
        f = dv.bind(name, epsilon=float(arg))
    else:
        f = dv.bind(name)
    return f, spec.reverse


def _dpi_validate(cfg):
    divs = cfg.extra.get("divergences", DPI_DEFAULT)
    for token in divs:
        _parse_named(token)
    if cfg.extra.get("tni") and any(t.partition("[")[0] == "dmin" for t in divs):
        raise BadConfig("dpi: d_min under trace-non-increasing maps is unsupported (DPI holds for CPTP maps only)")


def _dpi(cfg, dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix
    sigma = random_density(dim, seed=rng).matrix
    out = int(rng.integers(2, dim + 2))
    env = int(rng.integers(max(1, -(-dim // out)), dim * out + 1))
    ch = random_channel(dim, out, env, rng)
    r2, s2 = apply_channel(ch, rho).matrix, apply_channel(ch, sigma).matrix
    diag = {"out_dim": out, "env_dim": env}
    margin = -inf
    for token in cfg.extra.get("divergences", DPI_DEFAULT):
        f, reverse = _parse_named(token)
        before, after = f(rho, sigma), f(r2, s2)
        diag[token] = before
        diag[token + ":after"] = after
        margin = max(margin, _excess(before, after) if reverse else _excess(after, before))
    if cfg.extra.get("tni"):
        m2, mdiag = _tni_monotone(dim, rng)
        margin = max(margin, m2)
        diag.update(mdiag)
    return margin, diag


def _subnormalized(dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix * rng.uniform(0, 1)
    sigma = random_density(dim, _rank(dim, rng), seed=rng).matrix * rng.uniform(0, 1)
    return rho, sigma


def _tni_monotone(dim, rng):
    rho, sigma = _subnormalized(dim, rng)
    out = int(rng.integers(2, dim + 2))
    env = int(rng.integers(max(1, -(-dim // out)), dim * out + 1))
    ch = random_tni_map(dim, out, env, rng)
    r2, s2 = apply_channel(ch, rho).matrix, apply_channel(ch, sigma).matrix
    diag, margin = {}, -inf
    for name, (f, reverse) in SUBNORM_FORMS.items():
        before, after = f(rho, sigma), f(r2, s2)
        diag[name] = before
        diag[name + ":after"] = after
        margin = max(margin, _excess(before, after) if reverse else _excess(after, before))
    return margin, diag


def _monotonicity(cfg, dim, rng):
    return _tni_monotone(dim, rng)


def _eq1(cfg, dim, rng):
    eps_list = cfg.extra.get("epsilons", EQ1_EPSILONS)
    eps = float(eps_list[int(rng.integers(len(eps_list)))])
    rho = np.zeros((dim, dim), complex)
    rho[0, 0] = 1
    sigma = np.zeros((dim, dim), complex)
    sigma[0, 0], sigma[1, 1] = 1 - eps, eps
    target = -math.log2(1 - eps)
    panel = relative_entropy_panel(alphas_s=(0.0, 0.3, 0.5, 0.7, 2.0, 5.0, inf))
    diag = {"epsilon": eps, "target": target}
    margin = -inf
    for name, f in panel.items():
        v = f(rho, sigma)
        diag[name] = v
        margin = max(margin, _gap(v, target))
    for variant, alpha in (("kl", None), ("renyi", 0.5), ("renyi", 2.0), ("renyi", 3.0)):
        v = dv.classical_divergence(variant, alpha, [1, 0], [1 - eps, eps])
        diag[f"classical-{variant}[{alpha}]"] = v
        margin = max(margin, _gap(v, target))
    return margin, diag


def _commuting(dim, rng):
    p = rng.dirichlet(np.ones(dim))
    q = rng.dirichlet(np.ones(dim))
    return p, q, np.diag(p).astype(complex), np.diag(q).astype(complex)


def _reduction(cfg, dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix
    sigma = random_density(dim, seed=rng).matrix
    diag, margin = {}, -inf

    def check(name, ext, base):
        nonlocal margin
        diag[name] = ext
        margin = max(margin, _gap(ext, base))

    check("subnorm-trace-distance", ex.generalized_trace_distance(rho, sigma), dv.trace_distance(rho, sigma))
    check("subnorm-fidelity", ex.generalized_fidelity(rho, sigma), dv.fidelity(rho, sigma))
    check("subnorm-purified", ex.purified_distance(rho, sigma),
          math.sqrt(max(0.0, 1 - dv.fidelity(rho, sigma) ** 2)))
    check("subnorm-umegaki", ex.extended_umegaki(rho, sigma), dv.umegaki(rho, sigma))
    check("subnorm-dmax", ex.extended_d_max(rho, sigma), dv.d_max(rho, sigma))
    for name in ("umegaki", "trace_distance", "fidelity", "dmax"):
        check(f"embedded-{name}", ex.extend_subnormalized(name, rho, sigma), dv.compute(name, rho, sigma))
    check("embedded-sandwiched[2]", ex.extend_subnormalized("sandwiched", rho, sigma, alpha=2.0),
          dv.renyi("sandwiched", 2.0, rho, sigma))
    p, q, pr, qr = _commuting(dim, rng)
    for variant, alpha in (("kl", None), ("renyi", 0.5), ("renyi", 2.0), ("dmax", None)):
        base = dv.classical_divergence(variant, alpha, p, q)
        check(f"ansatz-{variant}[{alpha}]", ex.maximal_classical_extension_ansatz((variant, alpha), pr, qr).value, base)
        check(f"measured-{variant}[{alpha}]", ex.minimal_classical_extension_lower((variant, alpha), pr, qr).value, base)
    return margin, diag


OPT_CLASSICAL = (("kl", None), ("renyi", 0.5), ("renyi", 0.7), ("renyi", 1.5), ("renyi", 2.0), ("dmax", None), ("dmin", None))


def _optimality(cfg, dim, rng):
    rho = random_density(dim, seed=rng).matrix
    sigma = random_density(dim, seed=rng).matrix
    strategy = dv.RandomProjective(int(cfg.extra.get("projective_trials", 8)), int(rng.integers(2**63)))
    diag, margin = {}, -inf
    for variant, alpha in OPT_CLASSICAL:
        spec = (variant, alpha)
        upper = ex.maximal_classical_extension_ansatz(spec, rho, sigma).value
        lower = max(ex.minimal_classical_extension_lower(spec, rho, sigma).value,
                    ex.minimal_classical_extension_lower(spec, rho, sigma, strategy).value)
        diag[f"{variant}[{alpha}]:lower"] = lower
        diag[f"{variant}[{alpha}]:upper"] = upper
        margin = max(margin, _excess(lower, upper))
        if variant == "renyi" and alpha >= 0.5:
            sw = dv.renyi("sandwiched", alpha, rho, sigma)
            margin = max(margin, _excess(lower, sw), _excess(sw, upper))
    return margin, diag


def _additivity(cfg, dim, rng):
    r1, s1 = random_density(dim, seed=rng).matrix, random_density(dim, seed=rng).matrix
    r2, s2 = random_density(2, seed=rng).matrix, random_density(2, seed=rng).matrix
    rr, ss = tensor(r1, r2).matrix, tensor(s1, s2).matrix
    diag, margin = {}, -inf
    for name, f in relative_entropy_panel().items():
        whole, parts = f(rr, ss), f(r1, s1) + f(r2, s2)
        diag[name] = whole
        margin = max(margin, _gap(whole, parts))
    return margin, diag


def _subsuper(cfg, dim, rng):
    r1, s1 = random_density(dim, seed=rng).matrix, random_density(dim, seed=rng).matrix
    r2, s2 = random_density(2, seed=rng).matrix, random_density(2, seed=rng).matrix
    rr, ss = tensor(r1, r2).matrix, tensor(s1, s2).matrix
    diag, margin = {}, -inf
    for spec in (("kl", None), ("renyi", 0.5), ("renyi", 2.0)):
        up = ex.maximal_classical_extension_ansatz
        lo = ex.minimal_classical_extension_lower
        u_whole = up(spec, rr, ss).value
        u_parts = up(spec, r1, s1).value + up(spec, r2, s2).value
        l_whole = lo(spec, rr, ss).value
        l_parts = lo(spec, r1, s1).value + lo(spec, r2, s2).value
        tag = f"{spec[0]}[{spec[1]}]"
        diag.update({tag + ":upper": u_whole, tag + ":lower": l_whole})
        margin = max(margin, _excess(u_whole, u_parts), _excess(l_parts, l_whole))
    return margin, diag


def _triangle(cfg, dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix
    sigma, omega = _full_rank(dim, rng), _full_rank(dim, rng)
    lhs = dv.umegaki(rho, sigma)
    rhs = dv.umegaki(rho, omega) + dv.d_max(omega, sigma)
    diag = {"lhs": lhs, "rhs": rhs}
    margin = _excess(lhs, rhs)
    # the D_max bound in terms of the operator-norm distance
    dist, lm = _specnorm(sigma - omega), _lmin(omega)
    if lm > dist:
        bound = -math.log2(1 - dist / lm)
        diag["dmax_bound"] = bound
        margin = max(margin, _excess(dv.d_max(omega, sigma), bound))
    return margin, diag


def _traceless(dim, rng) -> np.ndarray:
    g = _ginibre(rng, dim, dim)
    h = (g + g.conj().T) / 2
    h -= np.trace(h) / dim * np.eye(dim)
    return h / _specnorm(h)


def _continuity(cfg, dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix
    omega = _full_rank(dim, rng)
    diag, margin = {}, -inf
    # second argument: sigma close to omega
    u = float(rng.uniform(0.01, 0.9))
    sigma = omega + u * _lmin(omega) * _traceless(dim, rng)
    dist = _specnorm(sigma - omega)
    lhs = dv.umegaki(rho, sigma) - dv.umegaki(rho, omega)
    rhs = -math.log2(1 - dist / _lmin(omega))
    diag.update({"second_lhs": lhs, "second_rhs": rhs})
    margin = max(margin, _excess(lhs, rhs))
    # first argument: rho2 close to omega, reference state full rank
    ref = _full_rank(dim, rng)
    v = float(rng.uniform(0.01, 0.9))
    rho2 = omega + v * _lmin(omega) * _traceless(dim, rng)
    dist2 = _specnorm(rho2 - omega)
    lhs2 = dv.umegaki(rho2, ref) - dv.umegaki(omega, ref)
    rhs2 = math.log2(1 + dist2 / (_lmin(omega) * _lmin(ref)))
    diag.update({"first_lhs": lhs2, "first_rhs": rhs2})
    margin = max(margin, _excess(lhs2, rhs2))
    return margin, diag


FAITHFUL = {
    "umegaki": dv.umegaki,
    "dmax": dv.d_max,
    "sandwiched[0.5]": dv.bind("sandwiched", 0.5),
    "sandwiched[2]": dv.bind("sandwiched", 2.0),
    "petz[0.5]": dv.bind("petz", 0.5),
    "geometric[2]": dv.bind("geometric", 2.0),
}


def _faithful(cfg, dim, rng):
    sigma = random_density(dim, seed=rng).matrix
    # perturbation sizes spanning both sides of the 1e-8 threshold
    size = 10.0 ** -rng.uniform(1, 12)
    rho = sigma + size * _lmin(sigma) * _traceless(dim, rng)
    td = dv.trace_distance(rho, sigma)
    diag = {"perturbation": size, "trace_distance": td}
    margin = -1.0
    for name, f in FAITHFUL.items():
        v = f(rho, sigma)
        diag[name] = v
        if v <= 1e-8:
            margin = max(margin, td - 1e-4)
    # d_min is not faithful: equal supports give zero for distinct states
    p, q = rng.dirichlet(np.ones(dim)), rng.dirichlet(np.ones(dim))
    dm = dv.d_min(np.diag(p), np.diag(q))
    diag["dmin_equal_support"] = dm
    margin = max(margin, abs(dm))
    return margin, diag


def classical_spectrum(p, q, eps: float) -> float:
    """Information-spectrum value of a commuting pair by enumeration.

    The tail mass ``sum{p_i : p_i <= t q_i}`` is a right-continuous step
    function of ``t``, so the supremum is the first likelihood ratio at which
    it exceeds ``eps``.
    """
    p, q = np.asarray(p, float), np.asarray(q, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p > 0, p / q, 0.0)
    for t in sorted(set(ratio[(p > 0) & (q > 0)])):
        if p[ratio <= t].sum() > eps:
            return math.log2(t)
    return inf


def classical_neyman_pearson(p, q, eps: float) -> float:
    """Hypothesis-testing value of a commuting pair by greedy likelihood-ratio filling."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    order = sorted(range(p.size), key=lambda i: -(p[i] / q[i]) if q[i] > 0 else -inf)
    need, beta = 1.0 - eps, 0.0
    for i in order:
        if need <= 0:
            break
        if p[i] <= 0:
            continue
        take = min(1.0, need / p[i])
        need -= take * p[i]
        beta += take * q[i]
    return inf if beta <= 0 else -math.log2(beta)


def _hypo_chain(cfg, dim, rng):
    commuting = bool(rng.integers(2))
    if commuting:
        p, q, rho, sigma = _commuting(dim, rng)
    else:
        rho = random_density(dim, seed=rng).matrix
        sigma = random_density(dim, seed=rng).matrix
    diag, margin = {"commuting": commuting}, -inf
    for eps, delta in cfg.extra.get("pairs", HYPO_PAIRS):
        ds, dh = dv.d_s_epsilon(rho, sigma, eps), dv.d_h_epsilon(rho, sigma, eps)
        upper = dv.d_s_epsilon(rho, sigma, eps + delta) - math.log2(delta)
        diag.update({f"ds[{eps}]": ds, f"dh[{eps}]": dh, f"upper[{eps},{delta}]": upper})
        margin = max(margin, _excess(ds, dh), _excess(dh, upper))
        if commuting:
            margin = max(margin, _gap(ds, classical_spectrum(p, q, eps)),
                         _gap(dh, classical_neyman_pearson(p, q, eps)))
    return margin, diag


AEP_P, AEP_Q = (0.9, 0.1), (0.5, 0.5)


def _aep_plan(cfg):
    return list(range(1, int(cfg.extra.get("n_max", 8)) + 1))


def _aep_truth(cfg):
    p = np.asarray(cfg.extra.get("p", AEP_P), float)
    q = np.asarray(cfg.extra.get("q", AEP_Q), float)
    return p, q, dv.classical_divergence("kl", None, p, q)


def _aep(cfg, n, rng):
    p, q, truth = _aep_truth(cfg)
    eps = float(cfg.extra.get("epsilon", 0.05))
    rho, sigma = tensor_power(np.diag(p), n).matrix, tensor_power(np.diag(q), n).matrix
    rate = dv.d_s_epsilon(rho, sigma, eps) / n
    dmax_rate = dv.d_max(rho, sigma) / n
    gap = abs(rate - truth)
    diag = {"n": n, "rate": rate, "gap": gap, "dmax_rate": dmax_rate, "umegaki": truth}
    margin = _excess(truth, dmax_rate)
    if n == int(cfg.extra.get("n_max", 8)) and n > 1:
        first = abs(dv.d_s_epsilon(np.diag(p), np.diag(q), eps) - truth)
        diag["first_gap"] = first
        margin = max(margin, gap - first)
    return margin, diag


def _metric(cfg, dim, rng):
    a, b = _subnormalized(dim, rng)
    c, _ = _subnormalized(dim, rng)
    pd = ex.purified_distance
    ab, ba, ac, cb = pd(a, b), pd(b, a), pd(a, c), pd(c, b)
    gtd = ex.generalized_trace_distance(a, b)
    diag = {"ab": ab, "ac": ac, "cb": cb, "generalized_trace_distance": gtd}
    margin = max(_gap(ab, ba), _excess(ab, ac + cb), _excess(gtd, ab), pd(a, a))
    return margin, diag


SCHMIDT_CUTS = ((2, 2), (2, 3), (3, 2))


def _schmidt(cfg, dim, rng):
    da, db = SCHMIDT_CUTS[int(rng.integers(len(SCHMIDT_CUTS)))]
    cut = BipartiteCut(da, db)
    if rng.integers(2):
        psi = np.kron(random_pure(da, rng).vector, random_pure(db, rng).vector)
    else:
        psi = random_pure(da * db, rng).vector
    rank = schmidt_decompose(psi, cut).rank
    number = schmidt_number_ppt(np.outer(psi, psi.conj()), cut)
    margin = float(abs(rank - number))
    # Werner-type mixture on the 2x2 cut
    p = float(rng.uniform(0, 1))
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    werner = p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4
    expected = 1 if p <= 1 / 3 else 2
    wn = schmidt_number_ppt(werner, "2x2")
    margin = max(margin, float(abs(wn - expected)))
    # local operations on A never raise the Schmidt number
    ch = random_channel(da, da, int(rng.integers(1, da + 1)), rng)
    rho = np.outer(psi, psi.conj())
    after = sum(np.kron(k, np.eye(db)) @ rho @ np.kron(k, np.eye(db)).conj().T for k in ch.kraus)
    local = schmidt_number_ppt(after, cut)
    margin = max(margin, float(local - number))
    diag = {"cut": f"{da}x{db}", "rank": rank, "ppt_number": number, "werner_p": p,
            "werner_number": wn, "after_local": local}
    return margin, diag


def _pure_state(cfg, dim, rng):
    psi = random_pure(dim, rng)
    sigma = random_density(dim, seed=rng).matrix
    v = psi.vector
    closed = math.log2(float(np.real(v.conj() @ np.linalg.inv(sigma) @ v)))
    ansatz = ex.maximal_classical_extension_ansatz("kl", psi.density().matrix, sigma).value
    pure = ex.maximal_classical_extension_pure("kl", psi, sigma).value
    w, vecs = np.linalg.eigh(sigma)
    j = int(rng.integers(dim))
    eig = ex.maximal_classical_extension_ansatz("kl", np.outer(vecs[:, j], vecs[:, j].conj()), sigma).value
    diag = {"closed_form": closed, "ansatz": ansatz, "pure": pure, "eigen": eig, "eigenvalue": float(w[j])}
    margin = max(_gap(ansatz, closed), _gap(pure, closed), _gap(eig, -math.log2(w[j])))
    return margin, diag


def _geometric_petz(cfg, dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix
    sigma = random_density(dim, seed=rng).matrix
    g, p = dv.renyi("geometric", 2, rho, sigma), dv.renyi("petz", 2, rho, sigma)
    return _gap(g, p), {"geometric": g, "petz": p}


def uhlmann_purified_distance(rho, sigma, restarts: int = 10_000, rng=None, refine: int = 4) -> float:
    """``min_U`` trace distance between purifications, by random search plus local polish.

    The canonical purification of ``sigma`` is rotated by ``I (x) U``; each
    candidate costs one inner product, ``sqrt(1 - |<psi|I x U|phi>|^2)``.
    The best few restarts are refined with BFGS on Hermitian generators.
    """
    rng = np.random.default_rng(rng)
    d = rho.shape[0]
    a = purify(rho).vector.reshape(d, d)
    b = purify(sigma).vector.reshape(d, d)
    # <a| I x U |b> = Tr(a^dag b U^T)
    m = a.conj().T @ b

    def overlap(u):
        return abs(np.trace(m @ u.T))

    scores = []
    for _ in range(restarts):
        u = haar_unitary(d, rng)
        scores.append((overlap(u), u))
    scores.sort(key=lambda t: -t[0])

    def unit(x, base):
        h = np.zeros((d, d), complex)
        iu = np.triu_indices(d, 1)
        n = len(iu[0])
        h[np.diag_indices(d)] = x[:d]
        h[iu] = x[d:d + n] + 1j * x[d + n:]
        h = h + np.triu(h, 1).conj().T
        return scipy.linalg.expm(1j * h) @ base

    best = scores[0][0]
    for _, u0 in scores[:refine]:
        res = scipy.optimize.minimize(lambda x: -overlap(unit(x, u0)), np.zeros(d * d), method="BFGS",
                                      options={"gtol": 1e-12})
        best = max(best, -res.fun)
    return math.sqrt(max(0.0, 1 - min(1.0, best) ** 2))


def _purified(cfg, dim, rng):
    rho = random_density(dim, _rank(dim, rng), seed=rng).matrix
    sigma = random_density(dim, _rank(dim, rng), seed=rng).matrix
    closed = ex.purified_distance(rho, sigma)
    oracle = uhlmann_purified_distance(rho, sigma, int(cfg.extra.get("restarts", 10_000)), rng)
    return _gap(closed, oracle), {"closed_form": closed, "oracle": oracle}


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("sandwich", _sandwich, 1e-8, "D_min <= every relative entropy <= D_max"),
        Suite("dpi", _dpi, 1e-7, "data processing under random channels (and TNI maps with extra tni)", _dpi_validate),
        Suite("eq1", _eq1, 1e-10, "relative entropies of (diag(1,0), diag(1-e,e)) equal -log(1-e)"),
        Suite("reduction", _reduction, 1e-9, "extensions agree with base measures on the smaller domain"),
        Suite("monotonicity", _monotonicity, 1e-7, "subnormalized closed forms are monotone under TNI maps"),
        Suite("optimality", _optimality, 1e-7, "measured lower bound <= sandwiched <= pencil upper bound"),
        Suite("additivity", _additivity, 1e-8, "relative entropies add over tensor products"),
        Suite("subsuper", _subsuper, 1e-7, "upper bound subadditive, measured bound superadditive"),
        Suite("triangle", _triangle, 1e-7, "D(r||s) <= D(r||w) + D_max(w||s) and its norm bound"),
        Suite("continuity", _continuity, 1e-7, "continuity bounds in each argument of the Umegaki entropy"),
        Suite("faithful", _faithful, 1e-9, "vanishing divergence forces equal states; D_min exempt"),
        Suite("hypo_chain", _hypo_chain, 1e-7, "D_s <= D_h <= D_s(eps+delta) - log delta, classical oracles"),
        Suite("aep", _aep, 1e-9, "finite-n information-spectrum rates approach the relative entropy", plan=_aep_plan),
        Suite("metric", _metric, 1e-9, "purified distance is a symmetric metric above the trace distance"),
        Suite("schmidt", _schmidt, 0.5, "PPT Schmidt number matches Schmidt rank, Werner threshold, local maps"),
        Suite("pure_state", _pure_state, 1e-8, "pure-state maximal extension equals log <psi|sigma^-1|psi>"),
        Suite("geometric_petz", _geometric_petz, 1e-9, "geometric and Petz Renyi agree at order 2"),
        Suite("purified", _purified, 1e-5, "purified distance matches an Uhlmann-orbit search"),
    ]
}


def _plan(cfg: SuiteConfig) -> list:
    suite = SUITES[cfg.suite]
    if suite.plan is not None:
        return suite.plan(cfg)
    return [d for d in cfg.dims for _ in range(cfg.trials)]


def _trial(cfg: SuiteConfig, index: int, dim: int) -> TrialRecord:
    rng = rng_stream(cfg.seed, index)
    margin, diag = SUITES[cfg.suite].run(cfg, dim, rng)
    margin = float(margin)
    return TrialRecord(index, dim, derived_seed(cfg.seed, index), margin,
                       bool(margin <= cfg.effective_slack), _jsonable(diag))


def run_suite(config: SuiteConfig) -> PropertyReport:
    """Run every trial of a suite; records come back in trial-index order."""
    start = time.perf_counter()
    plan = _plan(config)
    jobs = list(enumerate(plan))
    if config.workers and config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            records = list(pool.map(lambda j: _trial(config, *j), jobs))
    else:
        records = [_trial(config, i, d) for i, d in jobs]
    return PropertyReport(config.echo(), records, time.perf_counter() - start)


def trial_inputs_seed(config: SuiteConfig, index: int) -> int:
    """Seed of the stream that generated trial ``index``."""
    return derived_seed(config.seed, index)
