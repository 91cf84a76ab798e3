import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import dims, seeds
from resmex import divergence as dv
from resmex import errors
from resmex.qstate import apply_channel, random_channel, random_density, random_povm

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
MIXED = np.eye(2, dtype=complex) / 2
P = np.diag([0.9, 0.1]).astype(complex)
Q = np.diag([0.5, 0.5]).astype(complex)

# frozen from the closed forms: log2(1.8) and the KL sum .9 log2 1.8 + .1 log2 .2
LOG2_1_8 = 0.8479969065549501
KL_PQ = 0.5310044064107188


def full_rank(d, seed):
    return random_density(d, seed=seed).matrix


# -- golden values ----------------------------------------------------------

def test_golden_values():
    assert dv.umegaki(KET0, MIXED) == pytest.approx(1.0, abs=1e-12)
    assert dv.fidelity(KET0, MIXED) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert dv.trace_distance(KET0, KET1) == pytest.approx(1.0)
    assert dv.d_min(KET0, MIXED) == pytest.approx(1.0)
    assert dv.d_max(KET0, MIXED) == pytest.approx(1.0)
    assert dv.d_max(P, Q) == pytest.approx(LOG2_1_8, abs=1e-12)
    assert dv.umegaki(P, Q) == pytest.approx(KL_PQ, abs=1e-12)
    assert dv.renyi("sandwiched", 2, KET0, MIXED) == pytest.approx(1.0, abs=1e-12)


def test_support_violations_give_infinity():
    assert dv.umegaki(KET0, KET1) == math.inf
    assert dv.d_max(MIXED, KET0) == math.inf
    assert dv.d_min(KET0, KET1) == math.inf
    assert dv.renyi("sandwiched", 2, MIXED, KET0) == math.inf
    assert dv.renyi("petz", 0.5, KET0, KET1) == math.inf
    assert dv.renyi("sandwiched", 0.3, KET0, KET1) == math.inf
    # alpha < 1 stays finite without support containment
    assert math.isfinite(dv.renyi("sandwiched", 0.7, MIXED, KET0))


def test_alpha_windows():
    with pytest.raises(errors.AlphaOutOfRange):
        dv.renyi("petz", 3, P, Q)
    with pytest.raises(errors.AlphaOutOfRange):
        dv.renyi("geometric", 1, P, Q)
    with pytest.raises(errors.AlphaOutOfRange):
        dv.renyi("sandwiched", -0.5, P, Q)
    assert dv.renyi("sandwiched", 1, P, Q) == pytest.approx(dv.umegaki(P, Q))
    assert dv.renyi("sandwiched", math.inf, P, Q) == pytest.approx(dv.d_max(P, Q))


def test_sandwiched_half_is_log_fidelity():
    a, b = full_rank(3, 1), full_rank(3, 2)
    assert dv.renyi("sandwiched", 0.5, a, b) == pytest.approx(-2 * math.log2(dv.fidelity(a, b)))


def test_classical_inputs_match_classical_formulas():
    for alpha in (0.3, 0.5, 0.8, 1.5, 2.0):
        expect = dv.classical_renyi(alpha, [0.9, 0.1], [0.5, 0.5])
        for variant in ("petz", "sandwiched", "geometric"):
            assert dv.renyi(variant, alpha, P, Q) == pytest.approx(expect, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(errors.DimMismatch):
        dv.umegaki(MIXED, np.eye(3) / 3)


# -- agreement with independent matrix-function oracles ----------------------

@given(seeds, dims)
def test_umegaki_matches_logm(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    assert dv.umegaki(a, b) == pytest.approx(oracles.umegaki_logm(a, b), abs=1e-9)


@given(seeds, dims)
def test_fidelity_matches_sqrtm(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    assert dv.fidelity(a, b) == pytest.approx(oracles.fidelity_sqrtm(a, b), abs=1e-9)


@given(seeds, dims, st.sampled_from([0.5, 0.75, 1.5, 2.0, 3.0]))
def test_sandwiched_matches_fractional_powers(seed, d, alpha):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    assert dv.renyi("sandwiched", alpha, a, b) == pytest.approx(oracles.sandwiched_power(alpha, a, b), abs=1e-8)


@given(seeds, dims, st.sampled_from([0.1, 0.25, 0.4]))
def test_sandwiched_below_half_uses_swapped_form(seed, d, alpha):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    expect = oracles.sandwiched_swapped_power(alpha, a, b)
    assert dv.renyi("sandwiched", alpha, a, b) == pytest.approx(expect, abs=1e-8)


def test_sandwiched_is_continuous_across_half():
    a, b = full_rank(3, 7), full_rank(3, 8)
    lo, hi = dv.renyi("sandwiched", 0.5 - 1e-7, a, b), dv.renyi("sandwiched", 0.5 + 1e-7, a, b)
    assert abs(lo - hi) < 1e-5


@given(seeds, dims, st.sampled_from([0.25, 0.5, 0.75, 1.5, 2.0]))
def test_petz_and_geometric_match_fractional_powers(seed, d, alpha):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    assert dv.renyi("petz", alpha, a, b) == pytest.approx(oracles.petz_power(alpha, a, b), abs=1e-8)
    assert dv.renyi("geometric", alpha, a, b) == pytest.approx(oracles.geometric_power(alpha, a, b), abs=1e-7)


# -- invariants --------------------------------------------------------------

@given(seeds, dims)
def test_renyi_ordering(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    for alpha in (0.5, 0.9, 1.5, 2.0):
        s, p = dv.renyi("sandwiched", alpha, a, b), dv.renyi("petz", alpha, a, b)
        g = dv.renyi("geometric", alpha, a, b)
        assert s <= p + 1e-9 and p <= g + 1e-9
    assert dv.d_min(a, b) <= dv.umegaki(a, b) + 1e-9 <= dv.d_max(a, b) + 2e-9


@given(seeds, dims)
def test_sandwiched_monotone_in_alpha(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    vals = [dv.renyi("sandwiched", x, a, b) for x in (0.3, 0.5, 0.8, 1, 1.5, 2, 5, math.inf)]
    assert all(x <= y + 1e-9 for x, y in zip(vals, vals[1:]))


@given(seeds, dims)
def test_data_processing(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    ch = random_channel(d, 2, 2, seed=seed + 2)
    ca, cb = apply_channel(ch, a).matrix, apply_channel(ch, b).matrix
    assert dv.umegaki(ca, cb) <= dv.umegaki(a, b) + 1e-9
    assert dv.trace_distance(ca, cb) <= dv.trace_distance(a, b) + 1e-12
    assert dv.fidelity(ca, cb) >= dv.fidelity(a, b) - 1e-9
    assert dv.renyi("sandwiched", 2, ca, cb) <= dv.renyi("sandwiched", 2, a, b) + 1e-9


@given(seeds, dims)
def test_measured_is_below_quantum(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    m = dv.measured_divergence("kl", None, a, b, dv.RandomProjective(5, seed))
    assert m <= dv.umegaki(a, b) + 1e-9
    assert dv.measured_divergence("kl", None, a, b) <= dv.umegaki(a, b) + 1e-9
    assert dv.measured_divergence("kl", None, a, b, random_povm(d, d + 1, seed)) <= dv.umegaki(a, b) + 1e-9


def test_pencil_measurement_commuting_pair_is_exact():
    assert dv.measured_divergence("dmax", None, P, Q) == pytest.approx(LOG2_1_8, abs=1e-12)
    assert dv.measured_divergence("kl", None, P, Q) == pytest.approx(KL_PQ, abs=1e-12)


# -- one-shot quantities ----------------------------------------------------

def test_one_shot_goldens():
    rho = full_rank(3, 9)
    assert dv.d_s_epsilon(rho, rho, 0.3) == pytest.approx(0.0, abs=1e-9)
    assert dv.d_h_epsilon(rho, rho, 0.5) == pytest.approx(1.0, abs=1e-9)


@given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=5), st.floats(0.02, 0.9), seeds)
def test_classical_one_shot_match_linear_program(weights, eps, seed):
    rng = np.random.default_rng(seed)
    p = np.array(weights) / sum(weights)
    q = rng.dirichlet(np.ones(p.size))
    dh = dv.d_h_epsilon(np.diag(p), np.diag(q), eps)
    assert dh == pytest.approx(oracles.classical_hypothesis_lp(p, q, eps), abs=1e-7)
    ds = dv.d_s_epsilon(np.diag(p), np.diag(q), eps)
    assert ds == pytest.approx(oracles.classical_spectrum_bruteforce(p, q, eps), abs=1e-7)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("eps", [0.05, 0.3])
def test_hypothesis_testing_matches_semidefinite_program(seed, eps):
    a, b = full_rank(3, seed), random_density(3, rank=2, seed=seed + 100).matrix
    # compare the type-II error itself; the logarithm magnifies solver error when it is tiny
    beta = 2.0 ** -dv.d_h_epsilon(a, b, eps)
    assert beta == pytest.approx(2.0 ** -oracles.hypothesis_sdp(a, b, eps), abs=1e-7, rel=1e-5)


@given(seeds, dims)
def test_optimal_test_is_feasible(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    t = dv.optimal_test(a, b, 0.1)
    w = np.linalg.eigvalsh(t)
    assert w[0] > -1e-10 and w[-1] < 1 + 1e-10
    assert np.real(np.trace(a @ t)) >= 0.9 - 1e-9


@given(seeds, dims)
def test_one_shot_monotone_in_epsilon(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    eps = [0.05, 0.2, 0.5, 0.8]
    dh = [dv.d_h_epsilon(a, b, e) for e in eps]
    ds = [dv.d_s_epsilon(a, b, e) for e in eps]
    assert all(x <= y + 1e-9 for x, y in zip(dh, dh[1:]))
    assert all(x <= y + 1e-9 for x, y in zip(ds, ds[1:]))


@given(seeds, dims)
def test_smoothed_dmin_lower_bound_is_certified(seed, d):
    a, b = full_rank(d, seed), full_rank(d, seed + 1)
    eps = 0.2
    value, proj = dv.d_min_epsilon_lower(a, b, eps, return_projector=True)
    kept = proj @ a @ proj
    kept = kept / np.real(np.trace(kept))
    assert dv.trace_distance(kept, a) <= eps + 1e-9
    assert value == pytest.approx(dv.d_min(kept, b), abs=1e-9)


def test_epsilon_range():
    with pytest.raises(errors.BadEpsilon):
        dv.d_h_epsilon(P, Q, 0.0)
    with pytest.raises(errors.BadEpsilon):
        dv.d_s_epsilon(P, Q, 1.0)


def test_registry_compute_and_bind():
    assert dv.compute("petz", P, Q, alpha=2) == pytest.approx(dv.classical_renyi(2, [0.9, 0.1], [0.5, 0.5]))
    assert dv.bind("dh", epsilon=0.5)(P, P) == pytest.approx(1.0)
    with pytest.raises(errors.AlphaOutOfRange):
        dv.compute("sandwiched", P, Q)
    with pytest.raises(ValueError):
        dv.compute("nope", P, Q)
