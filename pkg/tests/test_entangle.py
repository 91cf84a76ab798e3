import math

import numpy as np
import pytest
from hypothesis import given

import oracles
from conftest import seeds
from resmex import errors
from resmex.entangle import (
    BipartiteCut,
    convex_roof_search,
    entanglement_entropy,
    partial_transpose,
    schmidt_decompose,
    schmidt_number_ppt,
    schmidt_rank,
    smoothed_extension,
)
from resmex.qstate import random_density, random_pure

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)
# binary entropy h(1/4), evaluated once and frozen
H_QUARTER = 0.8112781244591328


def werner(p):
    """p |Phi+><Phi+| + (1 - p) I/4."""
    return p * np.outer(BELL, BELL) + (1 - p) * np.eye(4) / 4


def test_cut_parsing():
    assert BipartiteCut.parse("2x3") == BipartiteCut(2, 3)
    with pytest.raises(errors.BadCut):
        BipartiteCut.parse("2-3")
    with pytest.raises(errors.BadCut):
        schmidt_decompose(BELL, "3x3")


def test_schmidt_examples():
    prod = np.kron([1, 0], [0, 1])
    assert schmidt_decompose(prod, "2x2").rank == 1
    bell = schmidt_decompose(BELL, "2x2")
    assert bell.rank == 2 and np.allclose(bell.coefficients, [1 / math.sqrt(2)] * 2)
    assert entanglement_entropy(prod, "2x2") == pytest.approx(0.0)
    assert entanglement_entropy(BELL, "2x2") == pytest.approx(1.0)
    psi = np.array([math.sqrt(0.75), 0, 0, math.sqrt(0.25)])
    assert entanglement_entropy(psi, "2x2") == pytest.approx(H_QUARTER, abs=1e-12)


@given(seeds)
def test_schmidt_coefficients_normalized(seed):
    s = schmidt_decompose(random_pure(9, seed=seed), "3x3").coefficients
    assert np.sum(s**2) == pytest.approx(1.0, abs=1e-10)


def test_partial_transpose_of_bell_has_negative_eigenvalue():
    assert np.linalg.eigvalsh(partial_transpose(np.outer(BELL, BELL), "2x2"))[0] == pytest.approx(-0.5)


def test_werner_threshold():
    assert schmidt_number_ppt(werner(1 / 3 - 1e-9), "2x2") == 1
    assert schmidt_number_ppt(werner(1 / 3 + 1e-9), "2x2") == 2
    assert schmidt_number_ppt(werner(1.0), "2x2") == 2


@given(seeds)
def test_ppt_matches_pure_schmidt_rank(seed):
    for cut in ("2x2", "2x3", "3x2"):
        c = BipartiteCut.parse(cut)
        psi = random_pure(c.dim, seed=seed)
        assert schmidt_number_ppt(psi.density().matrix, cut) == min(2, schmidt_decompose(psi, cut).rank)


def test_product_state_is_schmidt_one():
    prod = np.kron(random_density(2, seed=1).matrix, random_density(3, seed=2).matrix)
    assert schmidt_number_ppt(prod, "2x3") == 1


def test_ppt_refuses_larger_cuts():
    with pytest.raises(errors.UnsupportedCut):
        schmidt_number_ppt(np.eye(9) / 9, "3x3")


@pytest.mark.parametrize("p", [0.5, 0.7, 0.9])
def test_convex_roof_matches_concurrence_formula(p):
    rho = werner(p)
    bound = convex_roof_search("entropy", rho, "2x2", trials=200, seed=0)
    exact = oracles.wootters_entanglement(rho)
    assert bound.direction == "upper"
    assert exact - 1e-9 <= bound.value <= exact + 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_convex_roof_random_two_qubit(seed):
    rho = random_density(4, rank=2, seed=seed).matrix
    bound = convex_roof_search("entropy", rho, "2x2", trials=200, seed=seed)
    exact = oracles.wootters_entanglement(rho)
    assert exact - 1e-9 <= bound.value <= exact + 1e-6


def test_convex_roof_of_pure_state_is_exact():
    psi = random_pure(4, seed=4)
    bound = convex_roof_search("entropy", psi.density().matrix, "2x2", trials=5, seed=0)
    assert bound.value == pytest.approx(entanglement_entropy(psi, "2x2"), abs=1e-9)


def test_convex_roof_schmidt_rank():
    bound = convex_roof_search(schmidt_rank, werner(0.2), "2x2", trials=50, seed=0)
    assert bound.value >= 1 - 1e-12


def test_ensemble_size_check():
    with pytest.raises(errors.BadEnsembleSize):
        convex_roof_search("entropy", werner(0.5), "2x2", ensemble_size=2)


def test_convex_roof_deterministic():
    a = convex_roof_search("entropy", werner(0.6), "2x2", trials=20, seed=3, refine=20)
    b = convex_roof_search("entropy", werner(0.6), "2x2", trials=20, seed=3, refine=20)
    assert a.value == b.value


def test_smoothed_extension_monotone_in_epsilon():
    rho = werner(0.8)
    vals = [smoothed_extension("entropy", rho, "2x2", e, trials=30, seed=1, candidates=8).value for e in (0, 0.05, 0.3)]
    assert vals[0] >= vals[1] >= vals[2]
    with pytest.raises(errors.BadEpsilon):
        smoothed_extension("entropy", rho, "2x2", 1.0)
