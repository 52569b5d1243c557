import numpy as np
import pytest

from algebra.algebra_zoo import build_pair, build_toy_pair
from equivariant.hom_spaces import (KINDS, check_budget, dim_hom_all, dim_hom_bilinear, dim_hom_lambda3,
                                    invariant_tensors, tensor_action, unknown_count)
from utils.exceptions import BudgetExceededError, UsageError

NON_SU = {"bilinear": 63, "lambda2": 30, "lambda3": 10}
SU = {"bilinear": 99, "lambda2": 45, "lambda3": 13}


def assert_dims(pair, expected):
    results = dim_hom_all(pair)
    for kind, dimension in expected.items():
        result = results[kind]
        assert result.dimension == dimension, kind
        assert result.clean, kind
        assert result.equivariance_residual < 1e-8, kind


@pytest.mark.parametrize("pair_name", ["sp1_pair", "sp2_pair", "so7_pair", "g2_pair"])
def test_dimensions_without_phi0(request, pair_name):
    assert_dims(request.getfixturevalue(pair_name), NON_SU)


def test_dimensions_on_su3(su3_pair):
    assert_dims(su3_pair, SU)


@pytest.mark.slow
@pytest.mark.parametrize("space, expected", [("sp:3", NON_SU), ("so:8", NON_SU), ("su:4", SU), ("f4", NON_SU)])
def test_dimensions_on_larger_families(space, expected):
    assert_dims(build_pair(space), expected)


def test_abelian_toy_has_every_tensor():
    results = dim_hom_all(build_toy_pair("abelian", 3))
    assert {k: r.dimension for k, r in results.items()} == {"bilinear": 27, "lambda2": 9, "lambda3": 1}
    assert all(r.method == "trivial" and r.gap is None for r in results.values())


def test_euclidean_toy_has_only_the_cross_product():
    pair = build_toy_pair("euclidean")
    results = dim_hom_all(pair)
    assert {k: r.dimension for k, r in results.items()} == {"bilinear": 1, "lambda2": 1, "lambda3": 1}
    cross = results["bilinear"].basis[0]
    # proportional to the Levi-Civita symbol
    ratio = cross[0, 1, 2]
    assert abs(ratio) > 0
    assert np.allclose(cross[1, 2, 0], ratio)
    assert np.allclose(cross[1, 0, 2], -ratio)


def test_basis_tensors_are_invariant_and_antisymmetric(sp1_pair):
    result = dim_hom_lambda3(sp1_pair)
    omega = result.basis
    assert np.allclose(omega, -omega.transpose(0, 2, 1, 3))
    assert np.allclose(omega, -omega.transpose(0, 1, 3, 2))
    for action in sp1_pair.h_action:
        assert np.abs(tensor_action(omega, action, "lambda3")).max() < 1e-8


def test_packed_basis(sp1_pair):
    result = dim_hom_lambda3(sp1_pair)
    assert result.packed_basis().shape == (10, 35)
    assert dim_hom_bilinear(sp1_pair).packed_basis().shape == (63, 343)


def test_result_to_dict(sp1_pair):
    result = dim_hom_lambda3(sp1_pair)
    data = result.to_dict()
    assert data["dimension"] == 10
    assert data["space"] == "sp:1"
    assert data["unknowns"] == 35
    assert data["reduced_unknowns"] <= 35
    assert data["source"] == KINDS["lambda3"]["source"]


def test_seed_does_not_change_dimension(sp2_pair):
    assert dim_hom_lambda3(sp2_pair, seed=1).dimension == dim_hom_lambda3(sp2_pair, seed=99).dimension == 10


class TestBudget:
    def test_unknown_count(self):
        assert unknown_count("bilinear", 7) == 343
        assert unknown_count("lambda2", 7) == 147
        assert unknown_count("lambda3", 7) == 35
        with pytest.raises(UsageError):
            unknown_count("sym2", 7)

    def test_over_budget_is_refused(self):
        with pytest.raises(BudgetExceededError) as excinfo:
            check_budget("so:9", 27, False, "bilinear", budget=1000)
        assert excinfo.value.unknowns == 27 ** 3
        assert excinfo.value.budget == 1000

    def test_force_skips_the_budget(self):
        assert check_budget("so:9", 27, False, "bilinear", force=True, budget=1000) == 27 ** 3

    def test_lambda3_on_large_spaces_is_refused(self):
        with pytest.raises(BudgetExceededError):
            check_budget("e8", 115, True, "lambda3", budget=10 ** 9)
        assert check_budget("e8", 115, True, "lambda3", force=True) == unknown_count("lambda3", 115)

    def test_solver_respects_budget(self, sp1_pair):
        with pytest.raises(BudgetExceededError):
            invariant_tensors(sp1_pair, "bilinear", budget=100)

    def test_unknown_kind(self, sp1_pair):
        with pytest.raises(UsageError):
            invariant_tensors(sp1_pair, "sym2")
