import numpy as np
import pytest

from algebra.algebra_zoo import build_pair, build_toy_pair, check_projective_invariance
from algebra.composition import (build_complexes, build_octonions, build_quaternions, build_reals,
                                 derivation_algebra_basis, derivation_identity_residuals, derivation_residual)
from algebra.jordan import build_jordan
from algebra.jordan import derivation_residual as jordan_derivation_residual
from algebra.tits import build_tits
from geometry.sasaki_geometry import make_frame
from utils.exceptions import UsageError


class TestCompositionAlgebras:
    @pytest.mark.parametrize("builder, dim", [(build_complexes, 2), (build_quaternions, 4), (build_octonions, 8)])
    def test_norm_is_multiplicative(self, builder, dim):
        C = builder()
        assert C.dim == dim
        residuals = C.invariant_residuals()
        assert residuals["multiplicativity"] < 1e-12
        assert residuals["quadratic"] < 1e-12

    def test_quaternion_products(self):
        H = build_quaternions()
        i, j, k = H.element("i"), H.element("j"), H.element("k")
        assert np.allclose(H.multiply(i, j), k)
        assert np.allclose(H.multiply(j, i), -k)
        assert np.allclose(H.multiply(i, i), -H.unit())

    def test_octonions_are_not_associative(self):
        O = build_octonions()
        i, j, l = O.element("i"), O.element("j"), O.element("l")
        assert not np.allclose(O.multiply(O.multiply(i, j), l), O.multiply(i, O.multiply(j, l)))

    @pytest.mark.parametrize("builder, dim", [(build_quaternions, 3), (build_octonions, 14)])
    def test_derivation_algebra(self, builder, dim):
        C = builder()
        basis = derivation_algebra_basis(C)
        assert len(basis) == dim
        assert max(derivation_residual(D, C) for D in basis) < 1e-10

    def test_derivation_identities(self, rng):
        O = build_octonions()
        a, b, c = rng.standard_normal((3, 8))
        d = derivation_algebra_basis(O)[0]
        residuals = derivation_identity_residuals(O, a, b, c, d)
        assert all(value < 1e-9 for value in residuals.values())


class TestJordanAlgebras:
    @pytest.mark.parametrize("builder, dim, derivations", [
        (None, 1, 0),
        (build_reals, 6, 3),
        (build_complexes, 9, 8),
        (build_quaternions, 15, 21),
    ])
    def test_dimensions(self, builder, dim, derivations):
        J = build_jordan(None if builder is None else builder())
        assert J.dim == dim
        assert J.dim_traceless == dim - 1
        assert len(J.derivations) == derivations

    def test_albert_algebra(self):
        J = build_jordan(build_octonions())
        assert J.dim == 27
        assert len(J.derivations) == 52
        assert J.jordan_identity_residual(samples=5) < 1e-10

    def test_derivations_are_derivations(self):
        J = build_jordan(build_complexes())
        assert max(jordan_derivation_residual(D, J) for D in J.derivations) < 1e-10

    def test_traceless_basis_is_orthonormal(self):
        J = build_jordan(build_quaternions())
        gram = J.traceless @ J.trace_form() @ J.traceless.T
        assert np.allclose(gram, np.eye(J.dim_traceless))


class TestTitsConstruction:
    @pytest.mark.parametrize("jordan, dim", [(None, 3), ("C", 35)])
    def test_quaternionic_row(self, jordan, dim):
        H = build_quaternions()
        J = build_jordan(None if jordan is None else build_complexes())
        algebra, layout = build_tits(H, J)
        assert algebra.dim == dim
        assert algebra.check_jacobi().passed

    def test_g2_from_octonions(self):
        algebra, layout = build_tits(build_octonions(), build_jordan(None))
        assert algebra.dim == 14
        assert layout.dim_j0 == 0
        assert algebra.killing_form().is_negative_definite()

    def test_rejects_small_composition_algebras(self):
        with pytest.raises(UsageError):
            build_tits(build_complexes(), build_jordan(None))

    @pytest.mark.slow
    def test_f4(self):
        algebra, _ = build_tits(build_octonions(), build_jordan(build_reals()))
        assert algebra.dim == 52


class TestReductivePairs:
    @pytest.mark.parametrize("space, g, h, n", [
        ("sp:1", 10, 3, 1),
        ("sp:2", 21, 10, 2),
        ("so:7", 21, 6, 3),
        ("su:3", 8, 1, 1),
        ("g2", 14, 3, 2),
    ])
    def test_dimensions(self, space, g, h, n):
        pair = build_pair(space)
        assert pair.dims() == {"g": g, "h": h, "m": 4 * n + 3}
        assert pair.n == n
        assert pair.space_id == space

    @pytest.mark.slow
    @pytest.mark.parametrize("space, g, n", [("so:9", 36, 5), ("su:5", 24, 3), ("f4", 52, 7)])
    def test_larger_dimensions(self, space, g, n):
        pair = build_pair(space)
        assert pair.g.dim == g
        assert pair.dim_m == 4 * n + 3

    @pytest.mark.slow
    def test_e7_jacobi_is_exhaustive(self):
        pair = build_pair("e7")
        report = pair.g.check_jacobi()
        assert report.mode == "exhaustive"
        assert report.rows_checked == pair.g.dim == 133
        assert report.passed
        assert pair.residuals["jacobi"] <= 1e-9

    def test_structural_residuals(self, sp2_pair):
        assert max(sp2_pair.residuals.values()) < 1e-9
        assert set(["reductivity", "jacobi", "killing_xi", "metric_orthonormal"]) <= set(sp2_pair.residuals)

    def test_build_pair_spellings(self):
        assert build_pair("Sp", 1).space_id == "sp:1"
        assert build_pair("G2").space_id == "g2"

    @pytest.mark.parametrize("text", ["so:6", "su:2", "sp:0", "e9", "sp:x", ""])
    def test_out_of_scope(self, text):
        with pytest.raises(UsageError):
            build_pair(text)

    def test_three_sphere_behind_flag(self):
        pair = build_pair("sp:0", allow_n0=True)
        assert pair.dim_m == 3
        assert pair.dim_h == 0

    def test_only_su_carries_phi0(self, sp1_pair, su3_pair):
        assert sp1_pair.phi0_element is None
        assert su3_pair.phi0_element is not None

    def test_toy_pairs(self):
        abelian = build_toy_pair("abelian", dim=4)
        assert abelian.dim_m == 4 and abelian.dim_h == 0
        euclidean = build_toy_pair("euclidean")
        assert euclidean.dims() == {"g": 6, "h": 3, "m": 3}
        with pytest.raises(UsageError):
            make_frame(euclidean)
        with pytest.raises(UsageError):
            build_toy_pair("hyperbolic")

    def test_projective_invariance(self, sp1_pair):
        report = check_projective_invariance(sp1_pair)
        assert report.passed
        assert report.checked == 63

    def test_projective_invariance_needs_sp(self, su3_pair):
        with pytest.raises(UsageError):
            check_projective_invariance(su3_pair)
