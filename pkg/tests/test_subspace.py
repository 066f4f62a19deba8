import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_bases
from scdkit.errors import DimensionMismatch, NotRegular, RankDeficient, SingularTransform
from scdkit.subspace import (
    Subspace,
    adjoint,
    c_matrix,
    complement_basis,
    distance,
    from_basis,
    from_blocks,
    graph_of,
    is_regular,
    operator_norm,
    symplectic,
    transform,
)

# T = [[I, 0], [grad f^T, I]] for f(x) = (x1, -x2)
EX65_T = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, -1, 0, 1]], dtype=float)
C_TL2 = np.array([[4 / 3, 2 / 3], [2 / 3, 1 / 3]])


def tl2():
    # ((u, u/2), (u - v/2, -u/2 + v))
    return from_basis(np.array([[1, 0], [0.5, 0], [1, -0.5], [-0.5, 1]]))


class TestFromBasis:
    def test_line_is_normalized(self):
        L = from_basis([1.0, 1.0])
        assert L.n == 1
        np.testing.assert_allclose(np.abs(L.basis.ravel()), [2**-0.5, 2**-0.5], atol=1e-12)

    def test_tl2_generators(self):
        L = tl2()
        assert L.n == 2
        np.testing.assert_allclose(L.basis.T @ L.basis, np.eye(2), atol=1e-10)
        P = L.projection
        assert np.linalg.norm(P @ P - P) <= 1e-9
        assert abs(np.trace(P) - 2) <= 1e-9

    def test_zero_matrix_is_rank_deficient(self):
        with pytest.raises(RankDeficient):
            from_basis(np.zeros((2, 1)))

    def test_wrong_shape(self):
        with pytest.raises(DimensionMismatch):
            from_basis(np.ones((3, 1)))

    def test_non_orthonormal_basis_rejected(self):
        with pytest.raises(ValueError):
            Subspace(1, np.array([[1.0], [1.0]]))

    @settings(max_examples=100, deadline=None)
    @given(random_bases(), st.integers(0, 2**32 - 1))
    def test_basis_independence(self, M, seed):
        n = M.shape[1]
        B = np.random.default_rng(seed).normal(size=(n, n)) + 3 * np.eye(n)
        assert distance(from_basis(M @ B), from_basis(M)) <= 1e-9


class TestDistance:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_complementary_coordinate_planes(self, n):
        I, Z = np.eye(n), np.zeros((n, n))
        assert distance(from_blocks(I, Z), from_blocks(Z, I)) == pytest.approx(1.0, abs=1e-12)

    def test_self_distance_zero(self):
        assert distance(tl2(), tl2()) == pytest.approx(0.0, abs=1e-12)

    def test_line_at_45_degrees(self):
        # oracle: P1 = diag(1, 0), P2 = ones/2, eigenvalues of P1 - P2 are +-sqrt(2)/2
        P1 = np.diag([1.0, 0.0])
        P2 = 0.5 * np.ones((2, 2))
        expected = np.abs(np.linalg.eigvalsh(P1 - P2)).max()
        assert expected == pytest.approx(np.sqrt(2) / 2)
        assert distance(from_basis([1.0, 0.0]), from_basis([1.0, 1.0])) == pytest.approx(expected, abs=1e-12)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance(from_basis([1.0, 0.0]), tl2())

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[random_bases(n)] * 3)))
    def test_metric_axioms(self, triple):
        L1, L2, L3 = (from_basis(M) for M in triple)
        d12, d21 = distance(L1, L2), distance(L2, L1)
        assert d12 >= 0
        assert d12 == pytest.approx(d21, abs=1e-12)
        assert distance(L1, L1) <= 1e-9
        assert d12 <= distance(L1, L3) + distance(L3, L2) + 1e-9


class TestAdjoint:
    def test_graph_adjoint_is_transpose_graph(self):
        A = np.array([[1.0, 2.0], [-3.0, 0.5]])
        assert distance(adjoint(graph_of(A)), graph_of(A.T)) <= 1e-9

    @pytest.mark.parametrize("n", [1, 3])
    def test_horizontal_plane_is_self_adjoint(self, n):
        L = from_blocks(np.eye(n), np.zeros((n, n)))
        assert distance(adjoint(L), L) <= 1e-9

    def test_firmly_nonexpansive_form_self_adjoint(self):
        B = np.diag([1.0, 0.0])
        L = from_blocks(B, np.eye(2) - B)
        assert distance(adjoint(L), L) <= 1e-9

    def test_matches_symplectic_complement(self):
        L = tl2()
        assert distance(from_basis(symplectic(2) @ complement_basis(L)), adjoint(L)) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(random_bases())
    def test_involution(self, M):
        L = from_basis(M)
        assert distance(adjoint(adjoint(L)), L) <= 1e-9

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(random_bases(n), random_bases(n))))
    def test_isometry(self, pair):
        L1, L2 = (from_basis(M) for M in pair)
        assert abs(distance(adjoint(L1), adjoint(L2)) - distance(L1, L2)) <= 1e-9


class TestRegularity:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_rge_c_identity_is_regular(self, n):
        C = np.random.default_rng(n).normal(size=(n, n))
        assert is_regular(from_blocks(C, np.eye(n)))

    def test_horizontal_plane_is_irregular(self):
        assert not is_regular(from_blocks(np.eye(2), np.zeros((2, 2))))

    def test_vertical_plane_is_regular(self):
        assert is_regular(from_blocks(np.zeros((2, 2)), np.eye(2)))

    def test_c_matrix_tl2(self):
        np.testing.assert_allclose(c_matrix(tl2()), C_TL2, atol=1e-12)

    def test_c_matrix_tl1(self):
        # TL1 = {((u, v), (u, -v))}
        L = from_blocks(np.eye(2), np.diag([1.0, -1.0]))
        np.testing.assert_allclose(c_matrix(L), np.diag([1.0, -1.0]), atol=1e-12)

    def test_c_matrix_scalar(self):
        assert c_matrix(from_blocks([[2.5]], [[1.0]]))[0, 0] == pytest.approx(2.5)

    def test_c_matrix_rejects_irregular(self):
        with pytest.raises(NotRegular):
            c_matrix(from_blocks([[1.0]], [[0.0]]))

    @settings(max_examples=100, deadline=None)
    @given(random_bases())
    def test_c_matrix_roundtrip_and_transpose(self, M):
        L = from_basis(M)
        if not is_regular(L):
            return
        C = c_matrix(L)
        if operator_norm(C) > 1e4:
            return
        assert distance(from_blocks(C, np.eye(L.n)), L) <= 1e-9
        np.testing.assert_allclose(c_matrix(adjoint(L)), C.T, atol=1e-9 * max(1.0, operator_norm(C) ** 2))

    @settings(max_examples=100, deadline=None)
    @given(random_bases(), st.integers(0, 2**32 - 1))
    def test_kappa_bound(self, M, seed):
        L = from_basis(M)
        if not is_regular(L):
            return
        kappa = operator_norm(c_matrix(L))
        z = L.basis @ np.random.default_rng(seed).normal(size=L.n)
        ystar, xstar = z[: L.n], z[L.n :]
        assert np.linalg.norm(ystar) <= kappa * np.linalg.norm(xstar) + 1e-9 * max(1.0, kappa)


class TestTransform:
    def test_identity(self):
        assert distance(transform(tl2(), np.eye(4)), tl2()) <= 1e-12

    def test_example_65_l2(self):
        # L2 = {((u, u/2), (-v/2, v))}
        L2 = from_basis(np.array([[1, 0], [0.5, 0], [0, -0.5], [0, 1]]))
        assert distance(transform(L2, EX65_T), tl2()) <= 1e-12

    def test_singular(self):
        with pytest.raises(SingularTransform):
            transform(tl2(), np.diag([1.0, 1.0, 1.0, 0.0]))

    def test_shape(self):
        with pytest.raises(DimensionMismatch):
            transform(tl2(), np.eye(2))


class TestOperatorNorm:
    def test_diag(self):
        assert operator_norm(np.diag([3.0, 4.0])) == pytest.approx(4.0)

    def test_c_tl2(self):
        assert operator_norm(C_TL2) == pytest.approx(5 / 3, abs=1e-12)

    def test_zero(self):
        assert operator_norm(np.zeros((3, 3))) == 0.0


def test_json_roundtrip():
    L = tl2()
    M = Subspace.from_json(L.to_json())
    assert distance(L, M) <= 1e-12
    assert M.to_json()["n"] == 2
