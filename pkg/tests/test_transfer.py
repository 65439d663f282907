"""Tests for sesop_mg.transfer."""

from __future__ import annotations

import numpy as np
import pytest

from sesop_mg.grid import GridField, StencilOp, assemble_dense, mesh_size
from sesop_mg.transfer import (
    ProlongationKind,
    TransferPair,
    coarse_size,
    galerkin_coarse_dense,
    galerkin_coarse_sparse,
    prolong,
    restrict,
)


def test_coarse_size():
    assert coarse_size(63) == 31
    assert coarse_size(3) == 1
    with pytest.raises(ValueError):
        coarse_size(64)


def test_incompatible_sizes_rejected():
    with pytest.raises(ValueError, match="incompatible"):
        TransferPair(15, 8)


@pytest.mark.parametrize("kind", list(ProlongationKind))
def test_restriction_is_quarter_transpose_of_bilinear(kind):
    t = TransferPair.for_fine(7, kind)
    bilinear = TransferPair.for_fine(7).prolongation_matrix.toarray()
    np.testing.assert_allclose(t.restriction_matrix.toarray(), 0.25 * bilinear.T)


def test_full_weighting_stencil_at_interior_point():
    t = TransferPair.for_fine(7)
    fine = np.zeros((7, 7))
    fine[3, 3] = 16.0
    coarse = t.restrict_values(fine)
    assert coarse[1, 1] == pytest.approx(4.0)
    fine = np.zeros((7, 7))
    fine[2, 3] = 16.0
    coarse = t.restrict_values(fine)
    assert coarse[0, 1] == pytest.approx(2.0)
    assert coarse[1, 1] == pytest.approx(2.0)


@pytest.mark.parametrize("kind", list(ProlongationKind))
def test_prolongation_injects_coarse_points(kind):
    t = TransferPair.for_fine(15, kind)
    coarse = np.random.default_rng(1).standard_normal((7, 7))
    fine = t.prolong_values(coarse)
    np.testing.assert_allclose(fine[1::2, 1::2], coarse)


def test_bilinear_reproduces_linear_functions():
    t = TransferPair.for_fine(15)
    coarse = GridField.sample(lambda x, y: 2 * x + 3 * y, 7)
    fine = prolong(t, coarse)
    expected = GridField.sample(lambda x, y: 2 * x + 3 * y, 15)
    # the zero halo only disturbs the cells touching the boundary
    np.testing.assert_allclose(fine.values[1:-1, 1:-1], expected.values[1:-1, 1:-1], atol=1e-12)


def test_bicubic_reproduces_cubics_away_from_boundary():
    t = TransferPair.for_fine(31, ProlongationKind.BICUBIC)

    def cubic(x, y):
        return x**3 + y**3

    fine = prolong(t, GridField.sample(cubic, 15))
    expected = GridField.sample(cubic, 31).values
    np.testing.assert_allclose(fine.values[4:27, 4:27], expected[4:27, 4:27], atol=1e-12)


def test_restrict_and_prolong_update_mesh_size():
    t = TransferPair.for_fine(7)
    fine = GridField.zeros(7)
    assert restrict(t, fine).h == pytest.approx(0.25)
    assert prolong(t, GridField.zeros(3)).h == pytest.approx(0.125)


def test_shape_validation():
    t = TransferPair.for_fine(7)
    with pytest.raises(ValueError):
        t.restrict_values(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        t.prolong_values(np.zeros((7, 7)))


def test_galerkin_of_laplacian_is_laplacian_like():
    n = 7
    weights = np.array([[0.0, -1.0, 0.0], [-1.0, 4.0, -1.0], [0.0, -1.0, 0.0]])
    A = assemble_dense(StencilOp(weights, mesh_size(n)), n)
    t = TransferPair.for_fine(n)
    dense = galerkin_coarse_dense(A, t)
    sparse_ = galerkin_coarse_sparse(StencilOp(weights, mesh_size(n)).sparse_matrix(n), t).toarray()
    np.testing.assert_allclose(dense, sparse_, atol=1e-10)
    np.testing.assert_allclose(dense, dense.T, atol=1e-10)
    assert np.linalg.eigvalsh(dense).min() > 0


def test_galerkin_size_mismatch():
    with pytest.raises(ValueError, match="size mismatch"):
        galerkin_coarse_dense(np.eye(4), TransferPair.for_fine(7))
