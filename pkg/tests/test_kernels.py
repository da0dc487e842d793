import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkaehler import kernels


@pytest.fixture(scope="module", autouse=True)
def warmed():
    kernels.warmup()


def random_case(rng, rows, order, npts):
    coeffs = rng.standard_normal((rows, order + 1)) + 1j * rng.standard_normal(
        (rows, order + 1)
    )
    dz = 0.5 * (rng.standard_normal(npts) + 1j * rng.standard_normal(npts))
    return coeffs, dz


class TestHorner:
    def test_matches_polyval_reference(self):
        rng = np.random.default_rng(0)
        coeffs, dz = random_case(rng, rows=5, order=12, npts=7)
        out = kernels.horner_many(coeffs, dz)
        for r in range(5):
            expect = np.polyval(coeffs[r, ::-1], dz)
            np.testing.assert_allclose(out[r], expect, rtol=1e-12)

    def test_backends_agree(self):
        rng = np.random.default_rng(1)
        coeffs, dz = random_case(rng, rows=8, order=32, npts=20)
        np.testing.assert_allclose(
            kernels.horner_many(coeffs, dz),
            kernels.horner_many_numpy(coeffs, dz),
            rtol=1e-13,
            atol=1e-13,
        )

    @given(st.integers(0, 6), st.integers(1, 5))
    @settings(max_examples=25, deadline=None)
    def test_agreement_across_shapes(self, order, npts):
        rng = np.random.default_rng(order * 31 + npts)
        coeffs, dz = random_case(rng, rows=3, order=order, npts=npts)
        np.testing.assert_allclose(
            kernels.horner_many(coeffs, dz),
            kernels.horner_many_numpy(coeffs, dz),
            rtol=1e-13,
            atol=1e-13,
        )

    def test_constant_series(self):
        coeffs = np.array([[2.0 + 1.0j]])
        out = kernels.horner_many(coeffs, np.array([0.3 + 0.1j, -1.0 + 0.0j]))
        np.testing.assert_array_equal(out, [[2.0 + 1.0j, 2.0 + 1.0j]])


class TestCrossColumns:
    def test_three_dimensional_case_is_the_cross_product(self):
        rng = np.random.default_rng(2)
        d1 = rng.standard_normal((10, 2, 3))
        out = kernels.cross_columns(d1)
        for p in range(10):
            np.testing.assert_allclose(
                out[p], np.cross(d1[p, 0], d1[p, 1]), rtol=1e-12, atol=1e-12
            )

    def test_result_is_orthogonal_with_det_pairing(self):
        rng = np.random.default_rng(3)
        d1 = rng.standard_normal((6, 4, 5))
        out = kernels.cross_columns(d1)
        for p in range(6):
            # orthogonal to every row, and pairing with u gives det([u|rows])
            np.testing.assert_allclose(d1[p] @ out[p], 0.0, atol=1e-10)
            u = rng.standard_normal(5)
            full = np.column_stack([u, d1[p].T])
            assert out[p] @ u == pytest.approx(np.linalg.det(full), rel=1e-10)

    def test_backends_agree(self):
        rng = np.random.default_rng(4)
        for d in (2, 3, 4, 6):
            d1 = rng.standard_normal((5, d, d + 1))
            np.testing.assert_allclose(
                kernels.cross_columns(d1),
                kernels.cross_columns_numpy(d1),
                rtol=1e-11,
                atol=1e-11,
            )

    def test_shape_mismatch_is_rejected(self):
        with pytest.raises(ValueError, match="ambient"):
            kernels.cross_columns_numpy(np.zeros((1, 2, 4)))

    def test_degenerate_rows_give_zero(self):
        d1 = np.array([[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]])
        np.testing.assert_array_equal(kernels.cross_columns(d1), [[0.0, 0.0, 0.0]])


class TestBackendSelection:
    def test_default_backend_is_numba_here(self):
        assert kernels.HAS_NUMBA
        assert kernels.BACKEND == "numba"
        assert kernels.horner_many is kernels.horner_many_numba
        assert kernels.cross_columns is kernels.cross_columns_numba

    def test_warmup_reports_backend(self):
        assert kernels.warmup() == kernels.BACKEND

    def test_env_flag_forces_numpy(self):
        code = (
            "from minkaehler import kernels; "
            "print(kernels.BACKEND, kernels.horner_many is kernels.horner_many_numpy)"
        )
        proc = subprocess.run(
            [sys.executable, "-c", code],
            env={**os.environ, "MINKAEHLER_PURE_NUMPY": "1"},
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.split() == ["numpy", "True"]
