import unittest

import numpy as np

from tubalfgd.algebra import (
    SpectralTensor,
    Tensor3,
    conj_transpose,
    fft3,
    fro_norm,
    identity_tensor,
    ifft3,
    inner,
    lateral_slices,
    random_tensor,
    spectral_norm,
    sym,
    t_product,
    zeros,
)
from tubalfgd.algebra.oracle import bcirc_matrix
from tubalfgd.errors import InvalidParameter, NonRealResult, ShapeMismatch


def rel_err(A, B):
    return np.linalg.norm(A.data - B.data) / max(1.0, np.linalg.norm(B.data))


class TestTensor3(unittest.TestCase):
    """Tests for the Tensor3 value type."""

    def test_copies_and_freezes_input(self):
        arr = np.ones((2, 3, 4))
        A = Tensor3(arr)
        arr[0, 0, 0] = 5.0
        self.assertEqual(A.data[0, 0, 0], 1.0)
        with self.assertRaises(ValueError):
            A.data[0, 0, 0] = 2.0

    def test_rejects_non_finite_entries(self):
        arr = np.zeros((2, 2, 2))
        arr[1, 0, 1] = np.nan
        with self.assertRaises(InvalidParameter):
            Tensor3(arr)
        arr[1, 0, 1] = np.inf
        with self.assertRaises(InvalidParameter):
            Tensor3(arr)

    def test_rejects_bad_shapes(self):
        with self.assertRaises(ShapeMismatch):
            Tensor3(np.zeros((2, 2)))
        with self.assertRaises(ShapeMismatch):
            Tensor3(np.zeros((2, 0, 3)))

    def test_slice_layout(self):
        A = random_tensor((3, 2, 4), np.random.default_rng(0))
        slices = A.to_slices()
        self.assertEqual(slices.shape, (4, 3, 2))
        np.testing.assert_array_equal(slices[2], A.frontal(2))
        np.testing.assert_array_equal(Tensor3.from_slices(slices).data, A.data)

    def test_arithmetic(self):
        rng = np.random.default_rng(1)
        A = random_tensor((3, 3, 2), rng)
        B = random_tensor((3, 3, 2), rng)
        np.testing.assert_allclose((A + B).data, A.data + B.data)
        np.testing.assert_allclose((A - B).data, A.data - B.data)
        np.testing.assert_allclose((2.0 * A).data, 2.0 * A.data)
        np.testing.assert_allclose((A / 4.0).data, A.data / 4.0)
        np.testing.assert_allclose((-A).data, -A.data)
        np.testing.assert_allclose((A @ B).data, t_product(A, B).data)
        np.testing.assert_array_equal(A.H.data, conj_transpose(A).data)
        with self.assertRaises(ShapeMismatch):
            A + random_tensor((3, 2, 2), rng)

    def test_zeros_and_lateral_slices(self):
        self.assertEqual(fro_norm(zeros(2, 3, 4)), 0.0)
        A = random_tensor((4, 5, 3), np.random.default_rng(2))
        B = lateral_slices(A, slice(0, 2))
        self.assertEqual(B.shape, (4, 2, 3))
        np.testing.assert_allclose(fft3(B).slices, fft3(A).slices[:, :, :2], atol=1e-12)


class TestFft(unittest.TestCase):
    """Tests for fft3 and ifft3."""

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_single_slice_is_unchanged(self):
        A = random_tensor((3, 2, 1), self.rng)
        np.testing.assert_array_equal(fft3(A).slices[0], A.frontal(0))

    def test_two_point_dft(self):
        A = Tensor3([[[1.0, 2.0]]])
        np.testing.assert_allclose(fft3(A).slices[:, 0, 0], [3.0, -1.0])

    def test_parseval(self):
        A = random_tensor((3, 3, 4), self.rng)
        ratio = fft3(A).fro_norm() ** 2 / fro_norm(A) ** 2
        self.assertAlmostEqual(ratio, 4.0, delta=1e-10)

    def test_round_trip(self):
        A = random_tensor((4, 3, 5), self.rng)
        self.assertLessEqual(rel_err(ifft3(fft3(A)), A), 1e-12)

    def test_conjugate_symmetry_of_real_spectrum(self):
        A = random_tensor((2, 3, 5), self.rng)
        slices = fft3(A).slices
        for k in range(1, 5):
            np.testing.assert_allclose(slices[k], np.conj(slices[5 - k]), atol=1e-12)

    def test_inconsistent_spectrum_raises(self):
        S = SpectralTensor(np.array([[[1.0]], [[2.0j]]]))
        with self.assertRaises(NonRealResult):
            ifft3(S)

    def test_zero_spectrum(self):
        A = ifft3(SpectralTensor(np.zeros((3, 2, 2))))
        np.testing.assert_array_equal(A.data, np.zeros((2, 2, 3)))


class TestTProduct(unittest.TestCase):
    """Tests for the t-product and its algebraic properties."""

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def _dims(self):
        return [int(d) for d in self.rng.integers(1, 6, size=3)] + [int(self.rng.integers(1, 7))]

    def test_identity(self):
        A = random_tensor((4, 3, 5), self.rng)
        self.assertLessEqual(rel_err(t_product(identity_tensor(4, 5), A), A), 1e-12)

    def test_tube_product(self):
        C = t_product(Tensor3([[[1.0, 2.0]]]), Tensor3([[[3.0, 4.0]]]))
        np.testing.assert_allclose(C.data[0, 0], [11.0, 10.0], atol=1e-12)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            t_product(zeros(2, 3, 4), zeros(2, 3, 4))
        with self.assertRaises(ShapeMismatch):
            t_product(zeros(2, 3, 4), zeros(3, 3, 5))

    def test_transpose_of_product(self):
        for _ in range(50):
            n1, n2, q, n3 = self._dims()
            A = random_tensor((n1, n2, n3), self.rng)
            B = random_tensor((n2, q, n3), self.rng)
            lhs = conj_transpose(t_product(A, B))
            rhs = t_product(conj_transpose(B), conj_transpose(A))
            self.assertLessEqual(rel_err(lhs, rhs), 1e-10)

    def test_associativity(self):
        for _ in range(50):
            n1, n2, q, n3 = self._dims()
            p = int(self.rng.integers(1, 6))
            A = random_tensor((n1, n2, n3), self.rng)
            B = random_tensor((n2, q, n3), self.rng)
            C = random_tensor((q, p, n3), self.rng)
            lhs = t_product(t_product(A, B), C)
            rhs = t_product(A, t_product(B, C))
            self.assertLessEqual(rel_err(lhs, rhs), 1e-9)


class TestConjTranspose(unittest.TestCase):
    """Tests for conj_transpose and sym."""

    def setUp(self):
        self.rng = np.random.default_rng(3)

    def test_involution(self):
        A = random_tensor((3, 4, 5), self.rng)
        np.testing.assert_array_equal(conj_transpose(conj_transpose(A)).data, A.data)

    def test_slice_reversal(self):
        A = random_tensor((2, 3, 4), self.rng)
        At = conj_transpose(A)
        for k, source in enumerate([0, 3, 2, 1]):
            np.testing.assert_array_equal(At.frontal(k), A.frontal(source).T)

    def test_single_slice_is_matrix_transpose(self):
        A = random_tensor((2, 3, 1), self.rng)
        np.testing.assert_array_equal(conj_transpose(A).frontal(0), A.frontal(0).T)

    def test_spectral_characterization(self):
        A = random_tensor((3, 2, 4), self.rng)
        np.testing.assert_allclose(
            fft3(conj_transpose(A)).slices, fft3(A).H.slices, atol=1e-12
        )

    def test_symmetric_tensor_has_hermitian_spectrum(self):
        X = sym(random_tensor((4, 4, 5), self.rng))
        slices = fft3(X).slices
        np.testing.assert_allclose(slices, np.conj(np.swapaxes(slices, 1, 2)), atol=1e-10)

    def test_sym_needs_square(self):
        with self.assertRaises(ShapeMismatch):
            sym(zeros(2, 3, 2))


class TestIdentityAndNorms(unittest.TestCase):
    """Tests for identity_tensor and the norms."""

    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_scalar_identity(self):
        np.testing.assert_array_equal(identity_tensor(1, 1).data, [[[1.0]]])

    def test_identity_spectrum(self):
        for S in fft3(identity_tensor(3, 4)).slices:
            np.testing.assert_allclose(S, np.eye(3))

    def test_identity_squared(self):
        I = identity_tensor(3, 4)
        self.assertLessEqual(rel_err(t_product(I, I), I), 1e-12)

    def test_identity_rejects_empty(self):
        with self.assertRaises(InvalidParameter):
            identity_tensor(0, 3)

    def test_spectral_norm_of_identity(self):
        self.assertAlmostEqual(spectral_norm(identity_tensor(4, 3)), 1.0, places=12)

    def test_spectral_norm_single_slice(self):
        A = random_tensor((4, 3, 1), self.rng)
        self.assertAlmostEqual(spectral_norm(A), np.linalg.norm(A.frontal(0), 2), places=10)

    def test_spectral_norm_matches_bcirc(self):
        for _ in range(20):
            A = random_tensor((3, 4, 5), self.rng)
            self.assertAlmostEqual(
                spectral_norm(A), np.linalg.norm(bcirc_matrix(A), 2), delta=1e-8
            )

    def test_norm_ordering(self):
        for _ in range(100):
            A = random_tensor((3, 3, 4), self.rng)
            self.assertLessEqual(spectral_norm(A), fro_norm(A) + 1e-12)

    def test_inner(self):
        A = random_tensor((3, 2, 4), self.rng)
        self.assertAlmostEqual(inner(A, A), fro_norm(A) ** 2, places=10)
        with self.assertRaises(ShapeMismatch):
            inner(A, zeros(2, 3, 4))


if __name__ == "__main__":
    unittest.main()
