import unittest

import numpy as np

from tubalfgd.algebra import (
    Tensor3,
    conj_transpose,
    fro_norm,
    identity_tensor,
    random_tensor,
    spectral_norm,
    t_product,
    zeros,
)
from tubalfgd.diagnostics import (
    error_terms,
    sample_deviation,
    subspace_basis,
    subspace_split,
    tilde_update,
)
from tubalfgd.errors import InvalidParameter, RankMismatch, ShapeMismatch
from tubalfgd.sensing import gen_problem
from tubalfgd.solver import population_step


def gram(F):
    return t_product(F, conj_transpose(F))


class TestSubspaceBasis(unittest.TestCase):
    """Tests for subspace_basis and subspace_split."""

    def setUp(self):
        self.rng = np.random.default_rng(0)
        self.F_star = random_tensor((6, 2, 3), self.rng)
        self.X_star = gram(self.F_star)
        self.B = subspace_basis(self.X_star, 2)

    def test_orthonormal_split(self):
        U, V = self.B.U, self.B.V
        self.assertEqual(U.shape, (6, 2, 3))
        self.assertEqual(V.shape, (6, 4, 3))
        self.assertEqual(self.B.D_star.shape, (2, 2, 3))
        self.assertLessEqual(fro_norm(t_product(conj_transpose(U), U) - identity_tensor(2, 3)), 1e-10)
        self.assertLessEqual(fro_norm(t_product(conj_transpose(V), V) - identity_tensor(4, 3)), 1e-10)
        self.assertLessEqual(fro_norm(t_product(conj_transpose(U), V)), 1e-10)
        self.assertLessEqual(
            fro_norm(self.B.reconstruct() - self.X_star), 1e-10 * fro_norm(self.X_star)
        )

    def test_rank_mismatch(self):
        with self.assertRaises(RankMismatch):
            subspace_basis(gram(random_tensor((6, 3, 3), self.rng)), 2)

    def test_rank_without_complement(self):
        with self.assertRaises(InvalidParameter):
            subspace_basis(identity_tensor(3, 2), 3)
        with self.assertRaises(InvalidParameter):
            subspace_basis(self.X_star, 0)

    def test_split_of_column_space_factor(self):
        M = random_tensor((2, 3, 3), self.rng)
        S, T = subspace_split(t_product(self.B.U, M), self.B)
        self.assertLessEqual(fro_norm(T), 1e-10 * fro_norm(M))
        self.assertLessEqual(fro_norm(S - M), 1e-10 * fro_norm(M))

    def test_split_of_complement_factor(self):
        N = random_tensor((4, 3, 3), self.rng)
        S, _ = subspace_split(t_product(self.B.V, N), self.B)
        self.assertLessEqual(fro_norm(S), 1e-10 * fro_norm(N))

    def test_split_preserves_energy(self):
        F = random_tensor((6, 4, 3), self.rng)
        S, T = subspace_split(F, self.B)
        self.assertAlmostEqual(
            fro_norm(S) ** 2 + fro_norm(T) ** 2, fro_norm(F) ** 2, delta=1e-9 * fro_norm(F) ** 2
        )

    def test_split_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            subspace_split(random_tensor((5, 2, 3), self.rng), self.B)


class TestErrorTerms(unittest.TestCase):
    """Tests for error_terms."""

    def setUp(self):
        self.rng = np.random.default_rng(1)
        self.F_star = random_tensor((7, 2, 4), self.rng)
        self.X_star = gram(self.F_star)
        self.B = subspace_basis(self.X_star, 2)

    def test_exact_factor(self):
        terms = error_terms(self.F_star, self.B, self.X_star)
        scale = spectral_norm(self.X_star)
        for value in terms.as_dict().values():
            self.assertLessEqual(value, 1e-9 * scale)

    def test_zero_factor(self):
        terms = error_terms(zeros(7, 3, 4), self.B, self.X_star)
        sigma1 = spectral_norm(self.X_star)
        self.assertAlmostEqual(terms.d_ss, sigma1, delta=1e-9 * sigma1)
        self.assertEqual(terms.st, 0.0)
        self.assertEqual(terms.tt, 0.0)
        self.assertAlmostEqual(terms.delta_norm, sigma1, delta=1e-9 * sigma1)

    def test_sandwich_for_random_factors(self):
        for r in (1, 2, 4):
            for _ in range(10):
                F = random_tensor((7, r, 4), self.rng)
                terms = error_terms(F, self.B, self.X_star)
                self.assertEqual(terms.e_t, max(terms.d_ss, terms.st, terms.tt))
                self.assertLessEqual(terms.e_t, terms.delta_norm * (1 + 1e-9) + 1e-9)
                self.assertLessEqual(terms.delta_norm, 4 * terms.e_t * (1 + 1e-9) + 1e-9)


class TestTildeUpdate(unittest.TestCase):
    """The split update tracks the population gradient step."""

    def setUp(self):
        self.rng = np.random.default_rng(2)
        self.F_star = random_tensor((6, 2, 3), self.rng)
        self.X_star = gram(self.F_star)
        self.B = subspace_basis(self.X_star, 2)
        self.eta = 0.1 / spectral_norm(self.X_star)

    def test_matches_population_step(self):
        for r in (2, 3):
            F = random_tensor((6, r, 3), self.rng)
            S, T = subspace_split(F, self.B)
            S_new, T_new = tilde_update(S, T, self.B, self.eta)
            S_ref, T_ref = subspace_split(population_step(F, self.X_star, self.eta), self.B)
            self.assertLessEqual(fro_norm(S_new - S_ref), 1e-10 * max(1.0, fro_norm(S_ref)))
            self.assertLessEqual(fro_norm(T_new - T_ref), 1e-10 * max(1.0, fro_norm(T_ref)))

    def test_fixed_point(self):
        S, T = subspace_split(self.F_star, self.B)
        S_new, T_new = tilde_update(S, T, self.B, self.eta)
        self.assertLessEqual(fro_norm(S_new - S), 1e-10 * fro_norm(S))
        self.assertLessEqual(fro_norm(T_new), 1e-10 * fro_norm(S))

    def test_zero_step(self):
        S, T = subspace_split(random_tensor((6, 2, 3), self.rng), self.B)
        S_new, T_new = tilde_update(S, T, self.B, 0.0)
        np.testing.assert_array_equal(S_new.data, S.data)
        np.testing.assert_array_equal(T_new.data, T.data)

    def test_shape_mismatch(self):
        S, T = subspace_split(random_tensor((6, 2, 3), self.rng), self.B)
        with self.assertRaises(ShapeMismatch):
            tilde_update(T, S, self.B, self.eta)


class TestSampleDeviation(unittest.TestCase):
    """Tests for sample_deviation."""

    def test_zero_at_ground_truth(self):
        P = gen_problem(5, 2, 2, 60, 0.0, seed=3)
        np.testing.assert_array_equal(sample_deviation(P.F_star, P).data, np.zeros((5, 5, 2)))

    def test_symmetric(self):
        P = gen_problem(5, 2, 2, 60, 0.1, seed=4)
        D = sample_deviation(random_tensor((5, 3, 2), np.random.default_rng(4)), P)
        self.assertLessEqual(fro_norm(D - conj_transpose(D)), 1e-10 * max(1.0, fro_norm(D)))

    def test_small_with_many_measurements(self):
        P = gen_problem(4, 2, 1, 3000, 0.0, seed=5, materialization="dense")
        F = random_tensor((4, 2, 2), np.random.default_rng(5))
        delta = gram(F) - P.X_star
        self.assertLess(fro_norm(sample_deviation(F, P)) / fro_norm(delta), 0.25)

    def test_noise_enters_with_its_sign(self):
        P = gen_problem(4, 2, 1, 40, 0.3, seed=6)
        D = sample_deviation(P.F_star, P)
        expected = -0.5 * (P.ensemble.adjoint(P.noise) + conj_transpose(P.ensemble.adjoint(P.noise)))
        self.assertLessEqual(fro_norm(D - expected), 1e-10 * max(1.0, fro_norm(expected)))

    def test_lateral_padding_keeps_gram(self):
        P = gen_problem(4, 2, 1, 40, 0.0, seed=7)
        padded = Tensor3(np.concatenate([P.F_star.data, np.zeros((4, 1, 2))], axis=1))
        np.testing.assert_allclose(
            sample_deviation(padded, P).data, sample_deviation(P.F_star, P).data, atol=1e-12
        )


if __name__ == "__main__":
    unittest.main()
