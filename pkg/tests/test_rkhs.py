"""Kernel functions, Gram matrices, and the RKHS estimators."""

import numpy as np
import pytest
from conftest import rand_complex

from drbeam.linalg import NearSingularError, lift_matrix_double, lift_vector
from drbeam.rkhs import (
    KernelSpec,
    fit_kernel_estimator,
    fit_multi_frame_kernel,
    kernel_eval,
    kernel_matrix,
    median_heuristic_bandwidth,
    predict,
    predict_block,
)
from drbeam.scene import NoiseSpec, PilotFrame, build_frame, generate_scene, synthesize_channel


def _noisy_frame(n=4, m=2, l=10, snr_db=5.0, seed=0):
    h = synthesize_channel(generate_scene(m, n, 12, seed))
    return build_frame(
        h, "gaussian", np.eye(m), l, NoiseSpec(snr_db, 0.0, 0.0), seed + 1, seed + 2
    )


class TestKernelEval:
    def test_gaussian_zero_distance(self):
        spec = KernelSpec(kind="gaussian", bandwidth=2.0)
        assert kernel_eval(spec, np.ones(3), np.ones(3)) == 1.0

    def test_linear_orthogonal(self):
        spec = KernelSpec(kind="linear")
        assert kernel_eval(spec, np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_polynomial_hand_case(self):
        spec = KernelSpec(kind="polynomial", degree=2, offset=1.0)
        e1 = np.array([1.0, 0.0])
        assert kernel_eval(spec, e1, e1) == 4.0

    def test_laplacian(self):
        spec = KernelSpec(kind="laplacian", bandwidth=1.0)
        a, b = np.array([0.0, 0.0]), np.array([1.0, 1.0])
        assert abs(kernel_eval(spec, a, b) - np.exp(-2.0)) <= 1e-12

    def test_matern_typical_values(self):
        spec = KernelSpec(kind="matern", bandwidth=1.0, smoothness=1.5)
        a, b = np.zeros(2), np.array([1.0, 0.0])
        r = 1.0
        scaled = np.sqrt(3.0) * r
        expect = (1.0 + scaled) * np.exp(-scaled)
        assert abs(kernel_eval(spec, a, b) - expect) <= 1e-12
        assert kernel_eval(spec, a, a) == 1.0
        # general-smoothness branch agrees with the closed half-integer form
        spec_gen = KernelSpec(kind="matern", bandwidth=1.0, smoothness=1.5000001)
        assert abs(kernel_eval(spec_gen, a, b) - expect) <= 1e-5

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            kernel_eval(KernelSpec(), np.zeros(2), np.zeros(3))

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            KernelSpec(kind="gaussian", bandwidth=0.0)
        with pytest.raises(ValueError):
            KernelSpec(kind="sigmoid")


class TestKernelMatrix:
    def test_gaussian_unit_diagonal(self, rng):
        anchors = rng.standard_normal((8, 4))
        k = kernel_matrix(KernelSpec(bandwidth=1.5), anchors)
        np.testing.assert_array_equal(np.diag(k), np.ones(8))

    def test_single_anchor(self):
        k = kernel_matrix(KernelSpec(), np.ones((1, 3)))
        assert k.shape == (1, 1) and k[0, 0] == 1.0

    def test_psd(self, rng):
        anchors = rng.standard_normal((12, 5))
        k = kernel_matrix(KernelSpec(bandwidth=2.0), anchors)
        assert np.linalg.eigvalsh(k)[0] >= -1e-8

    def test_exact_symmetry(self, rng):
        anchors = rng.standard_normal((10, 6))
        k = kernel_matrix(KernelSpec(kind="laplacian", bandwidth=1.0), anchors)
        assert np.array_equal(k, k.T)


def test_median_heuristic(rng):
    anchors = rng.standard_normal((30, 4))
    h = median_heuristic_bandwidth(anchors)
    assert h > 0
    assert median_heuristic_bandwidth(np.zeros((5, 3))) == 1.0
    assert median_heuristic_bandwidth(np.ones((1, 3))) == 1.0


class TestFits:
    def test_nominal_interpolates_pilots(self):
        for seed in range(5):
            frame = _noisy_frame(l=10, seed=seed)
            est = fit_kernel_estimator(frame, method="nominal")
            s_hat = predict_block(est, frame.x_block)
            assert np.max(np.abs(s_hat - frame.s_block)) <= 1e-8

    def test_kdl_k_zero_eps_is_nominal(self):
        frame = _noisy_frame(l=8, seed=3)
        a = fit_kernel_estimator(frame, method="nominal")
        b = fit_kernel_estimator(frame, method="kdl_k", epsilon_or_mu=0.0)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-10)

    def test_eigen_threshold_zero_mu_is_nominal(self):
        frame = _noisy_frame(l=8, seed=4)
        a = fit_kernel_estimator(frame, method="nominal")
        b = fit_kernel_estimator(frame, method="eigen_threshold", epsilon_or_mu=0.0)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-8)

    def test_singular_gram_rejected(self):
        frame = _noisy_frame(l=6, seed=5)
        # duplicated pilot columns make the Gram matrix exactly singular
        x = frame.x_block.copy()
        x[:, 1] = x[:, 0]
        s = frame.s_block.copy()
        s[:, 1] = s[:, 0]
        dup = PilotFrame(s_block=s, x_block=x, true_h=frame.true_h, true_r_v=frame.true_r_v)
        with pytest.raises(NearSingularError, match="loaded variant"):
            fit_kernel_estimator(dup, method="nominal")

    def test_kernel_ridge_equivalence(self, rng):
        # kdl_k2 weights match the penalized normal equations solved directly
        for seed in range(10):
            frame = _noisy_frame(l=12, seed=seed)
            eps = float(rng.uniform(0.01, 1.0))
            est = fit_kernel_estimator(frame, method="kdl_k2", epsilon_or_mu=eps)
            k = kernel_matrix(est.kernel, est.anchors)
            l = k.shape[0]
            s_lift = lift_vector(frame.s_block)
            oracle = np.linalg.solve(k @ k / l + eps * np.eye(l), k @ s_lift.T / l).T
            rel = np.linalg.norm(est.weights - oracle) / np.linalg.norm(oracle)
            assert rel <= 1e-8

    def test_shrinkage_in_epsilon(self):
        frame = _noisy_frame(l=10, seed=6)
        for method in ("kdl_k", "kdl_k2"):
            norms = [
                np.linalg.norm(
                    fit_kernel_estimator(frame, method=method, epsilon_or_mu=e).weights
                )
                for e in (0.0, 0.01, 0.1, 1.0)
            ]
            assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_thresholded_covariance_dominates(self):
        frame = _noisy_frame(l=10, seed=7)
        est = fit_kernel_estimator(frame, method="nominal")
        k = kernel_matrix(est.kernel, est.anchors)
        l = k.shape[0]
        w, q = np.linalg.eigh(k)
        lam = w**2 / l
        mu = 0.4
        thresholded = (q * np.maximum(lam, mu * lam[-1])) @ q.T
        diff = thresholded - k @ k / l
        assert np.linalg.eigvalsh(0.5 * (diff + diff.T))[0] >= -1e-9


class TestPredict:
    def test_zero_weights(self):
        frame = _noisy_frame(l=6, seed=8)
        est = fit_kernel_estimator(frame, method="kdl_k", epsilon_or_mu=0.1)
        zero = est.__class__(
            anchors=est.anchors,
            weights=np.zeros_like(est.weights),
            kernel=est.kernel,
            method="zeroed",
        )
        np.testing.assert_array_equal(
            predict(zero, frame.x_block[:, 0]), np.zeros(2, dtype=complex)
        )

    def test_single_vector_matches_block(self):
        frame = _noisy_frame(l=8, seed=9)
        est = fit_kernel_estimator(frame, method="kdl_k", epsilon_or_mu=0.05)
        x = frame.x_block[:, 2]
        np.testing.assert_allclose(
            predict(est, x), predict_block(est, x[:, None])[:, 0], atol=1e-12
        )

    def test_linear_kernel_matches_linear_regression(self, rng):
        # noiseless complex-linear data with exactly spanning anchors reduces
        # to an ordinary linear fit; oracle via lstsq on the lifted data
        n, m, l = 3, 2, 6  # l = 2n anchors spanning R^{2n}
        c = rand_complex(rng, m, n)
        x = rand_complex(rng, n, l)
        s = c @ x
        frame = PilotFrame(
            s_block=s, x_block=x, true_h=np.zeros((n, m)), true_r_v=np.zeros((n, n))
        )
        est = fit_kernel_estimator(frame, spec=KernelSpec(kind="linear"), method="nominal")
        x_new = rand_complex(rng, n, 20)
        got = predict_block(est, x_new)
        lifted_map, *_ = np.linalg.lstsq(
            lift_vector(x).T, lift_vector(s).T, rcond=None
        )
        oracle_lift = lifted_map.T @ lift_vector(x_new)
        oracle = oracle_lift[:m] + 1j * oracle_lift[m:]
        assert np.max(np.abs(got - oracle)) <= 1e-6
        np.testing.assert_allclose(lifted_map.T, lift_matrix_double(c), atol=1e-8)

    def test_dimension_mismatch(self):
        frame = _noisy_frame(l=6, seed=10)
        est = fit_kernel_estimator(frame, method="kdl_k", epsilon_or_mu=0.1)
        with pytest.raises(ValueError):
            predict_block(est, np.zeros((5, 3), dtype=complex))


class TestMultiFrame:
    def test_lambda_zero_is_nominal(self):
        frame = _noisy_frame(l=9, seed=11)
        nominal = fit_kernel_estimator(frame, method="nominal")
        mf = fit_multi_frame_kernel(frame, None, np.zeros_like(nominal.weights), 0.0)
        np.testing.assert_allclose(mf.weights, nominal.weights, atol=1e-8)

    def test_large_lambda_pins_to_prior(self, rng):
        frame = _noisy_frame(l=9, seed=12)
        prior = rng.standard_normal((4, 9))
        mf = fit_multi_frame_kernel(frame, None, prior, 1e6)
        rel = np.linalg.norm(mf.weights - prior) / np.linalg.norm(prior)
        assert rel <= 1e-3

    def test_nominal_prior_is_fixed_point(self):
        frame = _noisy_frame(l=9, seed=13)
        nominal = fit_kernel_estimator(frame, method="nominal")
        for lam in (0.1, 2.0, 100.0):
            mf = fit_multi_frame_kernel(frame, nominal.kernel, nominal, lam)
            assert np.max(np.abs(mf.weights - nominal.weights)) <= 1e-8

    def test_shape_mismatch_rejected(self):
        frame = _noisy_frame(l=9, seed=14)
        with pytest.raises(ValueError):
            fit_multi_frame_kernel(frame, None, np.zeros((4, 5)), 1.0)
