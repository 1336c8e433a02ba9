import numpy as np
import pytest
from scipy import stats

from eigadm import (
    RngStream,
    derive_stream,
    sample_chi_square,
    sample_haar_orthogonal,
    sample_ordered_unit,
    sample_wishart_eigs,
)
from eigadm.sampling import haar_from_gaussian

S = RngStream(2024)


class TestHaar:
    def test_orthogonal_p3(self):
        h = sample_haar_orthogonal(S, 3)
        assert np.abs(h.T @ h - np.eye(3)).max() <= 1e-10
        assert np.allclose((h * h).sum(axis=1), 1.0, atol=1e-10)

    def test_orthogonal_batch(self):
        h = sample_haar_orthogonal(S, 6, size=5000)
        assert np.abs(np.swapaxes(h, -1, -2) @ h - np.eye(6)).max() <= 1e-10

    def test_matches_sign_corrected_lapack_qr(self):
        g = np.random.default_rng(0).standard_normal((2000, 4, 4))
        q, r = np.linalg.qr(g)
        d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
        assert np.allclose(haar_from_gaussian(g), q * d[..., None, :], atol=1e-10)

    def test_p1_is_uniform_sign(self):
        h = sample_haar_orthogonal(S, 1, size=10_000)[:, 0, 0]
        assert set(np.unique(h)) == {-1.0, 1.0}
        assert abs(np.mean(h > 0) - 0.5) <= 0.01

    def test_second_moment_is_one_over_p(self):
        h = sample_haar_orthogonal(S, 4, size=100_000)
        assert abs(np.mean(h[:, 0, 0] ** 2) - 0.25) <= 0.01

    def test_left_invariance_proxy(self):
        p = 3
        fixed = sample_haar_orthogonal(RngStream(5), p)
        a = sample_haar_orthogonal(derive_stream(S, 1), p, size=100_000)[:, 0, 0] ** 2
        b = (fixed @ sample_haar_orthogonal(derive_stream(S, 2), p, size=100_000))[:, 0, 0] ** 2
        se = np.sqrt(a.var() / a.size + b.var() / b.size)
        assert abs(a.mean() - b.mean()) <= 3 * se

    def test_rejects_p0(self):
        with pytest.raises(ValueError, match="dimension"):
            sample_haar_orthogonal(S, 0)


class TestOrderedUnit:
    def test_empty(self):
        assert sample_ordered_unit(S, 0).shape == (0,)

    def test_ascending_in_open_interval(self):
        r = sample_ordered_unit(S, 3, size=1000)
        assert np.all(np.diff(r, axis=-1) > 0)
        assert np.all((r > 0) & (r < 1))

    def test_order_statistic_mean(self):
        r = sample_ordered_unit(S, 2, size=100_000)
        assert abs(r[:, 0].mean() - 1 / 3) <= 0.005

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_order_statistic_means_all_k(self, n):
        r = sample_ordered_unit(derive_stream(S, n), n, size=100_000)
        k = np.arange(1, n + 1)
        se = r.std(axis=0) / np.sqrt(r.shape[0])
        assert np.all(np.abs(r.mean(axis=0) - k / (n + 1)) <= 3 * se)


class TestChiSquare:
    def test_moments_df5(self):
        x = sample_chi_square(S, 5, size=100_000)
        assert np.all(x >= 0)
        assert abs(x.mean() - 5) <= 0.05
        assert abs(x.var() - 10) <= 0.3

    def test_non_integer_df_matches_distribution(self):
        x = sample_chi_square(S, 2.7, size=20_000)
        assert stats.kstest(x, stats.chi2(2.7).cdf).pvalue > 1e-3

    def test_scalar_draw(self):
        assert isinstance(sample_chi_square(S, 3), float)

    @pytest.mark.parametrize("df", [0, -1])
    def test_rejects_bad_df(self, df):
        with pytest.raises(ValueError, match="parameter"):
            sample_chi_square(S, df)


class TestWishartEigs:
    def test_trace_mean(self):
        l = sample_wishart_eigs(S, 5, [1.0, 1.0], size=100_000)
        tr = l.sum(axis=1)
        assert abs(tr.mean() - 10) <= 0.1

    def test_p1_is_chi_square(self):
        l = sample_wishart_eigs(S, 5, [1.0], size=100_000)[:, 0]
        assert abs(l.mean() - 5) <= 0.05
        assert stats.kstest(l[:20_000], stats.chi2(5).cdf).pvalue > 1e-3

    def test_trace_mean_within_3se_general_lambda(self):
        lam = np.array([3.0, 1.0, 0.2])
        tr = sample_wishart_eigs(S, 7, lam, size=100_000).sum(axis=1)
        assert abs(tr.mean() - 7 * lam.sum()) <= 3 * tr.std() / np.sqrt(tr.size)

    def test_eigen_distribution_matches_scipy_wishart(self):
        lam = np.array([2.0, 0.5])
        ours = sample_wishart_eigs(S, 6, lam, size=20_000)
        ref = stats.wishart(df=6, scale=np.diag(lam)).rvs(size=20_000, random_state=1)
        ref = np.linalg.eigvalsh(ref)[:, ::-1]
        for k in range(2):
            assert stats.ks_2samp(ours[:, k], ref[:, k]).pvalue > 1e-3

    def test_sorted_positive(self):
        l = sample_wishart_eigs(S, 3, [1.0, 0.1, 0.001], size=1000)
        assert np.all(l > 0)
        assert np.all(np.diff(l, axis=-1) <= 0)

    def test_rejects_nu_below_p(self):
        with pytest.raises(ValueError, match="smaller than p"):
            sample_wishart_eigs(S, 2, [1.0, 1.0, 1.0])
