import math

import numpy as np
import pytest

from overfit_lab.errors import (
    InsufficientTailError,
    InvariantViolationError,
    NumericError,
    ShapeError,
)
from overfit_lab.features import DesignMatrix, FeatureLaw, sample_design
from overfit_lab.linalg import (
    KernelMatrix,
    assemble_kernel,
    min_norm_solve,
    row_norm_diagnostics,
    singular_extremes,
)
from overfit_lab.spectra import make_spectrum

GAUSSIAN = FeatureLaw("gaussian")

# Ground truth for the steep-decay factor SVD: singular values of
# K = Psi^T Lambda Psi with lambda_k = exp(-2k), Psi = default_rng(7)
# standard normal of shape (96, 48), computed independently with a
# 120-digit multiprecision SVD (mpmath) and squared.
STEEP_SIGMA_SQUARED = (
    5.307947133731694,
    0.5702955956193757,
    0.10131842905985018,
    0.010791963150827857,
    0.002101817547357668,
    0.00029930569468151504,
    2.6578379195988742e-05,
    4.4704223979448604e-06,
    6.138810167618829e-07,
    7.169660879581067e-08,
    1.0087044020202236e-08,
    9.60418827421618e-10,
    1.481930897410417e-10,
    2.227753103819927e-11,
    2.433187390562627e-12,
    4.964257537941394e-13,
    5.443266652723266e-14,
    7.022008721974599e-15,
    8.855796702934173e-16,
    9.509337749859981e-17,
    2.0148287139590165e-17,
    2.7933777244990846e-18,
    3.6241868349656766e-19,
    3.099293316060094e-20,
    3.637360608644663e-21,
    4.513075669795157e-22,
    8.158687208671281e-23,
    1.1093846135507342e-23,
    2.1511746933493936e-24,
    2.9270246352805353e-25,
    4.292389329499137e-26,
    3.2237843432410538e-27,
    2.505177686181876e-28,
    3.591157215239404e-29,
    2.7648140581118776e-30,
    3.9124415664362623e-31,
    7.47560601420837e-32,
    7.287274371498281e-33,
    1.3483639934432406e-33,
    1.5834493027870276e-34,
    6.095254183021329e-36,
    2.430079470704854e-36,
    2.4481771582858588e-37,
    1.0277107494117171e-38,
    2.3957034717639906e-39,
    1.2020588148722043e-40,
    7.109438801416126e-42,
    2.3696730458926578e-42,
)


def _steep_kernel():
    rng = np.random.default_rng(7)
    psi = rng.standard_normal((96, 48))
    s = make_spectrum("exponential", 2.0, 96)
    d = DesignMatrix(psi, GAUSSIAN)
    return assemble_kernel(s, d)


class TestAssembleKernel:
    def test_identity_design_gives_diagonal(self):
        s = make_spectrum("custom", eigenvalues=[4.0, 2.0, 1.0])
        d = DesignMatrix(np.eye(3), GAUSSIAN)
        K = assemble_kernel(s, d)
        np.testing.assert_allclose(K.entries, np.diag([4.0, 2.0, 1.0]), atol=0)

    def test_rank_one_outer_product(self):
        s = make_spectrum("custom", eigenvalues=[4.0])
        d = DesignMatrix(np.array([[1.0, 1.0]]), GAUSSIAN)
        K = assemble_kernel(s, d)
        np.testing.assert_allclose(K.entries, np.full((2, 2), 4.0), atol=0)

    def test_matches_explicit_triple_product(self):
        # oracle: Psi^T diag(lambda) Psi formed directly
        rng = np.random.default_rng(11)
        s = make_spectrum("polynomial", 1.0, 60)
        d = DesignMatrix(rng.standard_normal((60, 12)), GAUSSIAN)
        K = assemble_kernel(s, d)
        oracle = d.entries.T @ np.diag(s.eigenvalues) @ d.entries
        rel = np.linalg.norm(K.entries - oracle) / np.linalg.norm(oracle)
        assert rel < 1e-12

    def test_dimension_mismatch(self):
        s = make_spectrum("polynomial", 1.0, 5)
        d = DesignMatrix(np.ones((4, 2)), GAUSSIAN)
        with pytest.raises(ShapeError):
            assemble_kernel(s, d)


class TestSingularExtremes:
    def test_diagonal(self):
        summary = singular_extremes(KernelMatrix.from_entries(np.diag([4.0, 1.0])))
        assert summary.s_max == pytest.approx(4.0)
        assert summary.s_min == pytest.approx(1.0)
        assert summary.condition_number == pytest.approx(4.0)

    def test_identity(self):
        summary = singular_extremes(KernelMatrix.from_entries(np.eye(5)))
        assert summary.condition_number == pytest.approx(1.0)

    def test_rank_deficient_reports_zero(self):
        summary = singular_extremes(KernelMatrix.from_entries(np.ones((2, 2))))
        assert summary.s_max == pytest.approx(2.0)
        assert summary.s_min == 0.0
        assert summary.condition_number == math.inf

    def test_full_list_sorted(self):
        rng = np.random.default_rng(5)
        s = make_spectrum("polynomial", 1.0, 30)
        d = DesignMatrix(rng.standard_normal((30, 10)), GAUSSIAN)
        summary = singular_extremes(assemble_kernel(s, d))
        vals = summary.full_singular_values
        assert vals.shape == (10,)
        assert np.all(np.diff(vals) <= 0)
        assert summary.s_max == vals[0] and summary.s_min == vals[-1]

    def test_asymmetric_entries_rejected(self):
        with pytest.raises(InvariantViolationError):
            KernelMatrix.from_entries(np.array([[1.0, 0.5], [0.2, 1.0]]))

    def test_non_finite_rejected(self):
        K = KernelMatrix.from_entries(np.array([[1.0, 0.0], [0.0, np.inf]]))
        with pytest.raises(NumericError):
            singular_extremes(K)

    def test_mercer_equals_squared_factor_svd(self):
        rng = np.random.default_rng(9)
        s = make_spectrum("polynomial", 1.0, 80)
        d = DesignMatrix(rng.standard_normal((80, 16)), GAUSSIAN)
        K = assemble_kernel(s, d)
        summary = singular_extremes(K)
        sv = np.linalg.svd(K.factor, compute_uv=False)
        assert summary.s_max == pytest.approx(sv[0] ** 2, rel=1e-10)
        assert summary.s_min == pytest.approx(sv[-1] ** 2, rel=1e-10)

    def test_steep_spectrum_matches_multiprecision_oracle(self):
        K = _steep_kernel()
        summary = singular_extremes(K)
        assert summary.accurate
        np.testing.assert_allclose(
            summary.full_singular_values, STEEP_SIGMA_SQUARED, rtol=1e-10
        )
        assert summary.condition_number == pytest.approx(
            STEEP_SIGMA_SQUARED[0] / STEEP_SIGMA_SQUARED[-1], rel=1e-9
        )

    def test_steep_and_fast_paths_agree_where_both_valid(self):
        # moderate exponential decay: full range ~1e-7 is well inside the
        # fast path's resolution, so the two routes must coincide
        rng = np.random.default_rng(21)
        s = make_spectrum("exponential", 1.0, 320)
        d = DesignMatrix(rng.standard_normal((320, 32)), GAUSSIAN)
        K = assemble_kernel(s, d)
        assert K._steep
        jac = singular_extremes(K).full_singular_values
        fast = np.linalg.svd(K.factor, compute_uv=False) ** 2
        np.testing.assert_allclose(jac, fast, rtol=1e-8)


class TestRowNormDiagnostics:
    def test_all_ones(self):
        d = DesignMatrix(np.ones((7, 3)), GAUSSIAN)
        diag = row_norm_diagnostics(d, 3)
        np.testing.assert_allclose(diag.p_values, 1.0, atol=0)
        assert diag.min_p_squared == 1.0

    def test_gaussian_concentration(self):
        # chi-square mean: sd of P_i^2 is sqrt(2/(M-N)) ~ 0.014, band is 7 sigma
        d = sample_design(GAUSSIAN, 10_032, 32, seed=12)
        diag = row_norm_diagnostics(d, 32)
        assert np.all(diag.p_values**2 > 0.9)
        assert np.all(diag.p_values**2 < 1.1)

    def test_cosine_min_p_shrinks_with_n(self):
        def median_min_p(n, seeds):
            vals = []
            for seed in seeds:
                d = sample_design(FeatureLaw("cosine"), 10 * n, n, seed=seed)
                vals.append(row_norm_diagnostics(d, n).min_p_squared)
            return np.median(vals)

        small = median_min_p(32, range(5))
        large = median_min_p(256, range(5, 10))
        assert large < small

    def test_no_tail_rejected(self):
        d = DesignMatrix(np.ones((3, 3)), GAUSSIAN)
        with pytest.raises(InsufficientTailError):
            row_norm_diagnostics(d, 3)


class TestMinNormSolve:
    def test_diagonal_solve(self):
        sol = min_norm_solve(KernelMatrix.from_entries(np.diag([2.0, 4.0])), [2.0, 8.0])
        np.testing.assert_allclose(sol.alpha, [1.0, 2.0], rtol=1e-12)
        assert not sol.inconsistent
        assert sol.rank == 2

    def test_rank_one_consistent(self):
        K = KernelMatrix.from_entries(np.ones((2, 2)))
        sol = min_norm_solve(K, [1.0, 1.0])
        np.testing.assert_allclose(sol.alpha, [0.5, 0.5], rtol=1e-12)
        np.testing.assert_allclose(K.entries @ sol.alpha, [1.0, 1.0], rtol=1e-12)
        assert not sol.inconsistent

    def test_rank_one_inconsistent(self):
        sol = min_norm_solve(KernelMatrix.from_entries(np.ones((2, 2))), [1.0, -1.0])
        assert sol.inconsistent
        np.testing.assert_allclose(sol.alpha, [0.0, 0.0], atol=1e-14)

    def test_pseudo_inverse_contract(self):
        # range component reproduced, null component untouched
        rng = np.random.default_rng(17)
        b = rng.standard_normal((12, 7))
        K = KernelMatrix.from_entries(b @ b.T)  # rank 7 PSD, size 12
        y = rng.standard_normal(12)
        sol = min_norm_solve(K, y)
        u, sv, vt = np.linalg.svd(K.entries)
        rank = int((sv > 1e-12 * sv[0]).sum())
        y_range = u[:, :rank] @ (u[:, :rank].T @ y)
        assert np.linalg.norm(K.entries @ sol.alpha - y_range) <= 1e-8 * np.linalg.norm(y)
        null = u[:, rank:]
        assert np.linalg.norm(null.T @ sol.alpha) <= 1e-8 * np.linalg.norm(sol.alpha)
        assert sol.inconsistent  # random y has a genuine null component

    def test_shape_and_finite_checks(self):
        K = KernelMatrix.from_entries(np.eye(3))
        with pytest.raises(ShapeError):
            min_norm_solve(K, [1.0, 2.0])
        with pytest.raises(NumericError):
            min_norm_solve(K, [1.0, np.nan, 0.0])

    def test_wide_mercer_factor(self):
        # M < N: kernel is rank deficient but the solve must still work
        s = make_spectrum("custom", eigenvalues=[4.0])
        d = DesignMatrix(np.array([[1.0, 1.0]]), GAUSSIAN)
        K = assemble_kernel(s, d)
        sol = min_norm_solve(K, [4.0, 4.0])
        np.testing.assert_allclose(K.entries @ sol.alpha, [4.0, 4.0], rtol=1e-12)
        assert sol.rank == 1


class TestConcentrationBounds:
    def test_largest_singular_value_band(self):
        # s_max(K) within [N lam_1 / 2, 3 N lam_1 / 2] in >= 19/20 trials
        n, eta = 128, 10
        s = make_spectrum("polynomial", 1.0, eta * n)
        hits = 0
        for seed in range(20):
            d = sample_design(GAUSSIAN, eta * n, n, seed=seed)
            s_max = singular_extremes(assemble_kernel(s, d), full=False).s_max
            hits += 0.5 * n <= s_max <= 1.5 * n
        assert hits >= 19

    @pytest.mark.parametrize("kind,a", [
        ("polynomial", 1.0), ("exponential", 1.0), ("linear_polylog", 1.0),
    ])
    def test_trivial_smallest_singular_value_bound(self, kind, a):
        # s_min(K) >= 1e-6 lambda_N / N for independent designs, all trials
        for n in (32, 64):
            s = make_spectrum(kind, a, 10 * n)
            floor = 1e-6 * s.eigenvalues[n - 1] / n
            for seed in range(5):
                d = sample_design(GAUSSIAN, 10 * n, n, seed=100 + seed)
                s_min = singular_extremes(assemble_kernel(s, d), full=False).s_min
                assert s_min >= floor
