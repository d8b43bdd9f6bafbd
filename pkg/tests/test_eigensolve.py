"""Tests for jcspectra.eigensolve module."""

import math
import warnings
from pathlib import Path

import numpy as np
import pytest

from jcspectra.eigensolve import (
    Provenance,
    SpectrumSlice,
    all_eigenvalues,
    certify,
    counting,
    counting_sandwich,
    default_c0,
    dense_eigenvalues,
    dense_oracle_eigenvalues,
    eigenvalue_by_index,
    eigenvalues_by_bisection,
    lambda_n_of_Jtilde,
    lambda_n_section,
    merged_spectrum,
    spectrum_of_Jn,
    sturm_count,
    sturm_counts,
    symmetric_norm,
    tridiagonalize,
    window_stability,
    write_spectrum_csv,
)
from jcspectra.errors import WindowDegenerateError
from jcspectra.operators import TridiagonalWindow, build_J_plus, build_Jn_plus
from jcspectra.sequences import ModelParams

JC = ModelParams.jaynes_cummings()
UNCOUPLED = ModelParams(gamma=0.5, a1=0.0, v_table=(-0.25, 0.25))
FLAT = ModelParams(gamma=0.5, a1=0.0)


def _window(diag: list[float], offdiag: list[float]) -> TridiagonalWindow:
    return TridiagonalWindow(offset=1, diag=np.array(diag), offdiag=np.array(offdiag))


def _random_window(rng: np.random.Generator, size: int) -> TridiagonalWindow:
    return TridiagonalWindow(
        offset=1,
        diag=rng.uniform(-2.0, 2.0, size),
        offdiag=rng.uniform(-2.0, 2.0, size - 1),
    )


class TestSturmCounts:
    """Test the Sturm-sequence counts."""

    def test_two_by_two(self) -> None:
        """Test [[0,1],[1,0]] has one eigenvalue below 0."""
        assert sturm_count(_window([0.0, 0.0], [1.0]), 0.0) == 1

    def test_diagonal(self) -> None:
        """Test counts on diag(1, 2, 3)."""
        window = _window([1.0, 2.0, 3.0], [0.0, 0.0])
        assert sturm_count(window, 2.5) == 2
        assert sturm_count(window, 2.0) == 1
        np.testing.assert_array_equal(sturm_counts(window, [0.0, 1.5, 10.0]), [0, 1, 3])

    def test_non_finite_shift(self) -> None:
        """Test that non-finite shifts are rejected."""
        with pytest.raises(ValueError, match="finite"):
            _ = sturm_count(_window([1.0], []), math.nan)

    def test_matches_dense_count(self) -> None:
        """Test counts against numpy on a random 40 x 40 matrix."""
        rng = np.random.default_rng(7)
        window = _random_window(rng, 40)
        reference = np.linalg.eigvalsh(window.to_dense())
        xs = rng.uniform(-5.0, 5.0, 100)
        expected = [int(np.sum(reference < x)) for x in xs]
        np.testing.assert_array_equal(sturm_counts(window, xs), expected)

    def test_monotone_and_complete(self) -> None:
        """Test counts are nondecreasing and reach the size at the Gershgorin top."""
        window = _random_window(np.random.default_rng(3), 30)
        lo, hi = window.gershgorin()
        counts = sturm_counts(window, np.linspace(lo - 1.0, hi + 1.0, 400))
        assert np.all(np.diff(counts) >= 0)
        assert counts[0] == 0
        assert counts[-1] == 30


class TestBisection:
    """Test indexed bisection."""

    def test_diagonal_index(self) -> None:
        """Test diag(1, 2, 3) at k = 2."""
        value = eigenvalue_by_index(_window([1.0, 2.0, 3.0], [0.0, 0.0]), 2, 1e-12)
        assert value == pytest.approx(2.0, abs=1e-12)

    def test_pair(self) -> None:
        """Test [[d, a], [a, d]] gives d - a and d + a."""
        window = _window([3.0, 3.0], [0.5])
        assert eigenvalue_by_index(window, 1, 1e-12) == pytest.approx(2.5, abs=1e-12)
        assert eigenvalue_by_index(window, 2, 1e-12) == pytest.approx(3.5, abs=1e-12)

    def test_three_by_three(self) -> None:
        """Test the analytic spectrum {1, 1 +- sqrt(2)}."""
        window = _window([1.0, 1.0, 1.0], [1.0, 1.0])
        assert eigenvalue_by_index(window, 3, 1e-12) == pytest.approx(1 + math.sqrt(2), abs=1e-12)

    def test_index_out_of_range(self) -> None:
        """Test that k outside 1..size is rejected."""
        with pytest.raises(ValueError, match="out of range"):
            _ = eigenvalue_by_index(_window([1.0], []), 2, 1e-9)

    def test_tol_must_be_positive(self) -> None:
        """Test that tol <= 0 is rejected."""
        with pytest.raises(ValueError, match="tol"):
            _ = eigenvalue_by_index(_window([1.0], []), 1, 0.0)

    def test_bad_bracket_falls_back(self) -> None:
        """Test that a bracket missing the eigenvalue falls back to Gershgorin."""
        window = _window([1.0, 2.0, 3.0], [0.0, 0.0])
        value = eigenvalue_by_index(window, 3, 1e-12, bracket=(0.0, 1.5))
        assert value == pytest.approx(3.0, abs=1e-12)

    def test_simultaneous_matches_numpy(self) -> None:
        """Test simultaneous bisection against numpy on a random matrix."""
        window = _random_window(np.random.default_rng(11), 50)
        values = all_eigenvalues(window, 1e-12)
        np.testing.assert_allclose(values, np.linalg.eigvalsh(window.to_dense()), atol=1e-11)
        assert certify(window, np.arange(1, 51), values, 1e-12)

    def test_simultaneous_unsorted_indices(self) -> None:
        """Test that unsorted indices are rejected."""
        with pytest.raises(ValueError, match="sorted"):
            _ = eigenvalues_by_bisection(_window([1.0, 2.0], [0.0]), [2, 1], 1e-9)

    def test_simultaneous_empty(self) -> None:
        """Test that no indices give an empty array."""
        assert eigenvalues_by_bisection(_window([1.0], []), [], 1e-9).size == 0


class TestDenseOracle:
    """Test the rotation oracle and dense helpers."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_oracle_matches_bisection(self, seed: int) -> None:
        """Test the oracle agrees with bisection to 1e-10."""
        rng = np.random.default_rng(seed)
        window = _random_window(rng, int(rng.integers(2, 65)))
        oracle = dense_oracle_eigenvalues(window.to_dense())
        np.testing.assert_allclose(all_eigenvalues(window), oracle, atol=1e-10)

    def test_oracle_converges_on_random_tridiagonals(self) -> None:
        """Test the oracle stops on many ordinary inputs up to size 64."""
        rng = np.random.default_rng(20)
        for _ in range(60):
            window = _random_window(rng, int(rng.integers(2, 65)))
            oracle = dense_oracle_eigenvalues(window.to_dense())
            np.testing.assert_allclose(oracle, np.linalg.eigvalsh(window.to_dense()), atol=1e-10)

    def test_oracle_tiny_off_diagonal(self) -> None:
        """Test a negligible off-diagonal entry is dropped without overflow."""
        mat = np.array([[1.0, 1e-310, 0.0], [1e-310, 2.0, 0.5], [0.0, 0.5, -1.0]])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            oracle = dense_oracle_eigenvalues(mat)
        np.testing.assert_allclose(oracle, np.linalg.eigvalsh(mat), atol=1e-12)

    def test_oracle_size_limit(self) -> None:
        """Test that matrices above size 64 are rejected."""
        with pytest.raises(ValueError, match="64"):
            _ = dense_oracle_eigenvalues(np.eye(65))

    def test_oracle_needs_symmetric(self) -> None:
        """Test that non-symmetric input is rejected."""
        with pytest.raises(ValueError, match="symmetric"):
            _ = dense_oracle_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_tridiagonalize_preserves_spectrum(self) -> None:
        """Test the orthogonal reduction keeps the eigenvalues."""
        rng = np.random.default_rng(5)
        mat = rng.normal(size=(20, 20))
        mat = mat + mat.T
        window = tridiagonalize(mat)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(window.to_dense()), np.linalg.eigvalsh(mat), atol=1e-11
        )
        np.testing.assert_allclose(dense_eigenvalues(mat), np.linalg.eigvalsh(mat), atol=1e-10)

    def test_symmetric_norm(self) -> None:
        """Test the spectral norm as max |lambda|."""
        assert symmetric_norm(np.diag([-3.0, 1.0])) == pytest.approx(3.0)
        assert symmetric_norm(np.zeros((4, 4))) == 0.0
        mat = np.array([[0.0, 2.0], [2.0, 0.0]])
        assert symmetric_norm(mat) == pytest.approx(2.0, abs=1e-12)

    def test_merged_spectrum(self) -> None:
        """Test merging a block spectrum with the integer head and tail."""
        merged = merged_spectrum([10.5, 11.5], lo=10, hi=11, k_max=13)
        expected = [*range(1, 10), 10.5, 11.5, 12.0, 13.0]
        np.testing.assert_array_equal(merged, expected)


class TestSpectrumSlice:
    """Test the spectrum slice type."""

    def test_values_must_be_sorted(self) -> None:
        """Test that decreasing values are rejected."""
        with pytest.raises(ValueError, match="non-decreasing"):
            _ = SpectrumSlice(1, np.array([2.0, 1.0]), Provenance.WINDOWED, 1e-9)

    def test_value_lookup(self) -> None:
        """Test lookup by lattice index."""
        spectrum = SpectrumSlice(5, np.array([5.0, 6.0]), Provenance.WINDOWED, 1e-9)
        assert spectrum.value(6) == 6.0
        assert spectrum.entries == [(5, 5.0), (6, 6.0)]
        with pytest.raises(IndexError):
            _ = spectrum.value(7)

    def test_write_csv(self, tmp_path: Path) -> None:
        """Test the spectrum CSV layout."""
        path = tmp_path / "spectrum.csv"
        spectrum = SpectrumSlice(1, np.array([1.5]), Provenance.DENSE_ORACLE, 1e-9)
        write_spectrum_csv(spectrum, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "k,lambda,provenance,tol"
        assert lines[1] == "1,1.5,dense-oracle,1.0000000000000001e-09"


class TestDecoupledSpectrum:
    """Test exact spectra of J_n."""

    def test_uncoupled_is_diagonal(self) -> None:
        """Test that a1 = 0 and v = 0 give lambda_k = k."""
        spectrum = spectrum_of_Jn(FLAT, 20, (1, 30))
        assert spectrum.provenance == Provenance.EXACT_DECOUPLED
        np.testing.assert_allclose(spectrum.values, np.arange(1, 31), atol=1e-10)

    def test_uncoupled_keeps_order(self) -> None:
        """Test that a1 = 0 gives the sorted d_n(k)."""
        spectrum = spectrum_of_Jn(UNCOUPLED, 50, (45, 55))
        for k in range(45, 56):
            assert spectrum.value(k) == pytest.approx(k + 0.25 * (-1) ** k, abs=1e-10)

    def test_matches_dense_oracle(self) -> None:
        """Test the decoupled block against the oracle for n = 30."""
        op = build_Jn_plus(JC, 30)
        size = op.block.size
        oracle = dense_oracle_eigenvalues(op.block.to_dense())
        tail = np.arange(op.tail_start, op.tail_start + size, dtype=float)
        expected = np.sort(np.concatenate((oracle, tail)))[:size]
        spectrum = spectrum_of_Jn(JC, 30, (1, size))
        np.testing.assert_allclose(spectrum.values, expected, atol=1e-10)

    def test_beyond_tail_is_integer(self) -> None:
        """Test that indices far beyond the block are exactly k."""
        spectrum = spectrum_of_Jn(JC, 30, (200, 202))
        np.testing.assert_array_equal(spectrum.values, [200.0, 201.0, 202.0])

    def test_invalid_range(self) -> None:
        """Test that an inverted index range is rejected."""
        with pytest.raises(ValueError, match="index range"):
            _ = spectrum_of_Jn(JC, 30, (5, 4))


class TestCounting:
    """Test counting functions."""

    def test_empty_interval(self) -> None:
        """Test that (x, x] holds nothing."""
        assert counting(build_J_plus(JC, 20), 3.0, 3.0) == 0

    def test_unit_interval_around_n(self) -> None:
        """Test one eigenvalue per unit interval for a1 = 0."""
        op = build_Jn_plus(FLAT, 40)
        assert counting(op, 39.5, 40.5) == 1

    def test_decoupled_tail_counted(self) -> None:
        """Test the integer tail adds to the block count."""
        op = build_Jn_plus(FLAT, 20)
        assert counting(op, 0.5, 5.0) == 5

    def test_inverted_interval(self) -> None:
        """Test that lo > hi is rejected."""
        with pytest.raises(ValueError):
            _ = counting(build_J_plus(JC, 5), 2.0, 1.0)


class TestLambdaN:
    """Test lambda_n(J) by finite sections."""

    def test_uncoupled_exact(self) -> None:
        """Test lambda_n = n + (-1)^n rho when a1 = 0."""
        value, _ = lambda_n_section(UNCOUPLED, 100)
        assert value == pytest.approx(100.25, abs=1e-8)
        value, _ = lambda_n_section(UNCOUPLED, 101)
        assert value == pytest.approx(100.75, abs=1e-8)

    def test_matches_large_dense_section(self) -> None:
        """Test against numpy on a much larger Dirichlet section."""
        n = 128
        value, _ = lambda_n_section(JC, n)
        reference = np.linalg.eigvalsh(build_J_plus(JC, 600).to_dense())[n - 1]
        assert value == pytest.approx(reference, abs=1e-8)

    def test_degenerate_window(self) -> None:
        """Test that n too small for the counting window is rejected."""
        with pytest.raises(WindowDegenerateError):
            _ = lambda_n_section(JC, 5)

    def test_window_stability(self) -> None:
        """Test another doubling changes the value by at most 2 tol."""
        assert window_stability(JC, 128, tol=1e-9) <= 2e-9

    def test_insensitive_to_c0(self) -> None:
        """Test that doubling C0 leaves lambda_n unchanged within tol."""
        base, _ = lambda_n_section(JC, 100, c0=default_c0(JC))
        doubled, _ = lambda_n_section(JC, 100, c0=2.0 * default_c0(JC))
        assert abs(base - doubled) <= 2e-9

    @pytest.mark.parametrize("n", [300, 1000])
    def test_window_operator_route(self, n: int) -> None:
        """Test lambda_n of J-tilde_n against the section route."""
        value, _ = lambda_n_section(JC, n)
        assert lambda_n_of_Jtilde(JC, n) == pytest.approx(value, abs=1e-6)

    def test_default_c0(self) -> None:
        """Test C0 = 3 max(a1, 1)."""
        assert default_c0(JC) == 3.0
        assert default_c0(ModelParams(gamma=0.5, a1=2.0)) == 6.0


class TestCountingSandwich:
    """Test the counting sandwich for the window operators."""

    def test_sandwich_holds(self) -> None:
        """Test inner <= exact <= outer for a JC window."""
        counts = counting_sandwich(JC, 400.0, 300.0)
        assert counts.holds
        assert counts.window.kappa_lo <= 300
        assert counts.window.kappa_hi >= 400

    def test_sandwich_degenerate(self) -> None:
        """Test that a window too close to the origin is rejected."""
        with pytest.raises(WindowDegenerateError):
            _ = counting_sandwich(JC, 20.0, 10.0)

    def test_sandwich_inverted(self) -> None:
        """Test that lambda' > lambda is rejected."""
        with pytest.raises(ValueError):
            _ = counting_sandwich(JC, 300.0, 400.0)
