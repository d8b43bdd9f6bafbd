"""
eigensolve.py - Sturm counts, bisection and a dense rotation oracle

Eigenvalues of symmetric tridiagonal matrices come from the shifted LDL^T
recurrence: the number of negative pivots equals the number of eigenvalues
below the shift. On top of that sit indexed bisection (single and
simultaneous), counting functions, exact spectra of the decoupled J_n,
adaptive finite sections for lambda_n(J) and the counting sandwich for the
window operators.

The cyclic Jacobi oracle shares no code with the bisection path and is meant
for cross-checks on small matrices only.
"""

import csv
import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import hessenberg

from jcspectra.errors import CertificateError, ConvergenceError, WindowDegenerateError
from jcspectra.operators import (
    DecoupledJn,
    TridiagonalWindow,
    build_J_plus,
    build_Jn_plus,
    build_Jtilde_plus,
)
from jcspectra.sequences import FloatArray, IntArray, ModelParams, mean_and_deviation

logger = logging.getLogger(__name__)

DENSE_ORACLE_MAX = 64
MULTISECTION_POINTS = 32
MAX_BISECTION_STEPS = 200
SPECTRUM_TOL = 1e-11
SECTION_PADDING = 64


class Provenance(StrEnum):
    EXACT_DECOUPLED = "exact-decoupled"
    WINDOWED = "windowed"
    DENSE_ORACLE = "dense-oracle"


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    """Eigenvalues lambda_k for the contiguous indices first_index, first_index + 1, ..."""

    first_index: int
    values: FloatArray
    provenance: Provenance
    tol: float

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if self.tol <= 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.first_index < 1:
            raise ValueError(f"indices start at 1, got {self.first_index}")
        if values.size > 1 and np.any(np.diff(values) < 0.0):
            raise ValueError("spectrum values must be non-decreasing in k")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def indices(self) -> IntArray:
        return np.arange(self.first_index, self.first_index + self.values.size, dtype=np.int64)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(k), float(v)) for k, v in zip(self.indices, self.values, strict=True)]

    def value(self, k: int) -> float:
        pos = k - self.first_index
        if not 0 <= pos < self.values.size:
            raise IndexError(f"index {k} is outside this slice")
        return float(self.values[pos])


@dataclass(frozen=True)
class CountWindow:
    lambda_lo: float
    lambda_hi: float
    kappa_lo: int
    kappa_hi: int
    nu: float

    def __post_init__(self) -> None:
        if self.kappa_lo > self.kappa_hi or self.lambda_lo > self.lambda_hi:
            raise ValueError(f"inverted counting window: {self}")


@dataclass(frozen=True)
class SandwichCounts:
    """Both sides of the counting sandwich around N(lambda', lambda, J)."""

    window: CountWindow
    inner: int
    exact: int
    outer: int

    @property
    def holds(self) -> bool:
        return self.inner <= self.exact <= self.outer


def write_spectrum_csv(spectrum: SpectrumSlice, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "lambda", "provenance", "tol"])
        for k, value in spectrum.entries:
            writer.writerow(
                [k, format(value, ".17g"), str(spectrum.provenance), format(spectrum.tol, ".17g")]
            )


# Sturm counts


def sturm_counts(window: TridiagonalWindow, xs: ArrayLike) -> IntArray:
    """Number of eigenvalues strictly below each shift in ``xs``.

    Pivots smaller than pivmin are replaced by +pivmin, which moves the shift
    an infinitesimal amount downwards and keeps the count strict.
    """
    shifts = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if not np.all(np.isfinite(shifts)):
        raise ValueError("Sturm shifts must be finite")
    e2 = window.offdiag**2
    pivmin = np.finfo(np.float64).tiny * max(1.0, float(np.max(e2, initial=0.0)))
    diag = window.diag

    q = diag[0] - shifts
    q[np.abs(q) < pivmin] = pivmin
    counts = (q < 0.0).astype(np.int64)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for i in range(1, window.size):
            q = (diag[i] - shifts) - e2[i - 1] / q
            q[np.abs(q) < pivmin] = pivmin
            counts += q < 0.0
    return counts


def sturm_count(window: TridiagonalWindow, x: float) -> int:
    return int(sturm_counts(window, np.array([x]))[0])


def _padded_gershgorin(window: TridiagonalWindow, tol: float) -> tuple[float, float]:
    lo, hi = window.gershgorin()
    margin = tol + 4.0 * np.finfo(np.float64).eps * max(1.0, abs(lo), abs(hi))
    return lo - margin, hi + margin


def certify(window: TridiagonalWindow, ks: ArrayLike, values: ArrayLike, tol: float) -> bool:
    """count(lambda - tol) <= k - 1 < k <= count(lambda + tol) for every pair."""
    idx = np.asarray(ks, dtype=np.int64)
    vals = np.asarray(values, dtype=np.float64)
    below = sturm_counts(window, vals - tol)
    above = sturm_counts(window, vals + tol)
    return bool(np.all(below <= idx - 1) and np.all(above >= idx))


def eigenvalue_by_index(
    window: TridiagonalWindow,
    k: int,
    tol: float,
    bracket: tuple[float, float] | None = None,
) -> float:
    """k-th smallest eigenvalue (1-based) by multisection of a certified bracket."""
    if not 1 <= k <= window.size:
        raise ValueError(f"index {k} out of range 1..{window.size}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    lo, hi = bracket if bracket is not None else _padded_gershgorin(window, tol)
    counts = sturm_counts(window, np.array([lo, hi]))
    if not (counts[0] <= k - 1 and counts[1] >= k):
        if bracket is None:
            raise CertificateError(f"Gershgorin bracket does not enclose eigenvalue {k}")
        logger.debug("bracket %s misses eigenvalue %d, falling back to Gershgorin", bracket, k)
        return eigenvalue_by_index(window, k, tol)

    for _ in range(MAX_BISECTION_STEPS):
        if hi - lo <= tol:
            break
        xs = np.linspace(lo, hi, MULTISECTION_POINTS + 2)[1:-1]
        reached = sturm_counts(window, xs) >= k
        if reached.any():
            first = int(np.argmax(reached))
            new_lo, new_hi = (xs[first - 1] if first else lo), xs[first]
        else:
            new_lo, new_hi = xs[-1], hi
        if new_hi - new_lo >= hi - lo:
            break
        lo, hi = float(new_lo), float(new_hi)

    value = 0.5 * (lo + hi)
    if not certify(window, [k], [value], tol):
        raise CertificateError(f"eigenvalue {k} could not be bracketed to tol={tol}")
    return value


def eigenvalues_by_bisection(window: TridiagonalWindow, ks: ArrayLike, tol: float) -> FloatArray:
    """Simultaneous bisection for the sorted indices ``ks``."""
    idx = np.asarray(ks, dtype=np.int64)
    if idx.size == 0:
        return np.zeros(0)
    if np.any(np.diff(idx) < 0) or idx[0] < 1 or idx[-1] > window.size:
        raise ValueError(f"indices must be sorted within 1..{window.size}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    glo, ghi = _padded_gershgorin(window, tol)
    lo = np.full(idx.shape, glo)
    hi = np.full(idx.shape, ghi)
    for _ in range(MAX_BISECTION_STEPS):
        active = hi - lo > tol
        if not active.any():
            break
        mid = 0.5 * (lo[active] + hi[active])
        reached = sturm_counts(window, mid) >= idx[active]
        hi[active] = np.where(reached, mid, hi[active])
        lo[active] = np.where(reached, lo[active], mid)

    values = np.maximum.accumulate(0.5 * (lo + hi))
    if not certify(window, idx, values, tol):
        raise CertificateError(f"simultaneous bisection lost a bracket at tol={tol}")
    return values


def all_eigenvalues(window: TridiagonalWindow, tol: float = SPECTRUM_TOL) -> FloatArray:
    return eigenvalues_by_bisection(window, np.arange(1, window.size + 1), tol)


# Dense matrices


def dense_oracle_eigenvalues(
    mat: FloatArray, tol: float = 1e-15, max_sweeps: int = 60
) -> FloatArray:
    """Sorted eigenvalues by cyclic two-sided Jacobi rotations (size <= 64)."""
    a = np.array(mat, dtype=np.float64)
    size = a.shape[0]
    if a.shape != (size, size) or size < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if size > DENSE_ORACLE_MAX:
        raise ValueError(f"dense oracle is limited to size {DENSE_ORACLE_MAX}, got {size}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-14 * max(1.0, float(np.max(np.abs(a))))):
        raise ValueError("dense oracle needs a symmetric matrix")

    scale = max(float(np.linalg.norm(a)), np.finfo(np.float64).tiny)
    # rotations below this size cannot move the diagonal
    tiny = 1e-3 * tol * scale / size
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            return np.sort(np.diag(a))
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if abs(apq) <= tiny:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
    raise ConvergenceError(f"Jacobi rotations did not converge in {max_sweeps} sweeps")


def tridiagonalize(mat: FloatArray, offset: int = 1) -> TridiagonalWindow:
    """Orthogonal reduction of a dense symmetric matrix to tridiagonal form."""
    sym = 0.5 * (mat + mat.T)
    if sym.shape[0] == 1:
        return TridiagonalWindow(offset=offset, diag=np.diag(sym), offdiag=np.zeros(0))
    reduced = np.asarray(hessenberg(sym), dtype=np.float64)
    return TridiagonalWindow(offset=offset, diag=np.diag(reduced), offdiag=np.diag(reduced, -1))


def dense_eigenvalues(mat: FloatArray, tol: float = SPECTRUM_TOL) -> FloatArray:
    """Certified eigenvalues of a dense symmetric matrix (diagonal input is read off)."""
    if np.count_nonzero(mat - np.diag(np.diag(mat))) == 0:
        return np.sort(np.diag(mat))
    return all_eigenvalues(tridiagonalize(mat), tol)


def symmetric_norm(mat: FloatArray, tol: float = 1e-13) -> float:
    """Spectral norm of a symmetric matrix as max |extremal eigenvalue|."""
    if not np.any(mat):
        return 0.0
    window = tridiagonalize(mat)
    scale = max(1.0, float(np.max(np.abs(mat))))
    lowest = eigenvalue_by_index(window, 1, tol * scale)
    highest = eigenvalue_by_index(window, window.size, tol * scale)
    return max(abs(lowest), abs(highest))


def merged_spectrum(block_values: ArrayLike, lo: int, hi: int, k_max: int) -> FloatArray:
    """lambda_1..lambda_kmax of an operator equal to diag(k) outside the rows [lo, hi]."""
    head = np.arange(1, lo, dtype=np.float64)
    tail = np.arange(hi + 1, hi + 1 + k_max, dtype=np.float64)
    values = np.asarray(block_values, dtype=np.float64)
    merged = np.sort(np.concatenate((head, values, tail)), kind="stable")
    return merged[:k_max]


# Decoupled J_n


def _decoupled_values(op: DecoupledJn, k_lo: int, k_hi: int, tol: float) -> FloatArray:
    block = op.block
    block_size = op.tail_start - 1
    if sturm_count(block, float(op.tail_start)) == block_size:
        top = min(k_hi, block_size)
        head = (
            eigenvalues_by_bisection(block, np.arange(k_lo, top + 1), tol)
            if k_lo <= top
            else np.zeros(0)
        )
        tail = np.arange(max(k_lo, op.tail_start), k_hi + 1, dtype=np.float64)
        return np.concatenate((head, tail))
    # block eigenvalues reach into the tail; merge everything
    merged = np.sort(
        np.concatenate(
            (all_eigenvalues(block, tol), np.arange(op.tail_start, op.tail_start + k_hi + 1.0))
        ),
        kind="stable",
    )
    return merged[k_lo - 1 : k_hi]


def spectrum_of_Jn(
    m: ModelParams, n: int, index_range: tuple[int, int], tol: float = SPECTRUM_TOL
) -> SpectrumSlice:
    """Exact lambda_k(J_n) for k_lo <= k <= k_hi (inclusive)."""
    k_lo, k_hi = index_range
    if not 1 <= k_lo <= k_hi:
        raise ValueError(f"invalid index range {index_range}")
    values = _decoupled_values(build_Jn_plus(m, n), k_lo, k_hi, tol)
    return SpectrumSlice(k_lo, values, Provenance.EXACT_DECOUPLED, tol)


def counting(op: TridiagonalWindow | DecoupledJn, lo: float, hi: float) -> int:
    """N(lo, hi) = number of eigenvalues in (lo, hi], multiplicities counted."""
    if lo > hi:
        raise ValueError(f"need lo <= hi, got ({lo}, {hi})")
    window = op.block if isinstance(op, DecoupledJn) else op
    le = sturm_counts(window, np.nextafter(np.array([lo, hi]), np.inf))
    total = int(le[1] - le[0])
    if isinstance(op, DecoupledJn):
        total += max(0, math.floor(hi) - max(math.floor(lo), op.tail_start - 1))
    return total


# lambda_n(J)


def default_c0(m: ModelParams) -> float:
    return 3.0 * max(m.a1, 1.0)


def _check_window(m: ModelParams, lam: float, nu: float, c0: float) -> None:
    if lam - lam**-nu < (c0 + 1.0) * lam**m.gamma:
        raise WindowDegenerateError(
            f"window degenerate at lambda={lam:g}: need lambda' >= (C0+1) lambda^gamma "
            f"with C0={c0:g}"
        )


def _section_eigenvalue(m: ModelParams, n: int, size: int, tol: float, c0: float) -> float:
    window = build_J_plus(m, size)
    centre = n + mean_and_deviation(m).mean
    width = c0 * float(n) ** m.gamma + mean_and_deviation(m).rho + 2.0
    return eigenvalue_by_index(window, n, tol, bracket=(centre - width, centre + width))


def lambda_n_section(
    m: ModelParams,
    n: int,
    nu: float = 2.0,
    tol: float = 1e-9,
    c0: float | None = None,
    max_doublings: int = 8,
) -> tuple[float, int]:
    """lambda_n(J) and the section size at which it stabilised."""
    c0 = default_c0(m) if c0 is None else c0
    _check_window(m, float(n), nu, c0)
    size = n + math.ceil(c0 * float(n) ** m.gamma) + SECTION_PADDING
    value = _section_eigenvalue(m, n, size, tol, c0)
    for _ in range(max_doublings):
        size *= 2
        refined = _section_eigenvalue(m, n, size, tol, c0)
        logger.debug("lambda_%d: section %d -> %.15g", n, size, refined)
        if abs(refined - value) <= tol:
            return refined, size
        value = refined
    raise ConvergenceError(f"lambda_{n}(J) did not stabilise after {max_doublings} doublings")


def lambda_n_of_J(
    m: ModelParams, n: int, nu: float = 2.0, tol: float = 1e-9, c0: float | None = None
) -> float:
    return lambda_n_section(m, n, nu, tol, c0)[0]


def window_stability(
    m: ModelParams, n: int, nu: float = 2.0, tol: float = 1e-9, c0: float | None = None
) -> float:
    """Change of lambda_n(J) when the final section size is doubled once more."""
    c0 = default_c0(m) if c0 is None else c0
    value, size = lambda_n_section(m, n, nu, tol, c0)
    return abs(_section_eigenvalue(m, n, 2 * size, tol, c0) - value)


def lambda_n_of_Jtilde(
    m: ModelParams, n: int, c1: float | None = None, tol: float = SPECTRUM_TOL
) -> float:
    """lambda_n of the window operator J-tilde_n (second route to lambda_n(J))."""
    c1 = default_c0(m) + 1.0 if c1 is None else c1
    return float(_decoupled_values(build_Jtilde_plus(m, n, c1), n, n, tol)[0])


def counting_sandwich(
    m: ModelParams, lam: float, lam_prime: float, nu: float = 2.0, c0: float | None = None
) -> SandwichCounts:
    """Evaluate both sides of the counting sandwich for J_{lambda',lambda}.

    J_{lambda',lambda} keeps a(k) on the kappa-window and drops the coupling
    elsewhere, so its spectrum splits exactly into a block and the diagonal d(k).
    """
    c0 = default_c0(m) if c0 is None else c0
    if lam_prime > lam:
        raise ValueError(f"need lambda' <= lambda, got ({lam_prime}, {lam})")
    if lam_prime < (c0 + 1.0) * lam**m.gamma:
        raise WindowDegenerateError(
            f"window degenerate: lambda'={lam_prime:g} < (C0+1) lambda^gamma"
        )
    spread = c0 * lam**m.gamma
    window = CountWindow(
        lambda_lo=lam_prime,
        lambda_hi=lam,
        kappa_lo=max(1, math.floor(lam_prime - spread)),
        kappa_hi=math.ceil(lam + spread),
        nu=nu,
    )
    eps = lam**-nu

    size = window.kappa_hi + SECTION_PADDING
    exact = counting(build_J_plus(m, size), lam_prime, lam)
    for _ in range(8):
        size *= 2
        refined = counting(build_J_plus(m, size), lam_prime, lam)
        if refined == exact:
            break
        exact = refined
    else:
        raise ConvergenceError(f"N(lambda', lambda, J) did not stabilise up to size {size}")

    section = build_J_plus(m, size)
    off_ks = section.indices[:-1]
    keep = (off_ks >= window.kappa_lo) & (off_ks <= window.kappa_hi)
    windowed = TridiagonalWindow(offset=1, diag=section.diag, offdiag=section.offdiag * keep)
    inner_lo, inner_hi = lam_prime + eps, lam - eps
    inner = counting(windowed, inner_lo, inner_hi) if inner_lo <= inner_hi else 0
    outer = counting(windowed, lam_prime - eps, lam + eps)
    return SandwichCounts(window=window, inner=inner, exact=exact, outer=outer)
