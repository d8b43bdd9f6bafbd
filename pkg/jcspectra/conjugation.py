"""
conjugation.py - Near-diagonalisation of J_{0,n} by exp(G)

U = exp(G) with G = iB_n is a real orthogonal matrix that conjugates J_{0,n}
into l_n(Lambda) up to the residual R_n. Applying U to the modulation v_n gives
V-tilde_n and the conjugated operator L_n = l_n(Lambda) + V-tilde_n. This module
measures the residual, the eigenvalue transfer between J_n and L_n, the
localisation intervals and gap statistics, the trace functionals and the
diagonal of V-tilde_n.

Every n-dependent operator equals diag(k) outside the support window of a_n
and v_n, so all dense work happens on that window and the rows outside it are
handled exactly by the integer tail.
"""

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from jcspectra.eigensolve import (
    all_eigenvalues,
    dense_eigenvalues,
    merged_spectrum,
    symmetric_norm,
)
from jcspectra.errors import CertificateError
from jcspectra.operators import (
    DenseOrthogonal,
    DenseSkew,
    DenseSymmetric,
    Support,
    TridiagonalWindow,
    build_An_Bn,
    is_skew,
    orthogonality_defect,
    support_window,
)
from jcspectra.sequences import (
    FloatArray,
    ModelParams,
    a1n_values,
    a_n_values,
    cutoff_values,
    d_n_values,
    l_n_values,
    l_of_n,
    mean_and_deviation,
    v_n_values,
)

logger = logging.getLogger(__name__)

PADE_ORDER = 8
ORTHOGONALITY_TOL = 1e-11


@dataclass(frozen=True)
class TestFunctionChi:
    """Fejer pair: chi(lam) = t0 sinc^2(t0 lam / 2), Fourier transform max(0, 1 - |t|/t0)."""

    __test__ = False

    t0: float = 1.0

    def __post_init__(self) -> None:
        if not self.t0 > 0.0:
            raise ValueError(f"t0 must be positive, got {self.t0}")

    def __call__(self, lam: ArrayLike) -> FloatArray:
        x = 0.5 * self.t0 * np.asarray(lam, dtype=np.float64)
        return self.t0 * np.sinc(x / math.pi) ** 2

    def fourier(self, t: ArrayLike) -> FloatArray:
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(t, dtype=np.float64)) / self.t0)


@dataclass(frozen=True)
class ConjugationReport:
    n: int
    gap_sup: float
    localization_ok: bool
    intervals_disjoint: bool
    predictor_sup: float
    residual_norm: float | None = None
    residual_window: float | None = None
    residual_bound: float | None = None
    transfer_sup: float | None = None

    def __post_init__(self) -> None:
        norms = (
            self.gap_sup,
            self.predictor_sup,
            self.residual_norm,
            self.residual_window,
            self.residual_bound,
            self.transfer_sup,
        )
        if any(x is not None and x < 0.0 for x in norms):
            raise ValueError(f"norms must be non-negative: {self}")


@dataclass(frozen=True, eq=False)
class ConjugatedBlock:
    """exp(G) and the diagonal data of J_{0,n} on the support window of a_n and v_n."""

    n: int
    support: Support
    j0: DenseSymmetric
    u: DenseOrthogonal
    l_diag: FloatArray
    v_diag: FloatArray

    @property
    def offset(self) -> int:
        return self.support.lo

    def row(self, j: int) -> int:
        if not self.support.lo <= j <= self.support.hi:
            raise IndexError(f"row {j} is outside the support window {self.support}")
        return j - self.support.lo

    def vtilde(self) -> DenseSymmetric:
        return (self.u * self.v_diag) @ self.u.T

    def vtilde_diagonal(self) -> FloatArray:
        return (self.u**2) @ self.v_diag

    def ln_matrix(self) -> DenseSymmetric:
        """L_n - n on the window (centred to keep the dense work well scaled)."""
        return np.diag(self.l_diag - self.n) + self.vtilde()


def _pade_coefficients(order: int) -> list[float]:
    f = math.factorial
    return [
        f(2 * order - j) * f(order) / (f(2 * order) * f(j) * f(order - j))
        for j in range(order + 1)
    ]


def expm_skew(g: DenseSkew) -> DenseOrthogonal:
    """exp(G) by scaling and squaring around a diagonal Pade kernel.

    For antisymmetric X the Pade denominator is the transpose of the numerator,
    so every squaring step starts from an orthogonal matrix.
    """
    mat = np.asarray(g, dtype=np.float64)
    size = mat.shape[0]
    scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    if mat.shape != (size, size) or not is_skew(mat, 1e-14 * scale):
        raise ValueError("expm_skew needs a square antisymmetric matrix")
    if not np.any(mat):
        return np.eye(size)

    norm = float(np.linalg.norm(mat, 1))
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = mat / 2.0**squarings
    x2 = x @ x
    eye = np.eye(size)
    c = _pade_coefficients(PADE_ORDER)

    even = c[PADE_ORDER] * x2
    for j in range(PADE_ORDER - 2, 0, -2):
        even = x2 @ (even + c[j] * eye)
    even = even + c[0] * eye
    odd = c[PADE_ORDER - 1] * eye
    for j in range(PADE_ORDER - 3, 0, -2):
        odd = x2 @ odd + c[j] * eye
    odd = x @ odd

    u = np.linalg.solve(even - odd, even + odd)
    for _ in range(squarings):
        u = u @ u

    defect = orthogonality_defect(u)
    if defect > ORTHOGONALITY_TOL:
        raise CertificateError(f"exp(G) is not orthogonal: ||U^T U - I||_max = {defect:.3e}")
    logger.debug("expm_skew: size=%d squarings=%d defect=%.2e", size, squarings, defect)
    return u


@functools.lru_cache(maxsize=8)
def conjugate_block(m: ModelParams, n: int) -> ConjugatedBlock:
    support = support_window(m, n)
    ks = support.indices
    _, g = build_An_Bn(m, n, size=support.size, offset=support.lo)
    couplings = a_n_values(ks[:-1], n, m)
    j0 = np.diag(ks.astype(np.float64)) + np.diag(couplings, 1) + np.diag(couplings, -1)
    u = expm_skew(g)
    for arr in (j0, u):
        arr.flags.writeable = False
    return ConjugatedBlock(
        n=n,
        support=support,
        j0=j0,
        u=u,
        l_diag=l_n_values(ks, n, m),
        v_diag=v_n_values(ks, n, m),
    )


@dataclass(frozen=True, eq=False)
class DenseWindow:
    """Dense symmetric block on rows offset .. offset + size - 1."""

    offset: int
    matrix: DenseSymmetric

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])


def residual_matrix(m: ModelParams, n: int) -> DenseSymmetric:
    """R_n = exp(G) J_{0,n} exp(-G) - l_n(Lambda) on the support window."""
    blk = conjugate_block(m, n)
    centred = blk.j0 - n * np.eye(blk.support.size)
    r = blk.u @ centred @ blk.u.T - np.diag(blk.l_diag - n)
    return 0.5 * (r + r.T)


def residual_Rn(m: ModelParams, n: int) -> float:
    """||R_n||, exact up to rounding because R_n vanishes outside the window."""
    return symmetric_norm(residual_matrix(m, n))


def residual_window_norm(m: ModelParams, n: int) -> float:
    """||Theta_n R_n Theta_n|| with Theta_n = theta_{n,n}(Lambda).

    The full residual is carried by the transition band of theta_{2n,n}; this
    part sees only the rows where v_n lives.
    """
    blk = conjugate_block(m, n)
    theta = cutoff_values(blk.support.indices, n, n)
    return symmetric_norm(theta[:, None] * residual_matrix(m, n) * theta[None, :])


def residual_bound(m: ModelParams, n: int) -> float:
    """(2/3) ||[G, a_{1,n}(Lambda)]||, an upper bound for ||R_n||.

    With W(t) = e^{tG} (Lambda + tA_n) e^{-tG} one has W' = 2t e^{tG} a_{1,n}(Lambda) e^{-tG},
    so R_n = int_0^1 2t (e^{tG} a_{1,n}(Lambda) e^{-tG} - a_{1,n}(Lambda)) dt.
    """
    support = support_window(m, n)
    _, g = build_An_Bn(m, n, size=support.size, offset=support.lo)
    diag = a1n_values(support.indices, n, m)
    bracket = g * (diag[None, :] - diag[:, None])
    return 2.0 / 3.0 * float(np.linalg.norm(bracket, 2))


def build_Ln(m: ModelParams, n: int) -> DenseWindow:
    blk = conjugate_block(m, n)
    return DenseWindow(offset=blk.offset, matrix=blk.ln_matrix() + n * np.eye(blk.support.size))


def _jn_window(m: ModelParams, n: int, support: Support) -> TridiagonalWindow:
    ks = support.indices
    return TridiagonalWindow(
        offset=support.lo, diag=d_n_values(ks, n, m), offdiag=a_n_values(ks[:-1], n, m)
    )


def jn_spectrum(m: ModelParams, n: int, k_max: int) -> FloatArray:
    """lambda_1..lambda_kmax of J_n from the support window plus the integer tail."""
    support = support_window(m, n)
    block = all_eigenvalues(_jn_window(m, n, support))
    return merged_spectrum(block, support.lo, support.hi, k_max)


def ln_spectrum(m: ModelParams, n: int, k_max: int) -> FloatArray:
    blk = conjugate_block(m, n)
    block = dense_eigenvalues(blk.ln_matrix()) + n
    return merged_spectrum(block, blk.support.lo, blk.support.hi, k_max)


def window_indices(n: int) -> np.ndarray:
    """Lattice indices k >= 1 with |k - n| <= n/5."""
    ks = np.arange(max(1, n - n // 5 - 1), n + n // 5 + 2, dtype=np.int64)
    return ks[5 * np.abs(ks - n) <= n]


def transfer_sup(m: ModelParams, n: int) -> float:
    """sup over |k - n| <= n/5 of |lambda_k(J_n) - lambda_k(L_n)|."""
    ks = window_indices(n)
    k_max = int(ks[-1])
    diff = jn_spectrum(m, n, k_max)[ks - 1] - ln_spectrum(m, n, k_max)[ks - 1]
    return float(np.max(np.abs(diff)))


def localization_and_gaps(m: ModelParams, n: int, c: float) -> ConjugationReport:
    """Check lambda_k(J_n) against the intervals around l_n(k) and measure the N-gaps.

    The intervals are centred at l_n(k) + <v> theta_{n,n}(k)^2, which is l_n(k)
    for mean-zero modulations. Gaps lambda_{k+N} - lambda_k - N are measured for
    every k in the same window.
    """
    modulation = mean_and_deviation(m)
    period = m.period
    ks = window_indices(n)
    spectrum = jn_spectrum(m, n, int(ks[-1]) + period + 1)

    centre = l_n_values(ks, n, m) + modulation.mean * cutoff_values(ks, n, n) ** 2
    half_width = modulation.rho + c * float(n) ** (m.gamma - 1.0)
    deviation = np.abs(spectrum[ks - 1] - centre)
    localized = bool(np.all(deviation <= half_width))
    disjoint = bool(np.all(np.diff(centre) > 2.0 * half_width))

    gaps = spectrum[ks + period - 1] - spectrum[ks - 1] - period
    gap_sup = float(np.max(np.abs(gaps)))

    return ConjugationReport(
        n=n,
        gap_sup=gap_sup,
        localization_ok=localized and disjoint,
        intervals_disjoint=disjoint,
        predictor_sup=float(np.max(deviation)),
    )


def conjugation_report(m: ModelParams, n: int, c: float) -> ConjugationReport:
    local = localization_and_gaps(m, n, c)
    return ConjugationReport(
        n=n,
        gap_sup=local.gap_sup,
        localization_ok=local.localization_ok,
        intervals_disjoint=local.intervals_disjoint,
        predictor_sup=local.predictor_sup,
        residual_norm=residual_Rn(m, n),
        residual_window=residual_window_norm(m, n),
        residual_bound=residual_bound(m, n),
        transfer_sup=transfer_sup(m, n),
    )


def shift_conjugation_defect(m: ModelParams, n: int) -> float:
    """||S^-N J_n S^N - J_n - N||: tridiagonal with the N-step differences of v_n and a_n."""
    support = support_window(m, n)
    period = m.period
    ks = np.arange(max(1, support.lo - period), support.hi + 1, dtype=np.int64)
    diag = v_n_values(ks + period, n, m) - v_n_values(ks, n, m)
    offdiag = a_n_values(ks[:-1] + period, n, m) - a_n_values(ks[:-1], n, m)
    window = TridiagonalWindow(offset=int(ks[0]), diag=diag, offdiag=offdiag)
    return symmetric_norm(window.to_dense())


# Trace functionals


def trace_G0(m: ModelParams, n: int, chi: TestFunctionChi) -> float:
    """sum_k chi(lambda_k(L_n) - l(n)) - chi(l_n(k) - l(n)).

    Outside the support window both terms are chi(k - l(n)) and cancel, so the
    sum runs over the window only and no tail truncation is needed.
    """
    blk = conjugate_block(m, n)
    if not np.any(blk.v_diag):
        return 0.0
    shift = l_of_n(n, m) - n
    eigenvalues = dense_eigenvalues(blk.ln_matrix())
    return float(np.sum(chi(eigenvalues - shift)) - np.sum(chi(blk.l_diag - n - shift)))


def trace_G_cutoff(m: ModelParams, n: int, chi: TestFunctionChi) -> float:
    """tr theta_{n^gamma,n}(L_{0,n}) (chi(L_n - l(n)) - chi(L_{0,n} - l(n)))."""
    blk = conjugate_block(m, n)
    if not np.any(blk.v_diag):
        return 0.0
    shift = l_of_n(n, m) - n
    eigenvalues, vectors = np.linalg.eigh(blk.ln_matrix())
    chi_diag = (vectors**2) @ chi(eigenvalues - shift)
    weights = cutoff_values(blk.l_diag, float(n) ** m.gamma, n)
    return float(np.sum(weights * (chi_diag - chi(blk.l_diag - n - shift))))


def near_rows(n: int, gamma: float) -> np.ndarray:
    """Rows j with |j - n| <= n^gamma."""
    width = float(n) ** gamma
    return np.arange(max(1, math.ceil(n - width)), math.floor(n + width) + 1, dtype=np.int64)


def vtilde_diag(m: ModelParams, n: int, j: int) -> float:
    """V-tilde_n(j, j) for |j - n| <= n^gamma."""
    if abs(j - n) > float(n) ** m.gamma:
        raise ValueError(f"need |j - n| <= n^gamma, got j={j}, n={n}")
    blk = conjugate_block(m, n)
    if not blk.support.lo <= j <= blk.support.hi:
        return float(v_n_values(np.array([j]), n, m)[0])
    return float(blk.vtilde_diagonal()[blk.row(j)])


def vtilde_diag_max(m: ModelParams, n: int) -> float:
    return max(abs(vtilde_diag(m, n, int(j))) for j in near_rows(n, m.gamma))


def component_diagonal(m: ModelParams, n: int, omega: float) -> np.ndarray:
    """(exp(G) Theta_n^2 e^{i omega Lambda} exp(-G))(j, j) for every window row j."""
    blk = conjugate_block(m, n)
    ks = blk.support.indices
    weights = cutoff_values(ks, n, n) ** 2 * np.exp(1j * omega * ks)
    return (blk.u**2) @ weights


def component_diag(m: ModelParams, n: int, omega: float, j: int) -> complex:
    blk = conjugate_block(m, n)
    return complex(component_diagonal(m, n, omega)[blk.row(j)])
