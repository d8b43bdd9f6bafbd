"""
oscillatory.py - Periodic quadrature, phase functions and symbol matrices

Symbols q(j, xi) are 2pi-periodic in xi and turned into matrices through their
Fourier coefficients, q(Lambda, S)(j, k) = (1/2pi) int q(j, xi) e^{i(k-j)xi} dxi.
All integrals over the circle use the uniform trapezoid rule, which is
spectrally accurate for the analytic integrands met here.
"""

import csv
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from jcspectra.conjugation import component_diagonal, conjugate_block, near_rows
from jcspectra.errors import ContractionError, ConvergenceError
from jcspectra.ratefit import RateFit, fit_rate
from jcspectra.sequences import (
    FloatArray,
    IntArray,
    ModelParams,
    cutoff_values,
    delta_a,
    entry_a,
)

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
Symbol = Callable[[IntArray, FloatArray], ComplexArray]
PhaseSlice = Callable[[IntArray, FloatArray], FloatArray]

QUAD_POINTS = 1024
QUAD_CAP = 2**16
QUAD_TOL = 1e-9
SAMPLE_POINTS = 512
CONTRACTION_BOUND = 0.5
STATIONARY_PHASE_MAX_SLOPE = -0.4
PREDICTION_CSV_HEADER = ("n", "omega", "j", "pred_re", "pred_im", "direct", "defect", "direct_im")


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """A 2pi-periodic function of xi; ``smoothness=None`` means C-infinity."""

    evaluate: Callable[[FloatArray], NDArray[np.generic]]
    derivative: Callable[[FloatArray], NDArray[np.generic]] | None = None
    smoothness: int | None = None

    def __call__(self, xi: ArrayLike) -> NDArray[np.generic]:
        return self.evaluate(np.asarray(xi, dtype=np.float64))

    def deriv(self, xi: ArrayLike, m_points: int = QUAD_POINTS) -> NDArray[np.generic]:
        """Analytic derivative when known, centred difference with h = 2pi/M otherwise."""
        xs = np.asarray(xi, dtype=np.float64)
        if self.derivative is not None:
            return self.derivative(xs)
        h = 2.0 * math.pi / m_points
        return (self.evaluate(xs + h) - self.evaluate(xs - h)) / (2.0 * h)

    def is_periodic(self, samples: int = 64, tol: float = 1e-12) -> bool:
        xs = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        return bool(np.max(np.abs(self(xs + 2.0 * math.pi) - self(xs))) <= tol)


def constant(value: complex) -> PeriodicFunction:
    return PeriodicFunction(
        evaluate=lambda xi: np.full(xi.shape, value),
        derivative=lambda xi: np.zeros(xi.shape),
    )


def character(order: int) -> PeriodicFunction:
    """e^{i order xi}."""
    return PeriodicFunction(
        evaluate=lambda xi: np.exp(1j * order * xi),
        derivative=lambda xi: 1j * order * np.exp(1j * order * xi),
    )


def fejer_bump(order: int = 4) -> PeriodicFunction:
    """Non-negative Fejer kernel of the given order, normalised by order + 1."""
    ks = np.arange(-order, order + 1)
    weights = (1.0 - np.abs(ks) / (order + 1)) / (order + 1)

    def evaluate(xi: FloatArray) -> NDArray[np.generic]:
        return np.real(np.exp(1j * np.multiply.outer(xi, ks)) @ weights)

    def derivative(xi: FloatArray) -> NDArray[np.generic]:
        return np.real((1j * ks * np.exp(1j * np.multiply.outer(xi, ks))) @ weights)

    return PeriodicFunction(evaluate=evaluate, derivative=derivative)


def sup_norm(f: PeriodicFunction, m_points: int = SAMPLE_POINTS) -> float:
    xs = np.linspace(0.0, 2.0 * math.pi, m_points, endpoint=False)
    return float(np.max(np.abs(f(xs))))


def c1_norm(f: PeriodicFunction, m_points: int = SAMPLE_POINTS) -> float:
    """max(sup |f|, sup |f'|) on a uniform grid."""
    xs = np.linspace(0.0, 2.0 * math.pi, m_points, endpoint=False)
    return max(float(np.max(np.abs(f(xs)))), float(np.max(np.abs(f.deriv(xs)))))


# Phases


@dataclass(frozen=True, eq=False)
class PhaseFamily:
    """psi_n and phi_n; the j-slice of the full phase is psi_n + (j - n) phi_n."""

    n: int
    model: ModelParams
    psi: PeriodicFunction
    phi: PeriodicFunction

    def tilde(self, j: ArrayLike, xi: ArrayLike) -> FloatArray:
        js = np.asarray(j)
        return np.real(self.psi(xi)) + (js - self.n) * np.real(self.phi(xi))


def _sine_phase(amplitude: float, delta: float) -> PeriodicFunction:
    """amplitude * sin(xi) * (1 - delta cos(xi))."""
    return PeriodicFunction(
        evaluate=lambda xi: amplitude * np.sin(xi) * (1.0 - delta * np.cos(xi)),
        derivative=lambda xi: amplitude * (np.cos(xi) - delta * np.cos(2.0 * xi)),
    )


def phase_family(m: ModelParams, n: int) -> PhaseFamily:
    a_here = entry_a(n, m)
    delta = delta_a(n, m)
    return PhaseFamily(
        n=n,
        model=m,
        psi=_sine_phase(2.0 * a_here, delta),
        phi=_sine_phase(2.0 * delta, delta),
    )


def phase_split(m: ModelParams, n: int) -> tuple[PeriodicFunction, PeriodicFunction]:
    """psi_n = psi_{n,1} + psi_{n,2} with psi_{n,1} = 2 a(n) sin(xi)."""
    a_here = entry_a(n, m)
    delta = delta_a(n, m)
    principal = PeriodicFunction(
        evaluate=lambda xi: 2.0 * a_here * np.sin(xi),
        derivative=lambda xi: 2.0 * a_here * np.cos(xi),
    )
    remainder = PeriodicFunction(
        evaluate=lambda xi: -a_here * delta * np.sin(2.0 * xi),
        derivative=lambda xi: -2.0 * a_here * delta * np.cos(2.0 * xi),
    )
    return principal, remainder


def phase_split_norms(m: ModelParams, n: int) -> tuple[float, float]:
    principal, remainder = phase_split(m, n)
    return sup_norm(principal), sup_norm(remainder)


# Quadrature


def _check_points(m_points: int) -> None:
    if m_points < 64 or m_points & (m_points - 1):
        raise ValueError(f"quadrature needs a power of two >= 64, got {m_points}")


def _trapezoid(b: PeriodicFunction, mu: float, m_points: int) -> complex:
    eta = 2.0 * math.pi * np.arange(m_points) / m_points
    return complex(2.0 * math.pi * np.mean(np.exp(1j * mu * np.cos(eta)) * b(eta)))


def osc_integral(
    b: PeriodicFunction, mu: float, m_points: int = QUAD_POINTS, cap: int = QUAD_CAP
) -> complex:
    """int_0^{2pi} e^{i mu cos eta} b(eta) d eta, doubling M until M and 2M agree."""
    _check_points(m_points)
    value = _trapezoid(b, mu, m_points)
    while m_points < cap:
        m_points *= 2
        refined = _trapezoid(b, mu, m_points)
        if abs(refined - value) <= QUAD_TOL:
            return refined
        logger.debug("osc_integral mu=%g: doubling to M=%d", mu, m_points)
        value = refined
    raise ConvergenceError(f"oscillatory integral at mu={mu} did not settle by M={cap}")


def stationary_phase_envelope(
    b: PeriodicFunction, mu: float, samples: int = 16, m_points: int = QUAD_POINTS
) -> float:
    """max |J(b, mu')| for mu' in [|mu|, |mu| + pi) on the side of mu."""
    sign = 1.0 if mu >= 0.0 else -1.0
    offsets = np.linspace(0.0, math.pi, samples, endpoint=False)
    return max(abs(osc_integral(b, mu + sign * s, m_points)) for s in offsets)


def stationary_phase_check(
    b: PeriodicFunction, mu_list: Sequence[float], samples: int = 16
) -> RateFit:
    """Fit the envelope of |J(b, mu)| against |mu|; the slope should be close to -1/2."""
    if any(abs(mu) < 1.0 for mu in mu_list):
        raise ValueError("stationary phase sweep needs |mu| >= 1")
    envelope = [stationary_phase_envelope(b, mu, samples) for mu in mu_list]
    return fit_rate([abs(mu) for mu in mu_list], envelope)


# Inverse of the circle map eta = xi - phi(xi)


class EtaInverse(NamedTuple):
    xi: FloatArray
    p: FloatArray


def invert_eta(
    phi: PeriodicFunction,
    eta: ArrayLike,
    m_points: int = SAMPLE_POINTS,
    tol: float = 1e-13,
    max_iter: int = 60,
) -> EtaInverse:
    """Solve xi - phi(xi) = eta by safeguarded Newton and return xi with p = d xi / d eta.

    Requires ||phi||_{C^1} <= 1/2 so that xi -> xi - phi(xi) has derivative >= 1/2.
    """
    norm = c1_norm(phi, m_points)
    if norm > CONTRACTION_BOUND:
        raise ContractionError(f"||phi||_C1 = {norm:.4g} exceeds {CONTRACTION_BOUND}")

    target = np.asarray(eta, dtype=np.float64)
    etas = np.atleast_1d(target).astype(np.float64)
    reach = sup_norm(phi, m_points) + math.pi / m_points * norm + 1e-12
    lo, hi = etas - reach, etas + reach
    xi = etas + np.real(phi(etas))

    for _ in range(max_iter):
        residual = xi - np.real(phi(xi)) - etas
        active = np.abs(residual) > tol
        if not active.any():
            break
        # converged entries stay put
        hi = np.where(active & (residual > 0.0), xi, hi)
        lo = np.where(active & (residual < 0.0), xi, lo)
        step = xi - residual / (1.0 - np.real(phi.deriv(xi)))
        outside = (step < lo) | (step > hi)
        xi = np.where(active, np.where(outside, 0.5 * (lo + hi), step), xi)
    else:
        raise ConvergenceError("Newton inversion of the circle map did not converge")

    p = 1.0 / (1.0 - np.real(phi.deriv(xi)))
    return EtaInverse(xi=xi.reshape(target.shape), p=p.reshape(target.shape))


def p_deviation(m: ModelParams, n: int, m_points: int = SAMPLE_POINTS) -> float:
    """||p_n - 1||_inf."""
    eta = np.linspace(0.0, 2.0 * math.pi, m_points, endpoint=False)
    return float(np.max(np.abs(invert_eta(phase_family(m, n).phi, eta).p - 1.0)))


# Symbols and matrices


def _grid_size(span: int, m_points: int | None) -> int:
    if m_points is not None:
        _check_points(m_points)
        return m_points
    return max(QUAD_POINTS, 1 << math.ceil(math.log2(4 * (span + 1))))


def symbol_to_matrix(
    q: Symbol,
    row_offset: int,
    size: int,
    col_offset: int | None = None,
    col_size: int | None = None,
    m_points: int | None = None,
) -> ComplexArray:
    """Block of q(Lambda, S) on rows row_offset.. and columns col_offset.. (default: same)."""
    col_offset = row_offset if col_offset is None else col_offset
    col_size = size if col_size is None else col_size
    rows = np.arange(row_offset, row_offset + size, dtype=np.int64)
    cols = np.arange(col_offset, col_offset + col_size, dtype=np.int64)
    span = int(max(abs(cols[-1] - rows[0]), abs(rows[-1] - cols[0])))
    points = _grid_size(span, m_points)

    xi = 2.0 * math.pi * np.arange(points) / points
    samples = np.broadcast_to(q(rows[:, None], xi[None, :]), (size, points))
    coefficients = np.fft.ifft(samples, axis=1)
    offsets = np.mod(cols[None, :] - rows[:, None], points)
    return np.take_along_axis(coefficients, offsets, axis=1)


def translation_check(
    q: Symbol, s: float, row_offset: int, size: int, m_points: int | None = None
) -> float:
    """max |e^{-is Lambda} q(Lambda,S) e^{is Lambda} - (q o tau_s)(Lambda,S)|."""
    ks = np.arange(row_offset, row_offset + size)
    left = symbol_to_matrix(q, row_offset, size, m_points=m_points)
    left = np.exp(-1j * s * ks)[:, None] * left * np.exp(1j * s * ks)[None, :]

    def shifted(j: IntArray, xi: FloatArray) -> ComplexArray:
        return q(j, xi - s)

    right = symbol_to_matrix(shifted, row_offset, size, m_points=m_points)
    return float(np.max(np.abs(left - right)))


def product_check(
    q1: Symbol,
    q2: Symbol,
    row_offset: int,
    size: int,
    margin: int = 64,
    m_points: int | None = None,
) -> float:
    """Compare q1(Lambda,S) q2(Lambda,S)^* with its integral formula on a window."""
    col_offset = row_offset - margin
    col_size = size + 2 * margin
    first = symbol_to_matrix(q1, row_offset, size, col_offset, col_size, m_points)
    second = symbol_to_matrix(q2, row_offset, size, col_offset, col_size, m_points)
    product = first @ second.conj().T

    rows = np.arange(row_offset, row_offset + size)
    points = _grid_size(col_size + margin, m_points)
    xi = 2.0 * math.pi * np.arange(points) / points
    left = q1(rows[:, None], xi[None, :]) * np.exp(-1j * np.multiply.outer(rows, xi))
    right = np.conj(q2(rows[:, None], xi[None, :])) * np.exp(1j * np.multiply.outer(rows, xi))
    formula = left @ right.T / points
    return float(np.max(np.abs(product - formula)))


def _bandwidth(phase: PhaseSlice, rows: IntArray, m_points: int = SAMPLE_POINTS) -> float:
    """sup |d/dxi phase(j, xi)| over the given rows, by centred differences."""
    xi = np.linspace(0.0, 2.0 * math.pi, m_points, endpoint=False)
    h = 2.0 * math.pi / m_points
    forward = phase(rows[:, None], xi[None, :] + h)
    backward = phase(rows[:, None], xi[None, :] - h)
    slope = (forward - backward) / (2.0 * h)
    return float(np.max(np.abs(slope)))


def composition_check(
    psi0: PhaseSlice,
    family: PhaseFamily,
    theta0: Callable[[IntArray], FloatArray],
    theta: Callable[[IntArray], FloatArray],
    n: int,
    m_points: int = QUAD_POINTS,
    margin: int | None = None,
) -> float:
    """Max entrywise defect of the composition formula on rows and columns [2n/3, 4n/3].

    Left side: (theta0 e^{i psi0})(Lambda,S) ((theta e^{i psi-tilde})(Lambda,S))^*.
    Right side: (theta0 e^{i (psi0 - psi-tilde) o xi_n})(Lambda,S) p_n(S) theta(Lambda).
    """
    lo, hi = math.ceil(2 * n / 3), math.floor(4 * n / 3)
    size = hi - lo + 1
    ends = np.array([lo, hi], dtype=np.int64)
    if margin is None:
        reach = max(_bandwidth(psi0, ends), _bandwidth(family.tilde, ends))
        margin = 64 + math.ceil(4.0 * reach)
    col_offset, col_size = lo - margin, size + 2 * margin

    def q0(j: IntArray, xi: FloatArray) -> ComplexArray:
        return theta0(j) * np.exp(1j * psi0(j, xi))

    def q(j: IntArray, xi: FloatArray) -> ComplexArray:
        return theta(j) * np.exp(1j * family.tilde(j, xi))

    first = symbol_to_matrix(q0, lo, size, col_offset, col_size)
    second = symbol_to_matrix(q, lo, size, col_offset, col_size)
    left = first @ second.conj().T

    points = max(m_points, _grid_size(size - 1, None))
    eta = 2.0 * math.pi * np.arange(points) / points
    inverse = invert_eta(family.phi, eta)

    # symbol_to_matrix samples q on this same eta grid
    def composed(j: IntArray, _xi: FloatArray) -> ComplexArray:
        x = inverse.xi[None, :]
        phase = psi0(j, x) - family.tilde(j, x)
        return theta0(j) * np.exp(1j * phase) * inverse.p[None, :]

    right = symbol_to_matrix(composed, lo, size, m_points=points)
    right = right * theta(np.arange(lo, hi + 1, dtype=np.int64))[None, :]
    return float(np.max(np.abs(left - right)))


# Diagonal predictions


def omega_star(m: ModelParams) -> list[float]:
    return [2.0 * math.pi * ell / m.period for ell in range(1, m.period)]


def fourier_modes(m: ModelParams) -> list[tuple[float, complex]]:
    """(omega, c_omega) with v(k) = sum_omega c_omega e^{i omega k}, omega = 2 pi l / N."""
    period = m.period
    ks = np.arange(1, period + 1)
    table = np.asarray(m.v_table, dtype=np.float64)
    modes: list[tuple[float, complex]] = []
    for ell in range(period):
        omega = 2.0 * math.pi * ell / period
        modes.append((omega, complex(np.sum(table * np.exp(-1j * omega * ks)) / period)))
    return modes


def mu_n_omega(m: ModelParams, n: int, omega: float) -> float:
    return -4.0 * entry_a(n, m) * math.sin(omega / 2.0)


def _check_omega(m: ModelParams, omega: float) -> None:
    ell = omega * m.period / (2.0 * math.pi)
    nearest = round(ell)
    if abs(ell - nearest) > 1e-9 or not 1 <= nearest <= m.period - 1:
        raise ValueError(f"omega={omega} is not of the form 2 pi l / N with 1 <= l < N")


def diag_predictions(
    m: ModelParams,
    n: int,
    omega: float,
    t: float,
    js: ArrayLike,
    m_points: int = QUAD_POINTS,
) -> ComplexArray:
    """Stationary-phase predictions of the conjugated diagonal for every j in ``js``."""
    _check_omega(m, omega)
    rows = np.atleast_1d(np.asarray(js, dtype=np.int64))
    if np.any(3 * np.abs(rows - n) > n):
        raise ValueError(f"need |j - n| <= n/3 for every j, n={n}")
    family = phase_family(m, n)
    eta = 2.0 * math.pi * np.arange(m_points) / m_points
    xi = invert_eta(family.phi, eta - t).xi
    phase = family.tilde(rows[:, None], xi[None, :] - omega) - family.tilde(
        rows[:, None], xi[None, :]
    )
    integral = np.mean(np.exp(1j * phase), axis=1)
    return np.exp(1j * omega * rows) * cutoff_values(rows, n, n) ** 2 * integral


def q_diag_prediction(
    m: ModelParams, n: int, omega: float, t: float, j: int, m_points: int = QUAD_POINTS
) -> complex:
    return complex(diag_predictions(m, n, omega, t, [j], m_points)[0])


class PredictionRow(NamedTuple):
    n: int
    omega: float
    j: int
    prediction: complex
    direct: complex

    @property
    def defect(self) -> float:
        return abs(self.prediction - self.direct)


def prediction_table(m: ModelParams, n: int) -> list[PredictionRow]:
    """Prediction and direct diagonal for omega in Omega* and |j - n| <= n^gamma."""
    rows = near_rows(n, m.gamma)
    offset = conjugate_block(m, n).offset
    table: list[PredictionRow] = []
    for omega in omega_star(m):
        predicted = diag_predictions(m, n, omega, 0.0, rows)
        direct = component_diagonal(m, n, omega)[rows - offset]
        table.extend(
            PredictionRow(n, omega, int(j), complex(p), complex(d))
            for j, p, d in zip(rows, predicted, direct, strict=True)
        )
    return table


def prediction_defect(m: ModelParams, n: int) -> float:
    return max((row.defect for row in prediction_table(m, n)), default=0.0)


def write_prediction_csv(table: Sequence[PredictionRow], path: Path) -> None:
    """`direct` holds the real part; the imaginary part follows as `direct_im`."""
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTION_CSV_HEADER)
        for row in table:
            writer.writerow(
                [
                    row.n,
                    format(row.omega, ".17g"),
                    row.j,
                    format(row.prediction.real, ".17g"),
                    format(row.prediction.imag, ".17g"),
                    format(row.direct.real, ".17g"),
                    format(row.defect, ".17g"),
                    format(row.direct.imag, ".17g"),
                ]
            )


# exp(G) Theta_n against its symbol


def _against_exp_g(m: ModelParams, n: int, q: Symbol, right_cutoff: bool) -> float:
    """||exp(G) Theta_n - q(Lambda, S) [Theta_n]|| on the rows of the support window."""
    blk = conjugate_block(m, n)
    family = phase_family(m, n)
    ks = blk.support.indices
    margin = 64 + math.ceil(4.0 * sup_norm(family.psi))
    col_offset, col_size = blk.offset - margin, ks.size + 2 * margin

    symbol = symbol_to_matrix(q, blk.offset, ks.size, col_offset, col_size)
    if right_cutoff:
        cols = np.arange(col_offset, col_offset + col_size, dtype=np.int64)
        symbol = symbol * cutoff_values(cols, n, n)[None, :]
    exact = np.zeros_like(symbol)
    exact[:, margin : margin + ks.size] = blk.u * cutoff_values(ks, n, n)[None, :]
    return float(np.linalg.norm(exact - symbol, 2))


def approximation_defect(m: ModelParams, n: int) -> float:
    """||exp(G) Theta_n - (theta_{n,n} e^{i psi-tilde_n})(Lambda, S)||.

    The cut-off sits on the left of the symbol here, so the commutator of Theta_n
    with the shift part stays in the defect.
    """
    family = phase_family(m, n)

    def q(j: IntArray, xi: FloatArray) -> ComplexArray:
        return cutoff_values(j, n, n) * np.exp(1j * family.tilde(j, xi))

    return _against_exp_g(m, n, q, right_cutoff=False)


def symbol_defect(m: ModelParams, n: int) -> float:
    """||exp(G) Theta_n - (e^{i psi-tilde_n})(Lambda, S) Theta_n||."""
    family = phase_family(m, n)

    def q(j: IntArray, xi: FloatArray) -> ComplexArray:
        return np.exp(1j * family.tilde(j, xi))

    return _against_exp_g(m, n, q, right_cutoff=True)
