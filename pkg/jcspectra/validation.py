"""
validation.py - The exact-identity suite behind `jcspec validate`

Each identity returns a defect that must not exceed its tolerance. They are
closed-form facts (zero coupling, diagonal matrices, characters, Bessel
values) and finish in a few seconds together.
"""

import cmath
import logging
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import jv

from jcspectra.conjugation import (
    TestFunctionChi,
    expm_skew,
    residual_Rn,
    trace_G0,
)
from jcspectra.eigensolve import (
    all_eigenvalues,
    counting,
    dense_oracle_eigenvalues,
    spectrum_of_Jn,
    sturm_count,
)
from jcspectra.operators import (
    TridiagonalWindow,
    build_An_Bn,
    build_J_plus,
    commutator_defects,
    is_skew,
    is_symmetric,
)
from jcspectra.oscillatory import (
    PeriodicFunction,
    PhaseFamily,
    character,
    composition_check,
    constant,
    invert_eta,
    osc_integral,
    phase_family,
    q_diag_prediction,
    symbol_to_matrix,
    translation_check,
)
from jcspectra.ratefit import fit_rate
from jcspectra.sequences import (
    ModelParams,
    a_values,
    cutoff_values,
    d_n_values,
    l_n_values,
    theorem_predictor,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    value: float | None = None
    bound: float | None = None
    degenerate: bool = False

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


@dataclass(frozen=True)
class Identity:
    name: str
    defect: Callable[[], float]
    tol: float


IDENTITIES: list[Identity] = []


def identity(name: str, tol: float = 0.0) -> Callable[[Callable[[], float]], Callable[[], float]]:
    def register(fn: Callable[[], float]) -> Callable[[], float]:
        IDENTITIES.append(Identity(name=name, defect=fn, tol=tol))
        return fn

    return register


JC = ModelParams.jaynes_cummings()
UNCOUPLED = ModelParams(gamma=0.5, a1=0.0, v_table=(-0.25, 0.25))


# sequences


@identity("zero coupling has zero off-diagonal")
def _zero_coupling() -> float:
    return float(np.max(np.abs(a_values(np.arange(1, 200), UNCOUPLED))))


@identity("cut-off plateau and support")
def _cutoff_plateau() -> float:
    n = 60
    ks = np.arange(1, 2 * n)
    values = cutoff_values(ks, n, n)
    plateau = values[6 * np.abs(ks - n) <= n]
    outside = values[5 * np.abs(ks - n) >= n]
    return max(float(np.max(np.abs(plateau - 1.0))), float(np.max(np.abs(outside))))


@identity("uncoupled predictor is the lattice", tol=0.0)
def _uncoupled_predictor() -> float:
    ks = np.arange(1, 120)
    return float(np.max(np.abs(l_n_values(ks, 60, UNCOUPLED) - ks)))


@identity("square-root predictor is n - a1^2", tol=1e-10)
def _sqrt_predictor() -> float:
    m = ModelParams(gamma=0.5, a1=0.5)
    return max(abs(theorem_predictor(n, m) - (n - 0.25)) for n in (2, 10, 1000))


# operators


@identity("uncoupled section is diagonal k + v(k)")
def _uncoupled_section() -> float:
    window = build_J_plus(UNCOUPLED, 10)
    ks = np.arange(1, 11)
    expected = ks + np.where(ks % 2 == 0, 0.25, -0.25)
    return float(np.max(np.abs(window.diag - expected)) + np.max(np.abs(window.offdiag)))


@identity("A_n symmetric and G skew")
def _generator_structure() -> float:
    a_mat, g_mat = build_An_Bn(JC, 40)
    return 0.0 if is_symmetric(a_mat) and is_skew(g_mat) else 1.0


@identity("commutator identities at n=16", tol=1e-13)
def _commutators() -> float:
    return max(commutator_defects(JC, 16))


# eigensolve


@identity("Sturm count of diag(1..5) at 2.5")
def _sturm_diagonal() -> float:
    window = TridiagonalWindow(offset=1, diag=np.arange(1.0, 6.0), offdiag=np.zeros(4))
    return float(abs(sturm_count(window, 2.5) - 2))


@identity("bisection against rotation oracle", tol=1e-10)
def _bisection_oracle() -> float:
    rng = np.random.default_rng(7)
    window = TridiagonalWindow(
        offset=1, diag=rng.uniform(-2.0, 2.0, 32), offdiag=rng.uniform(-2.0, 2.0, 31)
    )
    return float(
        np.max(np.abs(all_eigenvalues(window, 1e-13) - dense_oracle_eigenvalues(window.to_dense())))
    )


@identity("uncoupled J_n spectrum is sorted diagonal", tol=1e-10)
def _uncoupled_spectrum() -> float:
    n = 40
    values = spectrum_of_Jn(UNCOUPLED, n, (1, 60)).values
    expected = np.sort(d_n_values(np.arange(1, 200), n, UNCOUPLED))[:60]
    return float(np.max(np.abs(values - expected)))


@identity("counting on a diagonal operator")
def _counting_diagonal() -> float:
    window = TridiagonalWindow(offset=1, diag=np.arange(1.0, 11.0), offdiag=np.zeros(9))
    return float(abs(counting(window, 2.0, 5.0) - 3))


# conjugation


@identity("exp(0) is the identity", tol=1e-15)
def _expm_zero() -> float:
    return float(np.max(np.abs(expm_skew(np.zeros((6, 6))) - np.eye(6))))


@identity("uncoupled residual vanishes")
def _uncoupled_residual() -> float:
    return residual_Rn(UNCOUPLED, 40)


@identity("trace functional vanishes for v = 0")
def _trace_zero() -> float:
    return abs(trace_G0(ModelParams(gamma=0.5, a1=0.5), 40, TestFunctionChi()))


# oscillatory


@identity("osc_integral(1, 0) = 2 pi", tol=1e-12)
def _osc_zero() -> float:
    return abs(osc_integral(constant(1.0), 0.0) - 2.0 * math.pi)


@identity("osc_integral(1, 5) = 2 pi J0(5)", tol=1e-9)
def _osc_bessel0() -> float:
    return abs(osc_integral(constant(1.0), 5.0) - 2.0 * math.pi * float(jv(0, 5.0)))


@identity("osc_integral(e^{i eta}, 3) = 2 pi i J1(3)", tol=1e-9)
def _osc_bessel1() -> float:
    return abs(osc_integral(character(1), 3.0) - 2j * math.pi * float(jv(1, 3.0)))


@identity("conjugation symmetry in mu", tol=1e-12)
def _osc_symmetry() -> float:
    b = PeriodicFunction(evaluate=lambda xi: np.exp(1j * xi) + 0.5 * np.cos(2.0 * xi))
    b_conj = PeriodicFunction(evaluate=lambda xi: np.conj(b(xi)))
    return abs(osc_integral(b, -4.0) - osc_integral(b_conj, 4.0).conjugate())


@identity("inverse of the identity circle map", tol=1e-15)
def _invert_identity() -> float:
    eta = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    inverse = invert_eta(constant(0.0), eta)
    return float(max(np.max(np.abs(inverse.xi - eta)), np.max(np.abs(inverse.p - 1.0))))


@identity("symbol 1 is the identity", tol=1e-14)
def _symbol_identity() -> float:
    mat = symbol_to_matrix(lambda j, xi: np.ones(np.broadcast_shapes(j.shape, xi.shape)), 10, 12)
    return float(np.max(np.abs(mat - np.eye(12))))


@identity("symbol e^{i xi} is the lower shift", tol=1e-14)
def _symbol_shift() -> float:
    mat = symbol_to_matrix(lambda j, xi: np.exp(1j * xi) + 0.0 * j, 10, 12)
    return float(np.max(np.abs(mat - np.eye(12, k=-1))))


@identity("translation conjugation", tol=1e-10)
def _translation() -> float:
    family = phase_family(JC, 48)

    def q(j: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return cutoff_values(j, 48, 48) * np.exp(1j * family.tilde(j, xi))

    return translation_check(q, 0.7, 32, 33)


@identity("composition with cancelling phases", tol=1e-10)
def _composition_flat() -> float:
    base = phase_family(JC, 48)
    flat = PhaseFamily(n=48, model=JC, psi=base.psi, phi=constant(0.0))

    def theta(j: np.ndarray) -> np.ndarray:
        return cutoff_values(j, 48, 48)

    return composition_check(flat.tilde, flat, theta, theta, 48)


@identity("uncoupled diagonal prediction is e^{i pi j} theta^2", tol=1e-14)
def _prediction_uncoupled() -> float:
    n = 60
    worst = 0.0
    for j in range(n - 10, n + 11):
        expected = cmath.exp(1j * math.pi * j) * float(cutoff_values(np.array([j]), n, n)[0]) ** 2
        worst = max(worst, abs(q_diag_prediction(UNCOUPLED, n, math.pi, 0.0, j) - expected))
    return worst


# ratefit


@identity("rate fit of n^(-1/2)", tol=1e-12)
def _fit_power() -> float:
    ns = [2.0**k for k in range(4, 12)]
    return abs(fit_rate(ns, [n**-0.5 for n in ns]).slope + 0.5)


def run_validation() -> list[Check]:
    checks: list[Check] = []
    for ident in IDENTITIES:
        try:
            defect = float(ident.defect())
        except Exception as e:
            logger.warning("identity '%s' raised %s", ident.name, e)
            checks.append(Check(ident.name, False, f"raised {type(e).__name__}: {e}"))
            continue
        passed = math.isfinite(defect) and defect <= ident.tol
        checks.append(
            Check(ident.name, passed, f"defect {defect:.3e}", value=defect, bound=ident.tol)
        )
    return checks
