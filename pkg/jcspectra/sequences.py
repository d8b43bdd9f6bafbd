"""
sequences.py - Entry sequences, cut-offs and predictors

Scalar building blocks of the Jacobi operators: the entries d(k) = k + v(k)
and a(k) = a1 k^gamma + a1p k^(gamma-1), the smooth cut-off profile, the
linearised and truncated entries a_n, v_n, d_n, the predictor l_n and the
forward differences used by the entry bounds.

Every scalar function has a vectorised twin (suffix ``_values``) that takes an
integer array of lattice indices. The matrix builders use the twins.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


@dataclass(frozen=True)
class ModelParams:
    """Entry model: exponent, off-diagonal coefficients and one period of v.

    ``a1 = 0`` is accepted: it switches the coupling off and is the oracle
    case used throughout the tests.
    """

    gamma: float
    a1: float
    v_table: tuple[float, ...] = (0.0,)
    a1p: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma <= 0.5):
            raise ValueError(f"gamma must lie in (0, 1/2], got {self.gamma}")
        if not math.isfinite(self.a1) or self.a1 < 0.0:
            raise ValueError(f"a1 must be a finite non-negative number, got {self.a1}")
        if not math.isfinite(self.a1p):
            raise ValueError(f"a1p must be finite, got {self.a1p}")
        if len(self.v_table) == 0:
            raise ValueError("v_table needs at least one entry (one period of v)")
        table = tuple(float(x) for x in self.v_table)
        if not all(math.isfinite(x) for x in table):
            raise ValueError(f"v_table entries must be finite, got {table}")
        object.__setattr__(self, "v_table", table)

    @property
    def period(self) -> int:
        return len(self.v_table)

    @classmethod
    def jaynes_cummings(cls, rho: float = 0.25, a1: float = 0.5) -> "ModelParams":
        """d(k) = k + (-1)^k rho, a(k) = a1 sqrt(k)."""
        return cls(gamma=0.5, a1=a1, v_table=(-rho, rho))


@dataclass(frozen=True)
class CutoffSpec:
    """Plateau and support radii of the cut-off profile, kept as exact fractions."""

    inner: Fraction = Fraction(1, 6)
    outer: Fraction = Fraction(1, 5)

    def __post_init__(self) -> None:
        if not (0 < self.inner < self.outer):
            raise ValueError(f"need 0 < inner < outer, got {self.inner}, {self.outer}")


DEFAULT_CUTOFF = CutoffSpec()


class Modulation(NamedTuple):
    """Mean, maximal deviation and weak-dispersion flag of the periodic part v."""

    mean: float
    rho: float
    h1_ok: bool


def _as_indices(ks: ArrayLike) -> IntArray:
    return np.asarray(ks, dtype=np.int64)


def smoothstep(x: ArrayLike) -> FloatArray:
    """C-infinity step f(x) / (f(x) + f(1 - x)) with f(x) = exp(-1/x) for x > 0."""
    xs = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(xs > 0.0, np.exp(-1.0 / np.where(xs > 0.0, xs, 1.0)), 0.0)
        right = np.where(xs < 1.0, np.exp(-1.0 / np.where(xs < 1.0, 1.0 - xs, 1.0)), 0.0)
    return left / (left + right)


def theta0_values(t: ArrayLike, c: CutoffSpec = DEFAULT_CUTOFF) -> FloatArray:
    ts = np.abs(np.asarray(t, dtype=np.float64))
    inner, outer = float(c.inner), float(c.outer)
    out = np.zeros_like(ts)
    out[ts <= inner] = 1.0
    band = (ts > inner) & (ts < outer)
    out[band] = smoothstep((outer - ts[band]) / (outer - inner))
    return out


def theta0(t: float, c: CutoffSpec = DEFAULT_CUTOFF) -> float:
    """The fixed bump: 1 on |t| <= inner, 0 on |t| >= outer."""
    return float(theta0_values(np.array([t]), c)[0])


def cutoff_values(
    s: ArrayLike, tau: float, n: float, c: CutoffSpec = DEFAULT_CUTOFF
) -> FloatArray:
    """theta_{tau,n}(s) = theta0((s - n) / tau).

    Integer s with integer tau and n is classified against the plateau and the
    support edge in exact arithmetic; only the transition band uses floats.
    """
    s_arr = np.asarray(s)
    exact = (
        np.issubdtype(s_arr.dtype, np.integer)
        and float(tau).is_integer()
        and float(n).is_integer()
    )
    if not exact:
        return theta0_values((s_arr.astype(np.float64) - n) / tau, c)

    tau_i, n_i = int(tau), int(n)
    dist = np.abs(s_arr.astype(np.int64) - n_i)
    plateau = c.inner.denominator * dist <= c.inner.numerator * tau_i
    outside = c.outer.denominator * dist >= c.outer.numerator * tau_i
    out = np.zeros(dist.shape, dtype=np.float64)
    out[plateau] = 1.0
    band = ~plateau & ~outside
    out[band] = theta0_values((s_arr[band].astype(np.float64) - n_i) / tau_i, c)
    return out


def cutoff(s: float, tau: float, n: float, c: CutoffSpec = DEFAULT_CUTOFF) -> float:
    arr = np.array([s]) if isinstance(s, int) else np.array([float(s)])
    return float(cutoff_values(arr, tau, n, c)[0])


# Entries of J


def v_values(ks: ArrayLike, m: ModelParams) -> FloatArray:
    table = np.asarray(m.v_table, dtype=np.float64)
    return table[np.mod(_as_indices(ks) - 1, m.period)]


def d_values(ks: ArrayLike, m: ModelParams) -> FloatArray:
    idx = _as_indices(ks)
    return idx.astype(np.float64) + v_values(idx, m)


def a_values(ks: ArrayLike, m: ModelParams) -> FloatArray:
    idx = _as_indices(ks)
    if idx.size and int(idx.min()) < 1:
        raise ValueError(f"a(k) is defined for k >= 1, got k={int(idx.min())}")
    k = idx.astype(np.float64)
    return m.a1 * k**m.gamma + m.a1p * k ** (m.gamma - 1.0)


def entry_d(k: int, m: ModelParams) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return float(d_values(np.array([k]), m)[0])


def entry_a(k: int, m: ModelParams) -> float:
    return float(a_values(np.array([k]), m)[0])


def delta_a(n: int, m: ModelParams) -> float:
    """delta a(n) = a(n+1) - a(n)."""
    pair = a_values(np.array([n, n + 1]), m)
    return float(pair[1] - pair[0])


# Truncated entries of J_n


def a_n_values(ks: ArrayLike, n: int, m: ModelParams) -> FloatArray:
    idx = _as_indices(ks)
    linear = entry_a(n, m) + (idx - n).astype(np.float64) * delta_a(n, m)
    return linear * cutoff_values(idx, 2 * n, n)


def v_n_values(ks: ArrayLike, n: int, m: ModelParams) -> FloatArray:
    idx = _as_indices(ks)
    return v_values(idx, m) * cutoff_values(idx, n, n) ** 2


def d_n_values(ks: ArrayLike, n: int, m: ModelParams) -> FloatArray:
    idx = _as_indices(ks)
    return idx.astype(np.float64) + v_n_values(idx, n, m)


def a1n_values(ks: ArrayLike, n: int, m: ModelParams) -> FloatArray:
    """a_{1,n}(k) = a_n(k-1)^2 - a_n(k)^2."""
    idx = _as_indices(ks)
    return a_n_values(idx - 1, n, m) ** 2 - a_n_values(idx, n, m) ** 2


def l_n_values(ks: ArrayLike, n: int, m: ModelParams) -> FloatArray:
    """Predictor l_n(k) = k + a_n(k-1)^2 - a_n(k)^2 (equal to k for k <= 0)."""
    idx = _as_indices(ks)
    return idx.astype(np.float64) + a1n_values(idx, n, m)


def entry_a_n(k: int, n: int, m: ModelParams) -> float:
    return float(a_n_values(np.array([k]), n, m)[0])


def entry_v_n(k: int, n: int, m: ModelParams) -> float:
    return float(v_n_values(np.array([k]), n, m)[0])


def entry_d_n(k: int, n: int, m: ModelParams) -> float:
    return float(d_n_values(np.array([k]), n, m)[0])


def correction_a1n(k: int, n: int, m: ModelParams) -> float:
    return float(a1n_values(np.array([k]), n, m)[0])


def predictor_l_n(k: int, n: int, m: ModelParams) -> float:
    return float(l_n_values(np.array([k]), n, m)[0])


def l_of_n(n: int, m: ModelParams) -> float:
    """l(n) = l_n(n)."""
    return predictor_l_n(n, n, m)


def mean_and_deviation(m: ModelParams) -> Modulation:
    table = np.asarray(m.v_table, dtype=np.float64)
    mean = float(table.mean())
    rho = float(np.max(np.abs(table - mean)))
    if m.period == 1:
        ok = True
    elif m.period == 2:
        ok = rho < 0.5
    else:
        ok = rho < 1.0 / (math.pi * math.sqrt(m.period))
    return Modulation(mean=mean, rho=rho, h1_ok=ok)


def forward_difference(seq: Callable[[int], float], k: int, order: int) -> float:
    if order == 1:
        return seq(k + 1) - seq(k)
    if order == 2:
        return seq(k + 2) - 2.0 * seq(k + 1) + seq(k)
    raise ValueError(f"order must be 1 or 2, got {order}")


# Predictors and entry estimates


def theorem_predictor(n: int, m: ModelParams) -> float:
    """n + <v> + a(n-1)^2 - a(n)^2; equals n - a1^2 for a(k) = a1 sqrt(k)."""
    if n < 2:
        raise ValueError(f"the predictor needs n >= 2, got {n}")
    a_prev, a_here = a_values(np.array([n - 1, n]), m)
    return n + mean_and_deviation(m).mean + float(a_prev) ** 2 - float(a_here) ** 2


def predictor_shift(n: int, m: ModelParams) -> float:
    """l(n) - (n + a(n-1)^2 - a(n)^2); of order n^(2 gamma - 2)."""
    return l_of_n(n, m) - (theorem_predictor(n, m) - mean_and_deviation(m).mean)


def _support_span(n: int) -> IntArray:
    return np.arange(max(1, n - n // 2 - 2), n + n // 2 + 3, dtype=np.int64)


def scaled_entry_bounds(m: ModelParams, n: int) -> tuple[float, float, float]:
    """max_k |delta^j a_n(k)| * n^(j - gamma) for j = 0, 1, 2."""
    ks = _support_span(n)
    values = a_n_values(ks, n, m)
    bounds: list[float] = []
    for order in range(3):
        diffs = np.diff(values, n=order) if order else values
        bounds.append(float(np.max(np.abs(diffs))) * float(n) ** (order - m.gamma))
    return bounds[0], bounds[1], bounds[2]


def linearization_constant(m: ModelParams, n: int) -> float:
    """Smallest C with |a(k) - a_n(k)| <= C |k-n|^2 n^(gamma-2) for 1 <= |k-n| <= n/3."""
    ks = np.arange(max(1, n - n // 3), n + n // 3 + 1, dtype=np.int64)
    ks = ks[(ks != n) & (3 * np.abs(ks - n) <= n)]
    if ks.size == 0:
        return 0.0
    dist = np.abs(ks - n).astype(np.float64)
    error = np.abs(a_values(ks, m) - a_n_values(ks, n, m))
    return float(np.max(error / (dist**2 * float(n) ** (m.gamma - 2.0))))


def predictor_gap_defect(m: ModelParams, n: int) -> float:
    """max_k |l_n(k+1) - l_n(k) - 1|."""
    gaps = np.diff(l_n_values(_support_span(n), n, m))
    return float(np.max(np.abs(gaps - 1.0)))


def predictor_increasing(m: ModelParams, n: int) -> bool:
    return bool(np.all(np.diff(l_n_values(_support_span(n), n, m)) > 0.0))
