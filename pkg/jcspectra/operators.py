"""
operators.py - Finite matrix realisations of the Jacobi operators

Builds Dirichlet sections of J, the exactly decoupled form of J_n (a finite
block plus the diagonal tail k), J_{0,n}, the window operator J-tilde_n and the
commutator pair (A_n, G) with G = iB_n stored as a real antisymmetric matrix.

Anything that mixes a_n-type operators is built on a block that contains the
full support of a_n, so the finite computations are exact rather than
approximations of the operators on l^2.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from jcspectra.errors import TruncationError
from jcspectra.sequences import (
    FloatArray,
    IntArray,
    ModelParams,
    a1n_values,
    a_n_values,
    a_values,
    d_n_values,
    d_values,
    v_n_values,
)

# Dense blocks are plain float arrays; the aliases document the expected structure.
DenseSymmetric = FloatArray
DenseSkew = FloatArray
DenseOrthogonal = FloatArray

WINDOW_CSV_HEADER = ("k", "diag", "offdiag")


def _frozen(values: FloatArray) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TridiagonalWindow:
    """Symmetric tridiagonal block whose first row sits at lattice index ``offset``."""

    offset: int
    diag: FloatArray
    offdiag: FloatArray

    def __post_init__(self) -> None:
        diag = _frozen(self.diag)
        offdiag = _frozen(self.offdiag)
        if diag.ndim != 1 or diag.size < 1:
            raise TruncationError("a tridiagonal window needs at least one row")
        if offdiag.shape != (diag.size - 1,):
            raise ValueError(
                f"offdiag must have length {diag.size - 1}, got shape {offdiag.shape}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self) -> int:
        return int(self.diag.size)

    @property
    def indices(self) -> IntArray:
        return np.arange(self.offset, self.offset + self.size, dtype=np.int64)

    def to_dense(self) -> DenseSymmetric:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def gershgorin(self) -> tuple[float, float]:
        radius = np.zeros(self.size)
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))


@dataclass(frozen=True, eq=False)
class DecoupledJn:
    """J_n^+ as a finite block on [1, K] plus the exact diagonal tail k >= K + 1."""

    block: TridiagonalWindow
    tail_start: int

    def __post_init__(self) -> None:
        if self.block.offset != 1 or self.tail_start != self.block.size + 1:
            raise ValueError("the block must cover [1, tail_start - 1]")


class Support(NamedTuple):
    """Inclusive row range outside of which every n-dependent operator is diag(k)."""

    lo: int
    hi: int

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def indices(self) -> IntArray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)


def support_window(m: ModelParams, n: int) -> Support:
    """Smallest row range containing every coupling of a_n and every non-zero v_n."""
    ks = np.arange(1, math.ceil(7 * n / 5) + 3, dtype=np.int64)
    coupled = ks[a_n_values(ks, n, m) != 0.0]
    modulated = ks[v_n_values(ks, n, m) != 0.0]
    if coupled.size == 0 and modulated.size == 0:
        return Support(n, n)
    lows = [int(x[0]) for x in (coupled, modulated) if x.size]
    highs = [int(coupled[-1]) + 1] if coupled.size else []
    if modulated.size:
        highs.append(int(modulated[-1]))
    return Support(max(1, min(lows)), max(highs))


def decoupling_index(m: ModelParams, n: int) -> int:
    """K: a_n(k) = 0 for every k >= K and d_n(k) = k for every k > K."""
    ks = np.arange(1, math.ceil(7 * n / 5) + 3, dtype=np.int64)
    coupled = ks[a_n_values(ks, n, m) != 0.0]
    modulated = ks[v_n_values(ks, n, m) != 0.0]
    last = 1
    if coupled.size:
        last = max(last, int(coupled[-1]) + 1)
    if modulated.size:
        last = max(last, int(modulated[-1]))
    return last


def build_J_plus(m: ModelParams, size: int) -> TridiagonalWindow:
    """Dirichlet section of J on [1, size]."""
    if size < 1:
        raise TruncationError(f"section size must be >= 1, got {size}")
    ks = np.arange(1, size + 1, dtype=np.int64)
    return TridiagonalWindow(offset=1, diag=d_values(ks, m), offdiag=a_values(ks[:-1], m))


def build_Jn_plus(m: ModelParams, n: int) -> DecoupledJn:
    if n < 5:
        raise ValueError(f"J_n needs n >= 5, got {n}")
    k_last = decoupling_index(m, n)
    ks = np.arange(1, k_last + 1, dtype=np.int64)
    block = TridiagonalWindow(
        offset=1, diag=d_n_values(ks, n, m), offdiag=a_n_values(ks[:-1], n, m)
    )
    return DecoupledJn(block=block, tail_start=k_last + 1)


def build_J0n_plus(m: ModelParams, n: int, size: int | None = None) -> TridiagonalWindow:
    """Section of J_{0,n} (diagonal k, off-diagonal a_n); defaults to the decoupled block."""
    if size is None:
        size = decoupling_index(m, n)
    if size < 1:
        raise TruncationError(f"section size must be >= 1, got {size}")
    ks = np.arange(1, size + 1, dtype=np.int64)
    return TridiagonalWindow(
        offset=1, diag=ks.astype(np.float64), offdiag=a_n_values(ks[:-1], n, m)
    )


def coupling_window(n: int, gamma: float, c1: float) -> tuple[int, int]:
    """Integer range n - c1 n^gamma <= k <= n + c1 n^gamma, clipped to k >= 1."""
    width = c1 * float(n) ** gamma
    return max(1, math.ceil(n - width)), math.floor(n + width)


def build_Jtilde_plus(m: ModelParams, n: int, c1: float) -> DecoupledJn:
    """J_n with the true entries a(k) restored on the c1-window around n."""
    if c1 < 0.0:
        raise ValueError(f"c1 must be non-negative, got {c1}")
    lo, hi = coupling_window(n, m.gamma, c1)
    k_last = max(decoupling_index(m, n), hi + 1)
    ks = np.arange(1, k_last + 1, dtype=np.int64)
    off_ks = ks[:-1]
    offdiag = a_n_values(off_ks, n, m)
    inside = (off_ks >= lo) & (off_ks <= hi)
    offdiag[inside] = a_values(off_ks[inside], m)
    block = TridiagonalWindow(offset=1, diag=d_n_values(ks, n, m), offdiag=offdiag)
    return DecoupledJn(block=block, tail_start=k_last + 1)


def build_An_Bn(
    m: ModelParams, n: int, size: int | None = None, offset: int = 1
) -> tuple[DenseSymmetric, DenseSkew]:
    """A_n = a_n(Lambda) S^-1 + S a_n(Lambda) and G = iB_n on rows offset .. offset+size-1.

    G(k, k+1) = -a_n(k) and G(k+1, k) = a_n(k).
    """
    support = support_window(m, n)
    if size is None:
        size = max(decoupling_index(m, n), support.hi) - offset + 1
    if offset < 1 or size < 1:
        raise TruncationError(f"invalid block offset={offset} size={size}")
    ks = np.arange(offset, offset + size, dtype=np.int64)
    if offset > support.lo or offset + size - 1 < support.hi:
        raise TruncationError(
            f"block [{offset}, {offset + size - 1}] does not contain the support of a_n "
            f"(rows {support.lo}..{support.hi})"
        )
    couplings = a_n_values(ks[:-1], n, m)
    a_mat = np.diag(couplings, 1) + np.diag(couplings, -1)
    g_mat = np.diag(-couplings, 1) + np.diag(couplings, -1)
    return a_mat, g_mat


def commutator(x: FloatArray, y: FloatArray) -> FloatArray:
    return x @ y - y @ x


def commutator_defects(m: ModelParams, n: int) -> tuple[float, float]:
    """Absolute max-entry defects of [Lambda, G] = A and [G, A] = 2 a_{1,n}(Lambda).

    [Lambda, G] is formed entrywise as (k - j) G(k, j), which is exact for the
    integer diagonal of Lambda.
    """
    support = support_window(m, n)
    ks = support.indices
    a_mat, g_mat = build_An_Bn(m, n, size=support.size, offset=support.lo)
    lam = ks.astype(np.float64)
    first = float(np.max(np.abs((lam[:, None] - lam[None, :]) * g_mat - a_mat)))
    second = float(np.max(np.abs(commutator(g_mat, a_mat) - 2.0 * np.diag(a1n_values(ks, n, m)))))
    return first, second


def is_symmetric(mat: FloatArray, tol: float = 0.0) -> bool:
    return bool(np.max(np.abs(mat - mat.T), initial=0.0) <= tol)


def is_skew(mat: FloatArray, tol: float = 0.0) -> bool:
    return bool(np.max(np.abs(mat + mat.T), initial=0.0) <= tol)


def orthogonality_defect(u: FloatArray) -> float:
    """||U^T U - I||_max."""
    return float(np.max(np.abs(u.T @ u - np.eye(u.shape[0])), initial=0.0))


def write_window_csv(window: TridiagonalWindow, path: Path) -> None:
    """Write ``k,diag,offdiag`` rows; the last row has an empty offdiag field."""
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(WINDOW_CSV_HEADER)
        for i, k in enumerate(window.indices):
            off = format(float(window.offdiag[i]), ".17g") if i < window.size - 1 else ""
            writer.writerow([int(k), format(float(window.diag[i]), ".17g"), off])


def read_window_csv(path: Path) -> TridiagonalWindow:
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise TruncationError(f"{path} holds no rows")
    ks = [int(row["k"]) for row in rows]
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise ValueError(f"{path}: row indices must be contiguous")
    return TridiagonalWindow(
        offset=ks[0],
        diag=np.array([float(row["diag"]) for row in rows]),
        offdiag=np.array([float(row["offdiag"]) for row in rows[:-1]]),
    )
