"""
ratefit.py - Log-log regression of remainder sequences

Every "O(n^alpha)" claim is checked by fitting a straight line through
(ln n, ln |value|) and comparing the slope with the expected exponent.
"""

from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np

from jcspectra.errors import InsufficientDataError

DEFAULT_SLACK = 0.15


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r2: float
    points_used: int
    dropped: int = 0

    def within(self, target: float, slack: float = DEFAULT_SLACK) -> bool:
        return abs(self.slope - target) <= slack

    def at_most(self, bound: float) -> bool:
        return self.slope <= bound

    def to_dict(self) -> dict[str, float | int]:
        return asdict(self)


def fit_rate(ns: Sequence[float], values: Sequence[float]) -> RateFit:
    """Least-squares line through (ln n, ln |value|); zero values are dropped and counted."""
    x = np.asarray(ns, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"ns and values differ in length: {x.size} vs {y.size}")
    keep = (y != 0.0) & np.isfinite(y) & (x > 0.0)
    used = int(np.count_nonzero(keep))
    if used < 3:
        raise InsufficientDataError(f"rate fit needs 3 usable points, got {used}")

    lx = np.log(x[keep])
    ly = np.log(np.abs(y[keep]))
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    ss_res = float(np.sum(residual**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        r2=min(1.0, max(0.0, r2)),
        points_used=used,
        dropped=int(x.size - used),
    )
