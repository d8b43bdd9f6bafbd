"""
experiments.py - Grid sweeps, rate checks and artefact output

run_experiment() evaluates one experiment kind at every grid point (or mu
value, or random sample), fits the remainder rates and applies the pass
rules. write_artifacts() then puts <stem>.csv, <stem>.json and <stem>.dat
next to each other.

Grid points are independent, so they go to a process pool when the config
asks for more than one worker. Results are sorted by their key before
anything is written, which keeps the CSV byte-identical across runs.
"""

import csv
import itertools
import json
import logging
import math
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.special import jv

from jcspectra.config import ExperimentConfig, ExperimentKind, format_model
from jcspectra.conjugation import (
    TestFunctionChi,
    conjugation_report,
    localization_and_gaps,
    residual_bound,
    residual_Rn,
    residual_window_norm,
    shift_conjugation_defect,
    trace_G0,
    trace_G_cutoff,
    transfer_sup,
    vtilde_diag_max,
)
from jcspectra.eigensolve import (
    all_eigenvalues,
    default_c0,
    dense_oracle_eigenvalues,
    lambda_n_of_Jtilde,
    lambda_n_section,
    sturm_counts,
    window_stability,
)
from jcspectra.errors import ExperimentError, InsufficientDataError
from jcspectra.operators import TridiagonalWindow, commutator_defects
from jcspectra.oscillatory import (
    PredictionRow,
    approximation_defect,
    composition_check,
    constant,
    fejer_bump,
    osc_integral,
    p_deviation,
    phase_family,
    phase_split_norms,
    prediction_table,
    product_check,
    stationary_phase_check,
    symbol_defect,
    translation_check,
    write_prediction_csv,
)
from jcspectra.ratefit import RateFit, fit_rate
from jcspectra.sequences import (
    FloatArray,
    IntArray,
    cutoff_values,
    linearization_constant,
    predictor_gap_defect,
    predictor_increasing,
    predictor_shift,
    scaled_entry_bounds,
    theorem_predictor,
)
from jcspectra.utils import EXIT_FAIL, EXIT_PASS, format_cell, format_float
from jcspectra.validation import Check, run_validation

logger = logging.getLogger(__name__)

Cell = int | float | bool | str | None
Row = dict[str, Cell]

STATIONARY_MU = tuple(2.0**k for k in range(11))
SOLVER_MAX_SIZE = 64
STABILITY_GRID = (64, 128, 256)
TRANSLATION_SHIFT = 0.7
BOUND_RTOL = 1e-9


class Point(NamedTuple):
    row: Row
    predictions: tuple[PredictionRow, ...] = ()


@dataclass(frozen=True)
class ExperimentResult:
    kind: ExperimentKind
    key: str
    columns: tuple[str, ...]
    primary: str
    rows: tuple[Row, ...]
    checks: tuple[Check, ...]
    fits: dict[str, RateFit] = field(default_factory=lambda: {})
    predictions: tuple[PredictionRow, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def degenerate(self) -> bool:
        return any(c.degenerate for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def column(self, name: str) -> list[float]:
        return [as_float(r.get(name)) for r in self.rows]


def as_float(cell: Cell) -> float:
    """Numeric value of a CSV cell; empty cells read as 0."""
    if cell is None or isinstance(cell, str):
        return 0.0
    return float(cell)


@contextmanager
def _operation(kind: ExperimentKind, n: int, name: str) -> Iterator[None]:
    """Re-raise any failure as an ExperimentError naming the kind, n and operation."""
    try:
        yield
    except ExperimentError:
        raise
    except Exception as e:
        raise ExperimentError(str(kind), n, name, e) from e


# Per-point evaluations. Module-level so the process pool can pickle them.


def _c0(cfg: ExperimentConfig) -> float:
    return cfg.tolerances.c0 if cfg.tolerances.c0 is not None else default_c0(cfg.model)


def _asymptotics_point(cfg: ExperimentConfig, n: int) -> Point:
    m, tol = cfg.model, cfg.tolerances
    kind = ExperimentKind.ASYMPTOTICS
    with _operation(kind, n, "lambda_n_of_J"):
        value, size = lambda_n_section(m, n, tol.nu, tol.tol, _c0(cfg))
    with _operation(kind, n, "lambda_n_of_Jtilde"):
        c1 = cfg.c1 if cfg.c1 is not None else _c0(cfg) + 1.0
        windowed = lambda_n_of_Jtilde(m, n, c1)
    predictor = theorem_predictor(n, m)
    return Point(
        {
            "n": n,
            "lambda_n": value,
            "predictor": predictor,
            "remainder": abs(value - predictor),
            "lambda_tilde": windowed,
            "section": size,
        }
    )


def _residual_point(cfg: ExperimentConfig, n: int) -> Point:
    m, kind = cfg.model, ExperimentKind.RESIDUAL
    with _operation(kind, n, "residual_Rn"):
        full = residual_Rn(m, n)
    with _operation(kind, n, "residual_window_norm"):
        window = residual_window_norm(m, n)
    with _operation(kind, n, "residual_bound"):
        bound = residual_bound(m, n)
    return Point({"n": n, "residual": full, "residual_window": window, "residual_bound": bound})


def _transfer_point(cfg: ExperimentConfig, n: int) -> Point:
    with _operation(ExperimentKind.TRANSFER, n, "transfer_sup"):
        return Point({"n": n, "transfer": transfer_sup(cfg.model, n)})


def _localization_point(cfg: ExperimentConfig, n: int) -> Point:
    kind = ExperimentKind.LOCALIZATION
    with _operation(kind, n, "localization_and_gaps"):
        report = localization_and_gaps(cfg.model, n, cfg.tolerances.c_localization)
    with _operation(kind, n, "shift_conjugation_defect"):
        shift = shift_conjugation_defect(cfg.model, n)
    return Point(
        {
            "n": n,
            "localized": report.localization_ok,
            "disjoint": report.intervals_disjoint,
            "gap_sup": report.gap_sup,
            "predictor_sup": report.predictor_sup,
            "shift_defect": shift,
        }
    )


def _conjugation_point(cfg: ExperimentConfig, n: int) -> Point:
    with _operation(ExperimentKind.CONJUGATION, n, "conjugation_report"):
        report = conjugation_report(cfg.model, n, cfg.tolerances.c_localization)
    return Point(
        {
            "n": n,
            "residual": report.residual_norm,
            "residual_window": report.residual_window,
            "residual_bound": report.residual_bound,
            "transfer": report.transfer_sup,
            "gap_sup": report.gap_sup,
            "localized": report.localization_ok,
            "predictor_sup": report.predictor_sup,
        }
    )


def _trace_point(cfg: ExperimentConfig, n: int) -> Point:
    kind = ExperimentKind.TRACE
    chi = TestFunctionChi(cfg.tolerances.t0)
    with _operation(kind, n, "trace_G0"):
        g0 = trace_G0(cfg.model, n, chi)
    with _operation(kind, n, "trace_G_cutoff"):
        g = trace_G_cutoff(cfg.model, n, chi)
    with _operation(kind, n, "vtilde_diag_max"):
        vdiag = vtilde_diag_max(cfg.model, n)
    return Point({"n": n, "g0": g0, "g_cutoff": g, "g_gap": abs(g - g0), "vdiag_max": vdiag})


def _oscillatory_point(cfg: ExperimentConfig, mu: float) -> Point:
    with _operation(ExperimentKind.OSCILLATORY, 0, f"osc_integral(mu={mu:g})"):
        value = osc_integral(constant(1.0), mu, cfg.tolerances.quad_points)
    oracle = 2.0 * math.pi * float(jv(0, mu))
    return Point(
        {
            "mu": mu,
            "value_re": value.real,
            "value_im": value.imag,
            "oracle": oracle,
            "error": abs(value - oracle),
        }
    )


def _composition_point(cfg: ExperimentConfig, n: int) -> Point:
    kind = ExperimentKind.COMPOSITION
    family = phase_family(cfg.model, n)

    def theta(j: IntArray) -> FloatArray:
        return cutoff_values(j, n, n)

    def half_phase(j: IntArray, xi: FloatArray) -> FloatArray:
        return 0.5 * family.tilde(j, xi)

    def q(j: IntArray, xi: FloatArray) -> np.ndarray:
        return theta(j) * np.exp(1j * family.tilde(j, xi))

    lo, hi = math.ceil(2 * n / 3), math.floor(4 * n / 3)
    with _operation(kind, n, "composition_check"):
        composition = composition_check(
            half_phase, family, theta, theta, n, cfg.tolerances.quad_points
        )
    with _operation(kind, n, "translation_check"):
        translation = translation_check(q, TRANSLATION_SHIFT, lo, hi - lo + 1)
    with _operation(kind, n, "product_check"):
        product = product_check(q, q, lo, hi - lo + 1)
    return Point(
        {"n": n, "composition": composition, "translation": translation, "product": product}
    )


def _solver_sample(cfg: ExperimentConfig, index: int) -> Point:
    rng = np.random.default_rng([cfg.seed, index])
    size = int(rng.integers(1, SOLVER_MAX_SIZE + 1))
    window = TridiagonalWindow(
        offset=1, diag=rng.uniform(-2.0, 2.0, size), offdiag=rng.uniform(-2.0, 2.0, size - 1)
    )
    with _operation(ExperimentKind.SOLVER, index, "bisection vs oracle"):
        bisected = all_eigenvalues(window, 1e-13)
        oracle = dense_oracle_eigenvalues(window.to_dense())
    shifts = np.linspace(-6.0, 6.0, 97)
    counts = sturm_counts(window, shifts)
    return Point(
        {
            "sample": index,
            "size": size,
            "error": float(np.max(np.abs(bisected - oracle))),
            "monotone": bool(np.all(np.diff(counts) >= 0)),
        }
    )


def _commutators_point(cfg: ExperimentConfig, n: int) -> Point:
    with _operation(ExperimentKind.COMMUTATORS, n, "commutator_defects"):
        first, second = commutator_defects(cfg.model, n)
    return Point({"n": n, "lambda_g": first, "g_a": second})


def _symbols_point(cfg: ExperimentConfig, n: int) -> Point:
    m, kind = cfg.model, ExperimentKind.SYMBOLS
    with _operation(kind, n, "symbol_defect"):
        defect = symbol_defect(m, n)
    with _operation(kind, n, "approximation_defect"):
        approximation = approximation_defect(m, n)
    with _operation(kind, n, "q_diag_prediction"):
        table = tuple(prediction_table(m, n))
    with _operation(kind, n, "p_deviation"):
        p_dev = p_deviation(m, n)
    principal, remainder = phase_split_norms(m, n)
    prediction = max((r.defect for r in table), default=0.0)
    return Point(
        {
            "n": n,
            "symbol_defect": defect,
            "approximation": approximation,
            "prediction": prediction,
            "p_deviation": p_dev,
            "psi_principal": principal,
            "psi_remainder": remainder,
        },
        table,
    )


def _entries_point(cfg: ExperimentConfig, n: int) -> Point:
    m = cfg.model
    with _operation(ExperimentKind.ENTRIES, n, "scaled_entry_bounds"):
        b0, b1, b2 = scaled_entry_bounds(m, n)
        linear = linearization_constant(m, n)
    return Point(
        {
            "n": n,
            "bound0": b0,
            "bound1": b1,
            "bound2": b2,
            "linearization": linear,
            "gap_defect": predictor_gap_defect(m, n),
            "predictor_shift": abs(predictor_shift(n, m)),
            "increasing": predictor_increasing(m, n),
        }
    )


def _sweep(
    cfg: ExperimentConfig, point: Callable[[ExperimentConfig, int], Point], keys: Sequence[int]
) -> list[Point]:
    task = partial(point, cfg)
    if cfg.workers > 1 and len(keys) > 1:
        logger.info("%s: %d points on %d workers", cfg.kind, len(keys), cfg.workers)
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(task, keys))
    points: list[Point] = []
    for key in keys:
        logger.info("%s: point %s", cfg.kind, key)
        points.append(task(key))
    return points


# Pass rules


def rate_check(
    name: str,
    ns: Sequence[float],
    values: Sequence[float],
    *,
    target: float | None = None,
    slack: float = 0.15,
    at_most: float | None = None,
    fit_from: float | None = None,
) -> tuple[Check, RateFit | None]:
    """Fit |values| against ns and compare the slope with a target or an upper bound.

    With fit_from set only the points with n >= fit_from enter the fit.
    """
    prefix = ""
    if fit_from is not None:
        kept = [(n, v) for n, v in zip(ns, values, strict=True) if n >= fit_from]
        ns, values = [n for n, _ in kept], [v for _, v in kept]
        prefix = f"n >= {fit_from:g}: "
    if not any(values):
        return Check(name, True, "degenerate: every value is zero", degenerate=True), None
    try:
        fit = fit_rate(ns, values)
    except InsufficientDataError as e:
        return Check(name, False, str(e)), None
    if target is not None:
        passed = fit.within(target, slack)
        detail = f"{prefix}slope {fit.slope:.3f}, target {target:.3f} +/- {slack}"
        return Check(name, passed, detail, value=fit.slope, bound=target), fit
    bound = math.inf if at_most is None else at_most
    detail = f"{prefix}slope {fit.slope:.3f} <= {bound:.3f}"
    return Check(name, fit.at_most(bound), detail, value=fit.slope, bound=bound), fit


def max_check(name: str, values: Sequence[float], bound: float) -> Check:
    worst = max(values, default=0.0)
    return Check(name, worst <= bound, f"max {worst:.3e} <= {bound:.1e}", worst, bound)


def bound_check(name: str, values: Sequence[float], bounds: Sequence[float]) -> Check:
    """values[i] <= bounds[i] at every point, up to rounding in the bound."""
    ratios = [
        v / b if b > 0.0 else (0.0 if v == 0.0 else math.inf)
        for v, b in zip(values, bounds, strict=True)
    ]
    worst = max(ratios, default=0.0)
    passed = worst <= 1.0 + BOUND_RTOL
    return Check(name, passed, f"max value/bound {worst:.3f}", value=worst, bound=1.0)


def trend_check(name: str, values: Sequence[float]) -> Check:
    """Last value <= first value, with at most one increase along the grid."""
    inversions = sum(b > a for a, b in itertools.pairwise(values))
    passed = bool(values) and values[-1] <= values[0] and inversions <= 1
    return Check(name, passed, f"{inversions} inversion(s)", value=float(inversions), bound=1.0)


def settled_from(ns: Sequence[int], flags: Sequence[bool]) -> int | None:
    """Smallest grid n from which every flag holds, or None."""
    n0: int | None = None
    for n, ok in zip(ns, flags, strict=True):
        if not ok:
            n0 = None
        elif n0 is None:
            n0 = n
    return n0


def _localization_check(ns: Sequence[int], flags: Sequence[bool]) -> Check:
    n0 = settled_from(ns, flags)
    detail = f"localized from n0={n0}" if n0 is not None else "not localized at the largest n"
    return Check("localization", n0 is not None, detail, value=None if n0 is None else float(n0))


def _increasing_check(ns: Sequence[int], flags: Sequence[bool]) -> Check:
    n1 = settled_from(ns, flags)
    detail = f"increasing from n1={n1}" if n1 is not None else "not increasing at the largest n"
    value = None if n1 is None else float(n1)
    return Check("predictor increasing", n1 is not None, detail, value=value)


@dataclass(frozen=True)
class KindLayout:
    key: str
    columns: tuple[str, ...]
    primary: str
    point: Callable[[ExperimentConfig, int], Point] | None


KINDS: dict[ExperimentKind, KindLayout] = {
    ExperimentKind.ASYMPTOTICS: KindLayout(
        "n",
        ("n", "lambda_n", "predictor", "remainder", "lambda_tilde", "section"),
        "remainder",
        _asymptotics_point,
    ),
    ExperimentKind.RESIDUAL: KindLayout(
        "n",
        ("n", "residual", "residual_window", "residual_bound"),
        "residual_window",
        _residual_point,
    ),
    ExperimentKind.TRANSFER: KindLayout("n", ("n", "transfer"), "transfer", _transfer_point),
    ExperimentKind.LOCALIZATION: KindLayout(
        "n",
        ("n", "localized", "disjoint", "gap_sup", "predictor_sup", "shift_defect"),
        "gap_sup",
        _localization_point,
    ),
    ExperimentKind.CONJUGATION: KindLayout(
        "n",
        (
            "n",
            "residual",
            "residual_window",
            "residual_bound",
            "transfer",
            "gap_sup",
            "localized",
            "predictor_sup",
        ),
        "residual_window",
        _conjugation_point,
    ),
    ExperimentKind.TRACE: KindLayout(
        "n", ("n", "g0", "g_cutoff", "g_gap", "vdiag_max"), "g0", _trace_point
    ),
    ExperimentKind.OSCILLATORY: KindLayout(
        "mu", ("mu", "value_re", "value_im", "oracle", "error"), "error", None
    ),
    ExperimentKind.COMPOSITION: KindLayout(
        "n", ("n", "composition", "translation", "product"), "composition", _composition_point
    ),
    ExperimentKind.SOLVER: KindLayout(
        "sample", ("sample", "size", "error", "monotone"), "error", _solver_sample
    ),
    ExperimentKind.COMMUTATORS: KindLayout(
        "n", ("n", "lambda_g", "g_a"), "lambda_g", _commutators_point
    ),
    ExperimentKind.SYMBOLS: KindLayout(
        "n",
        (
            "n",
            "symbol_defect",
            "approximation",
            "prediction",
            "p_deviation",
            "psi_principal",
            "psi_remainder",
        ),
        "symbol_defect",
        _symbols_point,
    ),
    ExperimentKind.ENTRIES: KindLayout(
        "n",
        (
            "n",
            "bound0",
            "bound1",
            "bound2",
            "linearization",
            "gap_defect",
            "predictor_shift",
            "increasing",
        ),
        "gap_defect",
        _entries_point,
    ),
    ExperimentKind.VALIDATE: KindLayout(
        "index", ("index", "name", "passed", "defect", "tol"), "defect", None
    ),
}


def _checks(
    cfg: ExperimentConfig, rows: Sequence[Row], col: Callable[[str], list[float]]
) -> tuple[list[Check], dict[str, RateFit]]:
    gamma, slack = cfg.model.gamma, cfg.tolerances.slack
    ns = col("n") if rows and "n" in rows[0] else []
    checks: list[Check] = []
    fits: dict[str, RateFit] = {}

    def rate(
        name: str, column: str, target: float | None = None, at_most: float | None = None
    ) -> None:
        check, fit = rate_check(
            name,
            ns,
            col(column),
            target=target,
            slack=slack,
            at_most=at_most,
            fit_from=cfg.fit_from,
        )
        checks.append(check)
        if fit is not None:
            fits[name] = fit

    match cfg.kind:
        case ExperimentKind.ASYMPTOTICS:
            rate("remainder", "remainder", at_most=_bound(cfg, -0.15))
            if cfg.trend:
                checks.append(trend_check("remainder trend", col("remainder")))
        case ExperimentKind.RESIDUAL:
            rate("residual", "residual_window", target=_target(cfg, 3 * gamma - 2))
            checks.append(bound_check("residual bound", col("residual"), col("residual_bound")))
        case ExperimentKind.TRANSFER:
            rate("transfer", "transfer", at_most=_bound(cfg, 3 * gamma - 2 + slack))
        case ExperimentKind.LOCALIZATION:
            flags = [bool(r["localized"]) for r in rows]
            checks.append(_localization_check([int(n) for n in ns], flags))
            rate("gap", "gap_sup", at_most=_bound(cfg, gamma - 1 + slack))
            rate("shift", "shift_defect", target=_target(cfg, gamma - 1))
        case ExperimentKind.CONJUGATION:
            rate("residual", "residual_window", target=3 * gamma - 2)
            checks.append(bound_check("residual bound", col("residual"), col("residual_bound")))
            rate("transfer", "transfer", at_most=3 * gamma - 2 + slack)
            rate("gap", "gap_sup", at_most=gamma - 1 + slack)
            flags = [bool(r["localized"]) for r in rows]
            checks.append(_localization_check([int(n) for n in ns], flags))
        case ExperimentKind.TRACE:
            bound = _bound(cfg, -gamma / 2 + slack)
            rate("g0", "g0", at_most=bound)
            rate("vdiag", "vdiag_max", at_most=bound)
        case ExperimentKind.OSCILLATORY:
            bound = cfg.tolerances.identity_tol or 1e-8
            checks.append(max_check("bessel agreement", col("error"), bound))
            slope = _bound(cfg, -0.4)
            amplitudes = {"stationary constant": constant(1.0), "stationary fejer": fejer_bump()}
            for name, b in amplitudes.items():
                fit = stationary_phase_check(b, STATIONARY_MU)
                fits[name] = fit
                detail = f"slope {fit.slope:.3f} <= {slope}"
                checks.append(Check(name, fit.at_most(slope), detail, fit.slope, slope))
        case ExperimentKind.COMPOSITION:
            bound = cfg.tolerances.identity_tol or 1e-8
            checks.append(max_check("composition", col("composition"), bound))
            checks.append(max_check("product", col("product"), bound))
            checks.append(max_check("translation", col("translation"), 1e-10))
        case ExperimentKind.SOLVER:
            checks.append(max_check("oracle agreement", col("error"), 1e-10))
            monotone = all(bool(r["monotone"]) for r in rows)
            checks.append(Check("sturm monotone", monotone))
            drift = [_stability(cfg, n) for n in cfg.grid or STABILITY_GRID]
            checks.append(max_check("window stability", drift, 2.0 * cfg.tolerances.tol))
        case ExperimentKind.COMMUTATORS:
            bound = cfg.tolerances.identity_tol or 1e-13
            checks.append(max_check("[Lambda, G] = A", col("lambda_g"), bound))
            checks.append(max_check("[G, A] = 2 a_1n", col("g_a"), bound))
        case ExperimentKind.SYMBOLS:
            rate("symbol", "symbol_defect", target=_target(cfg, gamma - 1))
            rate("prediction", "prediction", at_most=gamma - 1 + slack)
            rate("p deviation", "p_deviation", target=gamma - 1)
            rate("psi principal", "psi_principal", target=gamma)
            rate("psi remainder", "psi_remainder", target=2 * gamma - 1)
        case ExperimentKind.ENTRIES:
            for column in ("bound0", "bound1", "bound2", "linearization"):
                rate(column, column, at_most=slack)
            rate("gap defect", "gap_defect", at_most=2 * gamma - 2 + slack)
            rate("predictor shift", "predictor_shift", at_most=2 * gamma - 2 + slack)
            flags = [bool(r["increasing"]) for r in rows]
            checks.append(_increasing_check([int(n) for n in ns], flags))
        case ExperimentKind.VALIDATE:
            pass
    return checks, fits


def _target(cfg: ExperimentConfig, default: float) -> float:
    return cfg.target_slope if cfg.target_slope is not None else default


def _bound(cfg: ExperimentConfig, default: float) -> float:
    return cfg.max_slope if cfg.max_slope is not None else default


def _stability(cfg: ExperimentConfig, n: int) -> float:
    tol = cfg.tolerances
    with _operation(cfg.kind, n, "window_stability"):
        return window_stability(cfg.model, n, tol.nu, tol.tol, tol.c0)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Evaluate every point of the experiment and apply its pass rules (no files written)."""
    layout = KINDS[cfg.kind]
    predictions: list[PredictionRow] = []

    if cfg.kind is ExperimentKind.VALIDATE:
        validation = run_validation()
        rows: list[Row] = [
            {"index": i, "name": c.name, "passed": c.passed, "defect": c.value, "tol": c.bound}
            for i, c in enumerate(validation)
        ]
        return ExperimentResult(
            cfg.kind, layout.key, layout.columns, layout.primary, tuple(rows), tuple(validation)
        )

    if cfg.kind is ExperimentKind.OSCILLATORY:
        points = [_oscillatory_point(cfg, mu) for mu in cfg.mu]
    elif cfg.kind is ExperimentKind.SOLVER:
        assert layout.point is not None
        points = _sweep(cfg, layout.point, range(cfg.samples))
    else:
        assert layout.point is not None
        points = _sweep(cfg, layout.point, cfg.grid)

    points.sort(key=lambda p: as_float(p.row[layout.key]))
    rows = [p.row for p in points]
    for p in points:
        predictions.extend(p.predictions)

    def col(name: str) -> list[float]:
        return [as_float(r.get(name)) for r in rows]

    checks, fits = _checks(cfg, rows, col)
    return ExperimentResult(
        cfg.kind,
        layout.key,
        layout.columns,
        layout.primary,
        tuple(rows),
        tuple(checks),
        fits,
        tuple(predictions),
    )


def summary(cfg: ExperimentConfig, result: ExperimentResult) -> dict[str, object]:
    return {
        "kind": str(cfg.kind),
        "model": format_model(cfg.model),
        "grid": list(cfg.grid),
        "fit_from": cfg.fit_from,
        "slack": cfg.tolerances.slack,
        "passed": result.passed,
        "degenerate": result.degenerate,
        "checks": [c.to_dict() for c in result.checks],
        "fits": {name: fit.to_dict() for name, fit in result.fits.items()},
    }


def write_artifacts(cfg: ExperimentConfig, result: ExperimentResult) -> list[Path]:
    """Write <stem>.csv, <stem>.json, <stem>.dat (and <stem>_predictions.csv for symbols)."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{cfg.stem}.csv"
    json_path = out / f"{cfg.stem}.json"
    dat_path = out / f"{cfg.stem}.dat"

    with csv_path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([format_cell(row.get(c)) for c in result.columns])

    with json_path.open("w") as f:
        json.dump(summary(cfg, result), f, indent=2, sort_keys=True)
        _ = f.write("\n")

    with dat_path.open("w") as f:
        for row in result.rows:
            value = row.get(result.primary)
            if isinstance(value, int | float) and not isinstance(value, bool):
                _ = f.write(f"{format_cell(row[result.key])} {format_float(float(value))}\n")

    paths = [csv_path, json_path, dat_path]
    if result.predictions:
        predictions_path = out / f"{cfg.stem}_predictions.csv"
        write_prediction_csv(result.predictions, predictions_path)
        paths.append(predictions_path)
    logger.info("wrote %s", ", ".join(str(p) for p in paths))
    return paths

