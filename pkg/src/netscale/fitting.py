"""Scaling-law fits, bootstrap uncertainties, and null-model expectations.

Two functional forms: a power law y = a * n^b (fit by OLS of log10 y on
log10 n) and a logarithmic law y = a + b * log10 n (OLS of y on log10 n).
Uncertainties come from a case-resampling bootstrap of the fitted points.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import sbm
from .geodesic import EstimatorConfig, GeodesicEstimate, estimate_mean_geodesic
from .graph import SimpleGraph
from .measures import MeasureRecord, compute_measures
from .nullmodels import (
    as_maxent,
    chung_lu_sample,
    config_model_sample,
    dcsbm_sample,
    dcsbm_maxent_sample,
    gen_gnm,
    gen_gnp,
)

POWER_LAW = "power-law"
LOGARITHMIC = "logarithmic"

# the paper's fixed form per measure: power law for density-like measures,
# logarithmic for distance and mixing
MEASURE_FORMS = {
    "mean_degree": POWER_LAW,
    "clustering": POWER_LAW,
    "mean_geodesic": LOGARITHMIC,
    "assortativity": LOGARITHMIC,
}

NULL_MEASURES = ("mean_geodesic", "clustering", "assortativity")

MODEL_NAMES = ("gnm", "gnp", "config", "chung-lu", "dcsbm", "dcsbm-maxent")

_MAX_REDRAWS = 1000


class InsufficientDataError(ValueError):
    """Fewer than two usable points."""


class DegenerateDesignError(ValueError):
    """All points share one n value; the slope is unidentifiable."""


@dataclass(frozen=True)
class ScalingFit:
    form: str
    a: float
    b: float
    sd_a: float = 0.0
    sd_b: float = 0.0
    points_used: int = 0
    points_excluded: int = 0
    exclusion_reasons: dict[str, int] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "form": self.form,
            "a": self.a,
            "b": self.b,
            "sd_a": self.sd_a,
            "sd_b": self.sd_b,
            "points_used": self.points_used,
            "points_excluded": self.points_excluded,
            "exclusion_reasons": dict(self.exclusion_reasons),
        }


@dataclass(frozen=True)
class NullExpectation:
    """Ensemble mean of one measure under one null model for one network."""

    network_id: str
    model: str
    measure: str
    expected: float | None
    ensemble: int
    draws: tuple[float | None, ...]


def _screen_points(points, positive_y: bool) -> tuple[np.ndarray, np.ndarray, dict[str, int]]:
    ns, ys, reasons = [], [], {}

    def exclude(tag: str) -> None:
        reasons[tag] = reasons.get(tag, 0) + 1

    for n, y in points:
        if y is None or (isinstance(y, float) and np.isnan(y)):
            exclude("undefined")
        elif n <= 0:
            exclude("nonpositive_n")
        elif positive_y and y <= 0:
            exclude("nonpositive_y")
        else:
            ns.append(n)
            ys.append(y)
    return np.asarray(ns, dtype=np.float64), np.asarray(ys, dtype=np.float64), reasons


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise least squares of y on x; returns (intercept, slope)."""
    mx = x.mean(axis=-1, keepdims=True)
    my = y.mean(axis=-1, keepdims=True)
    var = ((x - mx) ** 2).mean(axis=-1)
    cov = ((x - mx) * (y - my)).mean(axis=-1)
    slope = cov / var
    intercept = my[..., 0] - slope * mx[..., 0]
    return intercept, slope


def _fit(points, form: str) -> ScalingFit:
    positive_y = form == POWER_LAW
    ns, ys, reasons = _screen_points(points, positive_y)
    if len(ns) < 2:
        raise InsufficientDataError(f"need >=2 usable points, have {len(ns)}")
    x = np.log10(ns)
    if np.ptp(x) == 0:
        raise DegenerateDesignError("all points share one n value")
    y = np.log10(ys) if positive_y else ys
    intercept, slope = _ols(x, y)
    a = float(10.0**intercept) if positive_y else float(intercept)
    return ScalingFit(
        form=form,
        a=a,
        b=float(slope),
        points_used=len(ns),
        points_excluded=sum(reasons.values()),
        exclusion_reasons=reasons,
    )


def fit_power_law(points) -> ScalingFit:
    """OLS of log10 y on log10 n; a = 10^intercept, b = slope.

    Points with undefined or nonpositive y are excluded and counted.
    """
    return _fit(points, POWER_LAW)


def fit_logarithmic(points) -> ScalingFit:
    """OLS of y on log10 n; y may be negative (assortativity)."""
    return _fit(points, LOGARITHMIC)


def bootstrap_sd(
    points, form: str, resamples: int = 10000, seed: int | None = None
) -> tuple[float, float]:
    """Case-resampling bootstrap standard deviations of (a, b).

    Resamples whose points all share one n value cannot be fit and are
    redrawn. Bit-reproducible for a fixed seed.
    """
    positive_y = form == POWER_LAW
    ns, ys, _ = _screen_points(points, positive_y)
    if len(ns) < 2:
        raise InsufficientDataError(f"need >=2 usable points, have {len(ns)}")
    x = np.log10(ns)
    if np.ptp(x) == 0:
        raise DegenerateDesignError("all points share one n value")
    y = np.log10(ys) if positive_y else ys
    rng = np.random.default_rng(seed)
    npts = len(x)
    idx = rng.integers(0, npts, size=(resamples, npts))
    for _ in range(_MAX_REDRAWS):
        bad = np.flatnonzero(np.ptp(x[idx], axis=1) == 0)
        if len(bad) == 0:
            break
        idx[bad] = rng.integers(0, npts, size=(len(bad), npts))
    else:
        raise DegenerateDesignError("could not draw non-degenerate resamples")
    intercept, slope = _ols(x[idx], y[idx])
    a = 10.0**intercept if positive_y else intercept
    return float(np.std(a, ddof=1)), float(np.std(slope, ddof=1))


def fit_with_uncertainty(
    points, form: str, resamples: int = 10000, seed: int | None = None
) -> ScalingFit:
    fit = _fit(points, form)
    sd_a, sd_b = bootstrap_sd(points, form, resamples=resamples, seed=seed)
    return replace(fit, sd_a=sd_a, sd_b=sd_b)


def _draw_graph(
    g: SimpleGraph,
    model: str,
    draw_seed: int,
    swaps_per_edge: int,
    max_attempts: int,
    params,
) -> SimpleGraph:
    if model == "gnm":
        return gen_gnm(g.n, g.m, seed=draw_seed)
    if model == "gnp":
        p = 2.0 * g.m / (g.n * (g.n - 1)) if g.n > 1 else 0.0
        return gen_gnp(g.n, p, seed=draw_seed)
    if model == "config":
        return config_model_sample(g, swaps_per_edge=swaps_per_edge, seed=draw_seed)
    if model == "chung-lu":
        return chung_lu_sample(g.degrees(), seed=draw_seed)
    if model == "dcsbm":
        graph, _ = dcsbm_sample(params, max_attempts=max_attempts, seed=draw_seed)
        return graph
    if model == "dcsbm-maxent":
        return dcsbm_maxent_sample(as_maxent(params), seed=draw_seed)
    raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")


def ensemble_records(
    g: SimpleGraph,
    model: str,
    sample_count: int = 50,
    seed: int | None = None,
    estimator_config: EstimatorConfig | None = None,
    swaps_per_edge: int = 20,
    max_attempts: int = 100,
    param_sets: list | None = None,
    inference_runs: int = 100,
) -> list[tuple[MeasureRecord, GeodesicEstimate | None]]:
    """Generate an ensemble and measure every draw.

    The mean geodesic distance of each draw comes from the sampling
    estimator; clustering and assortativity are exact. For the DC-SBM
    variants, each draw uses one of ``sample_count`` parameter sets sampled
    from repeated inference runs (supplied via ``param_sets`` or inferred
    here).
    """
    if model not in MODEL_NAMES:
        raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")
    rng = np.random.default_rng(seed)
    draw_seeds = rng.integers(0, 2**63 - 1, size=sample_count)
    if model in ("dcsbm", "dcsbm-maxent"):
        if param_sets is None:
            param_sets = sbm.sample_parameter_sets(
                g, runs=inference_runs, samples=sample_count, seed=int(rng.integers(0, 2**63 - 1))
            )
        if len(param_sets) < sample_count:
            raise ValueError("need one parameter set per draw")
    base_estimator = estimator_config or EstimatorConfig()
    out = []
    for i in range(sample_count):
        params = param_sets[i] if param_sets is not None else None
        graph = _draw_graph(g, model, int(draw_seeds[i]), swaps_per_edge, max_attempts, params)
        estimate = estimate_mean_geodesic(
            graph, replace(base_estimator, seed=int(rng.integers(0, 2**63 - 1)))
        )
        record = compute_measures(
            graph, source=model, seed=int(draw_seeds[i]), mean_geodesic=estimate.value
        )
        out.append((record, estimate))
    return out


def null_expectation(
    g: SimpleGraph,
    model: str,
    sample_count: int = 50,
    measures: tuple[str, ...] = NULL_MEASURES,
    seed: int | None = None,
    network_id: str = "",
    **kwargs,
) -> list[NullExpectation]:
    """Ensemble means of the requested measures under one null model.

    Mean degree is never a null expectation: every model here fixes it (at
    least in expectation) by construction. Draws with an undefined measure
    are skipped in that measure's mean.
    """
    for name in measures:
        if name not in NULL_MEASURES:
            raise ValueError(f"{name!r} is not a null-expectation measure")
    records = ensemble_records(g, model, sample_count=sample_count, seed=seed, **kwargs)
    out = []
    for name in measures:
        draws = tuple(getattr(record, name) for record, _ in records)
        values = np.array([d for d in draws if d is not None], dtype=np.float64)
        expected = float(values.mean()) if len(values) else None
        out.append(
            NullExpectation(
                network_id=network_id,
                model=model,
                measure=name,
                expected=expected,
                ensemble=sample_count,
                draws=draws,
            )
        )
    return out
