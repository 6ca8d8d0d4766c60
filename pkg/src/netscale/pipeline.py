"""End-to-end corpus pipeline.

Manifest ingestion, per-network simplification and measurement, null-model
ensembles, domain-grouped scaling fits, and serialized artifacts (CSV + JSON
tables, plot data, run metadata). Per-network failures are recorded and
skipped so one malformed file cannot abort a corpus run; identical
(manifest, config, seed) runs produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import shutil
import urllib.request
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, kernels, sbm
from .fitting import (
    MEASURE_FORMS,
    MODEL_NAMES,
    NULL_MEASURES,
    InsufficientDataError,
    DegenerateDesignError,
    NullExpectation,
    ScalingFit,
    fit_with_uncertainty,
    null_expectation,
)
from .geodesic import EstimatorConfig, estimate_mean_geodesic
from .graph import read_edge_list, simplify
from .measures import CSV_FIELDS, MeasureRecord, compute_measures, mean_geodesic_exact

DOMAINS = ("social", "biological", "informational", "technological")
MEASURES = tuple(MEASURE_FORMS)

_MANIFEST_COLUMNS = ("id", "path", "domain", "sub_domain", "directed", "weighted", "multi")
_TRUTHY = {"1", "true", "yes", "y"}


class ChecksumError(RuntimeError):
    """Archive or file content does not match its recorded checksum."""


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: str
    domain: str = ""
    sub_domain: str = ""
    directed: bool = False
    weighted: bool = False
    multi: bool = False


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry]
    base_dir: Path | None = None

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate manifest ids: {dupes}")

    def resolve(self, entry: ManifestEntry) -> Path:
        path = Path(entry.path)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return path

    @classmethod
    def load(cls, path: str | Path) -> "CorpusManifest":
        path = Path(path)
        if path.suffix == ".json":
            rows = json.loads(path.read_text())
        else:
            with open(path, newline="") as fh:
                rows = list(csv.DictReader(fh))
        entries = []
        for row in rows:
            entries.append(
                ManifestEntry(
                    id=str(row["id"]),
                    path=str(row["path"]),
                    domain=str(row.get("domain", "") or ""),
                    sub_domain=str(row.get("sub_domain", "") or ""),
                    directed=_parse_flag(row.get("directed")),
                    weighted=_parse_flag(row.get("weighted")),
                    multi=_parse_flag(row.get("multi")),
                )
            )
        return cls(entries=entries, base_dir=path.parent)


def _parse_flag(value) -> bool:
    if isinstance(value, bool):
        return value
    if value is None:
        return False
    return str(value).strip().lower() in _TRUTHY


@dataclass(frozen=True)
class RunConfig:
    models: tuple[str, ...] = ()
    samples: int = 50
    group_by: str = "domain"  # or "subdomain"
    seed: int = 0
    exact_cutoff: int = 20000
    batch_size: int = 1000
    threshold: float = 0.1
    max_batches: int = 1000
    swaps_per_edge: int = 20
    max_attempts: int = 100
    inference_runs: int = 100
    bootstrap_resamples: int = 10000

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("ensemble size must be at least 1")
        if self.exact_cutoff < 0:
            raise ValueError("exact-path cutoff must be nonnegative")
        if self.group_by not in ("domain", "subdomain"):
            raise ValueError("group_by must be 'domain' or 'subdomain'")
        for model in self.models:
            if model not in MODEL_NAMES:
                raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")


def derive_seed(*parts) -> int:
    """Stable cross-platform seed from arbitrary labeled parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1  # keep it in int64 range


@dataclass
class NetworkResult:
    entry: ManifestEntry
    record: MeasureRecord
    geodesic_method: str
    geodesic_batches: int
    geodesic_converged: bool
    nulls: list[NullExpectation] = field(default_factory=list)


@dataclass
class RunResult:
    config: RunConfig
    results: list[NetworkResult]
    failures: list[tuple[str, str]]
    fits: dict[str, dict[str, dict[str, ScalingFit | None]]]  # group -> series -> measure

    @property
    def ok(self) -> bool:
        return not self.failures


def _group_key(entry: ManifestEntry, group_by: str) -> str:
    if group_by == "subdomain":
        return entry.sub_domain or entry.domain
    return entry.domain


def _series_points(results: list[NetworkResult], series: str, measure: str):
    points = []
    for res in results:
        if series == "empirical":
            points.append((res.record.n, getattr(res.record, measure)))
        else:
            for null in res.nulls:
                if null.model == series and null.measure == measure:
                    points.append((res.record.n, null.expected))
    return points


def _fit_groups(results, config: RunConfig):
    groups: dict[str, list[NetworkResult]] = {}
    for res in results:
        groups.setdefault(_group_key(res.entry, config.group_by), []).append(res)
    series_names = ["empirical"] + list(config.models)
    fits: dict[str, dict[str, dict[str, ScalingFit | None]]] = {}
    for group in sorted(groups):
        fits[group] = {}
        for series in series_names:
            cells: dict[str, ScalingFit | None] = {}
            for measure in MEASURES:
                if series != "empirical" and measure not in NULL_MEASURES:
                    continue  # mean degree is fixed by every null model
                points = _series_points(groups[group], series, measure)
                try:
                    cells[measure] = fit_with_uncertainty(
                        points,
                        MEASURE_FORMS[measure],
                        resamples=config.bootstrap_resamples,
                        seed=derive_seed(config.seed, "fit", group, series, measure),
                    )
                except (InsufficientDataError, DegenerateDesignError):
                    cells[measure] = None
            fits[group][series] = cells
    return fits


def run_corpus(manifest: CorpusManifest, config: RunConfig) -> RunResult:
    """Measure every network, build null ensembles, and fit scaling laws."""
    results: list[NetworkResult] = []
    failures: list[tuple[str, str]] = []
    needs_params = any(m in ("dcsbm", "dcsbm-maxent") for m in config.models)
    for entry in manifest.entries:
        try:
            results.append(_process_network(manifest, entry, config, needs_params))
        except Exception as exc:  # noqa: BLE001 - failure isolation is the contract
            failures.append((entry.id, f"{type(exc).__name__}: {exc}"))
    fits = _fit_groups(results, config)
    return RunResult(config=config, results=results, failures=failures, fits=fits)


def _process_network(
    manifest: CorpusManifest, entry: ManifestEntry, config: RunConfig, needs_params: bool
) -> NetworkResult:
    raw = read_edge_list(manifest.resolve(entry), directed=entry.directed)
    g = simplify(raw)
    estimator = EstimatorConfig(
        batch_size=config.batch_size,
        threshold=config.threshold,
        max_batches=config.max_batches,
    )
    if g.n <= config.exact_cutoff:
        geo_value = mean_geodesic_exact(g)
        method, batches, converged = "exact", 0, True
    else:
        estimate = estimate_mean_geodesic(
            g, EstimatorConfig(
                batch_size=config.batch_size,
                threshold=config.threshold,
                max_batches=config.max_batches,
                seed=derive_seed(config.seed, entry.id, "empirical-geodesic"),
            )
        )
        geo_value = estimate.value
        method, batches, converged = "estimator", estimate.batches, estimate.converged
    record = compute_measures(g, source="empirical", mean_geodesic=geo_value)

    param_sets = None
    if needs_params and g.m >= 1:
        param_sets = sbm.sample_parameter_sets(
            g,
            runs=config.inference_runs,
            samples=config.samples,
            seed=derive_seed(config.seed, entry.id, "sbm-inference"),
        )
    nulls: list[NullExpectation] = []
    for model in config.models:
        kwargs = {}
        if model in ("dcsbm", "dcsbm-maxent"):
            kwargs["param_sets"] = param_sets
        nulls.extend(
            null_expectation(
                g,
                model,
                sample_count=config.samples,
                seed=derive_seed(config.seed, entry.id, model),
                network_id=entry.id,
                estimator_config=estimator,
                swaps_per_edge=config.swaps_per_edge,
                max_attempts=config.max_attempts,
                **kwargs,
            )
        )
    return NetworkResult(
        entry=entry,
        record=record,
        geodesic_method=method,
        geodesic_batches=batches,
        geodesic_converged=converged,
        nulls=nulls,
    )


# ---------------------------------------------------------------------------
# serialization


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_outputs(result: RunResult, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    measure_header = ("id", "domain", "sub_domain", "geodesic_method", "geodesic_batches",
                      "geodesic_converged") + CSV_FIELDS
    measure_rows = []
    measure_json = []
    for res in result.results:
        row = [res.entry.id, res.entry.domain, res.entry.sub_domain, res.geodesic_method,
               res.geodesic_batches, res.geodesic_converged]
        row += [getattr(res.record, name) for name in CSV_FIELDS]
        measure_rows.append(row)
        measure_json.append(
            {
                "id": res.entry.id,
                "domain": res.entry.domain,
                "sub_domain": res.entry.sub_domain,
                "geodesic_method": res.geodesic_method,
                "geodesic_batches": res.geodesic_batches,
                "geodesic_converged": res.geodesic_converged,
                "record": res.record.to_json_dict(),
            }
        )
    _write_csv(out / "measures.csv", measure_header, measure_rows)
    _write_json(out / "measures.json", measure_json)

    null_rows = []
    null_json = []
    for res in result.results:
        for null in res.nulls:
            null_rows.append([null.network_id, null.model, null.measure, null.expected, null.ensemble])
            null_json.append(
                {
                    "network_id": null.network_id,
                    "model": null.model,
                    "measure": null.measure,
                    "expected": null.expected,
                    "ensemble": null.ensemble,
                    "draws": list(null.draws),
                }
            )
    _write_csv(out / "null_expectations.csv",
               ("id", "model", "measure", "expected", "ensemble"), null_rows)
    _write_json(out / "null_expectations.json", null_json)

    fit_header = ["group", "series"]
    for measure in MEASURES:
        fit_header += [f"{measure}_a", f"{measure}_sd_a", f"{measure}_b", f"{measure}_sd_b"]
    fit_rows = []
    fits_json: dict = {}
    for group in sorted(result.fits):
        fits_json[group] = {}
        for series, cells in result.fits[group].items():
            row: list = [group, series]
            fits_json[group][series] = {}
            for measure in MEASURES:
                fit = cells.get(measure)
                if fit is None:
                    row += [None, None, None, None]
                    fits_json[group][series][measure] = None
                else:
                    row += [fit.a, fit.sd_a, fit.b, fit.sd_b]
                    fits_json[group][series][measure] = fit.to_json_dict()
            fit_rows.append(row)
    _write_csv(out / "fits.csv", fit_header, fit_rows)
    _write_json(out / "fits.json", fits_json)

    _write_csv(out / "failures.csv", ("id", "error"), result.failures)

    meta = {
        "tool": "netscale",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config": asdict(result.config),
        "networks": len(result.results),
        "failures": len(result.failures),
    }
    meta["config"]["models"] = list(result.config.models)
    _write_json(out / "run_meta.json", meta)


def load_result(out_dir: str | Path) -> RunResult:
    """Rebuild a result bundle from a written output directory."""
    out = Path(out_dir)
    meta = json.loads((out / "run_meta.json").read_text())
    cfg = dict(meta["config"])
    cfg["models"] = tuple(cfg["models"])
    config = RunConfig(**cfg)

    nulls_by_id: dict[str, list[NullExpectation]] = {}
    for item in json.loads((out / "null_expectations.json").read_text()):
        nulls_by_id.setdefault(item["network_id"], []).append(
            NullExpectation(
                network_id=item["network_id"],
                model=item["model"],
                measure=item["measure"],
                expected=item["expected"],
                ensemble=item["ensemble"],
                draws=tuple(item["draws"]),
            )
        )
    results = []
    for item in json.loads((out / "measures.json").read_text()):
        record = MeasureRecord(**item["record"])
        entry = ManifestEntry(id=item["id"], path="", domain=item["domain"],
                              sub_domain=item["sub_domain"])
        results.append(
            NetworkResult(
                entry=entry,
                record=record,
                geodesic_method=item["geodesic_method"],
                geodesic_batches=item["geodesic_batches"],
                geodesic_converged=item["geodesic_converged"],
                nulls=nulls_by_id.get(item["id"], []),
            )
        )
    fits: dict = {}
    for group, series_map in json.loads((out / "fits.json").read_text()).items():
        fits[group] = {}
        for series, cells in series_map.items():
            fits[group][series] = {}
            for measure, fit in cells.items():
                if fit is None:
                    fits[group][series][measure] = None
                else:
                    fit = dict(fit)
                    fits[group][series][measure] = ScalingFit(
                        form=fit["form"], a=fit["a"], b=fit["b"], sd_a=fit["sd_a"],
                        sd_b=fit["sd_b"], points_used=fit["points_used"],
                        points_excluded=fit["points_excluded"],
                        exclusion_reasons=fit["exclusion_reasons"],
                    )
    failures = []
    failures_path = out / "failures.csv"
    if failures_path.exists():
        with open(failures_path, newline="") as fh:
            failures = [(row["id"], row["error"]) for row in csv.DictReader(fh)]
    return RunResult(config=config, results=results, failures=failures, fits=fits)


def _safe_name(token: str) -> str:
    cleaned = "".join(c if c.isalnum() or c in "-_." else "-" for c in token)
    return cleaned or "unlabeled"


def emit_plot_data(result: RunResult, out_dir: str | Path, line_points: int = 100) -> list[Path]:
    """Write per (group, measure) scatter points and fitted-line samples.

    Fit lines are sampled at ``line_points`` log-spaced n values across the
    observed n range, one series per successful fit (empirical and models).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups: dict[str, list[NetworkResult]] = {}
    for res in result.results:
        groups.setdefault(_group_key(res.entry, result.config.group_by), []).append(res)
    written: list[Path] = []
    for group in sorted(groups):
        members = groups[group]
        for measure in MEASURES:
            scatter = [
                (res.entry.id, res.record.n, getattr(res.record, measure))
                for res in members
                if getattr(res.record, measure) is not None
            ]
            scatter_path = out / f"scatter_{_safe_name(group)}_{measure}.csv"
            _write_csv(scatter_path, ("id", "n", "y"), scatter)
            written.append(scatter_path)

            line_rows = []
            if scatter:
                lo = min(n for _, n, _ in scatter)
                hi = max(n for _, n, _ in scatter)
                ns = np.logspace(np.log10(lo), np.log10(hi), line_points)
                cells_by_series = result.fits.get(group, {})
                for series in sorted(cells_by_series, key=lambda s: (s != "empirical", s)):
                    fit = cells_by_series[series].get(measure)
                    if fit is None:
                        continue
                    if fit.form == "power-law":
                        ys = fit.a * ns**fit.b
                    else:
                        ys = fit.a + fit.b * np.log10(ns)
                    line_rows += [(series, float(n), float(y)) for n, y in zip(ns, ys)]
            line_path = out / f"fitline_{_safe_name(group)}_{measure}.csv"
            _write_csv(line_path, ("series", "n", "y"), line_rows)
            written.append(line_path)
    return written


# ---------------------------------------------------------------------------
# corpus fetching


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_checksums(path: str | Path) -> dict[str, str]:
    table = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"malformed checksum line: {line!r}")
        table[" ".join(parts[1:]).lstrip("*")] = parts[0].lower()
    return table


def fetch_corpus(
    source: str | Path,
    checksums: str | Path | None,
    dest: str | Path,
) -> Path:
    """Fetch and unpack a corpus archive, verifying checksums first.

    ``source`` is a URL or a local archive path. Returns the manifest path:
    either one shipped inside the archive, or a stub with blank domain
    labels for human completion. Re-running against a completed destination
    is a no-op.
    """
    dest = Path(dest)
    marker = dest / ".fetch-complete"
    manifest_path = dest / "manifest.csv"
    if marker.exists():
        return manifest_path
    dest.mkdir(parents=True, exist_ok=True)

    source_str = str(source)
    if source_str.startswith(("http://", "https://")):
        archive = dest / Path(source_str.split("?", 1)[0]).name
        urllib.request.urlretrieve(source_str, archive)
        downloaded = True
    else:
        archive = Path(source)
        downloaded = False
    if not archive.exists():
        raise FileNotFoundError(f"archive not found: {archive}")

    table = _load_checksums(checksums) if checksums else {}
    if table:
        expected = table.get(archive.name)
        if expected is None:
            raise ChecksumError(f"no checksum listed for archive {archive.name!r}")
        actual = _sha256(archive)
        if actual != expected:
            if downloaded:
                archive.unlink(missing_ok=True)
            raise ChecksumError(f"archive {archive.name!r}: expected {expected}, got {actual}")

    staging = dest / "_staging"
    if staging.exists():
        shutil.rmtree(staging)
    try:
        shutil.unpack_archive(archive, staging)
        extracted = sorted(p for p in staging.rglob("*") if p.is_file())
        for path in extracted:
            rel = path.relative_to(staging).as_posix()
            expected = table.get(rel) or table.get(path.name)
            if expected and path.name != archive.name:
                actual = _sha256(path)
                if actual != expected:
                    raise ChecksumError(f"file {rel!r}: expected {expected}, got {actual}")
        networks = dest / "networks"
        if networks.exists():
            shutil.rmtree(networks)
        staging.rename(networks)
    except Exception:
        if staging.exists():
            shutil.rmtree(staging)
        raise

    shipped = [p for p in (networks / "manifest.csv", networks / "manifest.json") if p.exists()]
    if shipped:
        shutil.copy(shipped[0], dest / f"manifest{shipped[0].suffix}")
        manifest_path = dest / f"manifest{shipped[0].suffix}"
    else:
        rows = []
        seen: set[str] = set()
        for path in sorted(networks.rglob("*")):
            if not path.is_file():
                continue
            stem = path.name.split(".")[0]
            uid = stem
            counter = 1
            while uid in seen:
                counter += 1
                uid = f"{stem}-{counter}"
            seen.add(uid)
            rows.append([uid, path.relative_to(dest).as_posix(), "", "", 0, 0, 0])
        _write_csv(manifest_path, _MANIFEST_COLUMNS, rows)
    marker.write_text(_sha256(archive) + "\n")
    return manifest_path
