import filecmp
import json
import shutil
import tarfile

import numpy as np
import pytest

from netscale import nullmodels as nm
from netscale.cli import main
from netscale.pipeline import (
    ChecksumError,
    CorpusManifest,
    ManifestEntry,
    RunConfig,
    derive_seed,
    emit_plot_data,
    fetch_corpus,
    load_result,
    run_corpus,
    write_outputs,
)


def write_gnm(path, n, m, seed):
    g = nm.gen_gnm(n, m, seed=seed)
    u, v = g.edge_arrays()
    path.write_text("".join(f"{a} {b}\n" for a, b in zip(u.tolist(), v.tolist())))
    return g


@pytest.fixture
def small_corpus(tmp_path):
    entries = []
    sizes = [(60, 150), (100, 300), (160, 560), (250, 1000)]
    for i, (n, m) in enumerate(sizes):
        path = tmp_path / f"net{i}.txt"
        write_gnm(path, n, m, seed=i)
        entries.append(
            ManifestEntry(
                id=f"net{i}",
                path=path.name,
                domain="social" if i % 2 == 0 else "biological",
                sub_domain="online" if i % 2 == 0 else "ppi",
            )
        )
    manifest = CorpusManifest(entries=entries, base_dir=tmp_path)
    return manifest, tmp_path


class TestManifest:
    def test_duplicate_ids_rejected(self):
        entries = [ManifestEntry(id="a", path="x"), ManifestEntry(id="a", path="y")]
        with pytest.raises(ValueError):
            CorpusManifest(entries=entries)

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_text(
            "id,path,domain,sub_domain,directed,weighted,multi\n"
            "one,net.txt,social,online,1,0,true\n"
        )
        manifest = CorpusManifest.load(path)
        entry = manifest.entries[0]
        assert entry.id == "one"
        assert entry.directed and not entry.weighted and entry.multi
        assert manifest.resolve(entry) == tmp_path / "net.txt"

    def test_json_load(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps([{"id": "x", "path": "a.txt", "domain": "social"}]))
        manifest = CorpusManifest.load(path)
        assert manifest.entries[0].domain == "social"


class TestRunConfig:
    def test_rejects_unknown_model(self):
        with pytest.raises(ValueError):
            RunConfig(models=("nonsense",))

    def test_rejects_bad_grouping(self):
        with pytest.raises(ValueError):
            RunConfig(group_by="color")

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            RunConfig(samples=0)


class TestDeriveSeed:
    def test_stable_and_distinct(self):
        assert derive_seed(1, "a", "gnm", 0) == derive_seed(1, "a", "gnm", 0)
        assert derive_seed(1, "a", "gnm", 0) != derive_seed(1, "a", "gnm", 1)
        assert derive_seed(1, "ab", "c") != derive_seed(1, "a", "bc")


class TestRunCorpus:
    def test_empty_manifest_succeeds(self, tmp_path):
        result = run_corpus(CorpusManifest(entries=[]), RunConfig())
        assert result.ok
        write_outputs(result, tmp_path / "out")
        assert (tmp_path / "out" / "fits.csv").exists()

    def test_small_corpus_runs(self, small_corpus, tmp_path):
        manifest, _ = small_corpus
        config = RunConfig(models=("gnm",), samples=3, seed=1, bootstrap_resamples=100)
        result = run_corpus(manifest, config)
        assert result.ok
        assert len(result.results) == 4
        assert set(result.fits) == {"social", "biological"}
        for res in result.results:
            assert res.geodesic_method == "exact"
            assert len(res.nulls) == 3  # three null measures for one model

    def test_failure_isolation(self, small_corpus):
        manifest, tmp_path = small_corpus
        entries = manifest.entries + [ManifestEntry(id="broken", path="missing.txt")]
        manifest = CorpusManifest(entries=entries, base_dir=tmp_path)
        result = run_corpus(manifest, RunConfig(samples=2, bootstrap_resamples=50))
        assert not result.ok
        assert len(result.results) == 4
        assert result.failures[0][0] == "broken"

    def test_every_entry_accounted_for(self, small_corpus):
        manifest, tmp_path = small_corpus
        entries = manifest.entries + [ManifestEntry(id="bad", path="nope.txt")]
        manifest = CorpusManifest(entries=entries, base_dir=tmp_path)
        result = run_corpus(manifest, RunConfig(samples=2, bootstrap_resamples=50))
        seen = {r.entry.id for r in result.results} | {f[0] for f in result.failures}
        assert seen == {e.id for e in manifest.entries}

    def test_estimator_used_above_cutoff(self, small_corpus):
        manifest, _ = small_corpus
        config = RunConfig(samples=2, exact_cutoff=100, bootstrap_resamples=50, seed=3)
        result = run_corpus(manifest, config)
        methods = {r.entry.id: r.geodesic_method for r in result.results}
        assert methods["net0"] == "exact"  # n=60
        assert methods["net3"] == "estimator"  # n=250

    def test_subdomain_grouping_unions_to_domain(self, small_corpus):
        manifest, _ = small_corpus
        base = RunConfig(samples=2, bootstrap_resamples=50, seed=5)
        by_domain = run_corpus(manifest, base)
        by_sub = run_corpus(
            manifest,
            RunConfig(samples=2, bootstrap_resamples=50, seed=5, group_by="subdomain"),
        )
        # each sub-domain here coincides with one domain, so the point sets
        # and the seeded fits must agree cell by cell
        pairs = {"online": "social", "ppi": "biological"}
        for sub, dom in pairs.items():
            for measure, fit in by_sub.fits[sub]["empirical"].items():
                ref = by_domain.fits[dom]["empirical"][measure]
                assert fit.a == pytest.approx(ref.a, rel=1e-12)
                assert fit.b == pytest.approx(ref.b, rel=1e-12)

    def test_planted_mean_degree_trend_recovered(self, tmp_path):
        rng = np.random.default_rng(0)
        entries = []
        for i, n in enumerate(np.logspace(2, 3.3, 12).astype(int)):
            k = 3.0 * n**0.25
            m = int(round(k * n / 2))
            write_gnm(tmp_path / f"g{i}.txt", int(n), m, seed=i)
            entries.append(ManifestEntry(id=f"g{i}", path=f"g{i}.txt", domain="social"))
        manifest = CorpusManifest(entries=entries, base_dir=tmp_path)
        result = run_corpus(manifest, RunConfig(seed=2, bootstrap_resamples=400))
        fit = result.fits["social"]["empirical"]["mean_degree"]
        assert abs(fit.b - 0.25) <= max(3 * fit.sd_b, 1e-3)


class TestOutputs:
    def test_determinism_byte_identical(self, small_corpus, tmp_path):
        manifest, _ = small_corpus
        config = RunConfig(models=("gnm", "config"), samples=2, seed=9,
                           bootstrap_resamples=50)
        for tag in ("runA", "runB"):
            result = run_corpus(manifest, config)
            write_outputs(result, tmp_path / tag)
            emit_plot_data(result, tmp_path / tag / "plot_data")
        files_a = sorted(p.relative_to(tmp_path / "runA")
                         for p in (tmp_path / "runA").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(tmp_path / "runB")
                         for p in (tmp_path / "runB").rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert filecmp.cmp(tmp_path / "runA" / rel, tmp_path / "runB" / rel, shallow=False)

    def test_plot_data_counting_contract(self, small_corpus, tmp_path):
        manifest, _ = small_corpus
        single = CorpusManifest(
            entries=[e for e in manifest.entries if e.domain == "social"],
            base_dir=manifest.base_dir,
        )
        result = run_corpus(single, RunConfig(samples=2, seed=1, bootstrap_resamples=50))
        written = emit_plot_data(result, tmp_path / "plots")
        scatters = [p for p in written if p.name.startswith("scatter_")]
        fitlines = [p for p in written if p.name.startswith("fitline_")]
        assert len(scatters) == 4 and len(fitlines) == 4

    def test_fit_lines_log_spaced(self, small_corpus, tmp_path):
        manifest, _ = small_corpus
        result = run_corpus(manifest, RunConfig(samples=2, seed=1, bootstrap_resamples=50))
        emit_plot_data(result, tmp_path / "plots")
        path = tmp_path / "plots" / "fitline_social_mean_degree.csv"
        rows = path.read_text().splitlines()[1:]
        ns = [float(r.split(",")[1]) for r in rows if r.startswith("empirical,")]
        assert len(ns) == 100
        ratios = np.diff(np.log10(ns))
        assert np.allclose(ratios, ratios[0], rtol=1e-9)

    def test_empirical_only_run_has_single_series(self, small_corpus, tmp_path):
        manifest, _ = small_corpus
        result = run_corpus(manifest, RunConfig(samples=2, seed=1, bootstrap_resamples=50))
        emit_plot_data(result, tmp_path / "plots")
        path = tmp_path / "plots" / "fitline_social_clustering.csv"
        series = {line.split(",")[0] for line in path.read_text().splitlines()[1:]}
        assert series <= {"empirical"}

    def test_load_result_roundtrip(self, small_corpus, tmp_path):
        manifest, _ = small_corpus
        config = RunConfig(models=("gnm",), samples=2, seed=4, bootstrap_resamples=50)
        result = run_corpus(manifest, config)
        write_outputs(result, tmp_path / "out")
        emit_plot_data(result, tmp_path / "out" / "plot_data")
        loaded = load_result(tmp_path / "out")
        emit_plot_data(loaded, tmp_path / "plots2")
        for p in sorted((tmp_path / "out" / "plot_data").iterdir()):
            assert filecmp.cmp(p, tmp_path / "plots2" / p.name, shallow=False)


def make_archive(tmp_path, corrupt=False):
    src = tmp_path / "src"
    src.mkdir(exist_ok=True)
    (src / "alpha.txt").write_text("0 1\n1 2\n")
    (src / "beta.txt").write_text("0 1\n")
    archive = tmp_path / "corpus.tar.gz"
    with tarfile.open(archive, "w:gz") as tar:
        tar.add(src / "alpha.txt", arcname="alpha.txt")
        tar.add(src / "beta.txt", arcname="beta.txt")
    import hashlib

    digest = hashlib.sha256(archive.read_bytes()).hexdigest()
    if corrupt:
        digest = "0" * 64
    checksums = tmp_path / "checksums.txt"
    checksums.write_text(f"{digest}  corpus.tar.gz\n")
    return archive, checksums


class TestFetchCorpus:
    def test_valid_archive(self, tmp_path):
        archive, checksums = make_archive(tmp_path)
        manifest_path = fetch_corpus(archive, checksums, tmp_path / "dest")
        manifest = CorpusManifest.load(manifest_path)
        assert {e.id for e in manifest.entries} == {"alpha", "beta"}
        assert all(e.domain == "" for e in manifest.entries)
        assert all(manifest.resolve(e).exists() for e in manifest.entries)

    def test_corrupted_archive_writes_nothing(self, tmp_path):
        archive, checksums = make_archive(tmp_path, corrupt=True)
        dest = tmp_path / "dest"
        with pytest.raises(ChecksumError):
            fetch_corpus(archive, checksums, dest)
        assert not (dest / "networks").exists()
        assert not (dest / "manifest.csv").exists()

    def test_idempotent_rerun(self, tmp_path):
        archive, checksums = make_archive(tmp_path)
        dest = tmp_path / "dest"
        first = fetch_corpus(archive, checksums, dest)
        marker = (dest / ".fetch-complete").read_text()
        archive.unlink()  # a re-run must not need the archive again
        second = fetch_corpus(archive, checksums, dest)
        assert first == second
        assert (dest / ".fetch-complete").read_text() == marker


class TestCli:
    def test_measure_csv(self, tmp_path, capsys):
        write_gnm(tmp_path / "g.txt", 50, 120, seed=0)
        rc = main(["measure", "--input", str(tmp_path / "g.txt")])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].startswith("n,m,mean_degree")
        assert out[1].split(",")[0] == "50"

    def test_simplify_and_label_map(self, tmp_path, capsys):
        (tmp_path / "raw.txt").write_text("b a\na b\nc c\n")
        rc = main([
            "simplify", "--input", str(tmp_path / "raw.txt"),
            "--output", str(tmp_path / "simple.txt"),
            "--label-map", str(tmp_path / "labels.txt"),
        ])
        assert rc == 0
        assert (tmp_path / "simple.txt").read_text().splitlines()[0] == "# n=3 m=1"
        assert (tmp_path / "labels.txt").read_text().splitlines() == ["0\tb", "1\ta", "2\tc"]

    def test_nullmodel_outputs(self, tmp_path):
        write_gnm(tmp_path / "g.txt", 60, 150, seed=1)
        rc = main([
            "nullmodel", "--input", str(tmp_path / "g.txt"), "--model", "config",
            "--samples", "3", "--seed", "5", "--out", str(tmp_path / "nm"),
        ])
        assert rc == 0
        draws = (tmp_path / "nm" / "draws.csv").read_text().splitlines()
        assert len(draws) == 4
        assert "geodesic_batches" in draws[0]
        expectations = json.loads((tmp_path / "nm" / "expectations.json").read_text())
        assert expectations["model"] == "config"

    def test_infer_sbm_json(self, tmp_path):
        write_gnm(tmp_path / "g.txt", 40, 120, seed=2)
        rc = main([
            "infer-sbm", "--input", str(tmp_path / "g.txt"), "--runs", "2",
            "--posterior-samples", "3", "--seed", "1", "--out", str(tmp_path / "sbm.json"),
        ])
        assert rc == 0
        payload = json.loads((tmp_path / "sbm.json").read_text())
        assert len(payload["runs"]) == 2
        assert len(payload["samples"]) == 3
        assert {"k", "b", "e"} <= set(payload["samples"][0])

    def test_fit_command(self, tmp_path, capsys):
        points = tmp_path / "pts.csv"
        points.write_text("n,y\n10,2\n100,4\n1000,8\n")
        rc = main(["fit", "--points", str(points), "--form", "power-law",
                   "--resamples", "50", "--seed", "0"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["b"] == pytest.approx(np.log10(2), abs=1e-9)

    def test_run_and_plot_data(self, small_corpus, tmp_path):
        manifest, base = small_corpus
        manifest_path = base / "manifest.csv"
        lines = ["id,path,domain,sub_domain,directed,weighted,multi"]
        for e in manifest.entries:
            lines.append(f"{e.id},{e.path},{e.domain},{e.sub_domain},0,0,0")
        manifest_path.write_text("\n".join(lines) + "\n")
        out = tmp_path / "results"
        rc = main([
            "run", "--manifest", str(manifest_path), "--out", str(out),
            "--models", "gnm", "--samples", "2", "--seed", "3", "--resamples", "50",
        ])
        assert rc == 0
        assert (out / "fits.csv").exists()
        rc = main(["plot-data", "--results", str(out)])
        assert rc == 0
        assert any((out / "plot_data").glob("scatter_*.csv"))

    def test_run_exit_code_on_failure(self, small_corpus, tmp_path):
        manifest, base = small_corpus
        manifest_path = base / "manifest.csv"
        manifest_path.write_text(
            "id,path,domain\nok,net0.txt,social\nmissing,gone.txt,social\n"
        )
        rc = main([
            "run", "--manifest", str(manifest_path), "--out", str(tmp_path / "r"),
            "--samples", "2", "--resamples", "50",
        ])
        assert rc == 1
        failures = (tmp_path / "r" / "failures.csv").read_text()
        assert "missing" in failures

    def test_fetch_corpus_command(self, tmp_path, capsys):
        archive, checksums = make_archive(tmp_path)
        rc = main([
            "fetch-corpus", "--source", str(archive), "--checksums", str(checksums),
            "--dest", str(tmp_path / "dest"),
        ])
        assert rc == 0
        printed = capsys.readouterr().out.strip()
        assert printed.endswith("manifest.csv")
