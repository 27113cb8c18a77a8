import numpy as np
import pytest

from qglab.core.errors import SnapshotFormatError
from qglab.repositories import ArtifactRepository, SnapshotRepository
from qglab.repositories.artifacts import SERIES_HEADER
from qglab.schemas import InvariantVerdict, RunReport
from qglab.services.spectral import GridSpec, SpectralField


def test_series_csv_layout(tmp_path):
    repo = ArtifactRepository(tmp_path / "run")
    path = repo.write_series("stage0.csv", [(0.0, 1.0, 0.5, 1e-3, 2e-3, 0.25), (0.1, 1.0, 0.5, 1e-3, 2e-3, 0.25)])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == SERIES_HEADER
    assert lines[1].split(",")[1] == "1.000000000000e+00"
    table = repo.read_series("stage0.csv")
    assert table.shape == (2, 6)
    assert table[1, 0] == pytest.approx(0.1)


def test_report_is_stored_without_timings(tmp_path):
    repo = ArtifactRepository(tmp_path)
    verdict = InvariantVerdict(name="stage.energy_window", assumption="energy", passed=True, value=0.0, bound=0.1, stage=0)
    report = RunReport(command="run-stage", seed=3, mode="qg3d", passed=True, ledger=[verdict], timings={"stage-0": 1.5})
    repo.write_report(report)
    assert "timings" not in repo.read_json("report.json")
    restored = repo.read_report()
    assert restored.ledger[0].stage == 0
    assert restored.failures() == []


def test_missing_json_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        ArtifactRepository(tmp_path).read_json("report.json")


def test_snapshot_restores_coefficients(tmp_path, rng):
    grid = GridSpec(8, 8, 4, "slicewise")
    field = SpectralField.from_samples(grid, rng.standard_normal((2,) + grid.shape))
    repo = SnapshotRepository(tmp_path)
    path = repo.save("grad_psi_q1", field)
    assert path.read_bytes()[:4] == b"QGCF"
    assert path.stat().st_size == 4 + 5 * 4 + 2 * grid.size * 8

    loaded = repo.load("grad_psi_q1")
    assert loaded.shape == (2,)
    assert loaded.grid.shape == grid.shape
    np.testing.assert_allclose(loaded.coeffs, field.coeffs, atol=1e-6)


def test_snapshot_rejects_corrupt_files(tmp_path, rng):
    grid = GridSpec(8, 8, 4, "slicewise")
    repo = SnapshotRepository(tmp_path)
    path = repo.save("stress_q1", SpectralField.from_samples(grid, rng.standard_normal(grid.shape)))
    data = path.read_bytes()

    path.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(SnapshotFormatError, match="magic"):
        repo.load("stress_q1")

    path.write_bytes(data[:-8])
    with pytest.raises(SnapshotFormatError, match="coefficient bytes"):
        repo.load("stress_q1")

    path.write_bytes(data)
    with pytest.raises(SnapshotFormatError, match="shape"):
        repo.load("stress_q1", shape=(3,))
