"""On-disk run artifacts: JSON summaries and CSV series."""
import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from ..schemas import RunReport

SERIES_HEADER = "t,energy,gap,stress_c0,stress_c1,rho"
REPORT_FILE = "report.json"


class ArtifactRepository:
    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)

    def _path(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def write_json(self, name: str, payload: BaseModel | dict) -> Path:
        data = payload.model_dump() if isinstance(payload, BaseModel) else payload
        path = self._path(name)
        path.write_text(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        return path

    def read_json(self, name: str) -> dict:
        path = self.output_dir / name
        if not path.exists():
            raise FileNotFoundError(f"No {name} in {self.output_dir}")
        return json.loads(path.read_text(encoding="utf-8"))

    def write_series(self, name: str, rows: list[tuple[float, ...]]) -> Path:
        """CSV with SERIES_HEADER, every value as %.12e."""
        path = self._path(name)
        table = np.asarray(rows, dtype=float).reshape((-1, len(SERIES_HEADER.split(","))))
        np.savetxt(path, table, fmt="%.12e", delimiter=",", header=SERIES_HEADER, comments="")
        return path

    def read_series(self, name: str) -> np.ndarray:
        return np.loadtxt(self.output_dir / name, delimiter=",", skiprows=1, ndmin=2)

    def write_report(self, report: RunReport) -> Path:
        return self.write_json(REPORT_FILE, report)

    def read_report(self) -> RunReport:
        return RunReport.model_validate(self.read_json(REPORT_FILE))
