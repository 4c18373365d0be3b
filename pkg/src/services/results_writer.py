"""
Result file writer.
Follows SRP - Single responsibility for the on-disk format of a run.

Every CSV starts with a '# config_hash: <sha256>' line, every JSON document
carries a 'config_hash' key, and floats are written with 17 significant
digits so identical configurations give byte-identical files.
"""
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import humanize

from ..dto.result_models import ConvergeResult, SolveResult, SymbolResult, VerifyResult


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, '.17g')
    if value is None:
        return ""
    return str(value)


def encode_json(value: Any, indent: int = 2, level: int = 0) -> str:
    """JSON text with sorted keys; floats as in the CSVs, non-finite floats as null"""
    if isinstance(value, float):
        return format_value(value) if math.isfinite(value) else "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        pad = " " * indent * (level + 1)
        items = [f"{pad}{json.dumps(str(k))}: {encode_json(v, indent, level + 1)}"
                 for k, v in sorted(value.items())]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent * level + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        pad = " " * indent * (level + 1)
        items = [pad + encode_json(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + " " * indent * level + "]"
    return json.dumps(value)


class ResultsWriter:
    """Writes the files of one run into an output directory"""

    def __init__(self, directory: Path, config_hash: str, formats: Sequence[str] = ("csv", "json")):
        self.logger = logging.getLogger(__name__)
        self.directory = Path(directory)
        self.config_hash = config_hash
        self.formats = set(formats)
        self.written: List[Path] = []

    def _path(self, name: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    def _log_written(self, path: Path) -> None:
        self.written.append(path)
        self.logger.info(f"Wrote {path} ({humanize.naturalsize(path.stat().st_size)})")

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        if "csv" not in self.formats:
            return
        path = self._path(name)
        with path.open('w', encoding='utf-8', newline='') as f:
            f.write(f"# config_hash: {self.config_hash}\n")
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
        self._log_written(path)

    def write_json(self, name: str, payload: dict) -> None:
        if "json" not in self.formats:
            return
        path = self._path(name)
        document = {"config_hash": self.config_hash, **payload}
        with path.open('w', encoding='utf-8') as f:
            f.write(encode_json(document))
            f.write("\n")
        self._log_written(path)

    def write_solve(self, result: SolveResult) -> None:
        self.write_csv("density.csv", ["panel", "mid_x", "mid_y", "G"], result.density_rows)
        self.write_csv("solution.csv", ["x", "y", "u1", "u2", "u"],
                       [(s.x, s.y, s.u1, s.u2, s.u) for s in result.solution])
        self.write_json("summary.json", result.summary.model_dump(mode='json'))

    def write_verify(self, result: VerifyResult) -> None:
        residuals = [
            {"point": list(e.point), "level": e.level, **e.report.model_dump(mode='json')}
            for e in result.residuals
        ]
        payload = {"residuals": residuals}
        if result.far_field is not None:
            payload["far_field_violations"] = [list(v) for v in result.far_field.violations]
            self.write_csv("far_field.csv", ["radius", "dir_x", "dir_y", "value", "scaled"],
                           [(r.radius, r.direction[0], r.direction[1], r.value, r.scaled)
                            for r in result.far_field.rows])
        self.write_json("residuals.json", payload)

    def write_converge(self, result: ConvergeResult) -> None:
        self.write_csv("convergence.csv", ["N", "error", "ratio", "min_eigenvalue", "max_eigenvalue"],
                       [(r.n_panels, r.error, r.ratio, r.min_eigenvalue, r.max_eigenvalue) for r in result.rows])

    def write_symbol(self, result: SymbolResult) -> None:
        self.write_csv("symbol.csv", ["r", "symbol", "bound_ratio"],
                       [(s.r, s.symbol, s.bound_ratio) for s in result.samples])
