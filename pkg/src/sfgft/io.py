"""File codecs: dense CSV for matrices and vectors, JSON for metadata.

Floats are rendered with repr (shortest round-tripping form), so every
write -> read -> write cycle is byte identical. Infinity is written as the
string "inf" in JSON payloads; CSV cells use the bare token inf. All
writes go through a temp file plus rename and are therefore atomic.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import SamplingSet, VariationOperator
from .errors import MatrixFormatError, ValidationError
from .experiment import ExperimentArtifacts, ResultTable
from .sampling import Partition


def format_float(x: float) -> str:
    return repr(float(x))


def _parse_float(token: str, path, line_no: int) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise MatrixFormatError(
            f"{path}: line {line_no}: could not parse {token!r} as a number"
        ) from exc


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write text via a sibling temp file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sanitize_json(value):
    """Replace non-finite floats with string sentinels JSON can carry."""
    if isinstance(value, dict):
        return {k: sanitize_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize_json(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_json(path: str | Path, payload) -> None:
    text = json.dumps(sanitize_json(payload), indent=2, sort_keys=True) + "\n"
    atomic_write_text(path, text)


def read_json(path: str | Path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON: {exc}") from exc


def matrix_to_csv(matrix: np.ndarray) -> str:
    return "\n".join(",".join(format_float(x) for x in row) for row in matrix) + "\n"


def write_matrix_csv(path: str | Path, matrix: np.ndarray, sidecar: bool = True) -> None:
    """Write a dense matrix as headerless CSV plus a JSON sidecar."""
    matrix = np.asarray(matrix, dtype=float)
    atomic_write_text(path, matrix_to_csv(matrix))
    if sidecar:
        n = matrix.shape[0]
        symmetric = matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1] and bool(
            np.array_equal(matrix, matrix.T)
        )
        write_json(
            str(path) + ".json",
            {"n": n, "format": "dense-csv", "symmetric": symmetric},
        )


def read_matrix_csv(path: str | Path) -> np.ndarray:
    """Parse a headerless dense CSV matrix, with line-numbered errors."""
    rows: list[list[float]] = []
    try:
        with open(path) as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    width = None
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MatrixFormatError(
                f"{path}: line {line_no}: expected {width} columns, found {len(cells)}"
            )
        rows.append([_parse_float(cell.strip(), path, line_no) for cell in cells])
    if not rows:
        raise MatrixFormatError(f"{path}: no numeric rows found")
    sidecar_path = Path(str(path) + ".json")
    if sidecar_path.exists():
        meta = read_json(sidecar_path)
        if meta.get("n") not in (None, len(rows)):
            raise MatrixFormatError(
                f"{path}: sidecar declares n={meta.get('n')} but file has {len(rows)} rows"
            )
    return np.asarray(rows, dtype=float)


def vector_to_csv(vector: np.ndarray) -> str:
    return "\n".join(format_float(x) for x in vector) + "\n"


def write_vector_csv(path: str | Path, vector: np.ndarray) -> None:
    atomic_write_text(path, vector_to_csv(np.asarray(vector, dtype=float).ravel()))


def read_vector_csv(path: str | Path) -> np.ndarray:
    matrix = read_matrix_csv(path)
    if matrix.shape[1] != 1:
        raise MatrixFormatError(
            f"{path}: expected a single-column vector, found {matrix.shape[1]} columns"
        )
    return matrix[:, 0]


def read_variation_operator(path: str | Path, ridge: float | None = None) -> VariationOperator:
    """Read an operator matrix, optionally applying a ridge."""
    matrix = read_matrix_csv(path)
    if matrix.shape[0] != matrix.shape[1]:
        raise MatrixFormatError(
            f"{path}: operator matrix must be square, got {matrix.shape}"
        )
    op = VariationOperator(matrix)
    if ridge is not None:
        op = op.with_ridge(ridge)
    return op


def write_sampling_set(path: str | Path, s: SamplingSet) -> None:
    write_json(path, list(s.indices))


def read_sampling_set(path: str | Path, n: int) -> SamplingSet:
    data = read_json(path)
    if not isinstance(data, list) or not all(isinstance(i, int) for i in data):
        raise MatrixFormatError(f"{path}: expected a JSON array of integer vertex ids")
    return SamplingSet(n, tuple(data))


def partition_to_dict(partition: Partition) -> dict:
    return {
        "p": partition.p,
        "subsets": [list(s.indices) for s in partition.subsets],
        "provenance": partition.provenance,
    }


def write_partition(path: str | Path, partition: Partition) -> None:
    write_json(path, partition_to_dict(partition))


def read_partition(path: str | Path, n: int) -> Partition:
    data = read_json(path)
    if not isinstance(data, dict) or "subsets" not in data:
        raise MatrixFormatError(f"{path}: expected a partition object with 'subsets'")
    subsets = tuple(SamplingSet(n, tuple(ids)) for ids in data["subsets"])
    if data.get("p") not in (None, len(subsets)):
        raise MatrixFormatError(
            f"{path}: declared p={data.get('p')} but found {len(subsets)} subsets"
        )
    return Partition(subsets, dict(data.get("provenance", {})))


def result_table_to_csv(table: ResultTable) -> str:
    lines = ["sigma,p,partitioner,reconstructor,err,snr_db"]
    for row in table.rows:
        lines.append(
            f"{format_float(row.sigma)},{row.p},{row.partitioner},"
            f"{row.reconstructor},{format_float(row.err)},{format_float(row.snr_db)}"
        )
    return "\n".join(lines) + "\n"


def write_experiment_artifacts(artifacts: ExperimentArtifacts, out_dir: str | Path) -> list[Path]:
    """Write the full artifact set for one experiment run.

    Produces table1.csv, bandwidth_curve.csv, frequency_curves.csv, one
    partition JSON per (sigma, p) pair for the greedy partitioner, a
    per-seed random-baseline detail CSV, and metadata.json. Returns the
    written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    path = out / "table1.csv"
    atomic_write_text(path, result_table_to_csv(artifacts.table))
    written.append(path)

    lines = ["sigma,bandwidth,err"]
    for sigma, curve in artifacts.bandwidth_curves:
        for k, err in zip(curve.bandwidths, curve.errors):
            lines.append(f"{format_float(sigma)},{k},{format_float(err)}")
    path = out / "bandwidth_curve.csv"
    atomic_write_text(path, "\n".join(lines) + "\n")
    written.append(path)

    lines = ["sigma,step,exact_lambda,approx_sigma_min"]
    for sigma, curves in artifacts.frequency_curves:
        for step, exact, approx in zip(curves.steps, curves.exact, curves.approx):
            lines.append(
                f"{format_float(sigma)},{step},{format_float(exact)},{format_float(approx)}"
            )
    path = out / "frequency_curves.csv"
    atomic_write_text(path, "\n".join(lines) + "\n")
    written.append(path)

    single_sigma = len({sigma for sigma, _, _ in artifacts.partitions}) == 1
    for sigma, p, partition in artifacts.partitions:
        name = f"partition_{p}.json" if single_sigma else f"partition_p{p}_sigma{sigma:g}.json"
        path = out / name
        write_partition(path, partition)
        written.append(path)

    lines = ["sigma,p,seed,reconstructor,err"]
    for sigma, p, seed, recon, err in artifacts.random_detail:
        lines.append(f"{format_float(sigma)},{p},{seed},{recon},{format_float(err)}")
    path = out / "random_baseline_detail.csv"
    atomic_write_text(path, "\n".join(lines) + "\n")
    written.append(path)

    path = out / "metadata.json"
    write_json(path, artifacts.table.metadata)
    written.append(path)
    return written
