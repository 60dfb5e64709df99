"""Reading data tables, the Ionosphere preprocessing, and writing results.

Matrices are written as comma-separated text with 17 significant digits,
which round-trips IEEE doubles exactly.
"""
import csv
import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyFile, ParseError, RaggedRows, SchemaMismatch, WrongK, ZeroColumn

logger = logging.getLogger(__name__)

FLOAT_FMT = "%.17g"
TRACE_FIELDS = ("i", "step", "alpha", "fit", "spread")


@dataclass
class Dataset:
    """Data matrix with one point per column, plus optional labels."""

    matrix: np.ndarray
    labels: list | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != self.matrix.shape[1]:
            raise ValueError(f"{len(self.labels)} labels for {self.matrix.shape[1]} points")


@dataclass
class RunManifest:
    config: dict
    seed: int
    k: int
    provenance: dict
    timings: dict
    digests: dict
    summary: dict
    argv: list | None = None
    cwd: str | None = None
    error: dict | None = None

    def write(self, path):
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path):
        return cls(**json.loads(Path(path).read_text()))


def load_delimited(path, delimiter=",", has_header=False, label_column=None,
                   orientation="rows"):
    """Read a numeric table, optionally with one text label column.

    ``orientation="rows"`` (the usual layout for published datasets) treats
    each row as a data point; the returned matrix is transposed so that
    points are columns. Row and column numbers in ``ParseError`` are 1-based
    positions in the file.
    """
    if orientation not in ("rows", "columns"):
        raise ValueError("orientation must be 'rows' or 'columns'")
    if label_column is not None and orientation != "rows":
        raise ValueError("label_column requires orientation='rows'")
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh, delimiter=delimiter), start=1)
                if any(cell.strip() for cell in r)]
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise EmptyFile(f"{path} contains no data rows")
    width = len(rows[0][1])
    for lineno, r in rows:
        if len(r) != width:
            raise RaggedRows(f"row {lineno} has {len(r)} cells, expected {width}")
    label_idx = None
    if label_column is not None:
        label_idx = label_column % width
    values, labels = [], []
    for lineno, r in rows:
        out = []
        for c, cell in enumerate(r):
            if c == label_idx:
                labels.append(cell.strip())
                continue
            try:
                out.append(float(cell))
            except ValueError:
                raise ParseError(lineno, c + 1, cell) from None
        values.append(out)
    table = np.array(values, dtype=float)
    matrix = table.T.copy() if orientation == "rows" else table
    prov = {"source": os.fspath(path), "orientation": orientation,
            "input_sha256": file_digest(path), "steps": []}
    return Dataset(matrix, labels if label_idx is not None else None, prov)


def _is_indicator(row):
    return bool(np.all((row == 0) | (row == 1)))


def preprocess_ionosphere(raw, check_schema=True):
    """Preprocess the UCI Ionosphere table.

    1. drop every point whose first attribute is 0 (all such points are
       class 'b');
    2. drop attributes 1 and 2, which are then constant (1 and 0);
    3. scale every point to unit 2-norm.

    With ``check_schema=False`` the input need not have the raw 34-attribute
    layout: step 1 only runs if the first attribute is a 0/1 indicator and
    step 2 drops whichever attributes are constant. Applied to its own
    output this changes nothing.
    """
    X = np.asarray(raw.matrix, dtype=float)
    labels = list(raw.labels) if raw.labels is not None else None
    if check_schema:
        if X.shape[0] != 34 or labels is None:
            raise SchemaMismatch(
                f"expected 34 attributes plus a label, got {X.shape[0]} attributes"
                + ("" if labels is not None else " and no labels"))
    steps = []

    if check_schema or (X.shape[0] and _is_indicator(X[0])):
        keep = X[0] != 0
    else:
        keep = np.ones(X.shape[1], dtype=bool)
    X = X[:, keep]
    if labels is not None:
        labels = [lab for lab, kk in zip(labels, keep) if kk]
    steps.append({"step": "drop_rows_first_attribute_zero",
                  "dropped": int((~keep).sum()), "retained": int(keep.sum())})

    if check_schema:
        if not (np.all(X[0] == 1) and np.all(X[1] == 0)):
            raise SchemaMismatch("attributes 1 and 2 are not constant 1 and 0 after row drop")
        drop = np.array([0, 1])
    else:
        drop = np.flatnonzero(np.ptp(X, axis=1) == 0) if X.shape[1] else np.array([], int)
    X = np.delete(X, drop, axis=0)
    steps.append({"step": "drop_constant_attributes",
                  "dropped": [int(d) + 1 for d in drop], "dimension": int(X.shape[0])})

    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise ZeroColumn(int(np.flatnonzero(norms == 0)[0]))
    X = X / norms
    steps.append({"step": "unit_normalize", "points": int(X.shape[1])})

    prov = dict(raw.provenance)
    prov["steps"] = list(prov.get("steps", [])) + steps
    for s in steps:
        logger.info("ionosphere preprocessing: %s", s)
    return Dataset(X, labels, prov)


def write_dataset(dataset, path):
    """Write points as rows, label (if any) in the last column."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for j in range(dataset.matrix.shape[1]):
            row = [FLOAT_FMT % v for v in dataset.matrix[:, j]]
            if dataset.labels is not None:
                row.append(dataset.labels[j])
            w.writerow(row)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_matrix(path, M):
    np.savetxt(path, np.atleast_2d(M), fmt=FLOAT_FMT, delimiter=",")


def read_matrix(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_FIELDS)
        for rec in trace:
            w.writerow([rec.i, rec.step, FLOAT_FMT % rec.alpha,
                        FLOAT_FMT % rec.fit, FLOAT_FMT % rec.spread])


def read_trace(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{"i": int(r["i"]), "step": r["step"], "alpha": float(r["alpha"]),
             "fit": float(r["fit"]), "spread": float(r["spread"])} for r in rows]


def config_dict(config):
    return {k: (float(v) if isinstance(v, float) else v) for k, v in asdict(config).items()}


def write_result(result, out_dir, labels=None, provenance=None, argv=None, timings=None):
    """Write ``W.csv``, ``H.csv``, ``trace.csv`` (and ``labels.csv``) plus
    ``manifest.json``; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "W.csv", result.W)
    write_matrix(out / "H.csv", result.H)
    write_trace(out / "trace.csv", result.trace)
    files = ["W.csv", "H.csv", "trace.csv"]
    if labels is not None:
        kept = [labels[j] for j in result.kept]
        (out / "labels.csv").write_text("".join(f"{lab}\n" for lab in kept))
        files.append("labels.csv")
    manifest = RunManifest(
        config=config_dict(result.config),
        seed=int(result.config.seed),
        k=int(result.k),
        provenance=dict(provenance or {}),
        timings=dict(timings or {}),
        digests={f: file_digest(out / f) for f in files},
        summary={"fit": result.fit, "fit0": result.fit0, "spread": result.spread,
                 "area": result.area, "points": int(result.H.shape[1]),
                 "kept_columns": [int(j) for j in result.kept]},
        argv=list(argv) if argv is not None else None,
    )
    manifest.write(out / "manifest.json")
    return manifest


def emit_scatter(H, labels, path):
    """Write one ``h1,h2,label`` record per data point (requires k = 2)."""
    H = np.atleast_2d(getattr(H, "H", H))
    if H.shape[0] != 2:
        raise WrongK(f"scatter output needs k = 2, got k = {H.shape[0]}")
    if labels is None:
        labels = [""] * H.shape[1]
    if len(labels) != H.shape[1]:
        raise ValueError(f"{len(labels)} labels for {H.shape[1]} points")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("h1", "h2", "label"))
        for j in range(H.shape[1]):
            w.writerow([FLOAT_FMT % H[0, j], FLOAT_FMT % H[1, j], labels[j]])
    return Path(path)


def read_labels(path):
    return Path(path).read_text().splitlines()
