"""Tabular defect data: CSV ingestion, version-based assembly, and deterministic splits.

A dataset is a table of per-module code metrics plus a binary defect label.
One column must be the lines-of-code measure (effort-aware metrics need it)
and one column the defect label.  Defect columns in the public CK datasets
hold post-release bug counts, so any value > 0 is read as "defective".
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, CsvParseError, SchemaError

LABEL_ALIASES = ("bug", "defects", "defect")
LOC_ALIASES = ("loc",)
# Identifier columns present in the public CK dumps; dropped on load
# (provenance is taken from the file name instead).
IDENTIFIER_COLUMNS = ("name", "version")

CLEAN = 0
DEFECTIVE = 1


@dataclass(frozen=True)
class AttributeSchema:
    """Column layout: all column names, plus which are lines-of-code and label."""

    names: tuple[str, ...]
    loc_index: int
    label_index: int

    def __post_init__(self):
        if not self.names or any(not n for n in self.names):
            raise SchemaError("attribute names must be non-empty")
        if len(set(self.names)) != len(self.names):
            raise SchemaError(f"attribute names must be unique: {self.names}")
        for idx in (self.loc_index, self.label_index):
            if not 0 <= idx < len(self.names):
                raise SchemaError(f"index {idx} out of range for {len(self.names)} columns")
        if self.loc_index == self.label_index:
            raise SchemaError("loc and label must be distinct columns")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(n for i, n in enumerate(self.names) if i != self.label_index)

    @property
    def loc_feature_index(self) -> int:
        """Position of the loc column inside a feature vector (label removed)."""
        return self.loc_index if self.loc_index < self.label_index else self.loc_index - 1


@dataclass(frozen=True)
class Instance:
    """One module: its metric vector, lines of code, and defect label."""

    features: np.ndarray
    loc: float
    label: int


class Dataset:
    """Immutable set of instances sharing one schema.

    Feature rows, labels and loc values are held as read-only numpy arrays;
    `instances` materialises the row objects when object-level access helps.
    """

    def __init__(self, schema: AttributeSchema, features: np.ndarray, labels: np.ndarray,
                 provenance: tuple[tuple[str, str], ...] = ()):
        features = np.asarray(features, dtype=float)
        if features.ndim != 2:
            if features.size == 0:
                features = features.reshape(0, len(schema.feature_names))
            else:
                features = features.reshape(len(labels), -1)
        labels = np.asarray(labels, dtype=int)
        if features.shape[0] != labels.shape[0]:
            raise SchemaError("features and labels disagree on instance count")
        if features.size and features.shape[1] != len(schema.feature_names):
            raise SchemaError(
                f"expected {len(schema.feature_names)} features, got {features.shape[1]}")
        if features.size and (features[:, schema.loc_feature_index] < 0).any():
            raise SchemaError("loc values must be non-negative")
        if labels.size and not np.isin(labels, (CLEAN, DEFECTIVE)).all():
            raise SchemaError("labels must be binary")
        features.setflags(write=False)
        labels.setflags(write=False)
        self.schema = schema
        self.features = features
        self.labels = labels
        self.provenance = tuple(provenance)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def locs(self) -> np.ndarray:
        if not len(self):
            return np.zeros(0)
        return self.features[:, self.schema.loc_feature_index]

    @property
    def n_defective(self) -> int:
        return int(self.labels.sum())

    @property
    def defect_ratio(self) -> float:
        return self.n_defective / len(self) if len(self) else 0.0

    @property
    def instances(self) -> list[Instance]:
        return [Instance(self.features[i], float(self.locs[i]), int(self.labels[i]))
                for i in range(len(self))]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.schema, self.features[indices].copy(), self.labels[indices].copy(),
                       self.provenance)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Dataset)
                and self.schema == other.schema
                and self.provenance == other.provenance
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels))


def _guess_provenance(path: Path) -> tuple[tuple[str, str], ...]:
    stem = path.stem
    project, dash, version = stem.rpartition("-")
    if dash and version and version[0].isdigit():
        return ((project, version),)
    return ((stem, ""),)


def _locate(header_lower: list[str], aliases, hint: str | None, role: str) -> int:
    if hint is not None:
        if hint.lower() not in header_lower:
            raise SchemaError(f"{role} column {hint!r} not present in header")
        return header_lower.index(hint.lower())
    for alias in aliases:
        if alias in header_lower:
            return header_lower.index(alias)
    raise SchemaError(f"no {role} column found (accepted names: {', '.join(aliases)})")


def load_csv(path, schema_hints: dict | None = None,
             provenance: tuple[tuple[str, str], ...] | None = None) -> Dataset:
    """Read one metrics CSV into a Dataset.

    `schema_hints` may override column detection: keys "loc" and "label" name
    the columns to use, "ignore" lists extra columns to drop.  Column matching
    is case-insensitive.  Rows with missing values are rejected outright.
    """
    path = Path(path)
    hints = schema_hints or {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: no header row") from None
        rows = list(reader)

    ignored = {c.lower() for c in hints.get("ignore", ())} | set(IDENTIFIER_COLUMNS)
    keep = [i for i, name in enumerate(header) if name.lower() not in ignored]
    names = tuple(header[i] for i in keep)
    header_lower = [n.lower() for n in names]
    if len(set(header_lower)) != len(header_lower):
        raise SchemaError(f"{path}: duplicate column names in header")

    loc_index = _locate(header_lower, LOC_ALIASES, hints.get("loc"), "loc")
    label_index = _locate(header_lower, LABEL_ALIASES, hints.get("label"), "label")
    schema = AttributeSchema(names, loc_index, label_index)

    features = np.zeros((len(rows), len(names) - 1))
    labels = np.zeros(len(rows), dtype=int)
    feature_cols = [i for i in range(len(names)) if i != label_index]
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise CsvParseError(f"{path}: row {r + 2} has {len(row)} cells, expected {len(header)}")
        cells = [row[i] for i in keep]
        values = []
        for c, cell in enumerate(cells):
            try:
                values.append(float(cell))
            except ValueError:
                raise CsvParseError(
                    f"{path}: non-numeric value {cell!r} at row {r + 2}, column {names[c]!r}"
                ) from None
        features[r] = [values[i] for i in feature_cols]
        labels[r] = DEFECTIVE if values[label_index] > 0 else CLEAN

    if provenance is None:
        provenance = _guess_provenance(path)
    return Dataset(schema, features, labels, provenance)


def write_csv(data: Dataset, path) -> None:
    """Write a Dataset back to CSV; load_csv on the result reproduces it."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.schema.names)
        feature_cols = iter(range(len(data.schema.feature_names)))
        col_source = [None if i == data.schema.label_index else next(feature_cols)
                      for i in range(len(data.schema.names))]
        for r in range(len(data)):
            row = [repr(int(data.labels[r])) if src is None else repr(float(data.features[r, src]))
                   for src in col_source]
            writer.writerow(row)


def merge(parts: list[Dataset]) -> Dataset:
    """Concatenate datasets that share one schema, keeping input order."""
    if not parts:
        raise ValueError("merge needs at least one dataset")
    first = parts[0]
    for other in parts[1:]:
        if other.schema != first.schema:
            for a, b in zip(first.schema.names, other.schema.names):
                if a != b:
                    raise SchemaError(f"schema mismatch: column {a!r} vs {b!r}")
            raise SchemaError("schema mismatch: differing loc/label positions or column count")
    features = np.concatenate([p.features for p in parts]) if parts else np.zeros((0, 0))
    labels = np.concatenate([p.labels for p in parts])
    provenance = tuple(tag for p in parts for tag in p.provenance)
    return Dataset(first.schema, features, labels, provenance)


def random_split(data: Dataset, fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint two-way split; the first part gets round(fraction * n) instances.

    Rounding is floor(fraction * n + 0.5).  Both parts keep the original
    instance order.  Identical seeds give identical splits.
    """
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    if not len(data):
        raise ValueError("cannot split an empty dataset")
    n = len(data)
    n_first = int(np.floor(fraction * n + 0.5))
    perm = np.random.default_rng(seed).permutation(n)
    first = np.sort(perm[:n_first])
    second = np.sort(perm[n_first:])
    return data.subset(first), data.subset(second)


def kfold(data: Dataset, k: int, seed: int) -> list[tuple[Dataset, Dataset]]:
    """k (train, holdout) pairs; every instance lands in exactly one holdout."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > len(data):
        raise ValueError(f"k={k} exceeds dataset size {len(data)}")
    perm = np.random.default_rng(seed).permutation(len(data))
    folds = np.array_split(perm, k)
    pairs = []
    for i, fold in enumerate(folds):
        rest = np.concatenate([f for j, f in enumerate(folds) if j != i])
        pairs.append((data.subset(np.sort(rest)), data.subset(np.sort(fold))))
    return pairs


@dataclass
class Manifest:
    """Maps project name to its ordered version CSVs (oldest first, newest = test)."""

    projects: dict[str, list[Path]] = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "Manifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from None
        if not isinstance(raw, dict) or not raw:
            raise ConfigError(f"{path}: manifest must be a non-empty object")
        projects = {}
        for project, files in raw.items():
            if not isinstance(files, list) or not all(isinstance(f, str) for f in files):
                raise ConfigError(f"{path}: project {project!r} must map to a list of files")
            projects[project] = [path.parent / f for f in files]
        return cls(projects)

    def assemble(self, schema_hints: dict | None = None) -> dict[str, tuple[Dataset, Dataset]]:
        """Per project: merge all older versions as training, newest as testing."""
        out = {}
        for project, files in self.projects.items():
            if len(files) < 2:
                raise ConfigError(
                    f"project {project!r} needs at least two versions (training + testing)")
            versions = [load_csv(f, schema_hints) for f in files]
            out[project] = (merge(versions[:-1]), versions[-1])
        return out
