"""Labeled feature warehouse, per-family range table and the countrow cache rule.

Both on-disk formats are UTF-8 tab-separated text with floats written via
``repr`` so that a load after a save reproduces every value bit for bit.

Warehouse file::

    family  f01 ... f18
    PRP4-like  138.40625  6.695  ...

Knowledge file::

    countrow  4000
    global  0  <mean>  <std>
    ...                           (one line per feature)
    family  feature_index  min  max  mean
    PRP4-like  0  ...
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyWarehouse, FormatError, StorageError
from .features import N_FEATURES, feature_vector
from .seq_core import ProteinSequence

WAREHOUSE_COLUMNS = ("family",) + tuple(f"f{j + 1:02d}" for j in range(N_FEATURES))


def _check_family(family: str):
    if not isinstance(family, str) or not family.strip():
        raise ValueError("family label must be a non-empty string")
    if any(ch in family for ch in "\t\r\n"):
        raise ValueError(f"family label {family!r} contains a tab or newline")


@dataclass(frozen=True)
class WarehouseRow:
    family: str
    features: np.ndarray

    def __post_init__(self):
        _check_family(self.family)
        feats = np.asarray(self.features, dtype=float)
        if feats.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} features, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)


class Warehouse:
    """Ordered rows of (family, 18 features), optionally bound to a file."""

    def __init__(self, rows=(), path=None):
        self.rows: list[WarehouseRow] = list(rows)
        self.path = Path(path) if path is not None else None
        self._matrix = None

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return f"Warehouse({len(self)} rows, {len(self.families())} families, path={self.path})"

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None or len(self._matrix) != len(self.rows):
            if self.rows:
                self._matrix = np.vstack([r.features for r in self.rows])
            else:
                self._matrix = np.empty((0, N_FEATURES))
            self._matrix.setflags(write=False)
        return self._matrix

    @property
    def labels(self) -> list[str]:
        return [r.family for r in self.rows]

    def families(self) -> list[str]:
        return sorted({r.family for r in self.rows})

    def append(self, family: str, features) -> WarehouseRow:
        row = WarehouseRow(family, features)
        self.rows.append(row)
        self._matrix = None
        return row


def _format_row(row: WarehouseRow) -> str:
    return "\t".join([row.family, *(repr(float(v)) for v in row.features)])


def save_warehouse(warehouse: Warehouse, path=None) -> Path:
    path = Path(path if path is not None else warehouse.path)
    lines = ["\t".join(WAREHOUSE_COLUMNS)] + [_format_row(r) for r in warehouse.rows]
    try:
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise StorageError(f"cannot write warehouse {path}: {exc}") from exc
    return path


def load_warehouse(path) -> Warehouse:
    """Read a warehouse file; a missing file yields an empty warehouse bound to ``path``."""
    path = Path(path)
    if not path.exists():
        return Warehouse(path=path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read warehouse {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return Warehouse(path=path)
    if tuple(lines[0].split("\t")) != WAREHOUSE_COLUMNS:
        raise FormatError(f"{path}: bad warehouse header")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(WAREHOUSE_COLUMNS):
            raise FormatError(f"{path}:{lineno}: expected {len(WAREHOUSE_COLUMNS)} columns, got {len(parts)}")
        try:
            rows.append(WarehouseRow(parts[0], np.array([float(v) for v in parts[1:]])))
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
    return Warehouse(rows, path=path)


def insert_row(warehouse: Warehouse, family: str, seq: ProteinSequence) -> Warehouse:
    """Append the feature vector of ``seq`` under ``family`` and persist if file-backed."""
    _check_family(family)
    feats = feature_vector(seq)
    new_file = warehouse.path is not None and (
        not warehouse.path.exists() or warehouse.path.stat().st_size == 0
    )
    row = warehouse.append(family, feats)
    if warehouse.path is not None:
        try:
            with open(warehouse.path, "a", encoding="utf-8") as fh:
                if new_file:
                    fh.write("\t".join(WAREHOUSE_COLUMNS) + "\n")
                fh.write(_format_row(row) + "\n")
        except OSError as exc:
            warehouse.rows.pop()
            warehouse._matrix = None
            raise StorageError(f"cannot append to {warehouse.path}: {exc}") from exc
    return warehouse


@dataclass(frozen=True)
class FamilyRange:
    family: str
    feature_index: int
    min: float
    max: float
    mean: float


@dataclass(eq=False)
class KnowledgeTable:
    families: tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray
    means: np.ndarray
    global_mean: np.ndarray
    global_std: np.ndarray
    row_count: int
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {f: i for i, f in enumerate(self.families)}

    def family_index(self, family: str) -> int:
        return self._index[family]

    def range_of(self, family: str, feature_index: int) -> FamilyRange:
        i = self._index[family]
        j = feature_index
        return FamilyRange(family, j, float(self.mins[i, j]), float(self.maxs[i, j]), float(self.means[i, j]))

    def ranges(self) -> list[FamilyRange]:
        return [self.range_of(f, j) for f in self.families for j in range(N_FEATURES)]

    def equals(self, other: "KnowledgeTable") -> bool:
        return (
            self.families == other.families
            and self.row_count == other.row_count
            and all(
                np.array_equal(getattr(self, a), getattr(other, a))
                for a in ("mins", "maxs", "means", "global_mean", "global_std")
            )
        )


def _order_free_mean(values: np.ndarray) -> np.ndarray:
    # sorting first makes the float sum independent of row order
    return np.sort(values, axis=0).mean(axis=0)


def build_knowledge(warehouse: Warehouse) -> KnowledgeTable:
    if len(warehouse) == 0:
        raise EmptyWarehouse("cannot build a knowledge table from an empty warehouse")
    X = warehouse.matrix
    labels = np.array(warehouse.labels, dtype=object)
    families = tuple(warehouse.families())
    mins = np.empty((len(families), N_FEATURES))
    maxs = np.empty_like(mins)
    means = np.empty_like(mins)
    for i, fam in enumerate(families):
        block = X[labels == fam]
        mins[i] = block.min(axis=0)
        maxs[i] = block.max(axis=0)
        means[i] = np.clip(_order_free_mean(block), mins[i], maxs[i])
    gmean = _order_free_mean(X)
    gstd = np.sqrt(_order_free_mean((np.sort(X, axis=0) - gmean) ** 2))
    return KnowledgeTable(families, mins, maxs, means, gmean, gstd, len(warehouse))


def ensure_knowledge(
    warehouse: Warehouse, cached: KnowledgeTable | None = None, force: bool = False
) -> tuple[KnowledgeTable, bool]:
    """Reuse ``cached`` when its countrow matches the warehouse size, else rebuild.

    Only the row count is compared: an edit that keeps the size unchanged is
    not detected. Pass ``force=True`` to rebuild unconditionally.
    """
    if cached is not None and not force and cached.row_count == len(warehouse):
        return cached, False
    return build_knowledge(warehouse), True


def standardize(features, kb: KnowledgeTable) -> np.ndarray:
    """z-score one vector or a stack of vectors; zero-variance columns map to 0."""
    f = np.asarray(features, dtype=float)
    std = kb.global_std
    safe = np.where(std > 0, std, 1.0)
    z = (f - kb.global_mean) / safe
    return np.where(std > 0, z, 0.0)


def save_knowledge(kb: KnowledgeTable, path) -> Path:
    path = Path(path)
    lines = [f"countrow\t{kb.row_count}"]
    lines += [
        f"global\t{j}\t{float(kb.global_mean[j])!r}\t{float(kb.global_std[j])!r}" for j in range(N_FEATURES)
    ]
    lines.append("family\tfeature_index\tmin\tmax\tmean")
    for r in kb.ranges():
        lines.append(f"{r.family}\t{r.feature_index}\t{r.min!r}\t{r.max!r}\t{r.mean!r}")
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write knowledge table {path}: {exc}") from exc
    return path


def load_knowledge(path) -> KnowledgeTable:
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except OSError as exc:
        raise StorageError(f"cannot read knowledge table {path}: {exc}") from exc
    try:
        key, count = lines[0].split("\t")
        if key != "countrow":
            raise FormatError(f"{path}: first line must be countrow")
        row_count = int(count)
        gmean = np.empty(N_FEATURES)
        gstd = np.empty(N_FEATURES)
        for j, line in enumerate(lines[1 : 1 + N_FEATURES]):
            tag, idx, m, s = line.split("\t")
            if tag != "global" or int(idx) != j:
                raise FormatError(f"{path}: malformed global line {line!r}")
            gmean[j], gstd[j] = float(m), float(s)
        if lines[1 + N_FEATURES] != "family\tfeature_index\tmin\tmax\tmean":
            raise FormatError(f"{path}: missing range header")
        recs: dict[str, dict[int, tuple[float, float, float]]] = {}
        for line in lines[2 + N_FEATURES :]:
            fam, idx, lo, hi, mu = line.split("\t")
            recs.setdefault(fam, {})[int(idx)] = (float(lo), float(hi), float(mu))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed knowledge table ({exc})") from exc
    families = tuple(sorted(recs))
    arr = np.empty((3, len(families), N_FEATURES))
    for i, fam in enumerate(families):
        if sorted(recs[fam]) != list(range(N_FEATURES)):
            raise FormatError(f"{path}: family {fam!r} lacks some of the {N_FEATURES} ranges")
        for j, vals in recs[fam].items():
            arr[:, i, j] = vals
    return KnowledgeTable(families, arr[0], arr[1], arr[2], gmean, gstd, row_count)
