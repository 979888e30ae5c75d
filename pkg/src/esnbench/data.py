"""Loading, validation, standardization, and splitting of the voice-feature table.

The input is the public UCI Parkinson's voice file: a comma-separated table
with a `name` id column, 22 acoustic feature columns, and a binary `status`
column (0 = healthy, 1 = PD). Column order in the file is arbitrary; matching
is by header name.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataParseError, LabelError, SchemaError

#: The 22 feature columns of the UCI voice table, in their canonical order.
FEATURE_COLUMNS = (
    "MDVP:Fo(Hz)", "MDVP:Fhi(Hz)", "MDVP:Flo(Hz)",
    "MDVP:Jitter(%)", "MDVP:Jitter(Abs)", "MDVP:RAP", "MDVP:PPQ", "Jitter:DDP",
    "MDVP:Shimmer", "MDVP:Shimmer(dB)", "Shimmer:APQ3", "Shimmer:APQ5",
    "MDVP:APQ", "Shimmer:DDA", "NHR", "HNR",
    "RPDE", "DFA", "spread1", "spread2", "D2", "PPE",
)

ID_COLUMN = "name"
STATUS_COLUMN = "status"


@dataclass(frozen=True)
class FeatureTable:
    """Dense samples-by-features matrix with column names and binary labels.

    Arrays are treated as immutable after construction; operations return new
    tables rather than mutating.
    """

    values: np.ndarray          # (n_rows, n_features) float64
    feature_names: tuple[str, ...]
    labels: np.ndarray          # (n_rows,) int64, each 0 or 1
    row_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        n, d = values.shape
        if len(self.feature_names) != d:
            raise ValueError(f"{len(self.feature_names)} names for {d} columns")
        if labels.shape != (n,) or len(self.row_ids) != n:
            raise ValueError("row count mismatch between values, labels, row_ids")
        if not np.isfinite(values).all():
            raise ValueError("values contain non-finite entries")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must all be 0 or 1")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(healthy, PD) row counts."""
        ones = int(self.labels.sum())
        return self.n_rows - ones, ones

    def take_rows(self, indices) -> "FeatureTable":
        idx = np.asarray(indices, dtype=np.intp)
        return FeatureTable(
            values=self.values[idx],
            feature_names=self.feature_names,
            labels=self.labels[idx],
            row_ids=tuple(self.row_ids[i] for i in idx),
        )

    def take_columns(self, indices) -> "FeatureTable":
        idx = np.asarray(indices, dtype=np.intp)
        return FeatureTable(
            values=self.values[:, idx],
            feature_names=tuple(self.feature_names[i] for i in idx),
            labels=self.labels,
            row_ids=self.row_ids,
        )


@dataclass(frozen=True)
class Scaler:
    """Per-column standardization statistics fit on a subset of rows.

    Columns that were constant over the fitting rows get std 1 so the
    transform stays finite; `constant` flags them.
    """

    means: np.ndarray
    stds: np.ndarray
    constant: np.ndarray    # bool mask

    def __post_init__(self):
        if not (self.means.shape == self.stds.shape == self.constant.shape):
            raise ValueError("scaler fields must share one shape")
        if not (self.stds > 0).all():
            raise ValueError("stds must be positive after substitution")


@dataclass(frozen=True)
class TrialSplit:
    """Disjoint train/test row indices for one randomized trial."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int

    def __post_init__(self):
        train = set(self.train_indices.tolist())
        test = set(self.test_indices.tolist())
        if train & test:
            raise ValueError("train and test indices overlap")


def load_csv(path) -> FeatureTable:
    """Read the UCI-format voice table.

    Requires a header with exactly the `name`, `status`, and 22 feature
    columns (any order); returns features in header order with `name` and
    `status` excluded from the value matrix. Row order is preserved.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]

        required = set(FEATURE_COLUMNS) | {ID_COLUMN, STATUS_COLUMN}
        missing = required - set(header)
        if missing:
            raise SchemaError(f"{path}: missing required column(s): {sorted(missing)}")
        extra = [h for h in header if h not in required]
        if extra:
            raise SchemaError(f"{path}: unexpected column(s): {extra}")
        if len(header) != len(required):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise SchemaError(f"{path}: duplicated column(s): {dupes}")

        id_pos = header.index(ID_COLUMN)
        status_pos = header.index(STATUS_COLUMN)
        feature_names = tuple(h for h in header if h not in (ID_COLUMN, STATUS_COLUMN))
        feature_pos = [header.index(name) for name in feature_names]

        rows, labels, ids = [], [], []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DataParseError(
                    f"{path}:{line_no}: expected {len(header)} cells, got {len(cells)}"
                )
            ids.append(cells[id_pos].strip())
            status_raw = cells[status_pos].strip()
            if status_raw not in ("0", "1"):
                raise LabelError(
                    f"{path}:{line_no}: status must be 0 or 1, got {status_raw!r}"
                )
            labels.append(int(status_raw))
            row = []
            for pos in feature_pos:
                cell = cells[pos].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise DataParseError(
                        f"{path}:{line_no}: column {header[pos]!r}: "
                        f"not a number: {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise DataParseError(
                        f"{path}:{line_no}: column {header[pos]!r}: non-finite value"
                    )
                row.append(value)
            rows.append(row)

    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return FeatureTable(
        values=np.array(rows, dtype=np.float64),
        feature_names=feature_names,
        labels=np.array(labels, dtype=np.int64),
        row_ids=tuple(ids),
    )


def write_csv(table: FeatureTable, path) -> None:
    """Emit the canonical CSV form; load_csv of the output reproduces `table`.

    Floats are written with repr (shortest round-trip form).
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([ID_COLUMN, *table.feature_names, STATUS_COLUMN])
        for i in range(table.n_rows):
            writer.writerow(
                [table.row_ids[i]]
                + [repr(float(v)) for v in table.values[i]]
                + [str(int(table.labels[i]))]
            )


def fit_scaler(table: FeatureTable, rows) -> Scaler:
    """Per-column mean/std (population, divisor N) over the given rows only."""
    idx = np.asarray(rows, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("cannot fit a scaler on an empty row list")
    if idx.min() < 0 or idx.max() >= table.n_rows:
        raise ValueError("row index out of bounds")
    sub = table.values[idx]
    means = sub.mean(axis=0)
    stds = sub.std(axis=0)          # ddof=0
    constant = stds == 0.0
    stds = np.where(constant, 1.0, stds)
    return Scaler(means=means, stds=stds, constant=constant)


def apply_scaler(scaler: Scaler, table: FeatureTable) -> FeatureTable:
    """Map every cell to (x - mean) / std; labels and ids unchanged."""
    if scaler.means.shape[0] != table.n_features:
        raise ValueError(
            f"scaler has {scaler.means.shape[0]} columns, table has {table.n_features}"
        )
    return FeatureTable(
        values=(table.values - scaler.means) / scaler.stds,
        feature_names=table.feature_names,
        labels=table.labels,
        row_ids=table.row_ids,
    )


def _stratified_test_counts(n_per_class: list[int], n_test: int) -> list[int]:
    """Allocate the test quota across classes by largest remainder.

    Each class keeps at least one row on both sides.
    """
    n_total = sum(n_per_class)
    exact = [n_test * n_c / n_total for n_c in n_per_class]
    counts = [math.floor(e) for e in exact]
    leftover = n_test - sum(counts)
    order = sorted(
        range(len(n_per_class)), key=lambda c: (-(exact[c] - counts[c]), c)
    )
    for c in order[:leftover]:
        counts[c] += 1
    # Repair degenerate allocations (a class with no test or no train rows) by
    # moving quota between classes, which preserves the total.
    for c, n_c in enumerate(n_per_class):
        while counts[c] < 1:
            donors = [d for d in range(len(counts)) if d != c and counts[d] > 1]
            if not donors:
                raise ValueError("test quota too small for a stratified split")
            donor = max(donors, key=lambda d: (counts[d] / n_per_class[d], d))
            counts[donor] -= 1
            counts[c] += 1
        while counts[c] > n_c - 1:
            takers = [
                d for d in range(len(counts))
                if d != c and counts[d] < n_per_class[d] - 1
            ]
            if not takers:
                raise ValueError("test quota too large for a stratified split")
            taker = min(takers, key=lambda d: (counts[d] / n_per_class[d], d))
            counts[c] -= 1
            counts[taker] += 1
    return counts


def split(table: FeatureTable, test_fraction: float, seed: int,
          stratified: bool = True) -> TrialSplit:
    """Randomized train/test partition, deterministic for a given seed.

    Test size is round(test_fraction * N) (banker's rounding). Stratified mode
    preserves class proportions on both sides up to rounding and guarantees
    both classes appear on both sides; plain mode is a uniform shuffle split.
    Index lists are returned sorted ascending.
    """
    n = table.n_rows
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    n_healthy, n_pd = table.class_counts()
    if min(n_healthy, n_pd) < 2:
        raise ValueError("need at least 2 rows of each class to split")
    n_test = round(test_fraction * n)
    if n_test == 0 or n_test == n:
        raise ValueError(
            f"test_fraction {test_fraction} leaves an empty side for {n} rows"
        )
    rng = np.random.default_rng(seed)
    if stratified:
        class_rows = [np.flatnonzero(table.labels == c) for c in (0, 1)]
        counts = _stratified_test_counts([r.size for r in class_rows], n_test)
        test_parts = []
        for rows_c, take in zip(class_rows, counts):
            perm = rng.permutation(rows_c)
            test_parts.append(perm[:take])
        test = np.sort(np.concatenate(test_parts))
    else:
        perm = rng.permutation(n)
        test = np.sort(perm[:n_test])
    mask = np.ones(n, dtype=bool)
    mask[test] = False
    train = np.flatnonzero(mask)
    return TrialSplit(train_indices=train, test_indices=test, seed=seed)
