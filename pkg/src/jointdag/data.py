"""Grouped observation matrices and CSV ingestion."""

import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import DataIngestionError, InvalidArgumentError

__all__ = ["GroupedDataset", "load_dataset"]


@dataclass
class GroupedDataset:
    """K groups of observation matrices over a shared variable set.

    Parameters
    ----------
    groups : tuple of ndarray
        One matrix per group, each of shape (n_k, d).  Row counts may
        differ across groups; the number of columns may not.
    variable_names : tuple of str
        Column labels, shared by every group in the same order.
    group_names : tuple of str
        One label per group.
    centered, scaled : bool
        Record which ingestion transforms were applied, so downstream
        resampling (permutation splits) can apply the same treatment.
    """

    groups: tuple
    variable_names: tuple
    group_names: tuple
    centered: bool = False
    scaled: bool = False

    def __post_init__(self):
        groups = tuple(np.asarray(X, dtype=np.float64) for X in self.groups)
        if len(groups) == 0:
            raise InvalidArgumentError("dataset must contain at least one group")
        d = groups[0].shape[1] if groups[0].ndim == 2 else -1
        for k, X in enumerate(groups):
            if X.ndim != 2:
                raise InvalidArgumentError(
                    f"group {k} must be a 2-d array, got ndim={X.ndim}"
                )
            if X.shape[0] < 1:
                raise InvalidArgumentError(f"group {k} has no rows")
            if X.shape[1] != d:
                raise InvalidArgumentError(
                    f"group {k} has {X.shape[1]} columns, expected {d}"
                )
            if not np.all(np.isfinite(X)):
                raise InvalidArgumentError(f"group {k} contains non-finite values")
        object.__setattr__(self, "groups", groups)
        names = tuple(str(v) for v in self.variable_names)
        if len(names) != d:
            raise InvalidArgumentError(
                f"expected {d} variable names, got {len(names)}"
            )
        object.__setattr__(self, "variable_names", names)
        gnames = tuple(str(g) for g in self.group_names)
        if len(gnames) != len(groups):
            raise InvalidArgumentError(
                f"expected {len(groups)} group names, got {len(gnames)}"
            )
        object.__setattr__(self, "group_names", gnames)

    @property
    def n_groups(self):
        return len(self.groups)

    @property
    def n_variables(self):
        return self.groups[0].shape[1]

    @property
    def n_rows(self):
        return tuple(X.shape[0] for X in self.groups)

    def grams(self):
        """Per-group scaled Gram matrices ``X_k.T @ X_k / n_k``.

        Cached after the first call; the solver's hot loop evaluates the
        squared loss through these so its cost does not grow with the row
        count.
        """
        cached = getattr(self, "_grams", None)
        if cached is None:
            cached = tuple(X.T @ X / X.shape[0] for X in self.groups)
            object.__setattr__(self, "_grams", cached)
        return cached

    @classmethod
    def from_arrays(cls, arrays, variable_names=None, group_names=None,
                    center=True, scale=False):
        """Build a dataset from in-memory arrays, applying ingestion transforms.

        Each column of each group is mean-centered when ``center`` is true
        and divided by its population standard deviation when ``scale`` is
        true (columns with zero variance are left unscaled).
        """
        arrays = [np.array(X, dtype=np.float64, copy=True) for X in arrays]
        if not arrays:
            raise InvalidArgumentError("dataset must contain at least one group")
        d = arrays[0].shape[1] if arrays[0].ndim == 2 else 0
        if variable_names is None:
            variable_names = tuple(f"x{j}" for j in range(d))
        if group_names is None:
            group_names = tuple(f"group{k + 1}" for k in range(len(arrays)))
        transformed = []
        for X in arrays:
            # Empty or mis-shaped groups skip the transforms; construction
            # below rejects them with a proper error.
            if X.ndim != 2 or X.shape[0] == 0:
                transformed.append(X)
                continue
            if center:
                X = X - X.mean(axis=0, keepdims=True)
            if scale:
                sd = X.std(axis=0, keepdims=True)
                sd[sd == 0.0] = 1.0
                X = X / sd
            transformed.append(X)
        return cls(tuple(transformed), tuple(variable_names), tuple(group_names),
                   centered=center, scaled=scale)

    def subset_rows(self, row_indices):
        """Dataset restricted to the given rows of each group.

        ``row_indices`` is one index array per group.  No re-centering or
        re-scaling is applied; the ingestion transforms were already done.
        """
        if len(row_indices) != self.n_groups:
            raise InvalidArgumentError(
                "need one row-index array per group"
            )
        subs = []
        for X, idx in zip(self.groups, row_indices):
            idx = np.asarray(idx, dtype=np.intp)
            subs.append(X[idx])
        return GroupedDataset(tuple(subs), self.variable_names, self.group_names,
                              centered=self.centered, scaled=self.scaled)


def _parse_csv(path):
    """Read one CSV file, returning (header_or_None, rows as float ndarray)."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        raw = [row for row in reader if row]
    if not raw:
        raise DataIngestionError("file is empty", path=path)
    first = raw[0]

    def _all_numeric(cells):
        for cell in cells:
            try:
                float(cell)
            except ValueError:
                return False
        return True

    header = None
    data_rows = raw
    if not _all_numeric(first):
        header = [cell.strip() for cell in first]
        data_rows = raw[1:]
        if not data_rows:
            raise DataIngestionError("file has a header but no data rows", path=path)
    width = len(data_rows[0])
    offset = 2 if header is not None else 1
    values = np.empty((len(data_rows), width), dtype=np.float64)
    for i, row in enumerate(data_rows):
        if len(row) != width:
            raise DataIngestionError(
                f"expected {width} columns, found {len(row)}",
                path=path, row=i + offset,
            )
        for j, cell in enumerate(row):
            colname = header[j] if header is not None else f"column {j + 1}"
            try:
                v = float(cell)
            except ValueError:
                raise DataIngestionError(
                    f"non-numeric value {cell!r}", path=path,
                    row=i + offset, column=colname,
                ) from None
            if not np.isfinite(v):
                raise DataIngestionError(
                    f"non-finite value {cell!r}", path=path,
                    row=i + offset, column=colname,
                )
            values[i, j] = v
    return header, values


def load_dataset(paths, group_names=None, center=True, scale=False):
    """Load one CSV file per group into a :class:`GroupedDataset`.

    Each file holds an n_k-by-d numeric matrix with an optional single
    header row of variable names.  All files must agree on the number of
    columns and, when headers are present, on the header names in the same
    order; columns are never silently reordered.

    Parameters
    ----------
    paths : sequence of str
        One CSV path per group.
    group_names : sequence of str, optional
        Defaults to the file stems.
    center : bool
        Mean-center each column of each group (default: true).
    scale : bool
        Additionally divide each column by its standard deviation.

    Raises
    ------
    DataIngestionError
        On unreadable files, ragged rows, non-numeric cells (with row and
        column location) or inconsistent shapes/headers across files.
    """
    paths = list(paths)
    if not paths:
        raise InvalidArgumentError("need at least one data file")
    headers = []
    matrices = []
    for path in paths:
        try:
            header, values = _parse_csv(path)
        except OSError as exc:
            raise DataIngestionError(f"cannot read file: {exc}", path=path) from exc
        headers.append(header)
        matrices.append(values)
    d = matrices[0].shape[1]
    for path, X in zip(paths, matrices):
        if X.shape[1] != d:
            raise DataIngestionError(
                f"file has {X.shape[1]} columns but the first file has {d}",
                path=path,
            )
    named = [h for h in headers if h is not None]
    if named:
        reference = named[0]
        for path, h in zip(paths, headers):
            if h is not None and h != reference:
                raise DataIngestionError(
                    "header does not match the first file's header "
                    f"({h!r} vs {reference!r})", path=path,
                )
        variable_names = tuple(reference)
    else:
        variable_names = tuple(f"x{j}" for j in range(d))
    if group_names is None:
        import os
        group_names = tuple(
            os.path.splitext(os.path.basename(p))[0] for p in paths
        )
    return GroupedDataset.from_arrays(
        matrices, variable_names=variable_names, group_names=group_names,
        center=center, scale=scale,
    )
