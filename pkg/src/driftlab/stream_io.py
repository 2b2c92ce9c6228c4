"""Reading real benchmark streams and (de)serializing chunked streams.

Real streams come as ARFF (numeric and nominal attributes only) or CSV. Raw
class values are merged into two groups; whichever group is globally rarer
becomes label 1. Instances keep their file order and a trailing partial chunk
is dropped.

The chunked-stream CSV written by :func:`write_stream` starts with the header
line ``#driftlab,v1,chunk_size=<n>,features=<m>`` followed by one instance per
row with the label in the last column.
"""
from __future__ import annotations

import csv
import io
import logging
import os
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ParseError
from .streams import Chunk

log = logging.getLogger(__name__)

HEADER_PREFIX = "#driftlab"
FORMAT_VERSION = "v1"


@dataclass(frozen=True)
class DatasetSpec:
    """How to turn one file into a binary chunked stream.

    ``group`` lists the raw class values merged into one side; every other
    value forms the other side. ``classes`` optionally fixes the full raw
    label alphabet, so that unexpected values are reported.
    """

    path: str
    format: str = "arff"
    label_column: str | int = -1
    group: frozenset = frozenset()
    chunk_size: int = 2000
    classes: frozenset | None = None
    expected_ratio: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.format not in ("arff", "csv"):
            raise InvalidInputError(f"format must be 'arff' or 'csv', got {self.format!r}")
        if self.chunk_size < 1:
            raise InvalidInputError("chunk_size must be positive")
        object.__setattr__(self, "group", frozenset(_canon(v) for v in self.group))
        if not self.group:
            raise InvalidInputError("merge group must name at least one raw class")
        if self.classes is not None:
            classes = frozenset(_canon(v) for v in self.classes)
            object.__setattr__(self, "classes", classes)
            if not self.group < classes:
                raise InvalidInputError("merge group must be a proper subset of the class alphabet")


def covtype_spec(path, **kw):
    """covtypeNorm-1-2vsAll: cover types 1 and 2 against the other five."""
    return DatasetSpec(path, group=frozenset({"1", "2"}), classes=frozenset(map(str, range(1, 8))),
                       expected_ratio=0.25, name="covtype", **kw)


def poker_spec(path, **kw):
    """poker-lsn-1-2vsAll: the first two hand classes against the rest."""
    return DatasetSpec(path, group=frozenset({"1", "2"}), classes=frozenset(map(str, range(10))),
                       expected_ratio=0.10, name="poker", **kw)


def insects_spec(path, **kw):
    """2vsA_INSECTS: the second class against all the others."""
    return DatasetSpec(path, group=frozenset({"2"}), expected_ratio=0.23, name="insects", **kw)


@dataclass
class LoadedDataset:
    chunks: list[Chunk]
    imbalance_ratio: float
    n_features: int
    n_dropped: int
    positive_is_group: bool = True

    def __iter__(self):
        return iter(self.chunks)

    def __len__(self):
        return len(self.chunks)

    def __getitem__(self, i):
        return self.chunks[i]


def _canon(value) -> str:
    """Canonical text for a raw label: ``"1.0"`` and ``1`` both become ``"1"``."""
    text = str(value).strip().strip("'\"")
    try:
        f = float(text)
    except ValueError:
        return text
    if f.is_integer():
        return str(int(f))
    return repr(f)


_ATTR_RE = re.compile(r"@attribute\s+('(?:[^']|\\')*'|\"[^\"]*\"|\S+)\s+(.+)$", re.IGNORECASE)


def _split_row(line):
    return next(csv.reader([line], skipinitialspace=True, quotechar="'"))


def read_arff(path):
    """Parse a dense ARFF file.

    Returns ``(names, kinds, rows, line_numbers)`` where ``kinds`` holds
    ``None`` for numeric attributes and the list of declared values for
    nominal ones. Nominal values stay as text.
    """
    names, kinds = [], []
    rows, lines = [], []
    in_data = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if not in_data:
                low = line.lower()
                if low.startswith("@relation"):
                    continue
                if low.startswith("@attribute"):
                    m = _ATTR_RE.match(line)
                    if not m:
                        raise ParseError(f"malformed attribute declaration {line!r}", lineno)
                    name, kind = m.group(1).strip("'\""), m.group(2).strip()
                    if kind.startswith("{"):
                        if not kind.endswith("}"):
                            raise ParseError(f"unterminated nominal set for {name!r}", lineno)
                        values = [_canon(v) for v in _split_row(kind[1:-1]) if v.strip()]
                        kinds.append(values)
                    elif kind.lower() in ("numeric", "real", "integer"):
                        kinds.append(None)
                    else:
                        raise ParseError(f"unsupported attribute type {kind!r} for {name!r}", lineno)
                    names.append(name)
                    continue
                if low.startswith("@data"):
                    in_data = True
                    continue
                raise ParseError(f"unexpected header line {line!r}", lineno)
            if line.startswith("{"):
                raise ParseError("sparse ARFF rows are not supported", lineno)
            values = _split_row(line)
            if len(values) != len(names):
                raise ParseError(f"expected {len(names)} values, found {len(values)}", lineno)
            rows.append(values)
            lines.append(lineno)
    if not names:
        raise ParseError("no @attribute declarations found")
    return names, kinds, rows, lines


def read_csv_table(path):
    """Read a headed CSV into ``(names, rows, line_numbers)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            names = [n.strip() for n in next(reader)]
        except StopIteration:
            raise ParseError("empty CSV file", 1) from None
        rows, lines = [], []
        for row in reader:
            if not row:
                continue
            if len(row) != len(names):
                raise ParseError(f"expected {len(names)} values, found {len(row)}", reader.line_num)
            rows.append(row)
            lines.append(reader.line_num)
    return names, rows, lines


def _label_index(names, label_column):
    if isinstance(label_column, int):
        idx = label_column if label_column >= 0 else len(names) + label_column
        if not 0 <= idx < len(names):
            raise InvalidInputError(f"label column {label_column} out of range")
        return idx
    try:
        return names.index(label_column)
    except ValueError:
        raise InvalidInputError(f"no column named {label_column!r}") from None


def load_dataset(spec: DatasetSpec) -> LoadedDataset:
    """Read a labelled file into binary chunks of ``spec.chunk_size`` rows."""
    if spec.format == "arff":
        names, kinds, rows, lines = read_arff(spec.path)
    else:
        names, rows, lines = read_csv_table(spec.path)
        kinds = [None] * len(names)
    label_idx = _label_index(names, spec.label_column)
    feat_idx = [i for i in range(len(names)) if i != label_idx]
    codes = {i: {v: k for k, v in enumerate(kinds[i])} for i in feat_idx if kinds[i] is not None}
    label_alphabet = spec.classes
    if label_alphabet is None and kinds[label_idx] is not None:
        label_alphabet = frozenset(kinds[label_idx])

    X = np.empty((len(rows), len(feat_idx)))
    in_group = np.empty(len(rows), dtype=bool)
    for r, (row, lineno) in enumerate(zip(rows, lines)):
        for c, i in enumerate(feat_idx):
            text = row[i].strip().strip("'\"")
            if i in codes:
                try:
                    X[r, c] = codes[i][_canon(text)]
                except KeyError:
                    raise ParseError(f"undeclared nominal value {text!r} in {names[i]!r}", lineno) from None
            else:
                try:
                    X[r, c] = float(text)
                except ValueError:
                    raise ParseError(f"non-numeric value {text!r} in {names[i]!r}", lineno) from None
                if not np.isfinite(X[r, c]):
                    raise ParseError(f"non-finite value {text!r} in {names[i]!r}", lineno)
        label = _canon(row[label_idx])
        if label_alphabet is not None and label not in label_alphabet:
            raise ParseError(f"unknown class label {label!r}", lineno)
        in_group[r] = label in spec.group

    n = len(rows)
    if n == 0:
        raise ParseError("file contains no instances")
    group_frac = float(in_group.mean())
    y = (in_group if group_frac <= 0.5 else ~in_group).astype(np.int64)
    ratio = min(group_frac, 1.0 - group_frac)
    if spec.expected_ratio is not None and abs(ratio - spec.expected_ratio) > 0.02:
        log.warning("%s: minority ratio %.3f deviates from the expected %.2f",
                    spec.name or spec.path, ratio, spec.expected_ratio)
    n_chunks = n // spec.chunk_size
    chunks = [
        Chunk(X[i * spec.chunk_size:(i + 1) * spec.chunk_size],
              y[i * spec.chunk_size:(i + 1) * spec.chunk_size])
        for i in range(n_chunks)
    ]
    log.info("%s: %d chunks, %d features, minority ratio %.3f",
             spec.name or os.path.basename(spec.path), n_chunks, X.shape[1], ratio)
    return LoadedDataset(chunks, ratio, X.shape[1], n - n_chunks * spec.chunk_size,
                         group_frac <= 0.5)


def write_stream(chunks: Sequence[Chunk], path) -> None:
    """Write chunks to the chunked-stream CSV format (17 significant digits)."""
    chunks = list(chunks)
    chunk_size = len(chunks[0]) if chunks else 0
    n_features = chunks[0].X.shape[1] if chunks else 0
    for i, ch in enumerate(chunks):
        if len(ch) != chunk_size or ch.X.shape[1] != n_features:
            raise InvalidInputError(f"chunk {i} has shape {ch.X.shape}, expected ({chunk_size}, {n_features})")
    buf = io.StringIO()
    buf.write(f"{HEADER_PREFIX},{FORMAT_VERSION},chunk_size={chunk_size},features={n_features}\n")
    for ch in chunks:
        for row, label in zip(ch.X, ch.y):
            buf.write(",".join(format(v, ".17g") for v in row))
            buf.write(f",{int(label)}\n")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _parse_header(line):
    parts = line.strip().split(",")
    if len(parts) != 4 or parts[0] != HEADER_PREFIX or parts[1] != FORMAT_VERSION:
        raise ParseError(f"not a {HEADER_PREFIX} {FORMAT_VERSION} header: {line.strip()!r}", 1)
    fields = {}
    for part in parts[2:]:
        key, _, value = part.partition("=")
        try:
            fields[key] = int(value)
        except ValueError:
            raise ParseError(f"bad header field {part!r}", 1) from None
    if set(fields) != {"chunk_size", "features"}:
        raise ParseError("header must define chunk_size and features", 1)
    return fields["chunk_size"], fields["features"]


def read_stream(path) -> list[Chunk]:
    """Read a file produced by :func:`write_stream`."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        chunk_size, n_features = _parse_header(header)
        X, y = [], []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            if len(parts) != n_features + 1:
                raise ParseError(f"expected {n_features + 1} values, found {len(parts)}", lineno)
            try:
                X.append([float(v) for v in parts[:-1]])
                label = int(parts[-1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if label not in (0, 1):
                raise ParseError(f"label {label} outside {{0, 1}}", lineno)
            y.append(label)
    if not y:
        return []
    if chunk_size < 1 or len(y) % chunk_size:
        raise ParseError(f"{len(y)} rows do not fill whole chunks of {chunk_size}")
    X = np.array(X, dtype=float).reshape(-1, n_features)
    y = np.array(y, dtype=np.int64)
    return [Chunk(X[i:i + chunk_size], y[i:i + chunk_size]) for i in range(0, len(y), chunk_size)]

