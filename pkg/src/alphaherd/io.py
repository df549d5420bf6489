"""Dataset files, selection records and atomic JSON output.

RDSB layout (all little-endian)::

    b"RDSB" | version u8 (=1) | n u32 | d u32 | n*d float64, row-major
    | label flag u8 (0 or 1) | [n u32 labels if flag == 1]
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import struct
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import FormatError
from .kernel import Dataset

RDSB_MAGIC = b"RDSB"
RDSB_VERSION = 1
SCHEMA_VERSION = "1"
_HEADER = struct.Struct("<4sBII")


def fingerprint(dataset: Dataset) -> dict:
    """SHA-256 over the little-endian float64 row-major feature bytes."""
    raw = np.ascontiguousarray(dataset.features, dtype="<f8").tobytes()
    return {"sha256": hashlib.sha256(raw).hexdigest(), "n": dataset.n, "d": dataset.d}


def atomic_write(path, data) -> None:
    """Write ``data`` (str or bytes) via a temp file in the same directory."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    atomic_write(path, dump_json(obj))


def read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


# --- CSV -------------------------------------------------------------------


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_csv(text: str) -> Dataset:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(t.strip() for t in r)]
    if not rows:
        raise FormatError("CSV contains no rows")
    header = None
    if not all(_is_number(t) for t in rows[0]):
        header = [t.strip() for t in rows[0]]
        rows = rows[1:]
    if not rows:
        raise FormatError("CSV contains a header but no samples")
    width = len(header) if header else len(rows[0])
    label_col = None
    if header and "label" in header:
        label_col = header.index("label")
    values = np.empty((len(rows), width))
    for r, tokens in enumerate(rows):
        if len(tokens) != width:
            raise FormatError(f"expected {width} columns, got {len(tokens)}", row=r)
        try:
            values[r] = [float(t) for t in tokens]
        except ValueError as exc:
            raise FormatError(f"non-numeric value: {exc}", row=r) from exc
        if not np.all(np.isfinite(values[r])):
            raise FormatError("non-finite value", row=r)
    labels = None
    if label_col is not None:
        labels = values[:, label_col]
        if not np.all(labels == np.round(labels)):
            raise FormatError("label column must hold integers")
        labels = labels.astype(np.int64)
        values = np.delete(values, label_col, axis=1)
    if values.shape[1] == 0:
        raise FormatError("CSV has no feature columns")
    return Dataset(values, labels)


def format_csv(dataset: Dataset) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"x{j}" for j in range(dataset.d)]
    if dataset.labels is not None:
        header.append("label")
    writer.writerow(header)
    for i, row in enumerate(dataset.features):
        # repr() round-trips float64 exactly
        tokens = [repr(float(v)) for v in row]
        if dataset.labels is not None:
            tokens.append(str(int(dataset.labels[i])))
        writer.writerow(tokens)
    return buf.getvalue()


# --- RDSB ------------------------------------------------------------------


def encode_rdsb(dataset: Dataset) -> bytes:
    parts = [
        _HEADER.pack(RDSB_MAGIC, RDSB_VERSION, dataset.n, dataset.d),
        np.ascontiguousarray(dataset.features, dtype="<f8").tobytes(),
    ]
    if dataset.labels is None:
        parts.append(b"\x00")
    else:
        if dataset.labels.min() < 0 or dataset.labels.max() > 0xFFFFFFFF:
            raise FormatError("RDSB labels must fit in an unsigned 32-bit integer")
        parts.append(b"\x01")
        parts.append(dataset.labels.astype("<u4").tobytes())
    return b"".join(parts)


def decode_rdsb(blob: bytes) -> Dataset:
    if len(blob) < _HEADER.size:
        raise FormatError("truncated RDSB header", offset=len(blob))
    magic, version, n, d = _HEADER.unpack_from(blob, 0)
    if magic != RDSB_MAGIC:
        raise FormatError(f"bad magic {magic!r}", offset=0)
    if version != RDSB_VERSION:
        raise FormatError(f"unsupported RDSB version {version}", offset=4)
    if n < 1 or d < 1:
        raise FormatError(f"invalid shape n={n}, d={d}", offset=5)
    pos = _HEADER.size
    end = pos + 8 * n * d
    if len(blob) < end:
        raise FormatError("truncated feature block", offset=len(blob))
    x = np.frombuffer(blob, dtype="<f8", count=n * d, offset=pos).reshape(n, d).astype(np.float64)
    bad = ~np.isfinite(x)
    if bad.any():
        r, c = (int(v) for v in np.argwhere(bad)[0])
        raise FormatError("non-finite value", offset=pos + 8 * (r * d + c), row=r)
    if len(blob) < end + 1:
        raise FormatError("missing label flag", offset=end)
    flag = blob[end]
    labels = None
    if flag == 1:
        lab_end = end + 1 + 4 * n
        if len(blob) < lab_end:
            raise FormatError("truncated label block", offset=len(blob))
        labels = np.frombuffer(blob, dtype="<u4", count=n, offset=end + 1).astype(np.int64)
        end = lab_end
    elif flag == 0:
        end += 1
    else:
        raise FormatError(f"invalid label flag {flag}", offset=end)
    if len(blob) != end:
        raise FormatError("trailing bytes after RDSB payload", offset=end)
    return Dataset(x, labels)


def _detect_format(path: Path, fmt: Optional[str]) -> str:
    if fmt:
        return fmt
    return "rdsb" if path.suffix.lower() == ".rdsb" else "csv"


def load_dataset(path, fmt: Optional[str] = None) -> Dataset:
    """Read a CSV or RDSB dataset; the format defaults to the file suffix."""
    path = Path(path)
    fmt = _detect_format(path, fmt)
    if fmt == "rdsb":
        return decode_rdsb(path.read_bytes())
    if fmt == "csv":
        return parse_csv(path.read_text(encoding="utf-8"))
    raise FormatError(f"unknown dataset format {fmt!r}")


def save_dataset(dataset: Dataset, path, fmt: Optional[str] = None) -> None:
    path = Path(path)
    fmt = _detect_format(path, fmt)
    if fmt == "rdsb":
        atomic_write(path, encode_rdsb(dataset))
    elif fmt == "csv":
        atomic_write(path, format_csv(dataset))
    else:
        raise FormatError(f"unknown dataset format {fmt!r}")


# --- selection records -----------------------------------------------------


@dataclass
class SelectionRecord:
    dataset: dict
    kernel: dict
    alpha: dict
    algorithm: str
    indices: List[int]
    final_alpha_mmd_sq: float
    seed: int
    bound: Optional[dict] = None
    wall_time_ms: int = field(default=0, compare=False)
    sorted_indices: List[int] = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        self.indices = [int(i) for i in self.indices]
        self.sorted_indices = sorted(self.indices)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SelectionRecord":
        try:
            if str(data["schema_version"]) != SCHEMA_VERSION:
                raise FormatError(f"unsupported record schema {data['schema_version']!r}")
            return cls(**data)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed selection record: {exc}") from exc

    def dumps(self) -> str:
        return dump_json(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "SelectionRecord":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise FormatError("selection record must be a JSON object")
        return cls.from_dict(data)
