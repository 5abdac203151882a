"""File formats: symmetric triplet files (STF) for matrices and CSV/JSON
for iteration traces and run reports.

STF layout::

    %%stf <p> <stored_nnz>
    i j value        # 1-based, i <= j, one line per stored nonzero

Values use Python's shortest round-trip float repr, so write/read is exact.
"""
import csv
import io as _io
import json
import math
from dataclasses import asdict

import numpy as np

from .linalg import sym_matrix

__all__ = [
    "STFError",
    "format_stf",
    "parse_stf",
    "write_stf",
    "read_stf",
    "TRACE_COLUMNS",
    "trace_to_csv",
    "write_trace",
    "read_trace_csv",
    "write_json",
]

TRACE_COLUMNS = ("k", "thr_k", "mu_k", "rho_k", "objective", "nnz_offdiag",
                 "delta_rel")


class STFError(ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def format_stf(a):
    a = np.asarray(a, dtype=np.float64)
    p = a.shape[0]
    i, j = np.nonzero(np.triu(a))
    lines = [f"%%stf {p} {len(i)}"]
    lines += [f"{r + 1} {c + 1} {_fmt(a[r, c])}" for r, c in zip(i, j)]
    return "\n".join(lines) + "\n"


def parse_stf(text):
    """Parse STF text into a dense symmetric matrix."""
    lines = text.splitlines()
    if not lines:
        raise STFError(1, "empty file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "%%stf":
        raise STFError(1, "expected header '%%stf <p> <stored_nnz>'")
    try:
        p, nnz = int(head[1]), int(head[2])
    except ValueError:
        raise STFError(1, "header sizes must be integers") from None
    if p < 1 or nnz < 0:
        raise STFError(1, "invalid header sizes")
    a = np.zeros((p, p))
    seen = set()
    count = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise STFError(lineno, "expected 'i j value'")
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise STFError(lineno, "malformed entry") from None
        if not (1 <= i <= p and 1 <= j <= p):
            raise STFError(lineno, f"index out of range for p={p}")
        if i > j:
            raise STFError(lineno, "entries must satisfy i <= j")
        if (i, j) in seen:
            raise STFError(lineno, "duplicate entry")
        if not math.isfinite(v):
            raise STFError(lineno, "non-finite value")
        seen.add((i, j))
        a[i - 1, j - 1] = a[j - 1, i - 1] = v
        count += 1
    if count != nnz:
        raise STFError(1, f"header announces {nnz} entries, found {count}")
    return a


def write_stf(path, a):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_stf(sym_matrix(a)))


def read_stf(path):
    with open(path) as fh:
        return parse_stf(fh.read())


def trace_to_csv(trace):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for rec in trace:
        row = asdict(rec)
        w.writerow([row[c] if isinstance(row[c], int) else _fmt(row[c])
                    for c in TRACE_COLUMNS])
    return buf.getvalue()


def write_trace(path, trace):
    with open(path, "w", newline="\n") as fh:
        fh.write(trace_to_csv(trace))


def read_trace_csv(path):
    """Read a trace CSV back as a list of dicts with numeric values."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        out.append({k: (int(v) if k in ("k", "nnz_offdiag") else float(v))
                    for k, v in row.items()})
    return out


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
