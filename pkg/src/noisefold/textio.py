"""Plain-text matrix and vector files.

Matrix: a header line ``n p`` followed by ``n`` lines of ``p``
space-separated entries. Vector: a header line with the length, then one
entry per line. Entries are written as ``%.16e`` (17 significant digits),
which round-trips float64 exactly.
"""

import io
import os

import numpy as np

from .errors import PreconditionError


def format_float(x):
    return f"{float(x):.16e}"


def _open_for_write(target):
    if isinstance(target, (str, os.PathLike)):
        return open(target, "w", newline="\n", encoding="ascii"), True
    return target, False


def _read_lines(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="ascii") as fh:
            return fh.read().splitlines()
    return source.read().splitlines()


def write_matrix(target, M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise PreconditionError("write_matrix needs a 2-D array")
    fh, owned = _open_for_write(target)
    try:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(format_float(x) for x in row) + "\n")
    finally:
        if owned:
            fh.close()


def read_matrix(source):
    lines = [ln for ln in _read_lines(source) if ln.strip()]
    if not lines:
        raise PreconditionError("matrix file is empty")
    header = lines[0].split()
    if len(header) != 2:
        raise PreconditionError("matrix header must be 'n p'")
    n, p = (int(tok) for tok in header)
    if n < 1 or p < 1:
        raise PreconditionError(f"bad matrix dimensions {n} x {p}")
    if len(lines) - 1 != n:
        raise PreconditionError(f"expected {n} matrix rows, found {len(lines) - 1}")
    M = np.empty((n, p))
    for i, line in enumerate(lines[1:]):
        toks = line.split()
        if len(toks) != p:
            raise PreconditionError(f"matrix row {i + 1} has {len(toks)} entries, expected {p}")
        M[i] = [float(t) for t in toks]
    return M


def write_vector(target, v):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise PreconditionError("write_vector needs a 1-D array")
    fh, owned = _open_for_write(target)
    try:
        fh.write(f"{v.shape[0]}\n")
        for x in v:
            fh.write(format_float(x) + "\n")
    finally:
        if owned:
            fh.close()


def read_vector(source):
    lines = [ln for ln in _read_lines(source) if ln.strip()]
    if not lines:
        raise PreconditionError("vector file is empty")
    length = int(lines[0])
    if len(lines) - 1 != length:
        raise PreconditionError(f"expected {length} vector entries, found {len(lines) - 1}")
    return np.array([float(ln) for ln in lines[1:]])


def matrix_to_text(M):
    buf = io.StringIO()
    write_matrix(buf, M)
    return buf.getvalue()


def vector_to_text(v):
    buf = io.StringIO()
    write_vector(buf, v)
    return buf.getvalue()
