"""Symmetric sparse matrices and the small operator algebra built on them.

Matrices are stored as the upper triangle only, in compressed-row form,
with the lower triangle implied by symmetry; a non-symmetric matrix is
unrepresentable.  All operators here expose three things:

    .n            dimension
    .matvec(v)    the product, O(stored entries) time
    .matvec_cost  how many base sparse products one application costs

``matvec_cost`` is the unit of the matvec telemetry: solvers report work
in units of "one pass over a stored matrix", which is the runtime proxy
used throughout the test suite instead of wall clock.

Matrices and operator views are immutable after construction and safe to
share across threads.  ``MatvecCounter`` is the only mutable object and
its increments are lock-protected.
"""

from __future__ import annotations

import math
import threading

import numpy as np

from .errors import DimensionMismatchError, MatrixFormatError


class MatvecCounter:
    """Thread-safe tally of (base) matrix-vector products."""

    __slots__ = ("_count", "_lock")

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    def add(self, k=1):
        with self._lock:
            self._count += int(k)

    @property
    def count(self):
        return self._count

    def __repr__(self):
        return f"MatvecCounter({self._count})"


class SymmetricCSR:
    """Sparse symmetric matrix, upper triangle in compressed-row form.

    Construct through :meth:`from_entries`, :meth:`from_dense`,
    :meth:`from_diag` or :meth:`identity`; the raw constructor expects
    canonical (row-sorted, deduplicated, upper-triangle) arrays.
    """

    matvec_cost = 1

    def __init__(self, n, indptr, cols, vals):
        n = int(n)
        if n < 1:
            raise DimensionMismatchError("matrix dimension must be at least 1")
        indptr = np.asarray(indptr, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if indptr.shape != (n + 1,) or indptr[0] != 0 or indptr[-1] != len(vals):
            raise DimensionMismatchError("malformed row pointer structure")
        if len(cols) != len(vals):
            raise DimensionMismatchError("column/value length mismatch")
        if not np.all(np.isfinite(vals)):
            raise MatrixFormatError("matrix entries must be finite")
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
        if np.any(cols < rows) or np.any(cols >= n):
            raise DimensionMismatchError("entries must lie in the upper triangle")
        self.n = n
        self.indptr = indptr
        self.cols = cols
        self.vals = vals
        self._rows = rows
        off = cols != rows
        self._off_rows = rows[off]
        self._off_cols = cols[off]
        self._off_vals = vals[off]

    # -- constructors -------------------------------------------------

    @classmethod
    def from_entries(cls, n, rows, cols, vals):
        """Build from coordinate triplets, any triangle orientation.

        Entries for the same unordered index pair are summed; give each
        logical entry of a symmetric matrix once (in either orientation)
        or as deliberate duplicates.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (len(rows) == len(cols) == len(vals)):
            raise DimensionMismatchError("triplet arrays must have equal length")
        if len(rows) and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
            raise DimensionMismatchError("coordinate out of range")
        ui = np.minimum(rows, cols)
        uj = np.maximum(rows, cols)
        order = np.lexsort((uj, ui))
        ui, uj, vals = ui[order], uj[order], vals[order]
        if len(ui):
            new = np.empty(len(ui), dtype=bool)
            new[0] = True
            new[1:] = (ui[1:] != ui[:-1]) | (uj[1:] != uj[:-1])
            starts = np.flatnonzero(new)
            ui, uj = ui[starts], uj[starts]
            vals = np.add.reduceat(vals, starts)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, ui + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, uj, vals)

    @classmethod
    def from_dense(cls, arr, atol=0.0):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatchError("dense input must be square")
        if not np.allclose(arr, arr.T, rtol=0.0, atol=atol):
            raise MatrixFormatError("dense input is not symmetric")
        sym = 0.5 * (arr + arr.T) if atol else arr
        i, j = np.nonzero(np.triu(sym))
        return cls.from_entries(arr.shape[0], i, j, sym[i, j])

    @classmethod
    def from_diag(cls, diag):
        diag = np.asarray(diag, dtype=np.float64)
        idx = np.arange(len(diag))
        keep = diag != 0.0
        return cls.from_entries(len(diag), idx[keep], idx[keep], diag[keep])

    @classmethod
    def identity(cls, n):
        idx = np.arange(n)
        return cls.from_entries(n, idx, idx, np.ones(n))

    # -- algebra ------------------------------------------------------

    @property
    def nnz(self):
        return len(self.vals)

    def matvec(self, v):
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n,):
            raise DimensionMismatchError(
                f"vector length {v.shape} does not match dimension {self.n}"
            )
        y = np.bincount(self._rows, weights=self.vals * v[self.cols], minlength=self.n)
        if len(self._off_vals):
            y += np.bincount(
                self._off_cols, weights=self._off_vals * v[self._off_rows], minlength=self.n
            )
        return y

    def quad(self, v):
        return float(np.dot(v, self.matvec(v)))

    def abs_row_sums(self):
        s = np.bincount(self._rows, weights=np.abs(self.vals), minlength=self.n)
        if len(self._off_vals):
            s += np.bincount(self._off_cols, weights=np.abs(self._off_vals), minlength=self.n)
        return s

    def to_dense(self):
        out = np.zeros((self.n, self.n))
        out[self._rows, self.cols] = self.vals
        out[self._off_cols, self._off_rows] = self._off_vals
        return out

    def entries(self):
        """Upper-triangle triplets ``(i, j, value)`` in row-major order."""
        return zip(self._rows.tolist(), self.cols.tolist(), self.vals.tolist())

    def __eq__(self, other):
        if not isinstance(other, SymmetricCSR):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.vals, other.vals)
        )

    __hash__ = None

    def __repr__(self):
        return f"SymmetricCSR(n={self.n}, nnz={self.nnz})"


# -- public product operations ---------------------------------------


def matvec(op, v, counter=None):
    """Apply ``op`` to ``v``; tick the telemetry counter when given one."""
    if counter is not None:
        counter.add(getattr(op, "matvec_cost", 1))
    return op.matvec(v)


def quad_form(op, v, counter=None):
    """v' op v, computed as one matvec and one dot product."""
    return float(np.dot(v, matvec(op, v, counter)))


# -- operator views ---------------------------------------------------


class ScaledShifted:
    """View of ``scale * op + shift * I``; one base product per application."""

    __slots__ = ("op", "scale", "shift", "n", "matvec_cost")

    def __init__(self, op, scale=1.0, shift=0.0):
        self.op = op
        self.scale = float(scale)
        self.shift = float(shift)
        self.n = op.n
        self.matvec_cost = getattr(op, "matvec_cost", 1)

    def matvec(self, v):
        y = self.scale * self.op.matvec(v)
        if self.shift:
            y += self.shift * np.asarray(v, dtype=np.float64)
        return y

    def quad(self, v):
        return float(np.dot(v, self.matvec(v)))


class Bordered:
    """(n+1)-dimensional symmetric view ``[[corner, border'], [border, s*B]]``.

    Wraps an n-dimensional block operator ``B`` without materializing the
    bordered matrix, so one application costs one ``B`` product plus O(n)
    vector work.
    """

    __slots__ = ("corner", "border", "block", "block_scale", "n", "matvec_cost")

    def __init__(self, corner, border, block, block_scale=1.0):
        self.corner = float(corner)
        self.border = None if border is None else np.asarray(border, dtype=np.float64)
        self.block = block
        self.block_scale = float(block_scale)
        self.n = block.n + 1
        self.matvec_cost = getattr(block, "matvec_cost", 1)
        if self.border is not None and self.border.shape != (block.n,):
            raise DimensionMismatchError("border length must match block dimension")

    def matvec(self, v):
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n,):
            raise DimensionMismatchError("vector length does not match bordered dimension")
        head, rest = v[0], v[1:]
        out = np.empty(self.n)
        out[1:] = self.block_scale * self.block.matvec(rest)
        if self.border is not None:
            out[0] = self.corner * head + float(np.dot(self.border, rest))
            out[1:] += head * self.border
        else:
            out[0] = self.corner * head
        return out

    def quad(self, v):
        return float(np.dot(v, self.matvec(v)))


class Blend:
    """Convex-style combination ``w1 * op1 + w2 * op2`` of equal-size operators."""

    __slots__ = ("w1", "op1", "w2", "op2", "n", "matvec_cost")

    def __init__(self, w1, op1, w2, op2):
        if op1.n != op2.n:
            raise DimensionMismatchError("blended operators must share a dimension")
        self.w1 = float(w1)
        self.op1 = op1
        self.w2 = float(w2)
        self.op2 = op2
        self.n = op1.n
        self.matvec_cost = getattr(op1, "matvec_cost", 1) + getattr(op2, "matvec_cost", 1)

    def matvec(self, v):
        return self.w1 * self.op1.matvec(v) + self.w2 * self.op2.matvec(v)

    def quad(self, v):
        return float(np.dot(v, self.matvec(v)))


def operator_dense(op):
    """Materialize any operator as a dense array (tests, dimensions <= a few hundred)."""
    n = op.n
    out = np.empty((n, n))
    e = np.zeros(n)
    for k in range(n):
        e[k] = 1.0
        out[:, k] = op.matvec(e)
        e[k] = 0.0
    return out


# -- Matrix Market exchange -------------------------------------------

_HEADER_PREFIX = "%%matrixmarket"


def parse_matrix_market(text):
    """Parse ``matrix coordinate real`` content into a :class:`SymmetricCSR`.

    ``symmetric`` files may carry either triangle; ``general`` files must
    be exactly symmetric (entries compared after duplicate summing, zero
    tolerance) and are rejected otherwise.
    """
    lines = text.splitlines()
    if not lines:
        raise MatrixFormatError("empty input")
    header = lines[0].strip().lower().split()
    if len(header) != 5 or header[0] != _HEADER_PREFIX or header[1] != "matrix":
        raise MatrixFormatError(f"malformed header: {lines[0]!r}")
    layout, field, symmetry = header[2], header[3], header[4]
    if layout != "coordinate":
        raise MatrixFormatError(f"unsupported layout {layout!r}, expected coordinate")
    if field not in ("real", "integer"):
        raise MatrixFormatError(f"unsupported field {field!r}, expected real")
    if symmetry not in ("symmetric", "general"):
        raise MatrixFormatError(f"unsupported symmetry {symmetry!r}")

    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixFormatError("missing size line")
    size = body[0].split()
    if len(size) != 3:
        raise MatrixFormatError(f"malformed size line: {body[0]!r}")
    try:
        nrows, ncols, count = (int(tok) for tok in size)
    except ValueError as exc:
        raise MatrixFormatError(f"malformed size line: {body[0]!r}") from exc
    if nrows != ncols:
        raise MatrixFormatError(f"matrix must be square, got {nrows}x{ncols}")
    if nrows < 1:
        raise MatrixFormatError("matrix dimension must be at least 1")
    if count != len(body) - 1:
        raise MatrixFormatError(
            f"declared {count} entries but found {len(body) - 1}"
        )

    summed = {}
    for ln in body[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise MatrixFormatError(f"malformed entry line: {ln!r}")
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise MatrixFormatError(f"malformed entry line: {ln!r}") from exc
        if not (1 <= i <= nrows and 1 <= j <= nrows):
            raise MatrixFormatError(f"index out of range in entry: {ln!r}")
        if not math.isfinite(v):
            raise MatrixFormatError(f"non-finite value in entry: {ln!r}")
        key = (i - 1, j - 1) if symmetry == "general" else (min(i, j) - 1, max(i, j) - 1)
        summed[key] = summed.get(key, 0.0) + v

    if symmetry == "general":
        folded = {}
        for (i, j), v in summed.items():
            if i != j and summed.get((j, i), 0.0) != v:
                raise MatrixFormatError(
                    f"general matrix is not symmetric at ({i + 1}, {j + 1})"
                )
            folded[(min(i, j), max(i, j))] = v
        summed = folded

    if summed:
        rows, cols = (np.array(ix) for ix in zip(*summed.keys()))
        vals = np.array(list(summed.values()))
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    return SymmetricCSR.from_entries(nrows, rows, cols, vals)


def load_matrix_market(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_market(fh.read())


def dump_matrix_market(m):
    """Serialize to ``coordinate real symmetric`` text; exact float round-trip."""
    out = ["%%MatrixMarket matrix coordinate real symmetric"]
    out.append(f"{m.n} {m.n} {m.nnz}")
    # stored upper triangle, emitted as the lower one per the usual convention
    for i, j, v in m.entries():
        out.append(f"{j + 1} {i + 1} {v!r}")
    return "\n".join(out) + "\n"


def save_matrix_market(m, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_matrix_market(m))


def parse_vector(text):
    """Parse a dense vector: Matrix Market ``array`` or one value per line."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty vector input")
    if lines[0].strip().lower().startswith(_HEADER_PREFIX):
        header = lines[0].strip().lower().split()
        if len(header) != 5 or header[2] != "array" or header[3] not in ("real", "integer"):
            raise MatrixFormatError(f"malformed vector header: {lines[0]!r}")
        body = [ln for ln in lines[1:] if not ln.lstrip().startswith("%")]
        if not body:
            raise MatrixFormatError("missing vector size line")
        dims = body[0].split()
        if len(dims) != 2:
            raise MatrixFormatError(f"malformed vector size line: {body[0]!r}")
        nrows, ncols = int(dims[0]), int(dims[1])
        if 1 not in (nrows, ncols):
            raise MatrixFormatError("vector file must have a unit dimension")
        values = body[1:]
        if len(values) != nrows * ncols:
            raise MatrixFormatError("vector entry count does not match size line")
    else:
        values = lines
    try:
        vec = np.array([float(ln.split()[0]) for ln in values])
    except (ValueError, IndexError) as exc:
        raise MatrixFormatError("malformed vector entry") from exc
    if not np.all(np.isfinite(vec)):
        raise MatrixFormatError("vector entries must be finite")
    return vec


def load_vector(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_vector(fh.read())


def dump_vector(v):
    return "\n".join(repr(float(x)) for x in v) + "\n"
