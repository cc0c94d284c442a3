"""Dense exact linear algebra over a ``Field``.

Matrices are numpy arrays of raw field values (``field.dtype``); all routines
take the field explicitly.  Subspaces are stored by their reduced row echelon
basis, which is canonical, so subspace equality is array equality.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exactfield import Degenerate, Dual, Field


class DegenerateLift(Degenerate):
    """Dual-number elimination ran out of pivots with a unit constant part."""


class AmbientMismatch(ValueError):
    pass


def as_matrix(field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> np.ndarray:
    rows = list(rows)
    if not rows:
        return field.zeros((0, ncols or 0))
    flat = [x for row in rows for x in row]
    return field.array(flat, (len(rows), len(rows[0])))


def is_zero(m: np.ndarray) -> bool:
    return not np.any(np.asarray(m) != 0)


def rref(field: Field, m: np.ndarray) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns."""
    a = np.array(m, dtype=field.dtype, copy=True)
    nrows, ncols = a.shape
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = field.mul(a[r], field.inv(a[r, c]))
        col = a[:, c].copy()
        col[r] = field.from_int(0)
        mask = col != 0
        if mask.any():
            a[mask] = field.sub(a[mask], field.mul(col[mask][:, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a, r, pivots


def rank(field: Field, m: np.ndarray) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return rref(field, m)[1]


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of F^n given by a canonical (reduced echelon) row basis."""

    field: Field
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, field: Field, vectors: np.ndarray, ambient_dim: int | None = None) -> Subspace:
        vectors = np.asarray(vectors)
        if ambient_dim is None:
            ambient_dim = vectors.shape[1]
        if vectors.size == 0:
            return cls(field, ambient_dim, field.zeros((0, ambient_dim)), ())
        red, r, piv = rref(field, vectors)
        return cls(field, ambient_dim, red[:r], tuple(piv))

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> Subspace:
        return cls(field, ambient_dim, field.zeros((0, ambient_dim)), ())

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def _check(self, other: Subspace):
        if other.ambient_dim != self.ambient_dim:
            raise AmbientMismatch(f"ambient dims {self.ambient_dim} != {other.ambient_dim}")

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        self._check(other)
        return self.pivots == other.pivots and bool(np.all(self.basis == other.basis))

    __hash__ = None

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace.span(self.field, np.vstack([self.basis, other.basis]), self.ambient_dim)

    def sum_dim(self, other: Subspace) -> int:
        return (self + other).dim

    def intersection_dim(self, other: Subspace) -> int:
        return self.dim + other.dim - self.sum_dim(other)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=self.field.dtype).reshape(-1)
        if v.shape[0] != self.ambient_dim:
            raise AmbientMismatch("vector has wrong length")
        if self.dim == 0:
            return is_zero(v)
        return is_zero(self.field.sub(v, self.project_onto_span(v)))

    def coords(self, v) -> np.ndarray:
        """Coordinates of v (or rows of v) in the echelon basis; v must lie in the span."""
        v = np.atleast_2d(np.asarray(v, dtype=self.field.dtype))
        c = v[:, list(self.pivots)]
        back = self.field.matmul(c, self.basis) if self.dim else self.field.zeros(v.shape)
        if not np.all(back == v):
            raise ValueError("vector is not in the subspace")
        return c

    def project_onto_span(self, v) -> np.ndarray:
        c = np.asarray(v)[list(self.pivots)][None, :]
        return self.field.matmul(c, self.basis)[0]

    def restrict(self, columns: Sequence[int]) -> Subspace:
        """Image under the coordinate projection onto the given columns."""
        return Subspace.span(self.field, self.basis[:, list(columns)], len(columns))

    def annihilator(self) -> np.ndarray:
        """Canonical echelon rows f with f . v = 0 for all v in the subspace."""
        if self.dim == 0:
            return self.field.eye(self.ambient_dim)
        return kernel_basis(self.field, self.basis).basis

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.ambient_dim}:{self.dim}:".encode())
        h.update(",".join(str(x) for x in self.basis.ravel()).encode())
        return h.hexdigest()[:16]


def kernel_basis(field: Field, m: np.ndarray) -> Subspace:
    """Right null space {v : m v = 0}."""
    m = np.asarray(m)
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return Subspace.span(field, field.eye(ncols), ncols)
    red, r, piv = rref(field, m)
    free = [c for c in range(ncols) if c not in piv]
    if not free:
        return Subspace.zero(field, ncols)
    vecs = field.zeros((len(free), ncols))
    for i, f in enumerate(free):
        vecs[i, f] = field.from_int(1)
        for row, p in enumerate(piv):
            vecs[i, p] = field.neg(red[row, f])
    return Subspace.span(field, vecs, ncols)


def image(field: Field, m: np.ndarray) -> Subspace:
    """Column space of m."""
    m = np.asarray(m)
    return Subspace.span(field, m.T, m.shape[0])


def left_kernel(field: Field, m: np.ndarray) -> Subspace:
    """{r : r m = 0} as a row subspace."""
    return kernel_basis(field, np.asarray(m).T)


def solve(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """One solution x of a x = b (b may have several columns)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if b.ndim == 1:
        b = b[:, None]
    aug = np.hstack([a, b])
    red, r, piv = rref(field, aug)
    n = a.shape[1]
    if any(p >= n for p in piv):
        raise ValueError("inconsistent linear system")
    x = field.zeros((n, b.shape[1]))
    for row, p in enumerate(piv):
        x[p] = red[row, n:]
    return x


def subspace_ops(a: Subspace, b: Subspace) -> dict:
    a._check(b)
    s = a.sum_dim(b)
    return {
        "equal": a == b,
        "sum_dim": s,
        "intersection_dim": a.dim + b.dim - s,
        "contains": a.contains,
    }


def dual_kernel_basis(rows: Sequence[Sequence[Dual]]) -> list[list[Dual]]:
    """Kernel of a matrix over F[o]/(o^2), lifting the kernel of its constant part.

    Pivots are taken only on entries with nonzero constant part.  After
    elimination every non-pivot row must vanish identically, otherwise some
    kernel vector at o = 0 has no first-order lift and DegenerateLift is raised.
    """
    a = [list(r) for r in rows]
    if not a:
        return []
    nrows, ncols = len(a), len(a[0])
    one = a[0][0].a * 0 + 1
    zero = one * 0
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c].a != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    for i in range(r, nrows):
        if any(not x.is_zero() for x in a[i]):
            raise DegenerateLift("constant-part rank is smaller than the dual rank")
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Dual(zero, zero) for _ in range(ncols)]
        v[f] = Dual(one, zero)
        for row, p in enumerate(pivots):
            v[p] = -a[row][f]
        out.append(v)
    return out


def dual_matvec(rows: Sequence[Sequence[Dual]], v: Sequence[Dual]) -> list[Dual]:
    out = []
    for row in rows:
        acc = row[0] * v[0]
        for x, y in zip(row[1:], v[1:]):
            acc = acc + x * y
        out.append(acc)
    return out
