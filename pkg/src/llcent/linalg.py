"""Dense exact matrices and finite-dimensional subspace arithmetic.

Subspaces of K^n are identified with their reduced row echelon form
(RREF): no zero rows, each pivot is 1 with zeros above and below, pivot
columns strictly increasing.  RREF is a canonical form, so two
`SubspaceBasis` values describe the same subspace exactly when they
compare equal.  Intersections use the Zassenhaus block construction;
everything else is a single echelon pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatch, FieldMismatch, NotContained


@dataclass(frozen=True)
class Matrix:
    """A rows x cols matrix of exact field entries."""

    field: object
    data: np.ndarray

    @classmethod
    def from_rows(cls, field, rows) -> "Matrix":
        a = np.asarray(rows, dtype=object)
        if a.ndim != 2:
            a = a.reshape(len(rows), -1) if len(rows) else a.reshape(0, 0)
        return cls(field, field.array(a))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )


def _rref(field, a: np.ndarray):
    """Gauss-Jordan on a copy; returns (reduced nonzero rows, pivot columns)."""
    a = field.normalize(np.array(a, copy=True))
    m, n = a.shape
    modular = a.dtype != object
    pivots = []
    r = 0
    for col in range(n):
        if r == m:
            break
        hits = np.nonzero(a[r:, col])[0]
        if hits.size == 0:
            continue
        sel = r + int(hits[0])
        if sel != r:
            a[[r, sel]] = a[[sel, r]]
        inv = field.one if a[r, col] == field.one else field.inv(a[r, col])
        if inv != field.one:
            if modular:
                a[r] *= inv
                a[r] %= field.p
            else:
                a[r] = a[r] * inv
        col_vals = np.array(a[:, col], copy=True)
        col_vals[r] = field.zero
        if np.any(col_vals != 0):
            if modular:
                a -= np.outer(col_vals, a[r])
                a %= field.p
            else:
                a = a - np.outer(col_vals, a[r])
        pivots.append(col)
        r += 1
    return a[:r], pivots


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of K^n held in canonical RREF."""

    field: object
    ambient_dim: int
    mat: np.ndarray
    pivots: tuple

    @classmethod
    def span(cls, field, rows, ambient_dim=None) -> "SubspaceBasis":
        """Canonicalize a list of spanning rows (any redundancy allowed)."""
        if isinstance(rows, Matrix):
            field, rows = rows.field, rows.data
        a = np.asarray(rows)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.size == 0 and ambient_dim is not None:
            a = a.reshape(0, ambient_dim)
        a = field.array(a)
        red, piv = _rref(field, a)
        return cls(field, a.shape[1], red, tuple(piv))

    @classmethod
    def zero(cls, field, ambient_dim: int) -> "SubspaceBasis":
        return cls(field, ambient_dim, field.zeros(0, ambient_dim), ())

    @classmethod
    def full(cls, field, ambient_dim: int) -> "SubspaceBasis":
        return cls(field, ambient_dim, field.eye(ambient_dim), tuple(range(ambient_dim)))

    @property
    def rank(self) -> int:
        return self.mat.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, SubspaceBasis)
            and self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and bool(np.array_equal(self.mat, other.mat))
        )

    def reduce_vector(self, v: np.ndarray) -> np.ndarray:
        """Residual of v after eliminating this basis; zero iff v is a member."""
        v = self.field.array(v).reshape(-1)
        if v.shape[0] != self.ambient_dim:
            raise AmbientMismatch(
                f"vector of length {v.shape[0]} in ambient {self.ambient_dim}"
            )
        if self.rank == 0:
            return v
        coeffs = v[list(self.pivots)]
        red = self.field.matmul(coeffs.reshape(1, -1), self.mat)[0]
        return self.field.normalize(v - red)

    def reduce_rows(self, rows: np.ndarray) -> np.ndarray:
        """Residuals of many rows at once (one matrix product)."""
        if rows.shape[0] == 0 or self.rank == 0:
            return self.field.normalize(np.array(rows, copy=True))
        coeffs = rows[:, list(self.pivots)]
        return self.field.normalize(rows - self.field.matmul(coeffs, self.mat))

    def contains_vector(self, v) -> bool:
        return not bool(np.any(self.reduce_vector(v) != 0))

    def contains_rows(self, rows: np.ndarray) -> bool:
        return not bool(np.any(self.reduce_rows(rows) != 0))

    def coefficients(self, v) -> np.ndarray:
        """Coordinates of a member vector in this basis (rows)."""
        v = self.field.array(v).reshape(-1)
        if bool(np.any(self.reduce_vector(v) != 0)):
            raise NotContained("vector is not in the subspace")
        if self.rank == 0:
            return self.field.zeros(0, 1).reshape(0)
        return v[list(self.pivots)]

    def contains(self, other: "SubspaceBasis") -> bool:
        self._check_compatible(other)
        return self.contains_rows(other.mat)

    def _check_compatible(self, other: "SubspaceBasis"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatch(f"{self.ambient_dim} vs {other.ambient_dim}")


def rref(m: Matrix):
    """Canonical reduced row echelon form of the row space; returns (basis, rank)."""
    basis = SubspaceBasis.span(m.field, m.data)
    return basis, basis.rank


def kernel_basis(m: Matrix) -> SubspaceBasis:
    """Canonical basis of {x : m . x = 0} inside K^cols."""
    field = m.field
    red, piv = _rref(field, field.array(m.data))
    n = m.cols
    pivset = set(piv)
    free = [c for c in range(n) if c not in pivset]
    rows = field.zeros(len(free), n)
    for k, fcol in enumerate(free):
        rows[k, fcol] = field.one
        for i, pcol in enumerate(piv):
            rows[k, pcol] = field.neg(red[i, fcol])
    return SubspaceBasis.span(field, rows, ambient_dim=n)


def rref_union(basis: SubspaceBasis, rows: np.ndarray) -> SubspaceBasis:
    """Canonical basis of span(basis) + span(rows), updating incrementally.

    Reduces the new rows against the existing reduced basis, eliminates
    among the survivors, then back-substitutes into the old rows; much
    cheaper than re-reducing the whole stack when few rows are new.
    """
    field = basis.field
    if rows.shape[0] == 0:
        return basis
    resid = basis.reduce_rows(field.array(rows))
    new_mat, new_piv = _rref(field, resid)
    if not new_piv:
        return basis
    old = basis.mat
    if basis.rank:
        coeffs = old[:, new_piv]
        old = field.normalize(old - field.matmul(coeffs, new_mat))
    merged_rows = []
    merged_piv = []
    i = j = 0
    while i < basis.rank or j < len(new_piv):
        take_old = j >= len(new_piv) or (i < basis.rank and basis.pivots[i] < new_piv[j])
        if take_old:
            merged_rows.append(old[i])
            merged_piv.append(basis.pivots[i])
            i += 1
        else:
            merged_rows.append(new_mat[j])
            merged_piv.append(new_piv[j])
            j += 1
    return SubspaceBasis(field, basis.ambient_dim, np.array(merged_rows), tuple(merged_piv))


def pad_basis_columns(basis: SubspaceBasis, before: int, after: int) -> SubspaceBasis:
    """Embed a reduced basis into a wider ambient by padding zero columns.

    Appending columns keeps the form reduced; prepending shifts pivots.
    """
    if before == 0 and after == 0:
        return basis
    field = basis.field
    total = before + basis.ambient_dim + after
    mat = field.zeros(basis.rank, total)
    if basis.rank:
        mat[:, before : before + basis.ambient_dim] = basis.mat
    return SubspaceBasis(field, total, mat, tuple(p + before for p in basis.pivots))


def subspace_combine(a: SubspaceBasis, b: SubspaceBasis, mode: str) -> SubspaceBasis:
    """Sum or intersection of two subspaces of the same ambient space.

    Intersections use the Zassenhaus construction: row reduce the block
    matrix [[A A], [B 0]]; rows whose left half vanished carry a basis of
    the intersection in their right half.
    """
    a._check_compatible(b)
    field, n = a.field, a.ambient_dim
    if mode == "sum":
        stacked = np.concatenate([a.mat, b.mat], axis=0)
        return SubspaceBasis.span(field, stacked, ambient_dim=n)
    if mode == "intersect":
        top = np.concatenate([a.mat, a.mat], axis=1)
        bot = np.concatenate([b.mat, field.zeros(b.rank, n)], axis=1)
        red, piv = _rref(field, np.concatenate([top, bot], axis=0))
        inter_rows = [red[i, n:] for i, p in enumerate(piv) if p >= n]
        if not inter_rows:
            return SubspaceBasis.zero(field, n)
        return SubspaceBasis.span(field, np.array(inter_rows), ambient_dim=n)
    raise ValueError(f"unknown mode {mode!r}")


def quotient_dim(big: SubspaceBasis, small: SubspaceBasis) -> int:
    """dim(big / small); requires small <= big."""
    big._check_compatible(small)
    if not big.contains(small):
        raise NotContained("small is not contained in big")
    return big.rank - small.rank


def invert_matrix(field, m: np.ndarray):
    """Inverse of a square matrix, or None when singular."""
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("only square matrices can be inverted")
    if n == 0:
        return field.zeros(0, 0)
    aug = np.concatenate([field.array(m), field.eye(n)], axis=1)
    red, piv = _rref(field, aug)
    if list(piv) != list(range(n)):
        return None
    return red[:, n:]
