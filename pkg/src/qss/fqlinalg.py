"""Exact linear algebra over prime fields F_q.

All matrix routines operate on plain numpy integer arrays that are reduced
modulo a prime q on entry; there is no lazy reduction and no floating point.
Pivots are always the first nonzero entry of the current row/column, which
keeps every routine deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


def is_prime(n: int) -> bool:
    """Trial-division primality test, adequate for field moduli."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def require_prime(q: int) -> int:
    q = int(q)
    if not is_prime(q):
        raise ValueError(f"modulus must be a prime, got {q}")
    return q


def inv_mod(a: int, q: int) -> int:
    """Inverse of a modulo q via the extended Euclid built into pow.

    Raises:
        ZeroDivisionError: if a is divisible by q.
    """
    a = int(a) % q
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse in F_{q}")
    return pow(a, -1, q)


@dataclass(frozen=True)
class FieldScalar:
    """A residue in F_q. Arithmetic between different moduli is an error."""

    value: int
    q: int

    def __post_init__(self):
        require_prime(self.q)
        object.__setattr__(self, "value", int(self.value) % self.q)

    def _coerce(self, other: "FieldScalar") -> int:
        if not isinstance(other, FieldScalar):
            raise TypeError("expected a FieldScalar")
        if other.q != self.q:
            raise ValueError(f"mixed moduli: F_{self.q} vs F_{other.q}")
        return other.value

    def __add__(self, other):
        return FieldScalar(self.value + self._coerce(other), self.q)

    def __sub__(self, other):
        return FieldScalar(self.value - self._coerce(other), self.q)

    def __mul__(self, other):
        return FieldScalar(self.value * self._coerce(other), self.q)

    def __neg__(self):
        return FieldScalar(-self.value, self.q)

    def inverse(self) -> "FieldScalar":
        return FieldScalar(inv_mod(self.value, self.q), self.q)

    def __int__(self):
        return self.value


def _as_mod_array(a, q: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
    return arr % q


def rref_mod(a, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a over F_q.

    Returns:
        (R, pivot_cols) where R is the RREF and pivot_cols lists the pivot
        column of each nonzero row in order.
    """
    q = require_prime(q)
    r = _as_mod_array(a, q).copy()
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
        r[row] = (r[row] * inv_mod(r[row, col], q)) % q
        for other in range(rows):
            if other != row and r[other, col]:
                r[other] = (r[other] - r[other, col] * r[row]) % q
        pivots.append(col)
        row += 1
    return r, pivots


def rank_mod(a, q: int) -> int:
    """Rank of a over F_q. Empty matrices have rank 0."""
    arr = _as_mod_array(a, q)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return 0
    return len(rref_mod(arr, q)[1])


def kernel_basis_mod(a, q: int) -> np.ndarray:
    """Basis of the right kernel {x : a.x = 0 over F_q}.

    Returns:
        Array of shape (cols, k) whose columns are the basis vectors, built
        from the free columns of the RREF (deterministic).
    """
    q = require_prime(q)
    arr = _as_mod_array(a, q)
    rows, cols = arr.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref_mod(arr, q)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-r[i, fc]) % q
    return basis


class AffineSolution(NamedTuple):
    particular: np.ndarray
    kernel: np.ndarray


def solve_affine_mod(a, b, q: int) -> AffineSolution | None:
    """Solve a.x = b over F_q.

    Returns:
        AffineSolution(particular, kernel) with the deterministic particular
        solution (free variables set to 0), or None when inconsistent.
    """
    q = require_prime(q)
    arr = _as_mod_array(a, q)
    rhs = np.asarray(b, dtype=np.int64).reshape(-1) % q
    rows, cols = arr.shape
    if rhs.shape[0] != rows:
        raise ValueError(f"shape mismatch: {arr.shape} vs rhs {rhs.shape}")
    if rows == 0:
        return AffineSolution(np.zeros(cols, dtype=np.int64), kernel_basis_mod(arr, q))
    aug = np.concatenate([arr, rhs[:, None]], axis=1)
    r, pivots = rref_mod(aug, q)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols]
    return AffineSolution(x, kernel_basis_mod(arr, q))


def reduced_column_echelon_mod(a, q: int) -> np.ndarray:
    """Reduced column echelon form: nonzero columns first, each column's
    first nonzero entry is 1 and is the only nonzero entry of its row."""
    arr = _as_mod_array(a, q)
    return rref_mod(arr.T, q)[0].T.copy()


def batch_rank_mod(mats, q: int) -> np.ndarray:
    """Ranks of a stack of matrices over F_q, eliminated in lockstep.

    Args:
        mats: integer array of shape (N, rows, cols).

    Returns:
        int64 array of shape (N,). Vectorised over N; used by the search
        harness where millions of small cut matrices are ranked.
    """
    q = require_prime(q)
    a = np.asarray(mats, dtype=np.int64) % q
    if a.ndim != 3:
        raise ValueError(f"expected shape (N, rows, cols), got {a.shape}")
    n, rows, cols = a.shape
    if n == 0 or rows == 0 or cols == 0:
        return np.zeros(n, dtype=np.int64)
    inv_table = np.array([0] + [pow(v, -1, q) for v in range(1, q)], dtype=np.int64)
    pivot_row = np.zeros(n, dtype=np.int64)
    row_idx = np.arange(rows)[None, :]
    for col in range(cols):
        col_vals = a[:, :, col]
        eligible = (row_idx >= pivot_row[:, None]) & (col_vals != 0)
        has = eligible.any(axis=1)
        if not has.any():
            continue
        first = np.where(has, eligible.argmax(axis=1), 0)
        idx = np.nonzero(has)[0]
        pr, fr = pivot_row[idx], first[idx]
        tmp = a[idx, pr, :].copy()
        a[idx, pr, :] = a[idx, fr, :]
        a[idx, fr, :] = tmp
        a[idx, pr, :] = (a[idx, pr, :] * inv_table[a[idx, pr, col]][:, None]) % q
        # eliminate the pivot column from every other row of the live matrices
        piv_rows = a[idx, pr, :]
        factors = a[idx, :, col].copy()
        factors[np.arange(idx.size), pr] = 0
        a[idx] = (a[idx] - factors[:, :, None] * piv_rows[:, None, :]) % q
        pivot_row[idx] = pr + 1
        if (pivot_row >= rows).all():
            break
    return pivot_row


class FqMatrix:
    """Immutable matrix over F_q; thin typed wrapper over the array routines."""

    def __init__(self, q: int, entries):
        self.q = require_prime(q)
        arr = _as_mod_array(entries, self.q)
        arr.setflags(write=False)
        self.array = arr

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    def rank(self) -> int:
        return rank_mod(self.array, self.q)

    def kernel_basis(self) -> list[np.ndarray]:
        basis = kernel_basis_mod(self.array, self.q)
        return [basis[:, j].copy() for j in range(basis.shape[1])]

    def solve_affine(self, b) -> AffineSolution | None:
        return solve_affine_mod(self.array, b, self.q)

    def reduced_column_echelon(self) -> "FqMatrix":
        return FqMatrix(self.q, reduced_column_echelon_mod(self.array, self.q))

    def __eq__(self, other):
        return (
            isinstance(other, FqMatrix)
            and self.q == other.q
            and self.array.shape == other.array.shape
            and bool(np.array_equal(self.array, other.array))
        )

    def __repr__(self):
        return f"FqMatrix(q={self.q}, shape={self.array.shape})"
