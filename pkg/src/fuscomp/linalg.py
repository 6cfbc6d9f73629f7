"""Exact linear algebra over a prime field or the rationals.

Matrices are numpy arrays: ``int64`` entries reduced mod ``p`` for a prime
field, ``object`` arrays of :class:`fractions.Fraction` for the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grp import is_prime


class LinAlgError(ValueError):
    pass


@dataclass(frozen=True)
class CoefficientRing:
    """``F_q`` for a prime ``q`` (``kind="fp"``) or ``Q`` (``kind="q0"``)."""

    kind: str
    q: int = 0

    def __post_init__(self):
        if self.kind == "fp" and not is_prime(self.q):
            raise LinAlgError(f"{self.q} is not prime")
        if self.kind not in ("fp", "q0"):
            raise LinAlgError(f"unknown coefficient ring {self.kind!r}")

    @property
    def characteristic(self) -> int:
        return self.q if self.kind == "fp" else 0

    @property
    def is_field(self) -> bool:
        return True

    def is_p_local(self, p: int) -> bool:
        """Every prime other than ``p`` is invertible."""
        return self.kind == "q0" or self.q == p

    def describe(self) -> str:
        return f"F_{self.q}" if self.kind == "fp" else "Q"

    # scalars -------------------------------------------------------------
    @property
    def dtype(self):
        return np.int64 if self.kind == "fp" else object

    def scalar(self, x) -> int | Fraction:
        x = Fraction(x)
        if self.kind == "q0":
            return x
        if x.denominator % self.q == 0:
            raise LinAlgError(f"{x} has no image in F_{self.q}")
        return (x.numerator * pow(x.denominator, -1, self.q)) % self.q

    def inv(self, x):
        if self.kind == "q0":
            return 1 / Fraction(x)
        return pow(int(x), -1, self.q)

    def is_zero(self, x) -> bool:
        return x == 0

    # arrays --------------------------------------------------------------
    def reduce(self, M: np.ndarray) -> np.ndarray:
        return M % self.q if self.kind == "fp" else M

    def array(self, data) -> np.ndarray:
        if self.kind == "fp":
            return np.asarray(data, dtype=np.int64) % self.q
        arr = np.asarray(data, dtype=object)
        if arr.size:
            arr = np.vectorize(Fraction, otypes=[object])(arr)
        return arr

    def zeros(self, *shape) -> np.ndarray:
        if self.kind == "fp":
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if A.shape[1] == 0:
            return self.zeros(A.shape[0], B.shape[1])
        return self.reduce(A @ B)

    def random_matrix(self, rng, *shape) -> np.ndarray:
        if self.kind == "fp":
            return rng.integers(0, self.q, size=shape, dtype=np.int64)
        return self.array(rng.integers(-3, 4, size=shape))


def fp(p: int) -> CoefficientRing:
    return CoefficientRing("fp", p)


QQ = CoefficientRing("q0")


def rref(R: CoefficientRing, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = R.reduce(np.array(M, dtype=R.dtype, copy=True))
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = [i for i in range(r, rows) if M[i, c] != 0]
        if not nz:
            continue
        i = nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = R.reduce(M[r] * R.inv(M[r, c]))
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col != 0)[0]
        if len(nzr):
            M[nzr] = R.reduce(M[nzr] - np.outer(col[nzr], M[r]))
        pivots.append(c)
        r += 1
    return M, pivots


def rank(R: CoefficientRing, M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    return len(rref(R, M)[1])


def row_basis(R: CoefficientRing, M: np.ndarray) -> np.ndarray:
    """Independent rows spanning the row space (in reduced form)."""
    if M.shape[0] == 0:
        return R.zeros(0, M.shape[1])
    E, piv = rref(R, M)
    return E[: len(piv)]


def nullspace(R: CoefficientRing, M: np.ndarray) -> np.ndarray:
    """Rows ``v`` spanning ``{v : M v = 0}``."""
    cols = M.shape[1]
    if M.shape[0] == 0:
        return R.eye(cols)
    E, piv = rref(R, M)
    free = [c for c in range(cols) if c not in set(piv)]
    out = R.zeros(len(free), cols)
    for k, f in enumerate(free):
        out[k, f] = R.scalar(1)
        for i, pc in enumerate(piv):
            out[k, pc] = R.reduce(np.array([-E[i, f]], dtype=R.dtype))[0]
    return out


def solve(R: CoefficientRing, M: np.ndarray, b: np.ndarray):
    """One solution ``x`` of ``M x = b`` (``b`` a vector), or ``None``."""
    rows, cols = M.shape
    aug = np.concatenate([R.array(M).reshape(rows, cols), R.array(b).reshape(rows, 1)], axis=1)
    E, piv = rref(R, aug)
    if cols in piv:
        return None
    x = R.zeros(cols)
    for i, pc in enumerate(piv):
        x[pc] = E[i, cols]
    return x


def coordinates(R: CoefficientRing, basis_rows: np.ndarray, v: np.ndarray):
    """Coefficients expressing ``v`` in the rows of ``basis_rows``, or ``None``."""
    if basis_rows.shape[0] == 0:
        return R.zeros(0) if not np.any(R.array(v) != 0) else None
    return solve(R, basis_rows.T, v)


class SubspaceSolver:
    """Repeated coordinate extraction against a fixed independent row set."""

    def __init__(self, R: CoefficientRing, basis_rows: np.ndarray):
        self.R = R
        self.basis = basis_rows
        n, m = basis_rows.shape
        self.dim = n
        if n == 0:
            self.pivots = []
            self.transform = R.zeros(0, 0)
            return
        aug = np.concatenate([basis_rows, R.eye(n)], axis=1)
        E, piv = rref(R, aug)
        piv = [c for c in piv if c < m]
        if len(piv) != n:
            raise LinAlgError("basis rows are not independent")
        self.pivots = piv
        # row i of E[:n, :m] has pivot at piv[i]; E[:n, m:] = T with T @ basis = E[:n, :m]
        self.echelon = E[:n, :m]
        self.transform = E[:n, m:]

    def coords(self, v: np.ndarray):
        """Coordinates of each row of ``v`` (2-D) or of the vector ``v``; ``None`` if outside."""
        R = self.R
        single = v.ndim == 1
        V = v.reshape(1, -1) if single else v
        if self.dim == 0:
            if np.any(V != 0):
                return None
            out = R.zeros(V.shape[0], 0)
            return out[0] if single else out
        lead = V[:, self.pivots]
        recon = R.matmul(lead, self.echelon)
        if np.any(R.reduce(recon - V) != 0):
            return None
        out = R.matmul(lead, self.transform)
        return out[0] if single else out

    def contains(self, v: np.ndarray) -> bool:
        return self.coords(v) is not None
