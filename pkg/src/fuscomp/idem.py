"""Finite-dimensional algebras over a prime field: radical, idempotents, near isomorphisms.

Elements are coordinate vectors with respect to a fixed basis and the
multiplication is stored as structure constants ``c[i, j, k]`` meaning
``b_i b_j = sum_k c[i, j, k] b_k``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import sympy

from .linalg import CoefficientRing, LinAlgError, SubspaceSolver, nullspace, rank, row_basis

DEFAULT_SEED = 20240611
SPLIT_BUDGET = 400


class AlgebraError(ValueError):
    pass


class FiniteAlgebra:
    def __init__(
        self,
        R: CoefficientRing,
        structure: np.ndarray,
        unit: np.ndarray | None = None,
        labels: Sequence[str] | None = None,
        matrices: Sequence[np.ndarray] | None = None,
    ):
        self.R = R
        self.c = R.reduce(np.asarray(structure, dtype=R.dtype))
        self.dim = self.c.shape[0]
        self.unit = None if unit is None else R.array(unit)
        self.labels = list(labels) if labels is not None else [f"b{i}" for i in range(self.dim)]
        self.matrices = list(matrices) if matrices is not None else None
        self._matrix_solver = None

    # construction --------------------------------------------------------
    @classmethod
    def from_matrices(cls, R: CoefficientRing, mats: Sequence[np.ndarray], unit_matrix: np.ndarray | None = None, labels=None):
        """Algebra spanned by independent square matrices closed under products."""
        mats = [R.array(m) for m in mats]
        n = len(mats)
        if n == 0:
            return cls(R, R.zeros(0, 0, 0), unit=R.zeros(0) if unit_matrix is not None else None, matrices=[])
        flat = np.stack([m.reshape(-1) for m in mats])
        solver = SubspaceSolver(R, flat)
        c = R.zeros(n, n, n)
        for i in range(n):
            prods = np.stack([R.matmul(mats[i], mats[j]).reshape(-1) for j in range(n)])
            co = solver.coords(prods)
            if co is None:
                raise AlgebraError("matrix span is not closed under multiplication")
            c[i] = co
        unit = None
        if unit_matrix is not None:
            unit = solver.coords(R.array(unit_matrix).reshape(-1))
            if unit is None:
                raise AlgebraError("unit matrix is not in the span")
        alg = cls(R, c, unit=unit, labels=labels, matrices=mats)
        alg._matrix_solver = solver
        return alg

    def to_matrix(self, v: np.ndarray) -> np.ndarray:
        if self.matrices is None:
            raise AlgebraError("algebra is not given by matrices")
        out = self.R.zeros(*self.matrices[0].shape)
        for i, coef in enumerate(v):
            if coef != 0:
                out = self.R.reduce(out + coef * self.matrices[i])
        return out

    def from_matrix(self, M: np.ndarray):
        if self._matrix_solver is None:
            raise AlgebraError("algebra is not given by matrices")
        return self._matrix_solver.coords(self.R.array(M).reshape(-1))

    # arithmetic ------------------------------------------------------------
    def zero(self) -> np.ndarray:
        return self.R.zeros(self.dim)

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = self.R.scalar(1)
        return v

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return self.zero()
        R = self.R
        w = np.tensordot(R.reduce(np.outer(u, v)), self.c, axes=([0, 1], [0, 1]))
        return R.reduce(w)

    def add(self, u, v):
        return self.R.reduce(u + v)

    def sub(self, u, v):
        return self.R.reduce(u - v)

    def scale(self, c, u):
        return self.R.reduce(self.R.scalar(c) * u)

    def power(self, u: np.ndarray, k: int) -> np.ndarray:
        if k == 0:
            if self.unit is None:
                raise AlgebraError("zeroth power needs a unit")
            return self.unit.copy()
        result = None
        base = u
        while k:
            if k & 1:
                result = base if result is None else self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def left_matrix(self, u: np.ndarray) -> np.ndarray:
        """Matrix of ``v -> u v`` acting on column coordinate vectors."""
        return self.R.reduce(np.tensordot(u, self.c, axes=([0], [0])).T)

    def is_zero(self, u) -> bool:
        return not np.any(u != 0)

    def is_idempotent(self, u) -> bool:
        return self.is_zero(self.sub(self.mul(u, u), u))

    def check_associative(self, triples=None) -> bool:
        n = self.dim
        idx = triples if triples is not None else [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
        for i, j, k in idx:
            a, b, c = self.basis_vector(i), self.basis_vector(j), self.basis_vector(k)
            if not self.is_zero(self.sub(self.mul(self.mul(a, b), c), self.mul(a, self.mul(b, c)))):
                return False
        return True

    def check_unit(self) -> bool:
        if self.unit is None:
            return False
        return all(
            self.is_zero(self.sub(self.mul(self.unit, self.basis_vector(i)), self.basis_vector(i)))
            and self.is_zero(self.sub(self.mul(self.basis_vector(i), self.unit), self.basis_vector(i)))
            for i in range(self.dim)
        )

    # subspaces -------------------------------------------------------------
    def span(self, vectors: Sequence[np.ndarray]) -> np.ndarray:
        if len(vectors) == 0:
            return self.R.zeros(0, self.dim)
        return row_basis(self.R, np.stack([self.R.array(v) for v in vectors]))

    def product_space(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return self.span([self.mul(u, v) for u in U for v in V])

    def whole(self) -> np.ndarray:
        return self.R.eye(self.dim)

    def corner(self, e: np.ndarray, W: np.ndarray | None = None) -> np.ndarray:
        """``e W e`` (default ``W = A``)."""
        W = self.whole() if W is None else W
        return self.span([self.mul(self.mul(e, w), e) for w in W])


def subspace_contains(R: CoefficientRing, W: np.ndarray, v: np.ndarray) -> bool:
    return SubspaceSolver(R, W).contains(v) if W.shape[0] else not np.any(v != 0)


def subspace_le(R: CoefficientRing, U: np.ndarray, W: np.ndarray) -> bool:
    if U.shape[0] == 0:
        return True
    if W.shape[0] == 0:
        return not np.any(U != 0)
    solver = SubspaceSolver(R, W)
    return solver.coords(U) is not None


def intersect(R: CoefficientRing, U: np.ndarray, W: np.ndarray) -> np.ndarray:
    n = U.shape[1] if U.ndim == 2 and U.shape[0] else W.shape[1]
    if U.shape[0] == 0 or W.shape[0] == 0:
        return R.zeros(0, n)
    M = np.concatenate([U, R.reduce(-W)], axis=0).T
    ns = nullspace(R, M)
    if ns.shape[0] == 0:
        return R.zeros(0, n)
    vecs = R.matmul(ns[:, : U.shape[0]], U)
    return row_basis(R, vecs)


def subspace_sum(R: CoefficientRing, U: np.ndarray, W: np.ndarray) -> np.ndarray:
    if U.shape[0] == 0:
        return W
    if W.shape[0] == 0:
        return U
    return row_basis(R, np.concatenate([U, W], axis=0))


# ---------------------------------------------------------------------------
# radical


def _lifted_trace_power(L: np.ndarray, p: int, i: int) -> int:
    """``(Tr(L~^{p^i}) mod p^{i+1}) / p^i`` with ``L~`` the integer lift of ``L``."""
    mod = p ** (i + 1)
    # int64 products stay exact while a row-times-column sum fits in 63 bits
    exact = L.shape[0] * (mod - 1) ** 2 < 2**62
    M = np.asarray(L, dtype=np.int64 if exact else object) % mod
    for _ in range(i):
        P = M
        for _ in range(p - 1):
            P = (P @ M) % mod
        M = P
    tr = int(sum(M[k, k] for k in range(M.shape[0]))) % mod
    if tr % (p**i):
        raise AlgebraError("trace form is not divisible as expected")
    return (tr // p**i) % p


def radical(A: FiniteAlgebra) -> np.ndarray:
    """Jacobson radical as a row basis.

    Prime field: iterated kernels of the p-power trace forms, from ``i = 0``
    up to ``floor(log_p n)``.  Rationals: kernel of the trace form.  The
    result is certified nilpotent.
    """
    R = A.R
    n = A.dim
    if n == 0:
        return R.zeros(0, 0)
    basis = [A.basis_vector(j) for j in range(n)]
    if R.kind == "q0":
        G = R.zeros(n, n)
        for a in range(n):
            for b in range(n):
                L = A.left_matrix(A.mul(basis[a], basis[b]))
                G[a, b] = sum(L[k, k] for k in range(n))
        ker = nullspace(R, G.T)
        J = row_basis(R, ker) if ker.shape[0] else R.zeros(0, n)
    else:
        p = R.q
        top = int(math.floor(math.log(n, p))) if n > 1 else 0
        current = R.eye(n)
        for i in range(top + 1):
            if current.shape[0] == 0:
                break
            G = R.zeros(current.shape[0], n)
            for a, u in enumerate(current):
                for b in range(n):
                    L = A.left_matrix(A.mul(u, basis[b]))
                    G[a, b] = _lifted_trace_power(L, p, i)
            ker = nullspace(R, G.T)
            current = row_basis(R, R.matmul(ker, current)) if ker.shape[0] else R.zeros(0, n)
        J = current
    _certify_nilpotent(A, J)
    return J


def _certify_nilpotent(A: FiniteAlgebra, J: np.ndarray) -> int:
    P = J
    for k in range(1, A.dim + 2):
        if P.shape[0] == 0 or not np.any(P != 0):
            return k
        P = A.product_space(P, J)
    raise AlgebraError("computed radical is not nilpotent")


# ---------------------------------------------------------------------------
# corners and locality


class _Corner:
    """Quotient ``eAe / eJe`` with explicit coordinates."""

    def __init__(self, A: FiniteAlgebra, e: np.ndarray, J: np.ndarray):
        R = A.R
        self.A, self.e = A, e
        self.eAe = A.corner(e)
        self.eJe = A.corner(e, J) if J.shape[0] else R.zeros(0, A.dim)
        comp = []
        current = self.eJe
        for v in self.eAe:
            if not subspace_contains(R, current, v):
                comp.append(v)
                current = subspace_sum(R, current, v.reshape(1, -1))
        self.complement = np.stack(comp) if comp else R.zeros(0, A.dim)
        self.dim = len(comp)
        full = np.concatenate([self.eJe, self.complement], axis=0) if self.dim else self.eJe
        self.solver = SubspaceSolver(R, full) if full.shape[0] else None
        self.offset = self.eJe.shape[0]

    def coords(self, v: np.ndarray) -> np.ndarray:
        co = self.solver.coords(v)
        if co is None:
            raise AlgebraError("element is not in the corner algebra")
        return co[self.offset:]

    def lift(self, q: np.ndarray) -> np.ndarray:
        return self.A.R.matmul(q.reshape(1, -1), self.complement)[0]


def _is_commutative_mod(A: FiniteAlgebra, corner: _Corner) -> bool:
    comp = corner.complement
    for x in comp:
        for y in comp:
            d = A.sub(A.mul(x, y), A.mul(y, x))
            if np.any(corner.coords(d) != 0):
                return False
    return True


def is_local_idempotent(A: FiniteAlgebra, e: np.ndarray, J: np.ndarray | None = None) -> bool:
    """``eAe / eJe`` is a field: commutative with a one-dimensional Frobenius fixed space."""
    if A.is_zero(e) or not A.is_idempotent(e):
        return False
    J = radical(A) if J is None else J
    corner = _Corner(A, e, J)
    if corner.dim == 0:
        return False
    if not _is_commutative_mod(A, corner):
        return False
    R = A.R
    if R.kind == "q0":
        raise AlgebraError("locality test implemented over prime fields only")
    d = corner.dim
    frob = R.zeros(d, d)
    for i, x in enumerate(corner.complement):
        frob[:, i] = corner.coords(A.power(x, R.q))
    fixed = nullspace(R, R.reduce(frob - R.eye(d)))
    return fixed.shape[0] == 1


# ---------------------------------------------------------------------------
# splitting


def _poly_eval(A: FiniteAlgebra, coeffs: Sequence[int], x: np.ndarray, e: np.ndarray) -> np.ndarray:
    """``sum coeffs[i] x^i`` with ``x^0 = e`` (coefficients low degree first)."""
    out = A.zero()
    power = e
    for i, c in enumerate(coeffs):
        if i:
            power = A.mul(power, x)
        if c % A.R.q:
            out = A.add(out, A.scale(int(c), power))
    return out


def _min_poly_mod(A: FiniteAlgebra, corner: _Corner, x: np.ndarray) -> list[int]:
    """Minimal polynomial of ``x`` in ``eAe/eJe``, monic, low degree first."""
    R = A.R
    vecs = [corner.coords(corner.e)]
    power = corner.e
    for k in range(1, corner.dim + 2):
        power = A.mul(power, x)
        q = corner.coords(power)
        M = np.stack(vecs)
        sol = SubspaceSolver(R, row_basis(R, M)) if len(vecs) else None
        if rank(R, np.concatenate([M, q.reshape(1, -1)])) == len(vecs):
            from .linalg import solve as lsolve

            c = lsolve(R, M.T, q)
            return [int(-ci) % R.q for ci in c] + [1]
        vecs.append(q)
    raise AlgebraError("minimal polynomial search overran the dimension")


def _split(A: FiniteAlgebra, e: np.ndarray, J: np.ndarray, rng: np.random.Generator, seed: int) -> np.ndarray | None:
    """A nontrivial idempotent ``f`` with ``f e = e f = f``, or ``None`` if ``e`` is local."""
    R = A.R
    p = R.q
    corner = _Corner(A, e, J)
    if is_local_idempotent(A, e, J):
        return None
    t = sympy.Symbol("t")
    lift_exp = p
    while lift_exp < max(A.dim, 2):
        lift_exp *= p
    for _ in range(SPLIT_BUDGET):
        q = rng.integers(0, p, size=corner.dim)
        x = corner.lift(q)
        m = _min_poly_mod(A, corner, x)
        poly = sympy.Poly(list(reversed(m)), t, modulus=p)
        _, factors = poly.factor_list()
        if len(factors) < 2:
            continue
        g = factors[0][0] ** factors[0][1]
        h = sympy.Poly(1, t, modulus=p)
        for fac, mult in factors[1:]:
            h = h * fac**mult
        inv_h = sympy.invert(h.as_expr(), g.as_expr(), t, modulus=p)
        u_poly = sympy.Poly(sympy.expand(h.as_expr() * inv_h), t, modulus=p).rem(poly)
        coeffs = [int(c) % p for c in reversed(u_poly.all_coeffs())]
        u = _poly_eval(A, coeffs, x, e)
        f = A.power(u, lift_exp)
        if A.is_idempotent(f) and not A.is_zero(f) and not A.is_zero(A.sub(e, f)):
            return f
    raise AlgebraError(f"splitting search exhausted its budget (seed {seed})")


@dataclass
class IdempotentDecomposition:
    idempotents: list[np.ndarray]
    total: np.ndarray
    certificates: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.idempotents)


def decompose_idempotent(A: FiniteAlgebra, e: np.ndarray, seed: int = DEFAULT_SEED, J: np.ndarray | None = None) -> IdempotentDecomposition:
    """Orthogonal local idempotents summing to ``e``."""
    if A.R.kind != "fp":
        raise AlgebraError("idempotent decomposition needs a prime field")
    if not A.is_idempotent(e):
        raise AlgebraError("input is not idempotent")
    J = radical(A) if J is None else J
    rng = np.random.default_rng(seed)
    work = [e] if not A.is_zero(e) else []
    done = []
    while work:
        cur = work.pop()
        f = _split(A, cur, J, rng, seed)
        if f is None:
            done.append(cur)
        else:
            work.extend([f, A.sub(cur, f)])
    done.sort(key=lambda v: tuple(int(x) for x in v))
    cert = certify_decomposition(A, done, e, J)
    return IdempotentDecomposition(done, e, cert)


def decompose_identity(A: FiniteAlgebra, seed: int = DEFAULT_SEED) -> IdempotentDecomposition:
    if A.unit is None:
        raise AlgebraError("algebra has no unit")
    return decompose_idempotent(A, A.unit, seed)


def certify_decomposition(A: FiniteAlgebra, idems: Sequence[np.ndarray], total: np.ndarray, J: np.ndarray) -> dict:
    s = A.zero()
    for f in idems:
        s = A.add(s, f)
    orth = all(
        A.is_zero(A.mul(idems[i], idems[j])) for i in range(len(idems)) for j in range(len(idems)) if i != j
    )
    return {
        "idempotent": all(A.is_idempotent(f) for f in idems),
        "orthogonal": orth,
        "sum": A.is_zero(A.sub(s, total)),
        "local": all(is_local_idempotent(A, f, J) for f in idems),
        "block_dims": sorted(A.corner(f).shape[0] for f in idems),
    }


def idempotents_equivalent(A: FiniteAlgebra, e: np.ndarray, f: np.ndarray, J: np.ndarray | None = None):
    """For local ``e, f``: ``(x, y)`` with ``y x = e`` and ``x y = f``, or ``None``.

    ``x`` lies in ``f A e`` and ``y`` in ``e A f``.
    """
    J = radical(A) if J is None else J
    fAe = A.span([A.mul(A.mul(f, b), e) for b in A.whole()])
    eAf = A.span([A.mul(A.mul(e, b), f) for b in A.whole()])
    corner = _Corner(A, e, J)
    for x in fAe:
        for y in eAf:
            u = A.mul(y, x)
            if np.any(corner.coords(u) != 0):
                z = _inverse_in_corner(A, e, u)
                y2 = A.mul(z, y)
                if A.is_zero(A.sub(A.mul(y2, x), e)) and A.is_zero(A.sub(A.mul(x, y2), f)):
                    return x, y2
    return None


def _inverse_in_corner(A: FiniteAlgebra, e: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``z`` in ``eAe`` with ``z u = e``."""
    R = A.R
    eAe = A.corner(e)
    M = np.stack([A.mul(w, u) for w in eAe]).T
    from .linalg import solve as lsolve

    c = lsolve(R, M, e)
    if c is None:
        raise AlgebraError("element is not invertible in the corner")
    return R.matmul(c.reshape(1, -1), eAe)[0]


# ---------------------------------------------------------------------------
# near isomorphisms


@dataclass
class AlgebraMap:
    """Linear map ``source -> target`` given by a matrix on coordinates."""

    source: FiniteAlgebra
    target: FiniteAlgebra
    matrix: np.ndarray  # target.dim x source.dim

    def __call__(self, v: np.ndarray) -> np.ndarray:
        R = self.source.R
        return R.matmul(self.matrix, v.reshape(-1, 1)).reshape(-1)

    def kernel(self) -> np.ndarray:
        return nullspace(self.source.R, self.matrix)

    def is_surjective(self) -> bool:
        return rank(self.source.R, self.matrix) == self.target.dim

    def is_multiplicative(self) -> bool:
        A, B = self.source, self.target
        for i in range(A.dim):
            for j in range(A.dim):
                a, b = A.basis_vector(i), A.basis_vector(j)
                if not B.is_zero(B.sub(self(A.mul(a, b)), B.mul(self(a), self(b)))):
                    return False
        return True

    def compose(self, inner: "AlgebraMap") -> "AlgebraMap":
        return AlgebraMap(inner.source, self.target, self.source.R.matmul(self.matrix, inner.matrix))


def is_isomorphism(f: AlgebraMap) -> bool:
    return f.source.dim == f.target.dim and f.is_surjective() and f.is_multiplicative()


def is_near_isomorphism(f: AlgebraMap) -> bool:
    """Surjective ring map whose kernel annihilates the whole source on both sides."""
    if not (f.is_surjective() and f.is_multiplicative()):
        return False
    A = f.source
    K = f.kernel()
    for k in K:
        for i in range(A.dim):
            a = A.basis_vector(i)
            if not (A.is_zero(A.mul(a, k)) and A.is_zero(A.mul(k, a))):
                return False
    return True


def quotient(A: FiniteAlgebra, ideal: np.ndarray) -> tuple[FiniteAlgebra, AlgebraMap]:
    """``A / ideal`` together with the projection map."""
    R = A.R
    comp = []
    current = ideal if ideal.shape[0] else R.zeros(0, A.dim)
    for i in range(A.dim):
        v = A.basis_vector(i)
        if not subspace_contains(R, current, v):
            comp.append(v)
            current = subspace_sum(R, current, v.reshape(1, -1))
    d = len(comp)
    full = np.concatenate([ideal, np.stack(comp)], axis=0) if d else ideal
    solver = SubspaceSolver(R, full)
    off = ideal.shape[0]

    def proj(v):
        return solver.coords(v)[off:]

    c = R.zeros(d, d, d)
    for i in range(d):
        for j in range(d):
            c[i, j] = proj(A.mul(comp[i], comp[j]))
    unit = proj(A.unit) if A.unit is not None else None
    Q = FiniteAlgebra(R, c, unit=unit)
    P = np.stack([proj(A.basis_vector(i)) for i in range(A.dim)]).T if A.dim else R.zeros(d, 0)
    return Q, AlgebraMap(A, Q, P)


def is_two_sided_ideal(A: FiniteAlgebra, W: np.ndarray) -> bool:
    R = A.R
    for w in W:
        for i in range(A.dim):
            a = A.basis_vector(i)
            if not subspace_contains(R, W, A.mul(a, w)) or not subspace_contains(R, W, A.mul(w, a)):
                return False
    return True


def enumerate_elements(A: FiniteAlgebra):
    """All elements of a small algebra over a prime field."""
    import itertools

    for coeffs in itertools.product(range(A.R.q), repeat=A.dim):
        yield np.array(coeffs, dtype=np.int64)


def idempotent_set(A: FiniteAlgebra) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in v) for v in enumerate_elements(A) if A.is_idempotent(v)]


# ---------------------------------------------------------------------------
# the abstract correspondence


@dataclass
class CorrespondenceData:
    A: FiniteAlgebra
    B: FiniteAlgebra
    C: np.ndarray
    I: np.ndarray
    J: np.ndarray
    K: np.ndarray
    f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], np.ndarray]


@dataclass
class CorrespondenceOutcome:
    a: np.ndarray
    pieces: list[np.ndarray]
    index: int
    g_b_minus_a: np.ndarray
    f_a_minus_b: np.ndarray
    conditions: dict


class ConditionFailed(AlgebraError):
    def __init__(self, number: int, message: str):
        super().__init__(f"condition ({number}) failed: {message}")
        self.number = number


def check_conditions(data: CorrespondenceData, b: np.ndarray | None = None, seed: int = DEFAULT_SEED) -> dict:
    """Mechanical check of the eight hypotheses; raises :class:`ConditionFailed`."""
    A, B, R = data.A, data.B, data.A.R
    C, I, J, K = data.C, data.I, data.J, data.K
    CJ = intersect(R, C, J)
    if not (subspace_le(R, A.product_space(CJ, C), I) and subspace_le(R, A.product_space(C, CJ), I)):
        raise ConditionFailed(1, "(C cap J) C or C (C cap J) not inside I")
    if not subspace_le(R, I, CJ):
        raise ConditionFailed(1, "I is not inside C cap J")
    for k in K:
        if not subspace_contains(R, J, data.g(k)):
            raise ConditionFailed(2, "g(K) not inside J")
    for i in I:
        if not subspace_contains(R, K, data.f(i)):
            raise ConditionFailed(3, "f(I) not inside K")
    fC = B.span([data.f(c) for c in C])
    if fC.shape[0] != B.dim:
        raise ConditionFailed(4, "f is not surjective")
    if b is not None and not A.is_idempotent(data.g(b)):
        raise ConditionFailed(5, "g(b) is not idempotent")
    for x in C:
        for y in C:
            d = B.sub(data.f(A.mul(x, y)), B.mul(data.f(x), data.f(y)))
            if not subspace_contains(R, K, d):
                raise ConditionFailed(6, "induced f is not multiplicative")
    for i in range(B.dim):
        for j in range(B.dim):
            v, w = B.basis_vector(i), B.basis_vector(j)
            d = A.sub(data.g(B.mul(v, w)), A.mul(data.g(v), data.g(w)))
            if not subspace_contains(R, J, d):
                raise ConditionFailed(6, "induced g is not multiplicative")
    for x in C:
        if not subspace_contains(R, J, A.sub(data.g(data.f(x)), x)):
            raise ConditionFailed(7, "s q differs from the composite of the induced maps")
    if A.unit is not None:
        d1 = decompose_identity(A, seed)
        d2 = decompose_identity(A, seed + 1)
        if d1.certificates["block_dims"] != d2.certificates["block_dims"]:
            raise ConditionFailed(8, "decompositions of the identity differ between seeds")
    return {str(n): True for n in range(1, 9)}


def near_iso_correspond(data: CorrespondenceData, b: np.ndarray, seed: int = DEFAULT_SEED) -> CorrespondenceOutcome:
    A, B, R = data.A, data.B, data.A.R
    if subspace_contains(R, data.K, b):
        raise ConditionFailed(0, "b lies in K")
    if not is_local_idempotent(B, b):
        raise AlgebraError("b is not a local idempotent")
    conds = check_conditions(data, b, seed)
    gb = data.g(b)
    dec = decompose_idempotent(A, gb, seed)
    hits = [
        i
        for i, a in enumerate(dec.idempotents)
        if subspace_contains(R, data.C, a) and not subspace_contains(R, data.J, a)
    ]
    if len(hits) != 1:
        raise AlgebraError(f"expected exactly one summand in C outside J, found {len(hits)}")
    a = dec.idempotents[hits[0]]
    d1 = A.sub(gb, a)
    d2 = B.sub(data.f(a), b)
    if not subspace_contains(R, data.J, d1):
        raise AlgebraError("g(b) is not congruent to a modulo J")
    if not subspace_contains(R, data.K, d2):
        raise AlgebraError("f(a) is not congruent to b modulo K")
    return CorrespondenceOutcome(a, dec.idempotents, hits[0], d1, d2, conds)


# ---------------------------------------------------------------------------
# endomorphism algebras of Mackey modules


def end_algebra(M) -> FiniteAlgebra:
    """``End(M)`` from the commutant solve; basis elements keep their module maps in ``homs``."""
    from .mackeymod import end_basis, identity_hom

    R = M.R
    homs = end_basis(M)
    if not homs:
        return FiniteAlgebra(R, R.zeros(0, 0, 0), unit=R.zeros(0), matrices=[])
    mats = [h.big_matrix() for h in homs]
    A = FiniteAlgebra.from_matrices(R, mats, identity_hom(M).big_matrix())
    A.homs = homs
    A.module = M
    return A


def algebra_element_to_hom(A: FiniteAlgebra, v: np.ndarray):
    from .mackeymod import combine

    return combine(A.homs, v, A.module, A.module)


def is_indecomposable(M, seed: int = DEFAULT_SEED) -> bool:
    """Nonzero with local endomorphism algebra."""
    if M.is_zero():
        return False
    A = end_algebra(M)
    return is_local_idempotent(A, A.unit)


@dataclass
class ModuleSummand:
    idempotent: object
    module: object
    inclusion: object
    projection: object


def module_summands(M, seed: int = DEFAULT_SEED) -> list[ModuleSummand]:
    """Indecomposable summands from a local decomposition of ``Id_M``."""
    from .mackeymod import image_module

    if M.is_zero():
        return []
    A = end_algebra(M)
    dec = decompose_identity(A, seed)
    out = []
    for e in dec.idempotents:
        f = algebra_element_to_hom(A, e)
        U, inc, proj = image_module(M, f)
        out.append(ModuleSummand(f, U, inc, proj))
    return out


def _sum_embedding(U, V):
    """``U + V`` with the two projection idempotents."""
    from .mackeymod import ModuleHom, direct_sum

    W = direct_sum(U, V)
    R = U.R
    eU, eV = {}, {}
    for K in W.levels:
        a, b = U.dim(K), V.dim(K)
        m1 = R.zeros(a + b, a + b)
        m2 = R.zeros(a + b, a + b)
        m1[:a, :a] = R.eye(a)
        m2[a:, a:] = R.eye(b)
        eU[K], eV[K] = m1, m2
    return W, ModuleHom(W, W, eU), ModuleHom(W, W, eV)


def _local_pieces(A: FiniteAlgebra, e: np.ndarray, J: np.ndarray, seed: int) -> list[np.ndarray]:
    if A.is_zero(e):
        return []
    return decompose_idempotent(A, e, seed, J).idempotents


def _match_classes(A: FiniteAlgebra, J: np.ndarray, pieces: list[np.ndarray]) -> list[int]:
    """Label local idempotents by equivalence class."""
    labels: list[int] = []
    reps: list[np.ndarray] = []
    for e in pieces:
        for i, r in enumerate(reps):
            if idempotents_equivalent(A, r, e, J) is not None:
                labels.append(i)
                break
        else:
            reps.append(e)
            labels.append(len(reps) - 1)
    return labels


def summand_multiplicities(U, V, seed: int = DEFAULT_SEED) -> dict:
    """Multiplicities of each indecomposable class in ``U`` and in ``V``.

    Classes are decided by conjugacy of local idempotents in ``End(U + V)``.
    """
    W, eU, eV = _sum_embedding(U, V)
    A = end_algebra(W)
    J = radical(A)
    vU = A.from_matrix(eU.big_matrix())
    vV = A.from_matrix(eV.big_matrix())
    pU = _local_pieces(A, vU, J, seed)
    pV = _local_pieces(A, vV, J, seed)
    labels = _match_classes(A, J, pU + pV)
    mu = Counter(labels[: len(pU)])
    mv = Counter(labels[len(pU) :])
    return {"U": dict(mu), "V": dict(mv), "classes": max(labels, default=-1) + 1}


def is_summand(U, V, seed: int = DEFAULT_SEED) -> bool:
    """``U`` is isomorphic to a direct summand of ``V`` (Krull-Schmidt multiplicities)."""
    if U.is_zero():
        return True
    m = summand_multiplicities(U, V, seed)
    return all(m["V"].get(c, 0) >= n for c, n in m["U"].items())


def modules_isomorphic(U, V, seed: int = DEFAULT_SEED) -> bool:
    if U.is_zero() or V.is_zero():
        return U.is_zero() and V.is_zero()
    if U.dims != V.dims:
        return False
    m = summand_multiplicities(U, V, seed)
    return m["U"] == m["V"]
