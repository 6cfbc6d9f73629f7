"""Centric Mackey functors as explicit modules over the Mackey algebra.

A module stores a finite-dimensional space for every subgroup level and a
matrix for every centric basis element of the Mackey algebra.  The module
functors (restriction, induction, conjugation), the theta maps, and the
transfer calculus on endomorphism rings are built on top of this.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import orbitprod
from .fusion import FusionError, FusionSystem, GroupHom, fusion_of_subgroup, inclusion
from .grp import Subgroup
from .linalg import CoefficientRing, LinAlgError, SubspaceSolver, nullspace, rank, row_basis, solve
from .mackey import (
    BurnsideElement,
    MackeyBasisElement,
    MackeyElement,
    burnside_class,
    burnside_unit,
    canonical_key,
    identity_key,
    mackey_basis,
    multiply_keys_cached,
)


class ModuleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cached per-system data


def _cache(F: FusionSystem, name: str) -> dict:
    return F.__dict__.setdefault("_mackeymod_cache", {}).setdefault(name, {})


def module_keys(F: FusionSystem) -> list[MackeyBasisElement]:
    """Centric basis elements of the Mackey algebra of ``F``."""
    c = _cache(F, "keys")
    if "all" not in c:
        c["all"] = mackey_basis(F, centric_only=True)
    return c["all"]


def subgroup_system(F: FusionSystem, H: Subgroup) -> FusionSystem:
    """``F_H(H)``, one object per subgroup and ambient system."""
    c = _cache(F, "subsystems")
    if H not in c:
        c[H] = fusion_of_subgroup(F, H)
    return c[H]


def key_of(A: Subgroup, B: Subgroup, phi: GroupHom) -> MackeyBasisElement:
    """``I^B_{phi C} c_phi R^A_C`` for ``phi`` defined on ``C <= A``."""
    return canonical_key(A, B, phi.source, phi.images)


def conj_element_key(phi: GroupHom) -> MackeyBasisElement:
    """``c_phi`` viewed from ``phi.source`` onto its image."""
    return canonical_key(phi.source, phi.image, phi.source, phi.images)


# ---------------------------------------------------------------------------
# modules


class MackeyModule:
    """Finitely generated module over the Mackey algebra of ``F``.

    ``dims[K]`` is the dimension of ``I_K^K M``; ``action[key]`` is the
    matrix of the basis element ``key`` from level ``key.A`` to level
    ``key.B`` (columns are images of basis vectors).  Missing entries act
    by zero.
    """

    def __init__(
        self,
        F: FusionSystem,
        R: CoefficientRing,
        dims: dict[Subgroup, int],
        action: dict[MackeyBasisElement, np.ndarray],
        label: str = "",
    ):
        self.F = F
        self.R = R
        self.dims = {K: int(d) for K, d in dims.items() if d}
        self.action = {k: R.array(m) for k, m in action.items() if self.dim(k.A) and self.dim(k.B)}
        self.label = label
        for k, m in self.action.items():
            if m.shape != (self.dim(k.B), self.dim(k.A)):
                raise ModuleError(f"matrix of {k.describe()} has shape {m.shape}")

    # levels -------------------------------------------------------------
    def dim(self, K: Subgroup) -> int:
        return self.dims.get(K, 0)

    @property
    def levels(self) -> list[Subgroup]:
        return sorted(self.dims, key=lambda s: s.key)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def offsets(self) -> dict[Subgroup, int]:
        out, pos = {}, 0
        for K in self.levels:
            out[K] = pos
            pos += self.dims[K]
        return out

    def act(self, key: MackeyBasisElement) -> np.ndarray:
        m = self.action.get(key)
        if m is None:
            return self.R.zeros(self.dim(key.B), self.dim(key.A))
        return m

    def act_element(self, x: MackeyElement, A: Subgroup, B: Subgroup) -> np.ndarray:
        out = self.R.zeros(self.dim(B), self.dim(A))
        for k, c in x.coeffs.items():
            if k.A == A and k.B == B:
                out = self.R.reduce(out + c * self.act(k))
        return out

    @property
    def keys(self) -> list[MackeyBasisElement]:
        return [k for k in module_keys(self.F) if self.dim(k.A) and self.dim(k.B)]

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def is_centric(self, ambient: FusionSystem | None = None) -> bool:
        amb = ambient or self.F
        return all(amb.is_centric(K) for K in self.levels)

    def validate(self, pairs: Iterable[tuple[MackeyBasisElement, MackeyBasisElement]] | None = None) -> dict:
        """Check the module axioms on products of basis elements.

        Identities act as the identity and ``act(X) act(Y)`` equals the
        action of the straightened product ``X Y``.
        """
        R = self.R
        failures = []
        for K in self.levels:
            if np.any(self.act(identity_key(K)) != R.eye(self.dim(K))):
                failures.append(("identity", K.key))
        keys = self.keys
        if pairs is None:
            pairs = ((X, Y) for X in keys for Y in keys if Y.B == X.A)
        checked = 0
        for X, Y in pairs:
            checked += 1
            lhs = R.matmul(self.act(X), self.act(Y))
            rhs = R.zeros(self.dim(X.B), self.dim(Y.A))
            for Z, n in multiply_keys_cached(X, Y).items():
                if self.F.is_centric(Z.C):
                    rhs = R.reduce(rhs + n * self.act(Z))
                elif self.dim(Z.C):
                    failures.append(("noncentric level is nonzero", Z.C.key))
            if np.any(R.reduce(lhs - rhs) != 0):
                failures.append(("product", X.sort_key, Y.sort_key))
        return {"valid": not failures, "checked": checked, "failures": failures[:10]}

    def describe(self) -> str:
        parts = ", ".join(f"{K.order}:{self.dims[K]}" for K in self.levels)
        return f"MackeyModule[{self.R.describe()}; {parts}]"

    def __repr__(self) -> str:
        return self.describe()


def zero_module(F: FusionSystem, R: CoefficientRing) -> MackeyModule:
    return MackeyModule(F, R, {}, {})


def direct_sum(*mods: MackeyModule) -> MackeyModule:
    F, R = mods[0].F, mods[0].R
    levels = sorted({K for M in mods for K in M.levels}, key=lambda s: s.key)
    dims = {K: sum(M.dim(K) for M in mods) for K in levels}
    keys = set()
    for M in mods:
        keys.update(M.action)
    action = {}
    for k in keys:
        blocks = R.zeros(dims.get(k.B, 0), dims.get(k.A, 0))
        r0 = c0 = 0
        for M in mods:
            a, b = M.dim(k.A), M.dim(k.B)
            blocks[r0 : r0 + b, c0 : c0 + a] = M.act(k)
            r0 += b
            c0 += a
        action[k] = blocks
    return MackeyModule(F, R, dims, action, label="+".join(M.label for M in mods))


# ---------------------------------------------------------------------------
# morphisms


class ModuleHom:
    """Per-level matrices ``source_K -> target_K``."""

    def __init__(self, source: MackeyModule, target: MackeyModule, blocks: dict[Subgroup, np.ndarray] | None = None):
        self.source = source
        self.target = target
        R = source.R
        blocks = blocks or {}
        self.blocks = {}
        for K in self.levels:
            m = blocks.get(K)
            self.blocks[K] = R.zeros(target.dim(K), source.dim(K)) if m is None else R.array(m)

    @property
    def levels(self) -> list[Subgroup]:
        return sorted(set(self.source.levels) | set(self.target.levels), key=lambda s: s.key)

    def __getitem__(self, K: Subgroup) -> np.ndarray:
        m = self.blocks.get(K)
        if m is None:
            return self.source.R.zeros(self.target.dim(K), self.source.dim(K))
        return m

    def compose(self, inner: "ModuleHom") -> "ModuleHom":
        R = self.source.R
        return ModuleHom(inner.source, self.target, {K: R.matmul(self[K], inner[K]) for K in self.levels})

    def __add__(self, other: "ModuleHom") -> "ModuleHom":
        R = self.source.R
        return ModuleHom(self.source, self.target, {K: R.reduce(self[K] + other[K]) for K in self.levels})

    def __sub__(self, other: "ModuleHom") -> "ModuleHom":
        R = self.source.R
        return ModuleHom(self.source, self.target, {K: R.reduce(self[K] - other[K]) for K in self.levels})

    def scale(self, c) -> "ModuleHom":
        R = self.source.R
        s = R.scalar(c)
        return ModuleHom(self.source, self.target, {K: R.reduce(s * self[K]) for K in self.levels})

    def is_zero(self) -> bool:
        return all(not np.any(self[K] != 0) for K in self.levels)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModuleHom) and (self - other).is_zero()

    __hash__ = None

    def is_morphism(self) -> bool:
        R = self.source.R
        keys = {k for k in module_keys(self.source.F)}
        for k in keys:
            if not (self.source.dim(k.A) or self.target.dim(k.A)):
                continue
            lhs = R.matmul(self.target.act(k), self[k.A])
            rhs = R.matmul(self[k.B], self.source.act(k))
            if np.any(R.reduce(lhs - rhs) != 0):
                return False
        return True

    def vector(self) -> np.ndarray:
        parts = [self[K].reshape(-1) for K in self.levels]
        return np.concatenate(parts) if parts else self.source.R.zeros(0)

    def big_matrix(self) -> np.ndarray:
        """Block-diagonal matrix over the levels of the source/target."""
        R = self.source.R
        rows = sum(self.target.dim(K) for K in self.levels)
        cols = sum(self.source.dim(K) for K in self.levels)
        out = R.zeros(rows, cols)
        r = c = 0
        for K in self.levels:
            b = self[K]
            out[r : r + b.shape[0], c : c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return out

    def is_injective(self) -> bool:
        return all(rank(self.source.R, self[K]) == self.source.dim(K) for K in self.levels)

    def is_surjective(self) -> bool:
        return all(rank(self.source.R, self[K]) == self.target.dim(K) for K in self.levels)


Endomorphism = ModuleHom


def identity_hom(M: MackeyModule) -> ModuleHom:
    return ModuleHom(M, M, {K: M.R.eye(M.dim(K)) for K in M.levels})


def zero_hom(U: MackeyModule, V: MackeyModule) -> ModuleHom:
    return ModuleHom(U, V, {})


def _hom_from_vector(U: MackeyModule, V: MackeyModule, levels: list[Subgroup], vec: np.ndarray) -> ModuleHom:
    blocks, pos = {}, 0
    for K in levels:
        r, c = V.dim(K), U.dim(K)
        blocks[K] = vec[pos : pos + r * c].reshape(r, c)
        pos += r * c
    return ModuleHom(U, V, blocks)


def hom_space(U: MackeyModule, V: MackeyModule) -> list[ModuleHom]:
    """Basis of module morphisms ``U -> V`` (linear solve of the intertwining equations)."""
    R = U.R
    levels = [K for K in sorted(set(U.levels) & set(V.levels), key=lambda s: s.key)]
    offs, pos = {}, 0
    for K in levels:
        offs[K] = pos
        pos += V.dim(K) * U.dim(K)
    n = pos
    if n == 0:
        return []
    rows = []
    for k in module_keys(U.F):
        a, b = k.A, k.B
        ua, ub, va, vb = U.dim(a), U.dim(b), V.dim(a), V.dim(b)
        if not (ua and vb):
            continue
        # V.act(k) h_a - h_b U.act(k) = 0, a (vb x ua) matrix equation
        block = R.zeros(vb * ua, n)
        if a in offs and va:
            block[:, offs[a] : offs[a] + va * ua] = np.kron(V.act(k), R.eye(ua))
        if b in offs and ub:
            block[:, offs[b] : offs[b] + vb * ub] = R.reduce(block[:, offs[b] : offs[b] + vb * ub] - np.kron(R.eye(vb), U.act(k).T))
        rows.append(R.reduce(block))
    if rows:
        system = row_basis(R, np.concatenate(rows, axis=0))
        ns = nullspace(R, system)
    else:
        ns = R.eye(n)
    return [_hom_from_vector(U, V, levels, v) for v in ns]


def end_basis(M: MackeyModule) -> list[ModuleHom]:
    c = M.__dict__.setdefault("_end_basis", None)
    if c is None:
        c = hom_space(M, M)
        M.__dict__["_end_basis"] = c
    return c


def span_coordinates(homs: Sequence[ModuleHom], target: ModuleHom):
    """Coefficients writing ``target`` in the span of ``homs``, or ``None``."""
    R = target.source.R
    if not homs:
        return R.zeros(0) if target.is_zero() else None
    M = np.stack([h.vector() for h in homs]).T
    return solve(R, M, target.vector())


def combine(homs: Sequence[ModuleHom], coeffs, U: MackeyModule, V: MackeyModule) -> ModuleHom:
    out = zero_hom(U, V)
    for h, c in zip(homs, coeffs):
        if c != 0:
            out = out + h.scale(c)
    return out


# ---------------------------------------------------------------------------
# cyclic modules


class CentricQuotient:
    """The centric quotient ``mu/I`` with its left regular action."""

    def __init__(self, F: FusionSystem, R: CoefficientRing):
        self.F, self.R = F, R
        self.keys = module_keys(F)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.n = len(self.keys)
        self._left: dict = {}

    def vec(self, x: MackeyElement) -> np.ndarray:
        v = self.R.zeros(self.n)
        for k, c in x.coeffs.items():
            if self.F.is_centric(k.C):
                v[self.index[k]] = self.R.reduce(np.array([v[self.index[k]] + c], dtype=self.R.dtype))[0]
        return v

    def element(self, v: np.ndarray) -> MackeyElement:
        return MackeyElement(self.R, {self.keys[i]: c for i, c in enumerate(v) if c != 0})

    def left_matrix(self, X: MackeyBasisElement) -> np.ndarray:
        if X not in self._left:
            R = self.R
            L = R.zeros(self.n, self.n)
            for j, Y in enumerate(self.keys):
                if Y.B != X.A:
                    continue
                for Z, c in multiply_keys_cached(X, Y).items():
                    if self.F.is_centric(Z.C):
                        L[self.index[Z], j] = R.reduce(np.array([L[self.index[Z], j] + c], dtype=R.dtype))[0]
            self._left[X] = L
        return self._left[X]

    def left(self, X: MackeyBasisElement, v: np.ndarray) -> np.ndarray:
        return self.R.matmul(self.left_matrix(X), v.reshape(-1, 1)).reshape(-1)

    def multiply(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = self.R.zeros(self.n)
        for i, c in enumerate(u):
            if c != 0:
                out = self.R.reduce(out + c * self.left(self.keys[i], v))
        return out

    def unit_vector(self) -> np.ndarray:
        v = self.R.zeros(self.n)
        for K in self.F.centric_subgroups:
            v[self.index[identity_key(K)]] = self.R.scalar(1)
        return v

    def algebra(self):
        from .idem import FiniteAlgebra

        R = self.R
        c = R.zeros(self.n, self.n, self.n)
        for i, X in enumerate(self.keys):
            L = self.left_matrix(X)
            for j in range(self.n):
                c[i, j] = L[:, j]
        return FiniteAlgebra(R, c, unit=self.unit_vector(), labels=[k.describe() for k in self.keys])


def centric_quotient(F: FusionSystem, R: CoefficientRing) -> CentricQuotient:
    c = _cache(F, "quotient")
    if R not in c:
        c[R] = CentricQuotient(F, R)
    return c[R]


def generated_module(F: FusionSystem, R: CoefficientRing, x: MackeyElement | np.ndarray, label: str = "") -> MackeyModule:
    """The left ideal ``(mu/I) x`` as a module; level ``K`` is ``I_K^K (mu/I) x``."""
    Q = centric_quotient(F, R)
    v = x if isinstance(x, np.ndarray) else Q.vec(x)
    bases: dict[Subgroup, np.ndarray] = {}
    for K in F.centric_subgroups:
        vecs = [Q.left(b, v) for b in Q.keys if b.B == K]
        if vecs:
            B = row_basis(R, np.stack(vecs))
            if B.shape[0]:
                bases[K] = B
    solvers = {K: SubspaceSolver(R, B) for K, B in bases.items()}
    action = {}
    for X in Q.keys:
        if X.A not in bases or X.B not in bases:
            continue
        imgs = np.stack([Q.left(X, w) for w in bases[X.A]])
        co = solvers[X.B].coords(imgs)
        if co is None:
            raise ModuleError("left ideal is not closed under the action")
        action[X] = co.T
    M = MackeyModule(F, R, {K: B.shape[0] for K, B in bases.items()}, action, label=label)
    M.ambient_basis = bases
    M.generator = v
    return M


def cyclic_module(F: FusionSystem, R: CoefficientRing, e: MackeyElement | np.ndarray, label: str = "") -> MackeyModule:
    """``(mu/I) e`` for an idempotent ``e`` of the centric quotient."""
    Q = centric_quotient(F, R)
    v = e if isinstance(e, np.ndarray) else Q.vec(e)
    if np.any(R.reduce(Q.multiply(v, v) - v) != 0):
        raise ModuleError("e is not idempotent in the centric quotient")
    return generated_module(F, R, v, label=label)


# ---------------------------------------------------------------------------
# restriction, conjugation, induction


def restrict(M: MackeyModule, sub: FusionSystem) -> MackeyModule:
    """Restriction to a fusion subsystem over ``sub.S <= S``."""
    T = sub.S
    dims = {K: d for K, d in M.dims.items() if K <= T}
    action = {k: M.act(k) for k in module_keys(sub) if k.A in dims and k.B in dims}
    return MackeyModule(sub, M.R, dims, action, label=f"{M.label}|")


def restrict_to_subgroup(M: MackeyModule, H: Subgroup) -> MackeyModule:
    return restrict(M, subgroup_system(M.F, H))


def conjugate(N: MackeyModule, phi: GroupHom, target_system: FusionSystem) -> MackeyModule:
    """``phi N``: the level ``phi(K)`` carries ``N_K``; ``phi`` is an isomorphism onto ``target_system.S``."""
    inv = phi.inverse()
    dims = {phi.apply(K): d for K, d in N.dims.items()}
    action = {}
    for k in module_keys(target_system):
        if k.A not in dims or k.B not in dims:
            continue
        A, B, C = inv.apply(k.A), inv.apply(k.B), inv.apply(k.C)
        d = inv.as_dict
        images = tuple(d[k.phi(phi(c))] for c in C.elements)
        action[k] = N.act(canonical_key(A, B, C, images))
    return MackeyModule(target_system, N.R, dims, action, label=f"conj({N.label})")


@dataclass
class InducedModule:
    """``N`` induced from ``F_H(H)`` with explicit summands ``(N↑)_K = ⊕_{[H x K]} N_A``."""

    module: MackeyModule
    H: Subgroup
    base: MackeyModule
    summands: dict[Subgroup, list[tuple[orbitprod.ProductPair, int, int]]]


def _factor_cache(F: FusionSystem) -> dict:
    return _cache(F, "factor")


def _factor_through_product(F: FusionSystem, H: Subgroup, Kp: Subgroup, alpha: GroupHom):
    """Unique ``(pair, gamma)`` of ``[H x Kp]`` with ``i gamma = i_D`` and ``psi gamma = alpha``."""
    cache = _factor_cache(F)
    key = (H, Kp, alpha.source, alpha.images)
    if key not in cache:
        D = alpha.source
        prod = orbitprod.product_pairs(F, H, Kp)
        found = orbitprod.factorizations(F, prod, inclusion(D, H), alpha)
        if len(found) != 1:
            raise ModuleError(f"expected a unique factorization through the product, found {len(found)}")
        pair, gamma = found[0]
        # choose gamma given by conjugation with an element of H
        G = F.G
        g = gamma.rep
        rep = None
        for h in H.elements:
            imgs = tuple(G.conj(h, d) for d in D.elements)
            if all(x in pair.A for x in imgs):
                cand = GroupHom(D, pair.A, imgs)
                if orbitprod._orbit_equal(cand, g):
                    rep = cand
                    break
        if rep is None:
            raise ModuleError("factorization is not realized by conjugation inside H")
        cache[key] = (pair, rep)
    return cache[key]


def induce_from_subgroup(N: MackeyModule, F: FusionSystem, H: Subgroup) -> InducedModule:
    """Induction from ``F_H(H)`` to ``F`` through the product decomposition.

    A summand vector ``I c_psi ⊗ n`` moves under a basis element ``Z`` by
    expanding ``Z I c_psi``, splitting each term as ``(I c_psi') y`` with
    ``y`` in the Mackey algebra of ``H`` and letting ``y`` act on ``n``.
    """
    R = N.R
    if not F.is_centric(H):
        raise ModuleError("H must be F-centric")
    summands: dict[Subgroup, list] = {}
    dims = {}
    for K in F.centric_subgroups:
        pos = 0
        entries = []
        for pair in orbitprod.product_pairs(F, H, K):
            d = N.dim(pair.A)
            entries.append((pair, pos, d))
            pos += d
        if pos:
            summands[K] = entries
            dims[K] = pos
    action = {}
    for Z in module_keys(F):
        if Z.A not in dims or Z.B not in dims:
            continue
        M = R.zeros(dims[Z.B], dims[Z.A])
        for pair, col, d in summands[Z.A]:
            if not d:
                continue
            B = pair.A
            src = key_of(B, Z.A, pair.hom.corestrict(Z.A))
            for T, c in multiply_keys_cached(Z, src).items():
                if not F.is_centric(T.C):
                    continue
                D, alpha = T.C, T.phi
                pair2, gamma = _factor_through_product(F, H, Z.B, alpha)
                row = next(off for p, off, _ in summands[Z.B] if p == pair2)
                d2 = N.dim(pair2.A)
                inner = key_of(B, pair2.A, gamma)
                lhs = key_of(pair2.A, Z.B, pair2.hom.corestrict(Z.B))
                if multiply_keys_cached(lhs, inner) != Counter({T: 1}):
                    raise ModuleError("product term does not split through the product pair")
                block = N.act(inner)
                M[row : row + d2, col : col + d] = R.reduce(M[row : row + d2, col : col + d] + c * block)
        action[Z] = M
    mod = MackeyModule(F, R, dims, action, label=f"ind_{H.order}({N.label})")
    return InducedModule(mod, H, N, summands)


@dataclass
class TensorInduced:
    """Induction as ``mu(K) ⊗_{mu(H)} N``: generators ``x ⊗ n`` modulo relations."""

    module: MackeyModule
    base: MackeyModule
    generators: dict[Subgroup, list[tuple[MackeyBasisElement, int]]]
    projection: dict[Subgroup, np.ndarray]

    def class_of(self, K: Subgroup, x: MackeyBasisElement, n: np.ndarray) -> np.ndarray:
        """Coordinates of ``x ⊗ n`` in the quotient at level ``K``."""
        R = self.module.R
        gens = self.generators[K]
        v = R.zeros(len(gens))
        for i, (y, j) in enumerate(gens):
            if y == x:
                v[i] = n[j]
        return R.matmul(self.projection[K], v.reshape(-1, 1)).reshape(-1)


def induce_tensor(N: MackeyModule, big: FusionSystem) -> TensorInduced:
    """Induction to ``big`` by the tensor-product presentation (independent route)."""
    R = N.R
    small = N.F
    big_keys = module_keys(big)
    small_keys = module_keys(small)
    index = {}
    generators: dict[Subgroup, list] = {}
    for K in big.centric_subgroups:
        gens = [(x, j) for x in big_keys if x.B == K and N.dim(x.A) for j in range(N.dim(x.A))]
        if gens:
            generators[K] = gens
            index[K] = {g: i for i, g in enumerate(gens)}

    def tensor_vec(K, x_terms: Counter, n: np.ndarray, coeff=1):
        v = R.zeros(len(generators[K]))
        for z, c in x_terms.items():
            if not big.is_centric(z.C):
                continue
            for j in range(len(n)):
                if n[j] != 0:
                    i = index[K][(z, j)]
                    v[i] = R.reduce(np.array([v[i] + coeff * c * n[j]], dtype=R.dtype))[0]
        return v

    projection: dict[Subgroup, np.ndarray] = {}
    lifts: dict[Subgroup, np.ndarray] = {}
    dims = {}
    for K, gens in generators.items():
        rels = []
        for x in big_keys:
            if x.B != K or not N.dim(x.A):
                continue
            for y in small_keys:
                if y.B != x.A or not N.dim(y.A):
                    continue
                Ay = N.act(y)
                for j in range(N.dim(y.A)):
                    n = R.zeros(N.dim(y.A))
                    n[j] = R.scalar(1)
                    left = tensor_vec(K, multiply_keys_cached(x, y), n)
                    right = tensor_vec(K, Counter({x: 1}), Ay[:, j])
                    rels.append(R.reduce(left - right))
        m = len(gens)
        relspace = row_basis(R, np.stack(rels)) if rels else R.zeros(0, m)
        comp = []
        current = relspace
        for i in range(m):
            e = R.zeros(m)
            e[i] = R.scalar(1)
            if current.shape[0] == 0 or not SubspaceSolver(R, current).contains(e):
                comp.append(e)
                current = row_basis(R, np.concatenate([current, e.reshape(1, -1)])) if current.shape[0] else e.reshape(1, -1)
        if not comp:
            continue
        full = np.concatenate([relspace, np.stack(comp)]) if relspace.shape[0] else np.stack(comp)
        solver = SubspaceSolver(R, full)
        off = relspace.shape[0]
        proj = np.stack([solver.coords(row)[off:] for row in R.eye(m)]).T
        projection[K] = proj
        lifts[K] = np.stack(comp)
        dims[K] = len(comp)
    action = {}
    for Z in big_keys:
        if Z.A not in dims or Z.B not in dims:
            continue
        cols = []
        for lift in lifts[Z.A]:
            i = int(np.nonzero(lift)[0][0])
            x, j = generators[Z.A][i]
            n = R.zeros(N.dim(x.A))
            n[j] = R.scalar(1)
            v = tensor_vec(Z.B, multiply_keys_cached(Z, x), n)
            cols.append(R.matmul(projection[Z.B], v.reshape(-1, 1)).reshape(-1))
        action[Z] = np.stack(cols).T
    gens_kept = {K: generators[K] for K in projection}
    mod = MackeyModule(big, R, dims, action, label=f"tens({N.label})")
    return TensorInduced(mod, N, gens_kept, projection)


def compare_inductions(ind: InducedModule, tens: TensorInduced) -> dict:
    """The map ``I c_psi ⊗ n -> [key ⊗ n]`` is a module isomorphism."""
    M, T = ind.module, tens.module
    R = M.R
    blocks = {}
    for K in M.levels:
        cols = []
        for pair, off, d in ind.summands[K]:
            x = key_of(pair.A, K, pair.hom.corestrict(K))
            for j in range(d):
                n = R.zeros(d)
                n[j] = R.scalar(1)
                cols.append(tens.class_of(K, x, n) if K in tens.projection else R.zeros(0))
        blocks[K] = np.stack(cols).T if cols else R.zeros(T.dim(K), 0)
    f = ModuleHom(M, T, blocks)
    same_dims = all(M.dim(K) == T.dim(K) for K in set(M.levels) | set(T.levels))
    return {
        "dims_equal": same_dims,
        "morphism": f.is_morphism(),
        "bijective": same_dims and f.is_injective(),
        "map": f,
    }


def induce(N: MackeyModule, big: FusionSystem) -> MackeyModule:
    """Induction along ``N.F ⊆ big``."""
    return induce_tensor(N, big).module


# ---------------------------------------------------------------------------
# theta maps and f induced


def theta_maps(M: MackeyModule, H: Subgroup, induced: InducedModule | None = None):
    """``(theta_H: M_H -> M, theta^H: M -> M_H, M_H)`` with ``M_H`` built by :func:`induce_from_subgroup`."""
    F, R = M.F, M.R
    ind = induced or induce_from_subgroup(restrict_to_subgroup(M, H), F, H)
    MH = ind.module
    down, up = {}, {}
    for K in sorted(set(M.levels) | set(MH.levels), key=lambda s: s.key):
        d_low = R.zeros(M.dim(K), MH.dim(K))
        d_up = R.zeros(MH.dim(K), M.dim(K))
        for pair, off, d in ind.summands.get(K, []):
            if not d:
                continue
            A, phi = pair.A, pair.hom
            d_low[:, off : off + d] = M.act(key_of(A, K, phi.corestrict(K)))
            inv = phi.inverse()
            d_up[off : off + d, :] = M.act(key_of(K, A, inv.corestrict(A)))
        down[K], up[K] = d_low, d_up
    return ModuleHom(MH, M, down), ModuleHom(M, MH, up), ind


def induced_endomorphism(ind: InducedModule, f: ModuleHom) -> ModuleHom:
    """``f`` induced: acts on every summand ``N_A`` of ``(N↑)_K`` through ``f_A``."""
    M = ind.module
    R = M.R
    blocks = {}
    for K in M.levels:
        b = R.zeros(M.dim(K), M.dim(K))
        for pair, off, d in ind.summands[K]:
            if d:
                b[off : off + d, off : off + d] = f[pair.A]
        blocks[K] = b
    return ModuleHom(M, M, blocks)


# ---------------------------------------------------------------------------
# transfer, restriction and conjugation on endomorphisms


def end_restrict(f: ModuleHom, sub: FusionSystem) -> ModuleHom:
    """Restriction of an endomorphism to a subsystem (level filter)."""
    U = restrict(f.source, sub)
    V = U if f.source is f.target else restrict(f.target, sub)
    return ModuleHom(U, V, {K: f[K] for K in U.levels})


def end_restrict_to_subgroup(f: ModuleHom, H: Subgroup, ambient: FusionSystem | None = None) -> ModuleHom:
    amb = ambient or f.source.F
    return end_restrict(f, subgroup_system(amb, H))


def end_transfer(M: MackeyModule, H: Subgroup, f: ModuleHom, over: FusionSystem | None = None, ambient: FusionSystem | None = None) -> ModuleHom:
    """``tr_H(f)`` into the endomorphisms of ``M`` over the system ``over`` (default ``M.F``).

    ``(tr f)_K = sum_{(A, phi) in [H x K]} I c_phi f_A c_{phi^-1} R``.
    ``ambient`` is the system whose centric subgroups carry the module.
    """
    G = over or M.F
    amb = ambient or M.F
    R = M.R
    blocks = {}
    for K in M.levels:
        if not K <= G.S:
            continue
        total = R.zeros(M.dim(K), M.dim(K))
        for pair in orbitprod.product_pairs(G, H, K):
            A, phi = pair.A, pair.hom
            if not amb.is_centric(A) or not M.dim(A):
                continue
            up = M.act(key_of(A, K, phi.corestrict(K)))
            down = M.act(key_of(K, A, phi.inverse().corestrict(A)))
            total = R.reduce(total + R.matmul(R.matmul(up, f[A]), down))
        blocks[K] = total
    target = M if G is M.F else restrict(M, G)
    return ModuleHom(target, target, blocks)


def end_conjugate(M: MackeyModule, phi: GroupHom, f: ModuleHom) -> ModuleHom:
    """``phi f``: from endomorphisms over ``F_H(H)`` to those over ``F_{phi H}(phi H)``."""
    R = M.R
    H2 = phi.image
    inv = phi.inverse()
    blocks = {}
    for K in M.levels:
        if not K <= H2:
            continue
        src = inv.apply(K)
        there = phi.restrict(src).corestrict(K)
        back = inv.restrict(K).corestrict(src)
        blocks[K] = R.matmul(R.matmul(M.act(conj_element_key(there)), f[src]), M.act(conj_element_key(back)))
    target = restrict_to_subgroup(M, H2)
    return ModuleHom(target, target, blocks)


def burnside_matrix(M: MackeyModule, omega: BurnsideElement, K: Subgroup, system: FusionSystem | None = None) -> np.ndarray:
    """Matrix of ``omega .`` on level ``K``: ``H . x = sum_{[H x K]} I^K_{phi A} R^K_{phi A} x``."""
    G = system or M.F
    R = M.R
    out = R.zeros(M.dim(K), M.dim(K))
    for H, c in omega.coeffs:
        for p in orbitprod.product_pairs(G, H, K):
            img = p.hom.image
            out = R.reduce(out + c * M.act(canonical_key(K, K, img, img.elements)))
    return out


def burnside_endomorphism(M: MackeyModule, omega: BurnsideElement, system: FusionSystem | None = None) -> ModuleHom:
    G = system or M.F
    target = M if G is M.F else restrict(M, G)
    return ModuleHom(target, target, {K: burnside_matrix(M, omega, K, G) for K in target.levels})


def nf_transfer(M: MackeyModule, H: Subgroup, f: ModuleHom, with_inverse: bool = True, choice: Sequence | None = None) -> ModuleHom:
    """Transfer from ``N_F(H)`` to ``F``.

    ``sum_{(A, phi) in [N_F x S]} tr_{N_phi} r_{N_phi}(f)``, followed by the
    action of the inverse of the class of ``S`` when ``with_inverse`` is set.
    """
    F, R = M.F, M.R
    if not R.is_p_local(F.p):
        raise LinAlgError(f"{R.describe()} is not {F.p}-local")
    if not F.is_fully_normalized(H):
        raise FusionError("H is not fully F-normalized")
    pairs = choice if choice is not None else orbitprod.nf_product_pairs(F, H, F.S)
    total = zero_hom(M, M)
    for pair in pairs:
        N = orbitprod.nf_normalizer_data(F, H, pair.hom).before
        total = total + end_transfer(M, N, end_restrict_to_subgroup(f, N, ambient=F))
    if with_inverse:
        inv = burnside_unit(F, R).S_inverse
        total = burnside_endomorphism(M, inv).compose(total)
    return total


# ---------------------------------------------------------------------------
# transfer ideals and relative projectivity


def restricted_end_basis(M: MackeyModule, H: Subgroup) -> list[ModuleHom]:
    c = M.__dict__.setdefault("_restricted_end", {})
    if H not in c:
        c[H] = end_basis(restrict_to_subgroup(M, H))
    return c[H]


def transfer_ideal(M: MackeyModule, H: Subgroup) -> list[ModuleHom]:
    """Spanning set of ``Tr_H``: transfers of a basis of the endomorphisms of ``M`` over ``F_H(H)``."""
    return [end_transfer(M, H, b) for b in restricted_end_basis(M, H)]


@dataclass
class ProjectivityResult:
    projective: bool
    family: list[Subgroup]
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.projective


def relative_projectivity(M: MackeyModule, family: Iterable[Subgroup]) -> ProjectivityResult:
    """Whether ``Id_M`` lies in ``sum_{H in family} Tr_H``; a witness ``{H: f_H}`` with ``sum tr(f_H) = Id``."""
    fam = sorted(set(family), key=lambda s: s.key)
    if M.is_zero():
        return ProjectivityResult(True, fam, {})
    pieces = []
    for H in fam:
        for b in restricted_end_basis(M, H):
            pieces.append((H, b, end_transfer(M, H, b)))
    ident = identity_hom(M)
    co = span_coordinates([t for _, _, t in pieces], ident)
    if co is None:
        return ProjectivityResult(False, fam, {})
    witness: dict = {}
    for (H, b, _), c in zip(pieces, co):
        if c != 0:
            witness[H] = witness[H] + b.scale(c) if H in witness else b.scale(c)
    return ProjectivityResult(True, fam, witness)


def subconjugacy_closure(F: FusionSystem, family: Iterable[Subgroup]) -> list[Subgroup]:
    fam = list(family)
    return sorted(
        {K for K in F.centric_subgroups if any(F.is_subconjugate(K, X) for X in fam)}, key=lambda s: s.key
    )


@dataclass
class DefectData:
    defect_set: list[Subgroup]
    defect_groups: list[Subgroup]
    vertex: Subgroup | None
    indecomposable: bool | None = None


def _class_of(F: FusionSystem, K: Subgroup) -> Subgroup:
    return F.fully_normalized_rep(K)


def defect_set(M: MackeyModule) -> list[Subgroup]:
    """Minimal subconjugacy-closed family of centric subgroups for which ``M`` is projective."""
    F = M.F
    current = subconjugacy_closure(F, [F.S])
    if M.is_zero():
        return []
    changed = True
    while changed:
        changed = False
        reps = sorted({_class_of(F, K) for K in current}, key=lambda s: (-s.order, s.key))
        maximal = [X for X in reps if not any(Y != X and F.is_subconjugate(X, Y) and not F.are_isomorphic(X, Y) for Y in reps)]
        for X in maximal:
            smaller = [K for K in current if not F.are_isomorphic(K, X)]
            gens = sorted({_class_of(F, K) for K in smaller}, key=lambda s: s.key)
            if relative_projectivity(M, gens):
                current = smaller
                changed = True
                break
    return current


def vertex(M: MackeyModule, require_indecomposable: bool = False) -> DefectData:
    F = M.F
    ds = defect_set(M)
    reps = sorted({_class_of(F, K) for K in ds}, key=lambda s: s.key)
    maximal = [X for X in reps if not any(Y != X and F.is_subconjugate(X, Y) for Y in reps)]
    indec = None
    if require_indecomposable:
        from .idem import is_indecomposable

        indec = is_indecomposable(M)
        if not indec:
            raise ModuleError("module is decomposable; a single vertex is not defined")
    v = maximal[0] if len(maximal) == 1 else None
    return DefectData(ds, maximal, v, indec)


# ---------------------------------------------------------------------------
# summands


def image_module(M: MackeyModule, e: ModuleHom) -> tuple[MackeyModule, ModuleHom, ModuleHom]:
    """The summand ``e(M)`` for an idempotent endomorphism, with inclusion and projection."""
    R = M.R
    bases, dims = {}, {}
    for K in M.levels:
        B = row_basis(R, e[K].T) if M.dim(K) else R.zeros(0, 0)
        if B.shape[0]:
            bases[K] = B
            dims[K] = B.shape[0]
    solvers = {K: SubspaceSolver(R, B) for K, B in bases.items()}
    action = {}
    for k in M.keys:
        if k.A in bases and k.B in bases:
            imgs = R.matmul(M.act(k), bases[k.A].T).T
            co = solvers[k.B].coords(imgs)
            if co is None:
                raise ModuleError("image of the idempotent is not a submodule")
            action[k] = co.T
    U = MackeyModule(M.F, R, dims, action, label=f"{M.label}e")
    inc = ModuleHom(U, M, {K: bases[K].T for K in bases})
    proj = ModuleHom(M, U, {K: solvers[K].coords(e[K].T).T for K in bases})
    return U, inc, proj


# ---------------------------------------------------------------------------
# identity checks for the transfer calculus


def _isos_between_centrics(F: FusionSystem) -> list[GroupHom]:
    out = []
    for A in F.centric_subgroups:
        for B in F.isomorphs(A):
            out.extend(F.isos(A, B))
    return out


def _sum_homs(homs: Sequence[ModuleHom], like: ModuleHom) -> ModuleHom:
    total = zero_hom(like.source, like.target)
    for h in homs:
        total = total + h
    return total


def transfer_property_report(M: MackeyModule, max_isos: int | None = None) -> dict:
    """Check the eleven transfer/restriction/conjugation identities on basis endomorphisms.

    Every identity is linear in the endomorphism, so checking a basis is
    exhaustive.  Returns ``{item: {"holds": bool, "instances": n}}``.
    """
    F, R = M.F, M.R
    cent = [K for K in F.centric_subgroups]
    isos = _isos_between_centrics(F)
    if max_isos is not None:
        isos = isos[:max_isos]
    end_M = end_basis(M)
    report: dict = {}

    def record(item, ok):
        r = report.setdefault(item, {"holds": True, "instances": 0})
        r["instances"] += 1
        r["holds"] = r["holds"] and bool(ok)

    for H in cent:
        FH = subgroup_system(F, H)
        for f in restricted_end_basis(M, H):
            # (1) trivial transfer, restriction and inner conjugation
            record(1, end_transfer(M, H, f, over=FH) == f)
            record(1, end_restrict(f, FH) == f)
            for h in H.elements:
                ch = GroupHom(H, H, tuple(F.G.conj(h, x) for x in H.elements))
                record(1, end_conjugate(M, ch, f) == f)
    for H in cent:
        for K in cent:
            if not H <= K:
                continue
            FH, FK = subgroup_system(F, H), subgroup_system(F, K)
            for g in end_M:
                # (2) restriction composes
                record(2, end_restrict(end_restrict(g, FK), FH) == end_restrict(g, FH))
            for f in restricted_end_basis(M, H):
                # (3) transfer composes
                inner = end_transfer(M, H, f, over=FK)
                record(3, end_transfer(M, K, inner) == end_transfer(M, H, f))
            for phi in isos:
                if phi.source != K:
                    continue
                K2 = phi.image
                H2 = phi.apply(H)
                phiH = phi.restrict(H).corestrict(H2)
                FK2 = subgroup_system(F, K2)
                for f in restricted_end_basis(M, H):
                    # (5) conjugation commutes with transfer
                    lhs = end_conjugate(M, phi.corestrict(K2), end_transfer(M, H, f, over=FK))
                    rhs = end_transfer(M, H2, end_conjugate(M, phiH, f), over=FK2)
                    record(5, lhs == rhs)
                for g in restricted_end_basis(M, K):
                    # (6) conjugation commutes with restriction
                    lhs = end_conjugate(M, phiH, end_restrict(g, FH))
                    rhs = end_restrict(end_conjugate(M, phi.corestrict(K2), g), subgroup_system(F, H2))
                    record(6, lhs == rhs)
    for phi in isos:
        H = phi.source
        H2 = phi.image
        phi2 = phi.corestrict(H2)
        for psi in isos:
            if psi.source != H2:
                continue
            comp = psi.compose(phi2).corestrict(psi.image)
            for f in restricted_end_basis(M, H):
                # (4) conjugations compose
                lhs = end_conjugate(M, psi.corestrict(psi.image), end_conjugate(M, phi2, f))
                record(4, lhs == end_conjugate(M, comp, f))
        for f in restricted_end_basis(M, H):
            # (7) transfer absorbs conjugation
            record(7, end_transfer(M, H2, end_conjugate(M, phi2, f)) == end_transfer(M, H, f))
        for g in end_M:
            # (8) restriction absorbs conjugation
            lhs = end_conjugate(M, phi2, end_restrict_to_subgroup(g, H))
            record(8, lhs == end_restrict_to_subgroup(g, H2))
    for H in cent:
        for f in restricted_end_basis(M, H):
            trf = end_transfer(M, H, f)
            for K in cent:
                # (9) Mackey formula
                FK = subgroup_system(F, K)
                lhs = end_restrict(trf, FK)
                terms = []
                for pair in orbitprod.product_pairs(F, H, K):
                    A, phi = pair.A, pair.hom
                    img = phi.image
                    piece = end_conjugate(M, phi.corestrict(img), _restrict_hom(M, f, A))
                    terms.append(end_transfer(M, img, piece, over=FK))
                record(9, lhs == _sum_homs(terms, lhs))
            for g in end_M:
                # (10) transfer is a bimodule map
                rg = end_restrict_to_subgroup(g, H)
                record(10, g.compose(trf) == end_transfer(M, H, rg.compose(f)))
                record(10, trf.compose(g) == end_transfer(M, H, f.compose(rg)))
        omega = burnside_class(F, R, H)
        act = burnside_endomorphism(M, omega)
        for g in end_M:
            # (11) transfer after restriction is the Burnside action
            record(11, end_transfer(M, H, end_restrict_to_subgroup(g, H)) == act.compose(g))
    return report


def _restrict_hom(M: MackeyModule, f: ModuleHom, A: Subgroup) -> ModuleHom:
    """Restriction of an endomorphism of ``M`` over ``F_H(H)`` to ``F_A(A)`` for ``A <= H``."""
    target = restrict_to_subgroup(M, A)
    return ModuleHom(target, target, {K: f[K] for K in target.levels})


def nf_transfer_report(M: MackeyModule, H: Subgroup, with_inverse: bool = True) -> dict:
    """``tr_{N_F} tr_H^{N_F} = tr_H`` on a basis, and the image of ``Tr_H^{N_F}`` equals ``Tr_H``."""
    F = M.F
    NF = orbitprod.nf_system(F, H)
    basis = restricted_end_basis(M, H)
    ok = True
    for f in basis:
        inner = end_transfer(M, H, f, over=NF)
        ok = ok and nf_transfer(M, H, inner, with_inverse=with_inverse) == end_transfer(M, H, f)
    # image of Tr_H^{N_F} under tr_{N_F} versus Tr_H^F
    img = [nf_transfer(M, H, end_transfer(M, H, f, over=NF), with_inverse=with_inverse) for f in basis]
    tr_F = transfer_ideal(M, H)
    span_img = _span_rows(M.R, img)
    span_tr = _span_rows(M.R, tr_F)
    same = _same_span(M.R, span_img, span_tr)
    return {"composition": ok, "image_equals_ideal": same, "instances": len(basis)}


def _span_rows(R: CoefficientRing, homs: Sequence[ModuleHom]) -> np.ndarray:
    if not homs:
        return R.zeros(0, 0)
    return row_basis(R, np.stack([h.vector() for h in homs]))


def _same_span(R: CoefficientRing, U: np.ndarray, V: np.ndarray) -> bool:
    if U.shape[0] != V.shape[0]:
        return False
    if U.shape[0] == 0:
        return True
    return rank(R, np.concatenate([U, V])) == U.shape[0]


def y_family(F: FusionSystem, H: Subgroup) -> list[Subgroup]:
    """Centric ``K <= N_S(H)``, ``K`` subconjugate to ``H`` and ``K != H``."""
    NS = F.N_S(H)
    return [K for K in F.centric_subgroups if K <= NS and K != H and F.is_subconjugate(K, H)]


def x_family(F: FusionSystem, H: Subgroup) -> list[Subgroup]:
    """Centric ``K`` properly subconjugate to ``H``."""
    return [K for K in F.centric_subgroups if F.is_subconjugate(K, H) and not F.are_isomorphic(K, H)]


def shuffled_choice(F: FusionSystem, H: Subgroup, K: Subgroup, rng) -> list[tuple[Subgroup, GroupHom]]:
    """Another valid ``[H x K]``: ``(A^h, c_k phi c_h)`` for random ``h`` in ``H``, ``k`` in ``K``."""
    G = F.G
    out = []
    for pair in orbitprod.product_pairs(F, H, K):
        h = H.elements[int(rng.integers(len(H.elements)))]
        k = K.elements[int(rng.integers(len(K.elements)))]
        A2 = pair.A.conj_right(h)
        imgs = tuple(G.conj(k, pair.hom(G.conj(h, a))) for a in A2.elements)
        out.append((A2, GroupHom(A2, K, imgs)))
    return out


def workaround_rhs(M: MackeyModule, H: Subgroup, f: ModuleHom, choice: Sequence[tuple[Subgroup, GroupHom]] | None = None) -> ModuleHom:
    """``tr_H^{N_F}(f) + sum_{K in Y} tr_K^{N_F}(f_K)`` for the given ``[H x N_S]``."""
    F, R = M.F, M.R
    NF = orbitprod.nf_system(F, H)
    NS = NF.S
    pairs = choice if choice is not None else orbitprod.product_pairs(F, H, NS).as_tuples()
    inv = burnside_unit(NF, R).S_inverse
    low = restrict(M, NF)
    total = end_transfer(M, H, f, over=NF)
    ys = set(y_family(F, H))
    by_K: dict[Subgroup, list[ModuleHom]] = {}
    for A, phi in pairs:
        K = phi.image
        if K not in ys:
            continue
        piece = end_conjugate(M, phi.corestrict(K), _restrict_hom(M, f, A))
        act = ModuleHom(piece.source, piece.target, {L: burnside_matrix(M, inv, L, NF) for L in piece.source.levels})
        by_K.setdefault(K, []).append(act.compose(piece))
    for K, pieces in by_K.items():
        fK = _sum_homs(pieces, pieces[0])
        total = total + end_transfer(M, K, fK, over=NF)
    return ModuleHom(low, low, {L: total[L] for L in low.levels})


def workaround_report(M: MackeyModule, H: Subgroup, reshuffles: int = 3, seed: int = 0) -> dict:
    F = M.F
    NF = orbitprod.nf_system(F, H)
    rng = np.random.default_rng(seed)
    ok = True
    count = 0
    choices = [None] + [shuffled_choice(F, H, NF.S, rng) for _ in range(reshuffles)]
    for f in restricted_end_basis(M, H):
        lhs = end_restrict(end_transfer(M, H, f), NF)
        for ch in choices:
            count += 1
            ok = ok and lhs == workaround_rhs(M, H, f, ch)
    return {"holds": ok, "instances": count, "y_family": [K.order for K in y_family(F, H)]}


def averaged_transfer_report(M: MackeyModule, H: Subgroup) -> dict:
    """``sum_{phi in Hom_O(H, S)} tr_{phi H} phi = (S .) tr_H`` when ``F = N_F(H)``."""
    F, R = M.F, M.R
    if not orbitprod.nf_system(F, H).same_homs(F):
        raise FusionError("the identity needs F equal to the normalizer system of H")
    S_act = burnside_endomorphism(M, burnside_class(F, R, F.S))
    ok = True
    homs = F.orbit_hom_set(H, F.S)
    for f in restricted_end_basis(M, H):
        terms = []
        for phibar in homs:
            phi = phibar.rep
            img = phi.image
            terms.append(end_transfer(M, img, end_conjugate(M, phi.corestrict(img), f)))
        lhs = _sum_homs(terms, terms[0])
        ok = ok and lhs == S_act.compose(end_transfer(M, H, f))
    return {"holds": ok, "morphisms": len(homs)}


# ---------------------------------------------------------------------------
# serialization


def _scalar_json(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else int(c.numerator)
    return int(c)


def module_to_json(M: MackeyModule) -> dict:
    """Levels with dimensions, and action matrices as sparse ``[row, col, value]`` triples."""
    levels = [{"id": K.canonical_id, "order": K.order, "dim": M.dim(K)} for K in M.levels]
    action = []
    for k in sorted(M.action, key=lambda k: k.sort_key):
        m = M.action[k]
        entries = [[i, j, _scalar_json(m[i, j])] for i in range(m.shape[0]) for j in range(m.shape[1]) if m[i, j] != 0]
        if entries:
            action.append(
                {
                    "key": k.describe(),
                    "A": k.A.canonical_id,
                    "B": k.B.canonical_id,
                    "C": k.C.canonical_id,
                    "images": list(k.images),
                    "entries": entries,
                }
            )
    return {"field": M.R.describe(), "label": M.label, "levels": levels, "action": action}
