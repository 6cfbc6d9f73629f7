"""The Mackey algebra of a fusion system and the centric Burnside ring.

A basis element ``I^B_{phi C} c_phi R^A_C`` is encoded by
:class:`MackeyBasisElement` ``(A, B, C, phi)``.  Encodings related by
``C -> C^a`` and ``phi -> c_b phi c_a`` (``a`` in ``A``, ``b`` in ``B``)
describe the same element, so every key is stored in canonical form.
Products of basis elements are computed with the Mackey formula; an
independent biset-composition routine serves as a cross-check.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .fusion import FusionError, FusionSystem, GroupHom
from .grp import Subgroup, double_coset_reps
from .linalg import QQ, CoefficientRing, LinAlgError, fp, solve
from . import orbitprod

__all__ = [
    "CoefficientRing",
    "QQ",
    "fp",
    "MackeyBasisElement",
    "MackeyElement",
    "BurnsideElement",
    "canonical_key",
    "mackey_basis",
    "multiply_keys",
    "multiply",
    "centric_project",
    "unit",
    "centric_unit",
    "biset_product",
    "biset_basis_count",
    "burnside_classes",
    "burnside_product",
    "burnside_unit",
    "gamma",
    "gamma_bar",
    "burnside_act",
]


@dataclass(frozen=True)
class MackeyBasisElement:
    """``I^B_{phi(C)} c_phi R^A_C``; maps level ``A`` to level ``B``."""

    A: Subgroup
    B: Subgroup
    C: Subgroup
    images: tuple[int, ...]

    @property
    def phi(self) -> GroupHom:
        return GroupHom(self.C, self.B, self.images)

    @property
    def image(self) -> Subgroup:
        return Subgroup(self.C.group, tuple(sorted(self.images)))

    @property
    def sort_key(self) -> tuple:
        return (self.A.key, self.B.key, self.C.key, self.images)

    def describe(self) -> str:
        return f"I[{self.image.order}->{self.B.order}] c R[{self.C.order}<-{self.A.order}]"


_CANON: dict[tuple, MackeyBasisElement] = {}


def canonical_key(A: Subgroup, B: Subgroup, C: Subgroup, images: tuple[int, ...]) -> MackeyBasisElement:
    """Smallest encoding of the element over ``C -> C^a``, ``phi -> c_b phi c_a``."""
    raw = (id(A.group), A.key, B.key, C.key, images)
    hit = _CANON.get(raw)
    if hit is not None:
        return hit
    G = A.group
    best = None
    d = dict(zip(C.elements, images))
    for a in A.elements:
        Ca = C.conj_right(a)
        inner = tuple(d[G.conj(a, x)] for x in Ca.elements)
        if best is not None and Ca.key > best[0]:
            continue
        for b in B.elements:
            t = tuple(G.conj(b, y) for y in inner)
            cand = (Ca.key, t)
            if best is None or cand < best:
                best = cand
    (_, elems), t = best
    key = MackeyBasisElement(A, B, Subgroup(G, elems), t)
    _CANON[raw] = key
    return key


def identity_key(H: Subgroup) -> MackeyBasisElement:
    return canonical_key(H, H, H, H.elements)


def conj_key(phi: GroupHom) -> MackeyBasisElement:
    """``c_phi`` from ``phi.source`` to the image of ``phi``."""
    img = phi.image
    return canonical_key(phi.source, img, phi.source, phi.images)


def iso_key(A: Subgroup, B: Subgroup, phi: GroupHom) -> MackeyBasisElement:
    """``I^B_{phi C} c_phi R^A_C`` for ``phi`` defined on ``C <= A``."""
    return canonical_key(A, B, phi.source, phi.images)


def induction_key(C: Subgroup, A: Subgroup) -> MackeyBasisElement:
    return canonical_key(C, A, C, C.elements)


def restriction_key(C: Subgroup, A: Subgroup) -> MackeyBasisElement:
    return canonical_key(A, C, C, C.elements)


def _up_to_conjugacy(A: Subgroup, subs: Iterable[Subgroup]) -> list[Subgroup]:
    seen: set[Subgroup] = set()
    out = []
    for C in sorted(subs, key=lambda s: s.key):
        if C in seen:
            continue
        out.append(C)
        seen.update(C.conj(a) for a in A.elements)
    return out


def mackey_basis(
    F: FusionSystem, levels: Iterable[Subgroup] | None = None, centric_only: bool = False
) -> list[MackeyBasisElement]:
    """All basis elements between the given levels (default: every subgroup of ``S``).

    With ``centric_only`` only elements factoring through a centric ``C``
    are kept, which is the basis of the centric quotient.
    """
    levels = list(F.subgroups if levels is None else levels)
    keys = set()
    for A in levels:
        below = [C for C in F.subgroups_below(A) if (not centric_only or F.is_centric(C))]
        for C in _up_to_conjugacy(A, below):
            for B in levels:
                for phi in F.hom_set(C, B):
                    keys.add(canonical_key(A, B, C, phi.images))
    return sorted(keys, key=lambda k: k.sort_key)


def _product_cache(F) -> dict:
    return F.__dict__.setdefault("_mackey_products", {})


def multiply_keys(X: MackeyBasisElement, Y: MackeyBasisElement) -> Counter:
    """``X * Y`` as an integer combination of basis keys (``Y`` acts first)."""
    if Y.B != X.A:
        return Counter()
    G = X.A.group
    A = X.A
    phi = dict(zip(X.C.elements, X.images))
    psi = Y.phi
    psiD = psi.image
    out: Counter = Counter()
    for x in double_coset_reps(A, X.C, psiD):
        inter = X.C.conj_right(x).intersect(psiD)
        Dp = psi.preimage(inter)
        alpha = tuple(phi[G.conj(x, psi(d))] for d in Dp.elements)
        out[canonical_key(Y.A, X.B, Dp, alpha)] += 1
    return out


_KEY_PRODUCTS: dict[tuple, Counter] = {}


def multiply_keys_cached(X: MackeyBasisElement, Y: MackeyBasisElement) -> Counter:
    k = (id(X.A.group), X, Y)
    if k not in _KEY_PRODUCTS:
        _KEY_PRODUCTS[k] = multiply_keys(X, Y)
    return _KEY_PRODUCTS[k]


class MackeyElement:
    """Finitely supported ``R``-combination of basis keys."""

    def __init__(self, R: CoefficientRing, coeffs: dict | None = None):
        self.R = R
        self.coeffs: dict[MackeyBasisElement, object] = {}
        for k, v in (coeffs or {}).items():
            v = R.scalar(v)
            if v != 0:
                self.coeffs[k] = v

    @classmethod
    def basis(cls, R: CoefficientRing, key: MackeyBasisElement) -> "MackeyElement":
        return cls(R, {key: 1})

    def __add__(self, other: "MackeyElement") -> "MackeyElement":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = self.R.scalar(out.get(k, 0) + v)
        return MackeyElement(self.R, out)

    def __sub__(self, other: "MackeyElement") -> "MackeyElement":
        return self + other.scale(-1)

    def scale(self, c) -> "MackeyElement":
        c = self.R.scalar(c)
        return MackeyElement(self.R, {k: self.R.scalar(v * c) for k, v in self.coeffs.items()})

    def __mul__(self, other: "MackeyElement") -> "MackeyElement":
        return multiply(self.R, self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, MackeyElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def keys(self) -> list[MackeyBasisElement]:
        return sorted(self.coeffs, key=lambda k: k.sort_key)

    def __repr__(self) -> str:
        terms = [f"{v}*{k.describe()}" for k, v in sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key)]
        return "MackeyElement(" + " + ".join(terms) + ")" if terms else "MackeyElement(0)"


def multiply(R: CoefficientRing, x: MackeyElement, y: MackeyElement) -> MackeyElement:
    out: dict = {}
    for kx, cx in x.coeffs.items():
        for ky, cy in y.coeffs.items():
            for kz, n in multiply_keys_cached(kx, ky).items():
                out[kz] = R.scalar(out.get(kz, 0) + cx * cy * n)
    return MackeyElement(R, out)


def centric_project(F: FusionSystem, x: MackeyElement) -> MackeyElement:
    """Image in the centric quotient: drop keys factoring through a non-centric subgroup."""
    return MackeyElement(x.R, {k: v for k, v in x.coeffs.items() if F.is_centric(k.C)})


def unit(F: FusionSystem, R: CoefficientRing) -> MackeyElement:
    return MackeyElement(R, {identity_key(H): 1 for H in F.subgroups})


def centric_unit(F: FusionSystem, R: CoefficientRing) -> MackeyElement:
    return centric_project(F, unit(F, R))


# ---------------------------------------------------------------------------
# biset oracle


class _Biset:
    """Transitive ``(B, A)``-biset ``(B x A) / Delta(C, phi)``.

    Points are cosets ``(u, v) Delta``; ``b . (u, v) . a = (b u, a^-1 v)``.
    """

    def __init__(self, key: MackeyBasisElement):
        G = key.A.group
        self.key = key
        phi = dict(zip(key.C.elements, key.images))
        index: dict[tuple[int, int], int] = {}
        reps: list[tuple[int, int]] = []
        for u in key.B.elements:
            for v in key.A.elements:
                if (u, v) in index:
                    continue
                i = len(reps)
                reps.append((u, v))
                for c in key.C.elements:
                    index[(G.mul(u, phi[c]), G.mul(v, c))] = i
        self.G = G
        self.index = index
        self.reps = reps

    def left(self, b: int, i: int) -> int:
        u, v = self.reps[i]
        return self.index[(self.G.mul(b, u), v)]

    def right(self, i: int, a: int) -> int:
        u, v = self.reps[i]
        return self.index[(u, self.G.mul(self.G.inv(a), v))]


def biset_product(X: MackeyBasisElement, Y: MackeyBasisElement) -> Counter:
    """Decompose ``X x_A Y`` into transitive bisets, returned as basis keys."""
    if Y.B != X.A:
        return Counter()
    G = X.A.group
    bx, by = _Biset(X), _Biset(Y)
    nx, ny = len(bx.reps), len(by.reps)
    parent = list(range(nx * ny))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    gens = X.A.elements
    for i in range(nx):
        for j in range(ny):
            for a in gens:
                s = find(bx.right(i, a) * ny + j)
                t = find(i * ny + by.left(a, j))
                if s != t:
                    parent[s] = t
    classes: dict[int, list[int]] = {}
    for p in range(nx * ny):
        classes.setdefault(find(p), []).append(p)
    B, E = X.B, Y.A
    done: set[int] = set()
    out: Counter = Counter()
    for root in sorted(classes):
        if root in done:
            continue
        orbit = set()
        i, j = divmod(root, ny)
        stab_src, stab_img = [], []
        for b in B.elements:
            for e in E.elements:
                q = find(bx.left(b, i) * ny + by.right(j, G.inv(e)))
                orbit.add(q)
                if q == root:
                    stab_src.append(e)
                    stab_img.append(b)
        done.update(orbit)
        pairs = sorted(zip(stab_src, stab_img))
        D = Subgroup(G, tuple(e for e, _ in pairs))
        if len(set(D.elements)) != len(pairs):
            raise FusionError("biset composition is not free on the left")
        out[canonical_key(E, B, D, tuple(b for _, b in pairs))] += 1
    return out


def biset_basis_count(F: FusionSystem) -> int:
    """Number of transitive bisets ``(B x A)/Delta(C, phi)`` with ``phi`` in ``F``, by orbit counting.

    For each ordered pair of levels the morphisms ``C -> B`` (``C <= A``)
    are collected as twisted diagonals and grouped into ``B x A``-conjugacy
    classes of subgroups of ``B x A``.
    """
    G = F.G
    total = 0
    for A in F.subgroups:
        for B in F.subgroups:
            diags = set()
            for C in F.subgroups_below(A):
                for phi in F.hom_set(C, B):
                    diags.add(frozenset(zip(phi.images, C.elements)))
            seen: set[frozenset] = set()
            for dg in sorted(diags, key=lambda s: sorted(s)):
                if dg in seen:
                    continue
                total += 1
                for b in B.elements:
                    for a in A.elements:
                        seen.add(frozenset((G.conj(b, y), G.conj(a, x)) for y, x in dg))
    return total


# ---------------------------------------------------------------------------
# centric Burnside ring


@dataclass(frozen=True)
class BurnsideElement:
    R: CoefficientRing
    coeffs: tuple[tuple[Subgroup, object], ...]

    @classmethod
    def make(cls, R: CoefficientRing, coeffs: dict) -> "BurnsideElement":
        items = [(k, R.scalar(v)) for k, v in coeffs.items()]
        items = [(k, v) for k, v in items if v != 0]
        return cls(R, tuple(sorted(items, key=lambda kv: kv[0].key)))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return BurnsideElement.make(self.R, d)

    def scale(self, c) -> "BurnsideElement":
        return BurnsideElement.make(self.R, {k: v * self.R.scalar(c) for k, v in self.coeffs})


def burnside_classes(F: FusionSystem) -> list[Subgroup]:
    """Fully normalized representative of each centric isomorphism class."""
    return sorted((F.fully_normalized_rep(cls[0]) for cls in F.centric_classes()), key=lambda s: s.key)


def class_rep(F: FusionSystem, H: Subgroup) -> Subgroup:
    return F.fully_normalized_rep(H)


def _basic_product(F: FusionSystem, H: Subgroup, K: Subgroup) -> Counter:
    return Counter(class_rep(F, p.A) for p in orbitprod.product_pairs(F, H, K))


def burnside_class(F: FusionSystem, R: CoefficientRing, H: Subgroup) -> BurnsideElement:
    return BurnsideElement.make(R, {class_rep(F, H): 1})


def burnside_product(F: FusionSystem, R: CoefficientRing, x: BurnsideElement, y: BurnsideElement) -> BurnsideElement:
    out: dict = {}
    for H, a in x.coeffs:
        for K, b in y.coeffs:
            for A, n in _basic_product(F, H, K).items():
                out[A] = out.get(A, 0) + a * b * n
    return BurnsideElement.make(R, out)


@dataclass(frozen=True)
class BurnsideUnit:
    unit: BurnsideElement
    S_inverse: BurnsideElement


def burnside_unit(F: FusionSystem, R: CoefficientRing) -> BurnsideUnit:
    """Solve ``u * H = H`` for all classes, then ``S * v = u``."""
    if not R.is_p_local(F.p):
        raise LinAlgError(f"{R.describe()} is not {F.p}-local")
    classes = burnside_classes(F)
    n = len(classes)
    # column j of block H: coefficients of classes[j] * H
    rows, rhs = [], []
    tables = {(X, H): _basic_product(F, X, H) for X in classes for H in classes}
    for H in classes:
        for target in classes:
            rows.append([tables[(X, H)].get(target, 0) for X in classes])
            rhs.append(1 if target == H else 0)
    M = R.array(rows)
    u = solve(R, M, R.array(rhs))
    if u is None:
        raise LinAlgError("not p-local or inconsistent structure constants: no unit")
    unit_el = BurnsideElement.make(R, {classes[i]: u[i] for i in range(n)})
    S = class_rep(F, F.S)
    rows = []
    for target in classes:
        rows.append([tables[(S, X)].get(target, 0) for X in classes])
    v = solve(R, R.array(rows), R.array([unit_el.as_dict().get(t, 0) for t in classes]))
    if v is None:
        raise LinAlgError("not p-local or inconsistent structure constants: S has no inverse")
    return BurnsideUnit(unit_el, BurnsideElement.make(R, {classes[i]: v[i] for i in range(n)}))


def gamma(F: FusionSystem, R: CoefficientRing, H: Subgroup) -> MackeyElement:
    """``sum_J sum_{(A, phi) in [J x H]} pi(I^J_A R^J_A)``."""
    if not F.is_centric(H):
        raise FusionError("gamma needs a centric subgroup")
    out: dict = {}
    for J in F.centric_subgroups:
        for p in orbitprod.product_pairs(F, J, H):
            k = canonical_key(J, J, p.A, p.A.elements)
            out[k] = out.get(k, 0) + 1
    return centric_project(F, MackeyElement(R, out))


def gamma_bar(F: FusionSystem, R: CoefficientRing, omega: BurnsideElement) -> MackeyElement:
    total = MackeyElement(R)
    for H, c in omega.coeffs:
        total = total + gamma(F, R, H).scale(c)
    return total


def burnside_act(F: FusionSystem, R: CoefficientRing, omega: BurnsideElement, M, level: Subgroup, x: np.ndarray) -> np.ndarray:
    """``omega . x`` for ``x`` in ``M_level``: ``H . x = sum_{[H x K]} I^K_{phi A} R^K_{phi A} x``."""
    if not R.is_p_local(F.p):
        raise LinAlgError(f"{R.describe()} is not {F.p}-local")
    out = R.zeros(len(x))
    for H, c in omega.coeffs:
        for p in orbitprod.product_pairs(F, H, level):
            img = p.hom.image
            k = canonical_key(level, level, img, img.elements)
            out = R.reduce(out + c * R.matmul(M.act(k), x.reshape(-1, 1)).reshape(-1))
    return out


def gamma_report(F: FusionSystem, R: CoefficientRing) -> dict:
    """Unit, centrality and product checks for the Burnside action on ``mu/I``.

    ``unit_maps_to_one``: the Burnside unit goes to the unit of ``mu/I``.
    ``central``: every ``Gamma(H)`` commutes with every centric basis element.
    ``products``: ``Gamma(K) Gamma(H) = sum_{[K x H]} Gamma(A)``.
    """
    u = burnside_unit(F, R)
    unit_ok = gamma_bar(F, R, u.unit) == centric_unit(F, R)
    cent = F.centric_subgroups
    gammas = {H: gamma(F, R, H) for H in cent}
    basis = mackey_basis(F, centric_only=True)
    central_failures = 0
    for H in cent:
        for b in basis:
            x = MackeyElement.basis(R, b)
            if centric_project(F, gammas[H] * x) != centric_project(F, x * gammas[H]):
                central_failures += 1
    product_failures = 0
    for K in cent:
        for H in cent:
            lhs = centric_project(F, gammas[K] * gammas[H])
            rhs = MackeyElement(R)
            for p in orbitprod.product_pairs(F, K, H):
                rhs = rhs + gammas[p.A]
            if lhs != rhs:
                product_failures += 1
    return {
        "unit_maps_to_one": unit_ok,
        "central": central_failures == 0,
        "products": product_failures == 0,
        "central_checks": len(cent) * len(basis),
        "product_checks": len(cent) ** 2,
        "holds": unit_ok and central_failures == 0 and product_failures == 0,
    }
