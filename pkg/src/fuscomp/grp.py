"""Finite permutation groups with full element enumeration.

Every group handled by the package is small enough to list all of its
elements, so nothing here uses stabilizer chains.  Elements of a
:class:`FiniteGroup` are stored once, sorted lexicographically by their image
tuples, and referred to everywhere else by their index in that list.  The
index order is therefore the canonical total order on elements.

Permutations act on ``0..degree-1`` internally and compose right to left:
``mul(g, h)`` is the map ``x -> g(h(x))``.  Conjugation follows the
convention ``c_g(x) = g x g^-1``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

DEFAULT_MAX_ORDER = 10000
_DATA_DIR = Path(__file__).resolve().parent / "data"


class GroupTooLarge(ValueError):
    """Raised when enumeration would exceed the configured order bound."""


def max_group_order() -> int:
    """The desk-scale bound, overridable through ``FUSCOMP_MAX_GROUP``."""
    raw = os.environ.get("FUSCOMP_MAX_GROUP")
    return int(raw) if raw else DEFAULT_MAX_ORDER


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def cycles_to_perm(cycles: Sequence[Sequence[int]], degree: int) -> tuple[int, ...]:
    """Convert 1-based cycle notation to a 0-based image tuple."""
    images = list(range(degree))
    seen: set[int] = set()
    for cycle in cycles:
        for point in cycle:
            if not 1 <= point <= degree:
                raise ValueError(f"point {point} outside 1..{degree}")
            if point in seen:
                raise ValueError(f"point {point} appears twice; not a bijection")
            seen.add(point)
        for i, point in enumerate(cycle):
            images[point - 1] = cycle[(i + 1) % len(cycle)] - 1
    return tuple(images)


def perm_to_cycles(perm: Sequence[int]) -> list[list[int]]:
    """Inverse of :func:`cycles_to_perm`, omitting fixed points."""
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = []
        x = start
        while x not in seen:
            seen.add(x)
            cycle.append(x + 1)
            x = perm[x]
        out.append(cycle)
    return out


class FiniteGroup:
    """A permutation group given by generators, enumerated eagerly.

    The multiplication table is built once; afterwards every group operation
    is a list lookup.
    """

    def __init__(
        self,
        degree: int,
        generators: Iterable[Sequence[int]],
        name: str | None = None,
        max_order: int | None = None,
    ):
        self.degree = int(degree)
        self.name = name
        gens = [tuple(int(x) for x in g) for g in generators]
        for idx, g in enumerate(gens):
            if len(g) != self.degree or sorted(g) != list(range(self.degree)):
                raise ValueError(f"generator {idx} is not a bijection of {self.degree} points")
        self.generators = gens
        bound = max_group_order() if max_order is None else max_order
        identity = tuple(range(self.degree))
        found = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = tuple(g[i] for i in x)
                    if y not in found:
                        found.add(y)
                        nxt.append(y)
                        if len(found) > bound:
                            raise GroupTooLarge(
                                f"group order exceeds the bound {bound}; "
                                "raise FUSCOMP_MAX_GROUP to allow it"
                            )
            frontier = nxt
        self.perms: list[tuple[int, ...]] = sorted(found)
        self.index = {p: i for i, p in enumerate(self.perms)}
        self.order = len(self.perms)
        self.identity = self.index[identity]
        n = self.order
        perms = self.perms
        index = self.index
        self._mul = [[index[tuple(g[i] for i in h)] for h in perms] for g in perms]
        inv = [0] * n
        for i, g in enumerate(perms):
            gi = [0] * self.degree
            for x, y in enumerate(g):
                gi[y] = x
            inv[i] = index[tuple(gi)]
        self._inv = inv
        self.generator_indices = [index[g] for g in gens]
        self._lattice = None

    # -- elementary operations -------------------------------------------
    def mul(self, g: int, h: int) -> int:
        return self._mul[g][h]

    def inv(self, g: int) -> int:
        return self._inv[g]

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self._mul[self._mul[g][x]][self._inv[g]]

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self._mul[x][g]
            k += 1
        return k

    def closure(self, gens: Iterable[int]) -> tuple[int, ...]:
        """Sorted elements of the subgroup generated by ``gens``."""
        gens = [g for g in set(gens) if g != self.identity]
        found = {self.identity}
        frontier = [self.identity]
        mul = self._mul
        while frontier:
            nxt = []
            for x in frontier:
                row = mul[x]
                for g in gens:
                    y = row[g]
                    if y not in found:
                        found.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(found))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    def subgroup(self, gens: Iterable[int]) -> "Subgroup":
        return Subgroup(self, self.closure(gens))

    def subgroup_from_perms(self, perms: Iterable[Sequence[int]]) -> "Subgroup":
        idx = []
        for p in perms:
            p = tuple(p)
            if p not in self.index:
                raise ValueError("permutation is not an element of the group")
            idx.append(self.index[p])
        return self.subgroup(idx)

    def __repr__(self) -> str:
        label = self.name or "group"
        return f"FiniteGroup({label}, order={self.order}, degree={self.degree})"


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a fixed universe group, as a sorted tuple of indices."""

    group: FiniteGroup = field(compare=False, hash=False, repr=False)
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "_set", frozenset(self.elements))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    def __le__(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "Subgroup") -> bool:
        return self._set < other._set

    @property
    def key(self) -> tuple:
        """Canonical sort key: order first, then the element list."""
        return (len(self.elements), self.elements)

    def conj(self, g: int) -> "Subgroup":
        """``g H g^-1``."""
        G = self.group
        return Subgroup(G, tuple(sorted(G.conj(g, h) for h in self.elements)))

    def conj_right(self, g: int) -> "Subgroup":
        """``H^g = g^-1 H g``."""
        return self.conj(self.group.inv(g))

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.group, tuple(sorted(self._set & other._set)))

    def join(self, other: "Subgroup") -> "Subgroup":
        return self.group.subgroup(self.elements + other.elements)

    def is_p_group(self, p: int) -> bool:
        n = self.order
        while n % p == 0:
            n //= p
        return n == 1

    @property
    def canonical_id(self) -> int:
        """Position in the universe's deduplicated subgroup list."""
        return subgroup_lattice(self.group)[2][self]

    def check(self) -> None:
        """Verify closure, identity and inverses."""
        G = self.group
        if G.identity not in self:
            raise ValueError("subgroup lacks the identity")
        for a in self.elements:
            if G.inv(a) not in self:
                raise ValueError("subgroup not closed under inverses")
            for b in self.elements:
                if G.mul(a, b) not in self:
                    raise ValueError("subgroup not closed under products")

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, elements={self.elements})"


def _as_subgroup(G: FiniteGroup | Subgroup) -> Subgroup:
    return G.whole if isinstance(G, FiniteGroup) else G


def subgroups_of(H: FiniteGroup | Subgroup) -> list[Subgroup]:
    """All subgroups of ``H`` (a group or a subgroup of a universe), sorted."""
    H = _as_subgroup(H)
    G = H.group
    cyclic = {}
    for g in H.elements:
        C = G.subgroup([g])
        cyclic[C.elements] = C
    cyclics = sorted(cyclic.values(), key=lambda s: s.key)
    found = {c.elements: c for c in cyclics}
    frontier = list(cyclics)
    while frontier:
        nxt = []
        for A in frontier:
            for C in cyclics:
                if C <= A:
                    continue
                J = G.subgroup(A.elements + C.elements)
                if J.elements not in found:
                    found[J.elements] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda s: s.key)


def conjugacy_partition(G: FiniteGroup | Subgroup, subs: Sequence[Subgroup]) -> list[list[int]]:
    """Partition ``subs`` (by position) into orbits under conjugation by ``G``."""
    Gs = _as_subgroup(G)
    where = {s: i for i, s in enumerate(subs)}
    seen = [False] * len(subs)
    classes = []
    for i, s in enumerate(subs):
        if seen[i]:
            continue
        orbit = sorted({where[s.conj(g)] for g in Gs.elements})
        for j in orbit:
            seen[j] = True
        classes.append(orbit)
    return classes


def subgroup_lattice(G: FiniteGroup) -> tuple[list[Subgroup], list[list[int]], dict]:
    """All subgroups of ``G`` sorted by (order, elements) and their classes.

    Returns ``(subgroups, classes, position)`` where ``classes`` lists the
    conjugacy classes as sorted position lists and ``position`` maps each
    subgroup to its index.  The result is cached on the group object.
    """
    if G._lattice is None:
        subs = subgroups_of(G)
        classes = conjugacy_partition(G, subs)
        G._lattice = (subs, classes, {s: i for i, s in enumerate(subs)})
    return G._lattice


def double_coset_reps(G: FiniteGroup | Subgroup, K: Subgroup, H: Subgroup) -> list[int]:
    """Minimal representatives of the double cosets ``K x H`` inside ``G``."""
    Gs = _as_subgroup(G)
    if not (K <= Gs and H <= Gs):
        raise ValueError("double cosets need K and H inside G")
    U = Gs.group
    covered: set[int] = set()
    reps = []
    for x in Gs.elements:
        if x in covered:
            continue
        reps.append(x)
        for k in K.elements:
            kx = U.mul(k, x)
            for h in H.elements:
                covered.add(U.mul(kx, h))
    return reps


def double_coset(G: FiniteGroup | Subgroup, K: Subgroup, x: int, H: Subgroup) -> frozenset[int]:
    U = _as_subgroup(G).group
    return frozenset(U.mul(U.mul(k, x), h) for k in K.elements for h in H.elements)


def normalizer(G: FiniteGroup | Subgroup, H: Subgroup) -> Subgroup:
    Gs = _as_subgroup(G)
    return Subgroup(Gs.group, tuple(g for g in Gs.elements if H.conj(g) == H))


def centralizer(G: FiniteGroup | Subgroup, H: Subgroup) -> Subgroup:
    Gs = _as_subgroup(G)
    U = Gs.group
    return Subgroup(
        U,
        tuple(g for g in Gs.elements if all(U.mul(g, h) == U.mul(h, g) for h in H.elements)),
    )


def local_subgroups(G: FiniteGroup | Subgroup, H: Subgroup) -> tuple[Subgroup, Subgroup]:
    """``(N_G(H), C_G(H))``."""
    if not H <= _as_subgroup(G):
        raise ValueError("H is not contained in G")
    return normalizer(G, H), centralizer(G, H)


def center(G: FiniteGroup | Subgroup) -> Subgroup:
    Gs = _as_subgroup(G)
    return centralizer(Gs, Gs)


def transporter(G: FiniteGroup | Subgroup, A: Subgroup, B: Subgroup) -> list[int]:
    """Elements ``g`` of ``G`` with ``g A g^-1 <= B``."""
    Gs = _as_subgroup(G)
    U = Gs.group
    return [g for g in Gs.elements if all(U.conj(g, a) in B for a in A.elements)]


def sylow_subgroup(G: FiniteGroup | Subgroup, p: int) -> Subgroup:
    """The first Sylow ``p``-subgroup in canonical subgroup order."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    Gs = _as_subgroup(G)
    n, target = Gs.order, 1
    while n % p == 0:
        n //= p
        target *= p
    if target == 1:
        return Gs.group.subgroup([])
    # Grow a p-subgroup one step at a time inside its normalizer; this
    # avoids enumerating the whole lattice of a large ambient group.
    P = Gs.group.subgroup([])
    while P.order < target:
        N = normalizer(Gs, P)
        step = None
        for g in N.elements:
            if g in P:
                continue
            Q = P.join(Gs.group.subgroup([g]))
            if Q.is_p_group(p) and Q.order == P.order * p:
                if step is None or Q.key < step.key:
                    step = Q
        if step is None:
            raise RuntimeError("no p-extension found inside the normalizer")
        P = step
    candidates = [P.conj(g) for g in Gs.elements]
    return min(candidates, key=lambda s: s.key)


def load_group(source: str | Path | dict, max_order: int | None = None) -> FiniteGroup:
    """Load a group from the JSON format ``{name, degree, generators}``.

    ``source`` may be a path, a bundled name such as ``"D8"``, or an already
    parsed dictionary.
    """
    if isinstance(source, dict):
        data = source
    else:
        path = Path(source)
        if not path.exists():
            bundled = _DATA_DIR / f"{source}.json"
            if bundled.exists():
                path = bundled
            else:
                raise ValueError(f"{source}: no such group file or bundled group (bundled: {', '.join(bundled_groups())})")
        text = path.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: JSON parse error at byte offset {exc.pos}: {exc.msg}") from None
    degree = int(data["degree"])
    gens = []
    for idx, cycles in enumerate(data["generators"]):
        try:
            gens.append(cycles_to_perm(cycles, degree))
        except ValueError as exc:
            raise ValueError(f"generator {idx} rejected: {exc}") from None
    return FiniteGroup(degree, gens, name=data.get("name"), max_order=max_order)


def bundled_groups() -> list[str]:
    return sorted(p.stem for p in _DATA_DIR.glob("*.json"))


def group_to_json(G: FiniteGroup) -> dict:
    return {
        "name": G.name,
        "degree": G.degree,
        "generators": [perm_to_cycles(g) for g in G.generators],
    }
