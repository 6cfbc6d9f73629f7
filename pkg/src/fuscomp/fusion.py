"""Fusion systems over a finite p-group, realized inside a universe group.

A fusion system stores, for every subgroup ``A`` of ``S``, the complete list
of its morphisms into ``S`` as image tables.  ``Hom_F(A, B)`` is obtained by
filtering that list on the image.  Three constructions share this storage:
group-induced systems, abstract systems closed up from generating
isomorphisms, and normalizer subsystems.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .grp import (
    FiniteGroup,
    Subgroup,
    centralizer,
    is_prime,
    normalizer,
    subgroups_of,
    transporter,
)


@dataclass(frozen=True)
class GroupHom:
    """An injective homomorphism between subgroups of one universe group.

    ``images[i]`` is the image of ``source.elements[i]``.
    """

    source: Subgroup
    target: Subgroup
    images: tuple[int, ...]

    @cached_property
    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.source.elements, self.images))

    def __call__(self, x: int) -> int:
        return self.as_dict[x]

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.source.group, tuple(sorted(self.images)))

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """``self o inner``; needs ``inner``'s image inside ``self.source``."""
        d = self.as_dict
        return GroupHom(inner.source, self.target, tuple(d[y] for y in inner.images))

    def restrict(self, A: Subgroup) -> "GroupHom":
        d = self.as_dict
        return GroupHom(A, self.target, tuple(d[a] for a in A.elements))

    def corestrict(self, B: Subgroup) -> "GroupHom":
        return GroupHom(self.source, B, self.images)

    def inverse(self) -> "GroupHom":
        """Inverse of the isomorphism onto the image."""
        inv = {y: x for x, y in self.as_dict.items()}
        img = self.image
        return GroupHom(img, self.source, tuple(inv[y] for y in img.elements))

    def preimage(self, B: Subgroup) -> Subgroup:
        return Subgroup(self.source.group, tuple(x for x, y in self.as_dict.items() if y in B))

    def apply(self, A: Subgroup) -> Subgroup:
        d = self.as_dict
        return Subgroup(A.group, tuple(sorted(d[a] for a in A.elements)))

    def is_injective_hom(self) -> bool:
        G = self.source.group
        d = self.as_dict
        if len(set(self.images)) != len(self.images):
            return False
        if not all(y in self.target for y in self.images):
            return False
        return all(d[G.mul(a, b)] == G.mul(d[a], d[b]) for a in self.source for b in self.source)

    def is_identity_map(self) -> bool:
        return self.images == self.source.elements


def conjugation_hom(g: int, A: Subgroup, B: Subgroup | None = None) -> GroupHom:
    """``c_g`` restricted to ``A``, landing in ``B`` (default ``gAg^-1``)."""
    G = A.group
    images = tuple(G.conj(g, a) for a in A.elements)
    if B is None:
        B = Subgroup(G, tuple(sorted(images)))
    return GroupHom(A, B, images)


def inclusion(A: Subgroup, B: Subgroup) -> GroupHom:
    return GroupHom(A, B, A.elements)


def identity_hom(A: Subgroup) -> GroupHom:
    return GroupHom(A, A, A.elements)


@dataclass(frozen=True)
class OrbitMorphism:
    """A class of ``Hom_F(A, B)`` modulo post-composition with ``Inn(B)``."""

    rep: GroupHom

    @property
    def source(self) -> Subgroup:
        return self.rep.source

    @property
    def target(self) -> Subgroup:
        return self.rep.target


def orbit_canonical(phi: GroupHom) -> GroupHom:
    """Table-minimal member of ``{c_b o phi : b in target}``."""
    G = phi.source.group
    best = min(tuple(G.conj(b, y) for y in phi.images) for b in phi.target.elements)
    return GroupHom(phi.source, phi.target, best)


def orbit_class(phi: GroupHom) -> OrbitMorphism:
    return OrbitMorphism(orbit_canonical(phi))


@dataclass(frozen=True)
class PhiNormalizer:
    phi: GroupHom
    N_phi: Subgroup


class FusionError(ValueError):
    pass


class FusionSystem:
    """A fusion system over ``S`` with materialized morphism tables.

    ``homs_to_S`` maps each subgroup ``A`` of ``S`` to the set of image
    tables of its morphisms into ``S``.
    """

    def __init__(
        self,
        S: Subgroup,
        p: int,
        homs_to_S: dict[Subgroup, Iterable[tuple[int, ...]]],
        kind: str,
        ambient: Subgroup | None = None,
        label: str | None = None,
    ):
        if not is_prime(p):
            raise FusionError(f"{p} is not prime")
        if not S.is_p_group(p):
            raise FusionError(f"S (order {S.order}) is not a {p}-group")
        self.S = S
        self.p = p
        self.G = S.group
        self.kind = kind
        self.ambient = ambient
        self.label = label
        self._homs = {A: tuple(sorted(set(t))) for A, t in homs_to_S.items()}
        self._hom_cache: dict[tuple[Subgroup, Subgroup], list[GroupHom]] = {}

    # -- subgroup bookkeeping ---------------------------------------------
    @cached_property
    def subgroups(self) -> list[Subgroup]:
        return subgroups_of(self.S)

    @cached_property
    def position(self) -> dict[Subgroup, int]:
        return {A: i for i, A in enumerate(self.subgroups)}

    def subgroup_id(self, A: Subgroup) -> int:
        return self.position[A]

    def _require(self, A: Subgroup) -> None:
        if A not in self.position:
            raise FusionError("subgroup is not contained in S")

    def subgroups_below(self, H: Subgroup) -> list[Subgroup]:
        return [A for A in self.subgroups if A <= H]

    # -- morphisms ---------------------------------------------------------
    def tables(self, A: Subgroup) -> tuple[tuple[int, ...], ...]:
        self._require(A)
        return self._homs[A]

    def hom_set(self, A: Subgroup, B: Subgroup) -> list[GroupHom]:
        key = (A, B)
        if key not in self._hom_cache:
            self._require(A)
            self._require(B)
            self._hom_cache[key] = [
                GroupHom(A, B, t) for t in self._homs[A] if all(y in B for y in t)
            ]
        return self._hom_cache[key]

    def aut(self, A: Subgroup) -> list[GroupHom]:
        return self.hom_set(A, A)

    def contains(self, phi: GroupHom) -> bool:
        return phi.source in self._homs and phi.images in set(self._homs[phi.source])

    def isomorphs(self, A: Subgroup) -> list[Subgroup]:
        """The F-isomorphism class of ``A``, sorted canonically."""
        imgs = {Subgroup(self.G, tuple(sorted(t))) for t in self.tables(A)}
        return sorted(imgs, key=lambda s: s.key)

    def are_isomorphic(self, A: Subgroup, B: Subgroup) -> bool:
        return B in set(self.isomorphs(A))

    def is_subconjugate(self, A: Subgroup, B: Subgroup) -> bool:
        """``A <=_F B``."""
        return any(all(y in B for y in t) for t in self.tables(A))

    def isos(self, A: Subgroup, B: Subgroup) -> list[GroupHom]:
        if A.order != B.order:
            return []
        return self.hom_set(A, B)

    def orbit_hom_set(self, A: Subgroup, B: Subgroup) -> list[OrbitMorphism]:
        reps = {orbit_canonical(phi).images for phi in self.hom_set(A, B)}
        return [OrbitMorphism(GroupHom(A, B, t)) for t in sorted(reps)]

    # -- local structure ---------------------------------------------------
    def N_S(self, A: Subgroup) -> Subgroup:
        return normalizer(self.S, A)

    def C_S(self, A: Subgroup) -> Subgroup:
        return centralizer(self.S, A)

    def is_fully_normalized(self, H: Subgroup) -> bool:
        n = self.N_S(H).order
        return all(self.N_S(K).order <= n for K in self.isomorphs(H))

    def fully_normalized_rep(self, H: Subgroup) -> Subgroup:
        """First fully normalized member of the class of ``H``."""
        cls = self.isomorphs(H)
        best = max(self.N_S(K).order for K in cls)
        return next(K for K in cls if self.N_S(K).order == best)

    def is_centric(self, H: Subgroup) -> bool:
        return all(self.C_S(K) <= K for K in self.isomorphs(H))

    @cached_property
    def centric_subgroups(self) -> list[Subgroup]:
        return [A for A in self.subgroups if self.is_centric(A)]

    def centric_classes(self) -> list[list[Subgroup]]:
        """F-isomorphism classes of centric subgroups, canonical order."""
        seen: set[Subgroup] = set()
        out = []
        for A in self.centric_subgroups:
            if A in seen:
                continue
            cls = self.isomorphs(A)
            seen.update(cls)
            out.append(cls)
        return out

    def phi_normalizer(self, phi: GroupHom) -> PhiNormalizer:
        H = phi.source
        G = self.G
        NH = self.N_S(H)
        Nimg = self.N_S(phi.image)
        d = phi.as_dict
        # conjugations of phi(H) induced by N_S(phi(H)), as tables
        available = {tuple(G.conj(z, y) for y in phi.images) for z in Nimg.elements}
        keep = []
        for x in NH.elements:
            table = tuple(d[G.conj(x, h)] for h in H.elements)
            if table in available:
                keep.append(x)
        return PhiNormalizer(phi, Subgroup(G, tuple(keep)))

    def extensions(self, phi: GroupHom, N: Subgroup, target: Subgroup | None = None) -> list[GroupHom]:
        """All members of ``Hom_F(N, target)`` restricting to ``phi``."""
        target = self.S if target is None else target
        pos = [N.elements.index(a) for a in phi.source.elements]
        out = []
        for t in self.tables(N):
            if all(t[i] == y for i, y in zip(pos, phi.images)) and all(y in target for y in t):
                out.append(GroupHom(N, target, t))
        return out

    # -- saturation --------------------------------------------------------
    def saturation_report(self) -> dict:
        """Check both saturation axioms; return the first witness of failure."""
        autS = len(self.aut(self.S))
        innS = len({tuple(self.G.conj(s, x) for x in self.S.elements) for s in self.S.elements})
        index = autS // innS
        if autS % innS or index % self.p == 0:
            return {"saturated": False, "axiom": 1, "aut_F_S": autS, "aut_S_S": innS}
        for H in self.subgroups:
            for phi in self.hom_set(H, self.S):
                if not self.is_fully_normalized(phi.image):
                    continue
                N = self.phi_normalizer(phi).N_phi
                if not self.extensions(phi, N):
                    return {
                        "saturated": False,
                        "axiom": 2,
                        "source": list(H.elements),
                        "images": list(phi.images),
                        "N_phi": list(N.elements),
                    }
        return {"saturated": True, "aut_F_S": autS, "aut_S_S": innS}

    def is_saturated(self) -> bool:
        return self.saturation_report()["saturated"]

    # -- subsystems --------------------------------------------------------
    def restrict_to(self, S2: Subgroup, keep: Callable[[GroupHom], bool], kind: str, label=None) -> "FusionSystem":
        homs = {}
        for A in subgroups_of(S2):
            homs[A] = [phi.images for phi in self.hom_set(A, S2) if keep(phi)]
        return FusionSystem(S2, self.p, homs, kind=kind, label=label)

    def same_homs(self, other: "FusionSystem") -> bool:
        """Hom-set-by-hom-set equality (same S, same tables for every pair)."""
        if self.S != other.S:
            return False
        return all(set(self.tables(A)) == set(other.tables(A)) for A in self.subgroups)

    def describe(self) -> str:
        return self.label or f"fusion system over S of order {self.S.order}"

    def __repr__(self) -> str:
        return f"FusionSystem({self.describe()}, p={self.p}, kind={self.kind})"


def fusion_from_group(ambient: FiniteGroup | Subgroup, S: Subgroup, p: int, label: str | None = None) -> FusionSystem:
    """``F_S(G)``: morphisms are conjugations by ambient elements."""
    amb = ambient.whole if isinstance(ambient, FiniteGroup) else ambient
    if not S <= amb:
        raise FusionError("S is not contained in the ambient group")
    if not S.is_p_group(p):
        raise FusionError(f"S is not a {p}-group")
    G = S.group
    homs = {}
    for A in subgroups_of(S):
        homs[A] = {tuple(G.conj(g, a) for a in A.elements) for g in transporter(amb, A, S)}
    return FusionSystem(S, p, homs, kind="group", ambient=amb, label=label)


def fusion_from_isos(S: Subgroup, p: int, generators: Sequence[GroupHom], label: str | None = None) -> FusionSystem:
    """Smallest fusion system over ``S`` containing ``generators``."""
    G = S.group
    subs = subgroups_of(S)
    homs: dict[Subgroup, set[tuple[int, ...]]] = {
        A: {tuple(G.conj(s, a) for a in A.elements) for s in S.elements} for A in subs
    }
    for phi in generators:
        if not phi.is_injective_hom():
            raise FusionError("generator is not an injective homomorphism")
        homs[phi.source].add(phi.images)
        homs[phi.image].add(phi.inverse().images)
    _close(homs, subs)
    return FusionSystem(S, p, homs, kind="abstract", label=label)


def _restrictions(A: Subgroup, t: tuple[int, ...], subs_below: list[Subgroup]):
    d = dict(zip(A.elements, t))
    for B in subs_below:
        yield B, tuple(d[b] for b in B.elements)


def _close(homs: dict[Subgroup, set[tuple[int, ...]]], subs: list[Subgroup]) -> None:
    below = {A: [B for B in subs if B <= A] for A in subs}
    by_elements = {A.elements: A for A in subs}
    changed = True
    while changed:
        changed = False
        for A in subs:
            for t in list(homs[A]):
                for B, r in _restrictions(A, t, below[A]):
                    if r not in homs[B]:
                        homs[B].add(r)
                        changed = True
                img = by_elements[tuple(sorted(t))]
                for u in list(homs[img]):
                    d = dict(zip(img.elements, u))
                    c = tuple(d[y] for y in t)
                    if c not in homs[A]:
                        homs[A].add(c)
                        changed = True
                inv = dict(zip(t, A.elements))
                back = tuple(inv[y] for y in img.elements)
                if back not in homs[img]:
                    homs[img].add(back)
                    changed = True


def validate_closed(S: Subgroup, p: int, homs: dict[Subgroup, set[tuple[int, ...]]], label=None) -> FusionSystem:
    """Accept explicit hom tables only if they already form a fusion system."""
    G = S.group
    subs = subgroups_of(S)
    for A in subs:
        homs.setdefault(A, set())
        for t in homs[A]:
            phi = GroupHom(A, S, t)
            if not phi.is_injective_hom():
                raise FusionError(f"table on subgroup {A.elements} is not an injective homomorphism")
        for s in S.elements:
            c = tuple(G.conj(s, a) for a in A.elements)
            if c not in homs[A]:
                raise FusionError(f"missing S-conjugation by element {s} on subgroup {A.elements}")
    closed = {A: set(v) for A, v in homs.items()}
    _close(closed, subs)
    for A in subs:
        missing = closed[A] - homs[A]
        if missing:
            raise FusionError(
                f"hom tables not closed: subgroup {A.elements} lacks composite/restriction {sorted(missing)[0]}"
            )
    return FusionSystem(S, p, homs, kind="abstract", label=label)


def normalizer_system(F: FusionSystem, H: Subgroup) -> FusionSystem:
    """``N_F(H)`` over ``N_S(H)`` for ``H`` fully normalized.

    A morphism ``phi: A -> B`` is kept when some F-morphism defined on ``AH``
    restricts to ``phi`` and maps ``H`` onto itself.  Such an extension lands
    in ``phi(A)H``, so membership does not depend on the chosen target.
    """
    if not F.is_fully_normalized(H):
        raise FusionError("H is not fully F-normalized")
    NSH = F.N_S(H)
    homs = {}
    for A in subgroups_of(NSH):
        AH = A.join(H)
        kept = []
        for phi in F.hom_set(A, NSH):
            if any(e.apply(H) == H for e in F.extensions(phi, AH, NSH)):
                kept.append(phi.images)
        homs[A] = kept
    return FusionSystem(NSH, F.p, homs, kind="normalizer", label=f"N_F(H) for H={list(H.elements)}")


def extends_over_H(F: FusionSystem, H: Subgroup, phi: GroupHom) -> bool:
    """Whether ``phi: A -> B`` extends to some F-morphism ``AH -> BH``.

    This is the membership test without asking the extension to normalize
    ``H``; the tests compare it with :func:`normalizer_system`.
    """
    AH = phi.source.join(H)
    BH = phi.target.join(H)
    return bool(F.extensions(phi, AH, BH))


def fusion_of_subgroup(F: FusionSystem, H: Subgroup) -> FusionSystem:
    """``F_H(H)``: conjugation by elements of ``H`` only."""
    return fusion_from_group(H, H, F.p, label=f"F_H(H) for H={list(H.elements)}")


# ---------------------------------------------------------------------------
# input files


def extend_on_generators(G: FiniteGroup, source: Sequence[int], images: Sequence[int]) -> GroupHom:
    """The homomorphism ``<source> -> G`` sending ``source[i]`` to ``images[i]``.

    Raises when the assignment does not extend to an injective homomorphism.
    """
    if len(source) != len(images):
        raise FusionError("source and image generator lists differ in length")
    value = {G.identity: G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in zip(source, images):
                y, v = G.mul(x, s), G.mul(value[x], t)
                if y in value:
                    if value[y] != v:
                        raise FusionError("generator assignment does not define a homomorphism")
                    continue
                value[y] = v
                nxt.append(y)
        frontier = nxt
    A = Subgroup(G, tuple(sorted(value)))
    phi = GroupHom(A, G.whole, tuple(value[a] for a in A.elements))
    if not phi.is_injective_hom():
        raise FusionError("generator assignment is not injective")
    return phi


def _perm_ids(G: FiniteGroup, cycle_lists, what: str) -> list[int]:
    from .grp import cycles_to_perm

    out = []
    for i, cycles in enumerate(cycle_lists):
        perm = cycles_to_perm(cycles, G.degree)
        if perm not in G.index:
            raise FusionError(f"{what} {i} is not an element of the group")
        out.append(G.index[perm])
    return out


def load_fusion(source, max_order: int | None = None) -> FusionSystem:
    """Load a fusion system from its JSON description.

    Accepted shapes: ``{"ambient": group, "sylow_p": p}``,
    ``{"ambient": group, "S": [perms], "p": p}`` and
    ``{"abstract": {"S": group, "p": p, "homs": [{"source": [perms], "images": [perms]}],
    "closure": "generate" | "check"}}``.  A group is a file path, a bundled
    name or an inline group object; permutations are lists of 1-based cycles.
    With ``"check"`` the listed homomorphisms, together with the
    ``S``-conjugations, must already be closed under composition and restriction.
    """
    import json
    from pathlib import Path

    from .grp import load_group, sylow_subgroup

    if isinstance(source, dict):
        data = source
    else:
        text = Path(source).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FusionError(f"{source}: JSON parse error at byte offset {exc.pos}: {exc.msg}") from None
    if "abstract" in data:
        spec = data["abstract"]
        G = load_group(spec["S"], max_order=max_order)
        S = G.whole
        p = int(spec["p"])
        gens = []
        for i, h in enumerate(spec.get("homs", [])):
            src = _perm_ids(G, h["source"], f"hom {i} source generator")
            img = _perm_ids(G, h["images"], f"hom {i} image generator")
            try:
                gens.append(extend_on_generators(G, src, img))
            except FusionError as exc:
                raise FusionError(f"hom {i}: {exc}") from None
        label = spec.get("name")
        if spec.get("closure", "generate") == "generate":
            return fusion_from_isos(S, p, gens, label=label)
        homs: dict[Subgroup, set[tuple[int, ...]]] = {}
        for A in subgroups_of(S):
            homs[A] = {tuple(G.conj(s, a) for a in A.elements) for s in S.elements}
        for phi in gens:
            homs[phi.source].add(phi.images)
        return validate_closed(S, p, homs, label=label)
    G = load_group(data["ambient"], max_order=max_order)
    if "sylow_p" in data:
        p = int(data["sylow_p"])
        S = sylow_subgroup(G, p)
    else:
        p = int(data["p"])
        S = G.subgroup(_perm_ids(G, data["S"], "S generator"))
    return fusion_from_group(G, S, p, label=data.get("name"))
