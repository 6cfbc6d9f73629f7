"""Products and pullbacks in the additive completion of the centric orbit category.

A product ``[H x K]`` is a list of pairs ``(A, phi)`` where ``A <= H`` is
centric and ``phi`` is a class of morphisms ``A -> K`` modulo ``Inn(K)``.
Pairs are compared through :func:`pair_key`, which is invariant under the
equivalence generated by conjugating ``A`` inside ``H``.

The second half of the module covers the normalizer machinery: the
normalizer after a morphism, the top of a morphism, the product of the
normalizer system with ``K`` and the block decomposition of ``[H x K]``
indexed by it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .fusion import (
    FusionError,
    FusionSystem,
    GroupHom,
    OrbitMorphism,
    conjugation_hom,
    fusion_from_group,
    normalizer_system,
    orbit_canonical,
)
from .grp import Subgroup, double_coset_reps, normalizer

PairLike = tuple[Subgroup, GroupHom]


@dataclass(frozen=True)
class ProductPair:
    A: Subgroup
    phi: OrbitMorphism

    @property
    def hom(self) -> GroupHom:
        return self.phi.rep


@dataclass(frozen=True)
class ProductSet:
    H: Subgroup
    K: Subgroup
    pairs: tuple[ProductPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def as_tuples(self) -> list[PairLike]:
        return [(p.A, p.hom) for p in self.pairs]


def _cache(F: FusionSystem, name: str) -> dict:
    store = F.__dict__.setdefault("_orbitprod_cache", {})
    return store.setdefault(name, {})


# ---------------------------------------------------------------------------
# pair comparison


def pair_key(ambient: Subgroup, A: Subgroup, phi: GroupHom) -> tuple:
    """Invariant of ``(A, phi)`` under conjugation of ``A`` by ``ambient``.

    Two pairs are equivalent exactly when some ``h`` in ``ambient`` carries
    ``A^h`` onto the other source and ``phi o c_h`` matches the other
    morphism modulo inner automorphisms of the target.  The key is the
    smallest ``(A^h, canonical table of phi o c_h)`` over all ``h``.
    """
    G = A.group
    best = None
    for h in ambient.elements:
        Ah = A.conj_right(h)
        c_h = conjugation_hom(h, Ah, A)
        cand = (Ah.key, orbit_canonical(phi.compose(c_h)).images)
        if best is None or cand < best:
            best = cand
    return best


def _key_to_pair(G, key: tuple, target: Subgroup) -> ProductPair:
    (_, elements), images = key
    A = Subgroup(G, elements)
    return ProductPair(A, OrbitMorphism(GroupHom(A, target, images)))


def compare_pair_sets(ambient: Subgroup, lhs: Iterable[PairLike], rhs: Iterable[PairLike]) -> dict:
    """Multiset comparison of two pair collections modulo conjugation in ``ambient``."""
    left = Counter(pair_key(ambient, A, phi) for A, phi in lhs)
    right = Counter(pair_key(ambient, A, phi) for A, phi in rhs)
    return {
        "equal": left == right,
        "lhs_size": sum(left.values()),
        "rhs_size": sum(right.values()),
        "only_lhs": sum((left - right).values()),
        "only_rhs": sum((right - left).values()),
    }


def is_valid_choice(F: FusionSystem, H: Subgroup, K: Subgroup, pairs: Iterable[PairLike]) -> dict:
    """Whether ``pairs`` is a legitimate choice of ``[H x K]``.

    A choice must hit every equivalence class of maximal pairs exactly once,
    so its keys must be distinct and coincide with the canonical ones.
    """
    pairs = list(pairs)
    canon = product_pairs(F, H, K).as_tuples()
    report = compare_pair_sets(H, canon, pairs)
    keys = [pair_key(H, A, phi) for A, phi in pairs]
    report["distinct"] = len(set(keys)) == len(keys)
    report["valid"] = report["equal"] and report["distinct"]
    return report


# ---------------------------------------------------------------------------
# products


def _require_centric(F: FusionSystem, *subs: Subgroup) -> None:
    for X in subs:
        if X not in F.position:
            raise FusionError("subgroup is not contained in S")
        if not F.is_centric(X):
            raise FusionError(f"subgroup of order {X.order} is not centric")


def is_maximal_pair(F: FusionSystem, H: Subgroup, A: Subgroup, phi: GroupHom) -> bool:
    """No strictly larger ``B <= H`` carries a morphism to ``K`` restricting to ``phi``.

    Conjugating inside ``H`` lets us assume ``A <= B``; the restriction is
    compared modulo ``Inn(K)``.
    """
    K = phi.target
    G = A.group
    allowed = {tuple(G.conj(k, y) for y in phi.images) for k in K.elements}
    for B in F.subgroups_below(H):
        if B.order <= A.order or not A <= B:
            continue
        pos = [B.elements.index(a) for a in A.elements]
        for t in F.tables(B):
            if tuple(t[i] for i in pos) in allowed and all(y in K for y in t):
                return False
    return True


def product_pairs(F: FusionSystem, H: Subgroup, K: Subgroup) -> ProductSet:
    """Canonical ``[H x_F K]``: maximal pairs, one per class, sorted by key."""
    cache = _cache(F, "product")
    if (H, K) in cache:
        return cache[(H, K)]
    _require_centric(F, H, K)
    keys = set()
    for A in F.centric_subgroups:
        if not A <= H:
            continue
        for phibar in F.orbit_hom_set(A, K):
            if is_maximal_pair(F, H, A, phibar.rep):
                keys.add(pair_key(H, A, phibar.rep))
    pairs = tuple(_key_to_pair(F.G, k, K) for k in sorted(keys))
    result = ProductSet(H, K, pairs)
    cache[(H, K)] = result
    return result


def _orbit_equal(a: GroupHom, b: GroupHom) -> bool:
    return orbit_canonical(a).images == orbit_canonical(b).images


def factorizations(F: FusionSystem, prod: ProductSet, alpha: GroupHom, beta: GroupHom) -> list[tuple[ProductPair, OrbitMorphism]]:
    """All ``(pair, gamma)`` with ``i o gamma = alpha`` and ``phi o gamma = beta`` in the orbit category."""
    C = alpha.source
    out = []
    for pair in prod.pairs:
        for gamma in F.orbit_hom_set(C, pair.A):
            g = gamma.rep
            if _orbit_equal(GroupHom(C, prod.H, g.images), alpha) and _orbit_equal(pair.hom.compose(g), beta):
                out.append((pair, gamma))
    return out


def universal_property_report(F: FusionSystem, H: Subgroup, K: Subgroup) -> dict:
    """Exhaustive check that every cone factors through ``[H x K]`` exactly once."""
    prod = product_pairs(F, H, K)
    checked = 0
    failures = []
    for C in F.centric_subgroups:
        for a in F.orbit_hom_set(C, H):
            for b in F.orbit_hom_set(C, K):
                checked += 1
                n = len(factorizations(F, prod, a.rep, b.rep))
                if n != 1:
                    failures.append({"C": list(C.elements), "count": n})
    return {"holds": not failures, "cones": checked, "failures": failures}


# ---------------------------------------------------------------------------
# pullbacks


@dataclass(frozen=True)
class PullbackSummand:
    x: int
    D: Subgroup
    to_H: GroupHom
    to_K: GroupHom


def pullback(F: FusionSystem, H: Subgroup, K: Subgroup, J: Subgroup) -> list[PullbackSummand]:
    """Pullback of ``H -> J <- K``: one summand ``H^x cap K`` per centric double coset."""
    if not (H <= J and K <= J):
        raise FusionError("pullback needs H and K inside J")
    _require_centric(F, H, K, J)
    out = []
    for x in double_coset_reps(J, H, K):
        D = H.conj_right(x).intersect(K)
        if not F.is_centric(D):
            continue
        out.append(PullbackSummand(x, D, conjugation_hom(x, D, H), GroupHom(D, K, D.elements)))
    return out


# ---------------------------------------------------------------------------
# the seven rewrite identities

REWRITE_KINDS = ("swap", "selfS", "iso_right", "iso_left", "pullback_right", "pullback_left", "triple")


def _is_self_system(F: FusionSystem) -> bool:
    return F.same_homs(fusion_from_group(F.S, F.S, F.p))


def rewrite_product(F: FusionSystem, kind: str, **args) -> dict:
    """Right-hand side of one rewrite identity, together with its expected left side.

    Returns ``{"ambient", "lhs", "rhs"}`` where both sides are lists of
    ``(subgroup, morphism)``; the identity holds when they agree modulo
    conjugation in ``ambient`` (see :func:`verify_rewrite`).
    """
    H = args.get("H")
    K = args.get("K")
    if kind == "swap":
        rhs = []
        for p in product_pairs(F, H, K):
            inv = p.hom.inverse()
            rhs.append((inv.source, GroupHom(inv.source, H, inv.images)))
        return {"ambient": K, "lhs": product_pairs(F, K, H).as_tuples(), "rhs": rhs}
    if kind == "selfS":
        if not _is_self_system(F):
            raise FusionError("selfS needs the fusion system of S on itself")
        _require_centric(F, H, K)
        rhs = []
        for x in double_coset_reps(F.S, K, H):
            D = K.conj_right(x).intersect(H)
            if F.is_centric(D):
                rhs.append((D, conjugation_hom(x, D, K)))
        return {"ambient": H, "lhs": product_pairs(F, H, K).as_tuples(), "rhs": rhs}
    if kind == "iso_right":
        psi: GroupHom = args["psi"]
        _check_iso(F, psi, K)
        L = psi.image
        psi_L = psi.corestrict(L)
        rhs = [(p.A, psi_L.compose(p.hom)) for p in product_pairs(F, H, K)]
        return {"ambient": H, "lhs": product_pairs(F, H, L).as_tuples(), "rhs": rhs}
    if kind == "iso_left":
        psi = args["psi"]
        _check_iso(F, psi, H)
        L = psi.image
        rhs = []
        for p in product_pairs(F, H, K):
            back = psi.restrict(p.A).inverse()
            rhs.append((back.source, p.hom.compose(back)))
        return {"ambient": L, "lhs": product_pairs(F, L, K).as_tuples(), "rhs": rhs}
    if kind == "pullback_right":
        J = args["J"]
        if not J <= K:
            raise FusionError("pullback_right needs J <= K")
        _require_centric(F, J)
        G = F.G
        rhs = []
        for p in product_pairs(F, H, K):
            img = p.hom.image
            for x in double_coset_reps(K, J, img):
                D = J.conj_right(x).intersect(img)
                if not F.is_centric(D):
                    continue
                src = p.hom.preimage(D)
                images = tuple(G.conj(x, p.hom(a)) for a in src.elements)
                rhs.append((src, GroupHom(src, J, images)))
        return {"ambient": H, "lhs": product_pairs(F, H, J).as_tuples(), "rhs": rhs}
    if kind == "pullback_left":
        J = args["J"]
        if not J <= H:
            raise FusionError("pullback_left needs J <= H")
        _require_centric(F, J)
        rhs = []
        for p in product_pairs(F, H, K):
            for x in double_coset_reps(H, p.A, J):
                D = p.A.conj_right(x).intersect(J)
                if not F.is_centric(D):
                    continue
                rhs.append((D, p.hom.compose(conjugation_hom(x, D, p.A))))
        return {"ambient": J, "lhs": product_pairs(F, J, K).as_tuples(), "rhs": rhs}
    if kind == "triple":
        J = args["J"]
        _require_centric(F, H, K, J)
        lhs = []
        for p in product_pairs(F, H, K):
            for q in product_pairs(F, J, p.A):
                lhs.append((q.A, GroupHom(q.A, H, q.hom.images)))
        rhs = []
        for c in product_pairs(F, J, H):
            for d in product_pairs(F, J, K):
                for x in double_coset_reps(J, d.A, c.A):
                    E = d.A.conj_right(x).intersect(c.A)
                    if F.is_centric(E):
                        rhs.append((E, c.hom.restrict(E)))
        return {"ambient": J, "lhs": lhs, "rhs": rhs}
    raise FusionError(f"unknown rewrite kind {kind!r}; expected one of {', '.join(REWRITE_KINDS)}")


def _check_iso(F: FusionSystem, psi: GroupHom, X: Subgroup) -> None:
    if psi.source != X:
        raise FusionError("psi must be defined on the whole subgroup")
    if not F.contains(GroupHom(psi.source, F.S, psi.images)):
        raise FusionError("psi is not an isomorphism in the fusion system")


def verify_rewrite(F: FusionSystem, kind: str, **args) -> dict:
    sides = rewrite_product(F, kind, **args)
    report = compare_pair_sets(sides["ambient"], sides["lhs"], sides["rhs"])
    report["kind"] = kind
    return report


def rewrite_instances(F: FusionSystem) -> Iterable[tuple[str, dict]]:
    """Every admissible argument tuple for every rewrite identity."""
    cent = F.centric_subgroups
    self_system = _is_self_system(F)
    for H in cent:
        for K in cent:
            yield "swap", {"H": H, "K": K}
            if self_system:
                yield "selfS", {"H": H, "K": K}
            for psi in F.hom_set(K, F.S):
                yield "iso_right", {"H": H, "K": K, "psi": psi}
            for psi in F.hom_set(H, F.S):
                yield "iso_left", {"H": H, "K": K, "psi": psi}
            for J in cent:
                if J <= K:
                    yield "pullback_right", {"H": H, "K": K, "J": J}
                if J <= H:
                    yield "pullback_left", {"H": H, "K": K, "J": J}
                yield "triple", {"H": H, "K": K, "J": J}


def verify_all_rewrites(F: FusionSystem) -> dict:
    counts: Counter = Counter()
    failures = []
    for kind, args in rewrite_instances(F):
        rep = verify_rewrite(F, kind, **args)
        counts[kind] += 1
        if not rep["equal"]:
            failures.append(rep)
    return {"holds": not failures, "instances": dict(counts), "failures": failures}


# ---------------------------------------------------------------------------
# normalizer machinery


def nf_system(F: FusionSystem, H: Subgroup) -> FusionSystem:
    cache = _cache(F, "nf")
    if H not in cache:
        cache[H] = normalizer_system(F, H)
    return cache[H]


@dataclass(frozen=True)
class NfNormalizerData:
    phi: GroupHom
    after: Subgroup
    A_prime: Subgroup
    theta: GroupHom
    top: GroupHom
    before: Subgroup
    aut_after: frozenset = field(repr=False)


def _aut_by(sub: Subgroup, X: Subgroup) -> set[tuple[int, ...]]:
    """``Aut_sub(X)`` as tables on ``X`` (``sub`` must normalize ``X``)."""
    G = X.group
    return {tuple(G.conj(y, a) for a in X.elements) for y in sub.elements}


def _pull_back_aut(table_on_image: Sequence[int], mor: GroupHom) -> tuple[int, ...]:
    """``mor^-1 o alpha o mor`` as a table on ``mor.source``; ``alpha`` acts on ``mor.image``."""
    img = mor.image
    alpha = dict(zip(img.elements, table_on_image))
    inv = {y: x for x, y in mor.as_dict.items()}
    return tuple(inv[alpha[mor(a)]] for a in mor.source.elements)


def normalizer_after(F: FusionSystem, H: Subgroup, phi: GroupHom) -> Subgroup:
    """Elements ``x`` of ``N_K(phi A)`` with ``phi^-1 c_x phi`` in ``Aut_{N_F}(A)``."""
    NF = nf_system(F, H)
    A, K = phi.source, phi.target
    G = F.G
    img = phi.image
    autA = set(NF.tables(A))
    keep = []
    for x in normalizer(K, img).elements:
        c_x = tuple(G.conj(x, y) for y in img.elements)
        if _pull_back_aut(c_x, phi) in autA:
            keep.append(x)
    return Subgroup(G, tuple(keep))


def _fits_top(NF: FusionSystem, aut_after: set, mor: GroupHom) -> bool:
    """``Aut_after(phi A)^mor <= Aut_{N_S}(A')`` for ``mor: A' -> phi A``."""
    Ap = mor.source
    sylow = _aut_by(normalizer(NF.S, Ap), Ap)
    return all(_pull_back_aut(t, mor) in sylow for t in aut_after)


def nf_normalizer_data(F: FusionSystem, H: Subgroup, phi: GroupHom) -> NfNormalizerData:
    """Normalizer after ``phi``, an ``N_F``-top of ``phi`` and the normalizer before it.

    When ``phi`` is already its own top (source fully ``N_F``-normalized and
    ``theta = Id`` satisfies the Sylow condition) the identity is used, so
    taking the top twice returns the same morphism.
    """
    _require_centric(F, H)
    NF = nf_system(F, H)
    A = phi.source
    if not A <= NF.S:
        raise FusionError("source of phi must lie in N_S(H)")
    _require_centric(F, A)
    after = normalizer_after(F, H, phi)
    img = phi.image
    aut_after = _aut_by(after, img)
    phi_iso = phi.corestrict(img)
    choice = None
    if NF.is_fully_normalized(A) and _fits_top(NF, aut_after, phi_iso):
        choice = (A, GroupHom(A, A, A.elements))
    else:
        for Ap in NF.isomorphs(A):
            if not NF.is_fully_normalized(Ap):
                continue
            for theta in NF.isos(Ap, A):
                if _fits_top(NF, aut_after, phi_iso.compose(theta)):
                    choice = (Ap, theta)
                    break
            if choice:
                break
    if choice is None:
        raise FusionError("no N_F-top found: the fusion system is not saturated")
    Ap, theta = choice
    top = phi.compose(theta)
    top_iso = top.corestrict(img)
    pulled = {_pull_back_aut(t, top_iso) for t in aut_after}
    G = F.G
    before = [
        x for x in normalizer(NF.S, Ap).elements if tuple(G.conj(x, a) for a in Ap.elements) in pulled
    ]
    return NfNormalizerData(phi, after, Ap, theta, top, Subgroup(G, tuple(before)), frozenset(aut_after))


def is_own_top(F: FusionSystem, H: Subgroup, phi: GroupHom) -> bool:
    data = nf_normalizer_data(F, H, phi)
    return data.A_prime == phi.source and data.theta.is_identity_map()


def nf_product_pairs(F: FusionSystem, H: Subgroup, K: Subgroup) -> list[ProductPair]:
    """``[N_F x K]``: one pair per class of ``[H x K]`` under ``N_F``-isomorphism.

    Each representative has a fully ``N_F``-normalized source and is its
    own top; among admissible representatives the smallest key wins.
    """
    cache = _cache(F, "nfprod")
    if (H, K) in cache:
        return cache[(H, K)]
    if not F.is_fully_normalized(H):
        raise FusionError("H is not fully F-normalized")
    NF = nf_system(F, H)
    classes: dict[tuple, list[tuple]] = {}
    for p in product_pairs(F, H, K):
        orbit = set()
        for B in NF.isomorphs(p.A):
            for theta in NF.isos(B, p.A):
                orbit.add((B.key, orbit_canonical(p.hom.compose(theta)).images))
        key = min(orbit)
        classes.setdefault(key, sorted(orbit))
    reps = []
    for key in sorted(classes):
        rep = None
        for cand in classes[key]:
            pair = _key_to_pair(F.G, cand, K)
            if pair.A <= H and NF.is_fully_normalized(pair.A) and is_own_top(F, H, pair.hom):
                rep = pair
                break
        if rep is None:
            raise FusionError("no fully normalized top representative: the fusion system is not saturated")
        if not is_maximal_pair(F, H, rep.A, rep.hom):
            raise FusionError("chosen representative is not a maximal pair")
        reps.append(rep)
    cache[(H, K)] = reps
    return reps


def extend_to_normalizer(F: FusionSystem, H: Subgroup, pair: ProductPair) -> OrbitMorphism:
    """The unique class ``N_phi -> K`` restricting to ``phi`` on ``A``."""
    phi = pair.hom
    data = nf_normalizer_data(F, H, phi)
    if not (data.A_prime == pair.A and data.theta.is_identity_map()):
        raise FusionError("pair is not its own N_F-top")
    found = F.extensions(phi, data.before, phi.target)
    if not found:
        raise FusionError("no extension to the normalizer: the fusion system is not saturated")
    classes = {orbit_canonical(e).images for e in found}
    if len(classes) != 1:
        raise FusionError("extensions disagree in the orbit category")
    return OrbitMorphism(orbit_canonical(found[0]))


@dataclass(frozen=True)
class DecompositionBlock:
    pair: ProductPair
    N: Subgroup
    hat: OrbitMorphism
    inner: ProductSet
    pairs: tuple[tuple[Subgroup, GroupHom], ...]


def decompose_product(F: FusionSystem, H: Subgroup, K: Subgroup) -> list[DecompositionBlock]:
    """Blocks ``hat o [H x_{N_F} N_phi]`` indexed by ``[N_F x K]``."""
    NF = nf_system(F, H)
    blocks = []
    for pair in nf_product_pairs(F, H, K):
        N = nf_normalizer_data(F, H, pair.hom).before
        hat = extend_to_normalizer(F, H, pair)
        inner = product_pairs(NF, H, N)
        pairs = tuple((q.A, hat.rep.compose(q.hom)) for q in inner)
        blocks.append(DecompositionBlock(pair, N, hat, inner, pairs))
    return blocks


def verify_decomposition(F: FusionSystem, H: Subgroup, K: Subgroup) -> dict:
    """Blocks are disjoint, cover ``[H x K]`` and every inner morphism lands on ``A``."""
    blocks = decompose_product(F, H, K)
    union = [pq for b in blocks for pq in b.pairs]
    report = is_valid_choice(F, H, K, union)
    report["blocks"] = [len(b.pairs) for b in blocks]
    report["images_are_A"] = all(q.hom.image == b.pair.A for b in blocks for q in b.inner)
    report["holds"] = report["valid"] and report["images_are_A"]
    return report


# ---------------------------------------------------------------------------
# auxiliary lemmas used by the transfer calculus


def in_orbit_subsystem(sub: FusionSystem, phi: GroupHom) -> bool:
    """Whether the class of ``phi`` (modulo its target's inner automorphisms) meets ``sub``."""
    G = phi.source.group
    for k in phi.target.elements:
        t = tuple(G.conj(k, y) for y in phi.images)
        if sub.contains(GroupHom(phi.source, sub.S, t)):
            return True
    return False


def lifting_report(F: FusionSystem, H: Subgroup, K: Subgroup) -> dict:
    """Check membership transfer for pairs lifted from ``[phi A x_{N_F} K]`` to ``[H x_F K]``.

    For ``(A, phi)`` in ``[H x N_S]`` and ``(B, psi)`` in
    ``[phi A x_{N_F} K]`` with ``B <= phi A`` centric, the factorization of
    ``(incl, psi o phi)`` through ``[H x K]`` has a connecting morphism
    induced by ``H`` and lands in ``N_F`` exactly when ``phi`` does.
    """
    NF = nf_system(F, H)
    NS = NF.S
    if not K <= NS:
        raise FusionError("K must lie in N_S(H)")
    prodHK = product_pairs(F, H, K)
    checked = 0
    failures = []
    for p in product_pairs(F, H, NS):
        phi = p.hom
        phi_in = in_orbit_subsystem(NF, phi)
        img = phi.image
        for q in product_pairs(NF, img, K):
            B = q.A
            if not F.is_centric(B):
                continue
            src = phi.preimage(B)
            tilde = GroupHom(src, B, tuple(phi(a) for a in src.elements))
            alpha = GroupHom(src, H, src.elements)
            beta = q.hom.compose(tilde)
            facts = factorizations(F, prodHK, alpha, beta)
            checked += 1
            if len(facts) != 1:
                failures.append({"reason": "factorization count", "count": len(facts)})
                continue
            lifted, gamma = facts[0]
            gamma_in_H = any(
                _orbit_equal(gamma.rep, conjugation_hom(h, src, lifted.A))
                for h in H.elements
                if src.conj(h) <= lifted.A
            )
            if not gamma_in_H:
                failures.append({"reason": "gamma not induced by H"})
            if in_orbit_subsystem(NF, lifted.hom) != phi_in:
                failures.append({"reason": "membership mismatch"})
    return {"holds": not failures, "checked": checked, "failures": failures}


def same_cardinal_report(F: FusionSystem, H: Subgroup) -> dict:
    """``|[K x S]| = |[H x S]| = |Hom_O(K, S)|`` for centric ``K <= H`` when ``F = N_F(H)``."""
    NF = nf_system(F, H)
    if NF.S != F.S or not F.same_homs(NF):
        raise FusionError("F must equal its own normalizer system at H")
    S = F.S
    nH = len(product_pairs(F, H, S))
    rows = []
    for K in F.centric_subgroups:
        if not K <= H:
            continue
        rows.append(
            {
                "K_order": K.order,
                "product": len(product_pairs(F, K, S)),
                "homs": len(F.orbit_hom_set(K, S)),
                "sources_equal_K": all(q.A == K for q in product_pairs(F, K, S)),
            }
        )
    holds = all(r["product"] == nH == r["homs"] and r["sources_equal_K"] for r in rows)
    return {"holds": holds, "H_product": nH, "rows": rows}
