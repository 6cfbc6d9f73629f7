"""Green correspondence between centric Mackey modules over ``F`` and over ``N_F(H)``.

``green_down`` restricts an indecomposable module with vertex ``H`` to the
normalizer system and isolates the unique summand with vertex ``H``;
``green_up`` induces back and isolates the unique summand with vertex ``H``
there.  ``verify_example`` runs the whole pipeline on the rank-two Klein
four example over ``F_{D8}(GL3(2))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mackey as mk
from . import mackeymod as mm
from . import orbitprod
from .fusion import FusionSystem, fusion_from_group
from .grp import Subgroup, load_group, normalizer, subgroups_of, sylow_subgroup
from .idem import (
    DEFAULT_SEED,
    CorrespondenceData,
    FiniteAlgebra,
    end_algebra,
    idempotents_equivalent,
    is_indecomposable,
    is_summand,
    module_summands,
    modules_isomorphic,
    near_iso_correspond,
)
from .linalg import CoefficientRing, SubspaceSolver, fp, rank
from .mackeymod import DefectData, MackeyModule, ModuleHom


class GreenError(ValueError):
    """A precondition of the correspondence fails."""


@dataclass
class ClassifiedSummand:
    module: MackeyModule
    idempotent: ModuleHom
    h_projective: bool
    family_projective: bool
    defect: DefectData | None = None

    @property
    def has_vertex_h(self) -> bool:
        return self.h_projective and not self.family_projective


@dataclass
class CorrespondenceResult:
    input: MackeyModule
    direction: str
    H: Subgroup
    summands: list[ClassifiedSummand]
    distinguished: int
    X: list[Subgroup]
    Y: list[Subgroup]
    checks: dict = field(default_factory=dict)

    @property
    def correspondent(self) -> MackeyModule:
        return self.summands[self.distinguished].module

    @property
    def companions(self) -> list[MackeyModule]:
        return [s.module for i, s in enumerate(self.summands) if i != self.distinguished]


# ---------------------------------------------------------------------------
# preconditions


def _require_field(R: CoefficientRing, p: int) -> None:
    if R.kind != "fp" or R.q != p:
        raise GreenError(f"coefficients must be F_{p}, got {R.describe()}")


def _require_subgroup(F: FusionSystem, H: Subgroup) -> None:
    if not F.is_centric(H):
        raise GreenError("H is not F-centric")
    if not F.is_fully_normalized(H):
        raise GreenError("H is not fully F-normalized")


def _require_vertex(M: MackeyModule, H: Subgroup) -> None:
    data = mm.vertex(M)
    if data.vertex is None or not M.F.are_isomorphic(data.vertex, H):
        found = None if data.vertex is None else data.vertex.order
        raise GreenError(f"module does not have vertex H (vertex order {found}, H order {H.order})")


def _classify(
    pieces, H: Subgroup, family: list[Subgroup], full_vertices: bool
) -> list[ClassifiedSummand]:
    out = []
    for s in pieces:
        U = s.module
        out.append(
            ClassifiedSummand(
                module=U,
                idempotent=s.idempotent,
                h_projective=bool(mm.relative_projectivity(U, [H])),
                family_projective=bool(mm.relative_projectivity(U, family)),
                defect=mm.vertex(U) if full_vertices else None,
            )
        )
    return out


def _unique_distinguished(summands: list[ClassifiedSummand], family_name: str) -> int:
    hits = [i for i, s in enumerate(summands) if s.has_vertex_h]
    if len(hits) != 1:
        raise GreenError(f"expected exactly one summand with vertex H, found {len(hits)}")
    for i, s in enumerate(summands):
        if i != hits[0] and not s.family_projective:
            raise GreenError(f"summand {i} is not {family_name}-projective")
    return hits[0]


# ---------------------------------------------------------------------------
# the correspondence on endomorphism algebras


def _span_in(A: FiniteAlgebra, homs: list[ModuleHom]) -> np.ndarray:
    R = A.R
    if not homs:
        return R.zeros(0, A.dim)
    return A.span([A.from_matrix(h.big_matrix()) for h in homs])


def _ideal(A: FiniteAlgebra, M: MackeyModule, family: list[Subgroup]) -> np.ndarray:
    homs = [t for K in family for t in mm.transfer_ideal(M, K)]
    return _span_in(A, homs)


def endomorphism_data(M: MackeyModule, H: Subgroup) -> tuple[CorrespondenceData, FiniteAlgebra]:
    """The algebras, ideals and maps that feed the near-isomorphism correspondence.

    ``A = End(M restricted to N_F)``, ``B = End(M)``, ``C = Tr_H`` over ``N_F``,
    ``I, J = Tr_X, Tr_Y`` over ``N_F``, ``K = Tr_X`` over ``F``,
    ``f`` the normalizer transfer and ``g`` the restriction.
    """
    F = M.F
    NF = orbitprod.nf_system(F, H)
    low = mm.restrict(M, NF)
    A = end_algebra(low)
    B = end_algebra(M)
    X = mm.x_family(F, H)
    Y = mm.y_family(F, H)
    C = _ideal(A, low, [H])
    I = _ideal(A, low, X)
    J = _ideal(A, low, Y)
    K = _ideal(B, M, X)

    def f(v: np.ndarray) -> np.ndarray:
        h = mm.combine(A.homs, v, low, low)
        return B.from_matrix(mm.nf_transfer(M, H, h).big_matrix())

    def g(v: np.ndarray) -> np.ndarray:
        h = mm.combine(B.homs, v, M, M)
        return A.from_matrix(mm.end_restrict(h, NF).big_matrix())

    return CorrespondenceData(A, B, C, I, J, K, f, g), A


# ---------------------------------------------------------------------------
# the two directions


def green_down(
    M: MackeyModule,
    H: Subgroup,
    seed: int = DEFAULT_SEED,
    full_vertices: bool = False,
    algebra_check: bool = True,
) -> CorrespondenceResult:
    """Restrict ``M`` to ``N_F(H)`` and isolate its Green correspondent."""
    F = M.F
    _require_field(M.R, F.p)
    _require_subgroup(F, H)
    if not is_indecomposable(M, seed):
        raise GreenError("module is decomposable")
    _require_vertex(M, H)
    NF = orbitprod.nf_system(F, H)
    X, Y = mm.x_family(F, H), mm.y_family(F, H)
    low = mm.restrict(M, NF)
    summands = _classify(module_summands(low, seed), H, Y, full_vertices)
    index = _unique_distinguished(summands, "Y")
    checks: dict = {}
    if algebra_check:
        data, A = endomorphism_data(M, H)
        outcome = near_iso_correspond(data, data.B.unit, seed)
        e = A.from_matrix(summands[index].idempotent.big_matrix())
        checks["conditions"] = outcome.conditions
        checks["idempotent_matches"] = idempotents_equivalent(A, outcome.a, e) is not None
        if not checks["idempotent_matches"]:
            raise GreenError("the correspondent idempotent from the algebra is not conjugate to the summand")
    return CorrespondenceResult(M, "down", H, summands, index, X, Y, checks)


def green_up(
    N: MackeyModule,
    F: FusionSystem,
    H: Subgroup,
    seed: int = DEFAULT_SEED,
    full_vertices: bool = False,
) -> CorrespondenceResult:
    """Induce ``N`` from ``N_F(H)`` to ``F`` and isolate the summand with vertex ``H``."""
    _require_field(N.R, F.p)
    _require_subgroup(F, H)
    NF = orbitprod.nf_system(F, H)
    if not N.F.same_homs(NF):
        raise GreenError("module is not defined over the normalizer system of H")
    if not is_indecomposable(N, seed):
        raise GreenError("module is decomposable")
    _require_vertex(N, H)
    X, Y = mm.x_family(F, H), mm.y_family(F, H)
    up = mm.induce(N, F)
    summands = _classify(module_summands(up, seed), H, X, full_vertices)
    index = _unique_distinguished(summands, "X")
    back = mm.restrict(summands[index].module, N.F)
    checks = {"input_is_summand_of_restriction": is_summand(N, back, seed)}
    if not checks["input_is_summand_of_restriction"]:
        raise GreenError("the input is not a summand of the restricted correspondent")
    return CorrespondenceResult(N, "up", H, summands, index, X, Y, checks)


def round_trip_down_up(M: MackeyModule, H: Subgroup, seed: int = DEFAULT_SEED) -> bool:
    """``(M_{N_F})^F`` is isomorphic to ``M``."""
    down = green_down(M, H, seed, algebra_check=False)
    up = green_up(down.correspondent, M.F, H, seed)
    return modules_isomorphic(up.correspondent, M, seed)


def round_trip_up_down(N: MackeyModule, F: FusionSystem, H: Subgroup, seed: int = DEFAULT_SEED) -> bool:
    """``(N^F)_{N_F}`` is isomorphic to ``N``."""
    up = green_up(N, F, H, seed)
    down = green_down(up.correspondent, H, seed, algebra_check=False)
    return modules_isomorphic(down.correspondent, N, seed)


def induced_restricted_report(N: MackeyModule, F: FusionSystem, H: Subgroup, seed: int = DEFAULT_SEED) -> dict:
    """Split ``N`` induced to ``F`` and restricted back as ``N`` plus a ``Y``-projective part.

    The copy of ``N`` is the image of ``n -> 1 ⊗ n``.  The complement is the sum of the
    ``Y``-projective summands from a local decomposition, and the two spans must be
    complementary at every level.
    """
    R = N.R
    tens = mm.induce_tensor(N, F)
    back = mm.restrict(tens.module, N.F)
    Y = mm.y_family(F, H)
    blocks = {}
    for K in back.levels:
        cols = []
        if N.dim(K) and K in tens.projection:
            for j in range(N.dim(K)):
                n = R.zeros(N.dim(K))
                n[j] = R.scalar(1)
                cols.append(tens.class_of(K, mk.identity_key(K), n))
        blocks[K] = np.stack(cols).T if cols else R.zeros(back.dim(K), N.dim(K))
    unit_map = ModuleHom(N, back, blocks)
    pieces = module_summands(back, seed)
    proj = [s for s in pieces if mm.relative_projectivity(s.module, Y)]
    complementary = True
    for K in back.levels:
        rows = [unit_map[K].T] + [s.inclusion[K].T for s in proj if s.module.dim(K)]
        rows = [r for r in rows if r.shape[0]]
        stacked = np.concatenate(rows) if rows else R.zeros(0, back.dim(K))
        complementary = complementary and stacked.shape[0] == back.dim(K) and rank(R, stacked) == back.dim(K)
    return {
        "unit_is_morphism": unit_map.is_morphism(),
        "unit_is_injective": unit_map.is_injective(),
        "complementary": complementary,
        "summands": len(pieces),
        "y_projective": len(proj),
        "holds": unit_map.is_morphism() and unit_map.is_injective() and complementary and len(proj) == len(pieces) - _count_copies(N, pieces, seed),
    }


def _count_copies(N: MackeyModule, pieces, seed: int) -> int:
    return sum(1 for s in pieces if modules_isomorphic(s.module, N, seed))


# ---------------------------------------------------------------------------
# the worked example


EXAMPLE_STEPS = (
    "ambient",
    "saturation",
    "normalizer",
    "automizer",
    "idempotent",
    "local-summand",
    "indecomposable",
    "vertex",
    "families",
    "green-down",
    "green-up",
    "round-trip",
)


class ExampleFailure(GreenError):
    def __init__(self, step: str, message: str):
        super().__init__(f"step {step!r} failed: {message}")
        self.step = step


@dataclass
class ExampleSetup:
    F: FusionSystem
    H: Subgroup
    phi: list
    element: mk.MackeyElement


def klein_fours(F: FusionSystem) -> list[Subgroup]:
    """Centric Klein fours with automizer of order 6, in canonical order."""
    out = [K for K in F.centric_subgroups if K.order == 4 and len(F.aut(K)) == 6]
    return sorted(out, key=lambda s: s.key)


def dihedral_subgroup(G) -> Subgroup | None:
    """The Sylow 2-subgroup when it is dihedral of order 8, else the first such subgroup."""
    P = sylow_subgroup(G, 2)
    if _is_d8(P):
        return P
    found = [A for A in subgroups_of(P) if _is_d8(A)]
    if not found:
        found = [A for A in subgroups_of(G.whole) if _is_d8(A)]
    return min(found, key=lambda s: s.key) if found else None


def _is_d8(A: Subgroup) -> bool:
    G = A.group
    involutions = sum(1 for a in A.elements if a != G.identity and G.mul(a, a) == G.identity)
    return A.order == 8 and involutions == 5


def example_system(ambient: str = "GL3_2") -> FusionSystem:
    G = load_group(ambient)
    return fusion_from_group(G, dihedral_subgroup(G), 2, label=f"F_D8({ambient})")


def example_element(F: FusionSystem, H: Subgroup, R: CoefficientRing) -> mk.MackeyElement:
    """``c_phi + c_{phi^2}`` for an automorphism ``phi`` of ``H`` of order 3."""
    phis = [a for a in F.aut(H) if not a.is_identity_map() and a.compose(a).compose(a).is_identity_map()]
    if len(phis) != 2:
        raise GreenError(f"expected two automorphisms of order 3, found {len(phis)}")
    x = mk.MackeyElement(R, {})
    for a in phis:
        x = x + mk.MackeyElement.basis(R, mm.key_of(H, H, a))
    return x


def local_summand_element(F: FusionSystem, R: CoefficientRing, e: np.ndarray, seed: int = DEFAULT_SEED) -> np.ndarray:
    """A primitive idempotent ``e0`` with ``e0 = e e0 e``, read off ``End((mu/I)e)``.

    ``End((mu/I)e)`` is the opposite of ``e(mu/I)e`` via ``f -> f(e)``, so the image
    of the generator under a local idempotent endomorphism is a local summand of ``e``.
    """
    M = mm.cyclic_module(F, R, e)
    pieces = module_summands(M, seed)
    first = pieces[0].idempotent
    for K, B in M.ambient_basis.items():
        co = SubspaceSolver(R, B).coords(e.reshape(1, -1))
        if co is None:
            continue
        image = R.matmul(first[K], co.T).T
        return R.matmul(image, B).reshape(-1)
    raise GreenError("generator lies in no single level")


def verify_example(
    ambient: str = "GL3_2",
    klein: int = 0,
    idempotent: str = "local",
    seed: int = DEFAULT_SEED,
) -> dict:
    """Run the example pipeline; stops at the first failing step.

    ``idempotent`` is ``"local"`` (one local summand of ``c_phi + c_{phi^2}``),
    ``"literal"`` (the element itself) or ``"corrupt"`` (``c_phi`` alone, not idempotent).
    Returns ``{"passed", "failed_step", "steps"}`` with ``steps`` an ordered list of
    ``{step, status, data}``.
    """
    R = fp(2)
    steps: list[dict] = []

    def record(step: str, ok: bool, data: dict) -> None:
        steps.append({"step": step, "status": "pass" if ok else "fail", "data": data})
        if not ok:
            raise ExampleFailure(step, str(data))

    try:
        G = load_group(ambient)
        S = dihedral_subgroup(G)
        record("ambient", S is not None, {"group": ambient, "order": G.order, "sylow_order": sylow_subgroup(G, 2).order})
        F = fusion_from_group(G, S, 2, label=f"F_D8({ambient})")
        report = F.saturation_report()
        record("saturation", report["saturated"], report)
        fours = klein_fours(F)
        if klein >= len(fours):
            record("normalizer", False, {"klein_fours_with_automizer_S3": len(fours)})
        H = fours[klein]
        NG = normalizer(G, H)
        NF = orbitprod.nf_system(F, H)
        local = fusion_from_group(NG, S, 2)
        same = NF.same_homs(local)
        record("normalizer", same and NG.order == 24, {"normalizer_order": NG.order, "hom_sets_equal": same})
        record("automizer", len(F.aut(H)) == 6, {"aut_order": len(F.aut(H))})

        Q = mm.centric_quotient(F, R)
        if idempotent == "corrupt":
            phis = [a for a in F.aut(H) if not a.is_identity_map() and a.compose(a).compose(a).is_identity_map()]
            e = Q.vec(mk.MackeyElement.basis(R, mm.key_of(H, H, phis[0])))
        else:
            e = Q.vec(example_element(F, H, R))
        idem_ok = bool(np.all(R.reduce(Q.multiply(e, e) - e) == 0)) and bool(np.any(e))
        record("idempotent", idem_ok, {"support": int(np.count_nonzero(e))})
        if idempotent == "local":
            e0 = local_summand_element(F, R, e, seed)
            ok = bool(np.all(R.reduce(Q.multiply(e0, e0) - e0) == 0))
            ok = ok and bool(np.all(Q.multiply(e, Q.multiply(e0, e)) == e0))
            record("local-summand", ok, {"support": int(np.count_nonzero(e0))})
            e = e0
        else:
            record("local-summand", True, {"skipped": idempotent})
        M = mm.cyclic_module(F, R, e, label="M")
        indec = is_indecomposable(M, seed)
        record("indecomposable", indec, {"dims": _level_dims(M)})
        data = mm.vertex(M)
        v_ok = data.vertex is not None and F.are_isomorphic(data.vertex, H)
        record("vertex", v_ok, {"vertex_order": None if data.vertex is None else data.vertex.order, "defect_set": len(data.defect_set)})
        X, Y = mm.x_family(F, H), mm.y_family(F, H)
        record("families", not Y, {"X": len(X), "Y": len(Y)})
        down = green_down(M, H, seed)
        low = mm.restrict(M, NF)
        iso = modules_isomorphic(low, down.correspondent, seed)
        record(
            "green-down",
            len(down.summands) == 1 and iso and down.checks["idempotent_matches"],
            {"summands": len(down.summands), "restriction_is_correspondent": iso, "conditions": sorted(down.checks["conditions"])},
        )
        up = green_up(down.correspondent, F, H, seed)
        back = modules_isomorphic(up.correspondent, M, seed)
        record("green-up", back, {"summands": len(up.summands), "correspondent_is_input": back, "companions": len(up.summands) - 1})
        rt = modules_isomorphic(green_down(up.correspondent, H, seed, algebra_check=False).correspondent, down.correspondent, seed)
        record("round-trip", rt, {"down_up": back, "up_down": rt})
    except ExampleFailure as exc:
        return {"passed": False, "failed_step": exc.step, "steps": steps}
    except GreenError as exc:
        done = {s["step"] for s in steps}
        step = next(s for s in EXAMPLE_STEPS if s not in done)
        steps.append({"step": step, "status": "fail", "data": {"error": str(exc)}})
        return {"passed": False, "failed_step": step, "steps": steps}
    return {"passed": True, "failed_step": None, "steps": steps}


def _level_dims(M: MackeyModule) -> list[list[int]]:
    """``[order, canonical id, dim]`` per level, canonically ordered."""
    return [[K.order, K.canonical_id, M.dim(K)] for K in M.levels]
