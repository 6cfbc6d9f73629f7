from __future__ import annotations

from types import SimpleNamespace

import numpy as np
import pytest

from fuscomp import mackey as mk
from fuscomp import mackeymod as mm
from fuscomp import orbitprod as op
from fuscomp.fusion import GroupHom
from fuscomp.green import example_element, klein_fours
from fuscomp.idem import is_indecomposable, is_summand, modules_isomorphic
from fuscomp.linalg import fp, rank

from conftest import regular_module

F2 = fp(2)


def free_module(F, H):
    Q = mm.centric_quotient(F, F2)
    return mm.cyclic_module(F, F2, Q.vec(mk.MackeyElement.basis(F2, mk.identity_key(H))))


def normal_klein(F):
    return next(H for H in F.centric_subgroups if H.order == 4 and op.nf_system(F, H).same_homs(F))


# ---------------------------------------------------------------------------
# construction


def test_modules_validate(F1, example_module, literal_example_module):
    for M in (example_module, literal_example_module, regular_module(F1, F2)):
        rep = M.validate()
        assert rep["valid"] and rep["checked"] > 0, rep["failures"]
        assert M.is_centric()


def test_free_module_levels_match_basis_count(F1, F_D8):
    for F in (F1, F_D8):
        keys = mk.mackey_basis(F, centric_only=True)
        for H in F.centric_subgroups:
            M = free_module(F, H)
            for K in F.centric_subgroups:
                assert M.dim(K) == sum(1 for k in keys if k.A == H and k.B == K)


def test_example_element_is_idempotent(F1, H1):
    Q = mm.centric_quotient(F1, F2)
    e = Q.vec(example_element(F1, H1, F2))
    assert np.array_equal(F2.reduce(Q.multiply(e, e)), e)


def test_example_module_dimensions(example_module, literal_example_module, H1, F1):
    P, M = example_module, literal_example_module
    assert {K.order: P.dim(K) for K in P.levels} == {4: 2, 8: 1}
    assert P.dim(H1) == 2 and P.dim(F1.S) == 1
    assert M.dim(H1) == 4 and M.dim(F1.S) == 2


def test_zero_and_non_idempotent(F1, H1):
    Q = mm.centric_quotient(F1, F2)
    assert mm.cyclic_module(F1, F2, F2.zeros(len(Q.keys))).is_zero()
    phi = next(a for a in F1.aut(H1) if not a.is_identity_map())
    with pytest.raises(mm.ModuleError):
        mm.cyclic_module(F1, F2, mk.MackeyElement.basis(F2, mm.key_of(H1, H1, phi)))


def test_module_json_is_sorted_and_stable(example_module):
    a = mm.module_to_json(example_module)
    b = mm.module_to_json(example_module)
    assert a == b
    assert [lv["dim"] for lv in a["levels"]] == [2, 1]
    assert all(v in (0, 1) for act in a["action"] for _, _, v in act["entries"])


# ---------------------------------------------------------------------------
# induction and restriction


@pytest.mark.parametrize("name", ["F_D8", "F_S4", "F1"])
def test_induction_routes_agree(name, request):
    F = request.getfixturevalue(name)
    M = regular_module(F, F2) if name != "F1" else request.getfixturevalue("example_module")
    for H in F.centric_subgroups:
        N = mm.restrict_to_subgroup(M, H)
        ind = mm.induce_from_subgroup(N, F, H)
        rep = mm.compare_inductions(ind, mm.induce_tensor(N, F))
        assert rep["dims_equal"] and rep["morphism"] and rep["bijective"]
        assert ind.module.validate()["valid"]
        # dimension count through the product decomposition
        for K in F.centric_subgroups:
            want = sum(N.dim(p.A) for p in op.product_pairs(F, H, K))
            assert ind.module.dim(K) == want
            for pair, off, d in ind.summands.get(K, []):
                assert d == N.dim(pair.A)


def test_induced_restricted_contains_input(example_module, F1, H1):
    # the Krull-Schmidt check is run where End(N + back) stays small
    N = mm.restrict_to_subgroup(example_module, F1.S)
    back = mm.restrict_to_subgroup(mm.induce_from_subgroup(N, F1, F1.S).module, F1.S)
    assert is_summand(N, back)
    # at H1 the identity pair contributes a copy of N: a split injection via theta maps
    N = mm.restrict_to_subgroup(example_module, H1)
    ind = mm.induce_from_subgroup(N, F1, H1)
    first = [(pair, off, d) for pair, off, d in ind.summands[H1] if pair.A == H1 and pair.hom.is_identity_map()]
    assert len(first) == 1 and first[0][2] == N.dim(H1)


def test_conjugation_transports_restrictions(F1, example_module):
    M = example_module
    for H in F1.centric_subgroups:
        for H2 in F1.isomorphs(H):
            for phi in F1.isos(H, H2)[:2]:
                phi = phi.corestrict(H2)
                conj = mm.conjugate(mm.restrict_to_subgroup(M, H), phi, mm.subgroup_system(F1, H2))
                assert conj.validate()["valid"]
                assert modules_isomorphic(conj, mm.restrict_to_subgroup(M, H2))


# ---------------------------------------------------------------------------
# theta maps and the transfer calculus


def test_theta_composite_is_burnside_action(example_module, F1, H1):
    M = example_module
    for H in F1.centric_subgroups:
        down, up, _ = mm.theta_maps(M, H)
        assert down.is_morphism() and up.is_morphism()
        act = mm.burnside_endomorphism(M, mk.burnside_class(F1, F2, H))
        assert down.compose(up) == act
    down, _, _ = mm.theta_maps(M, H1)
    assert down.is_surjective()


def test_theta_at_S_splits_for_self_system(F_D8):
    M = regular_module(F_D8, F2)
    down, up, _ = mm.theta_maps(M, F_D8.S)
    assert down.compose(up) == mm.identity_hom(M)


def test_transfer_over_own_subgroup_is_identity(F_D8):
    M = free_module(F_D8, F_D8.S)
    S = F_D8.S
    for f in mm.end_basis(M):
        assert mm.end_transfer(M, S, f) == f


@pytest.mark.parametrize("which", ["example", "literal"])
def test_transfer_properties(which, example_module, literal_example_module):
    M = example_module if which == "example" else literal_example_module
    rep = mm.transfer_property_report(M)
    assert sorted(rep) == list(range(1, 12))
    assert all(r["holds"] and r["instances"] > 0 for r in rep.values()), rep


def test_transfer_properties_regular_d8(F_D8):
    rep = mm.transfer_property_report(regular_module(F_D8, F2))
    assert all(r["holds"] for r in rep.values()), rep


def test_nf_transfer_composes(example_module, F1):
    for H in F1.centric_subgroups:
        if F1.is_fully_normalized(H):
            rep = mm.nf_transfer_report(example_module, H)
            assert rep["composition"] and rep["image_equals_ideal"]


def test_nf_transfer_zero(example_module, H1):
    Z = mm.zero_hom(example_module, example_module)
    assert mm.nf_transfer(example_module, H1, Z).is_zero()


@pytest.mark.parametrize("name", ["F_S4", "F1"])
def test_nf_transfer_needs_inverse_of_S(name, request):
    F = request.getfixturevalue(name)
    M = regular_module(F, F2)
    assert mm.nf_transfer_report(M, F.S)["composition"]
    assert not mm.nf_transfer_report(M, F.S, with_inverse=False)["composition"]


def test_nf_transfer_choice_independent(example_module, F1, H1):
    M = example_module
    NF = op.nf_system(F1, H1)
    G = F1.G
    rng = np.random.default_rng(3)
    base = op.nf_product_pairs(F1, H1, F1.S)
    NS = NF.S
    shuffled = []
    for pair in base:
        n = NS.elements[int(rng.integers(NS.order))]
        s = F1.S.elements[int(rng.integers(F1.S.order))]
        A2 = pair.A.conj_right(n)
        imgs = tuple(G.conj(s, pair.hom(G.conj(n, a))) for a in A2.elements)
        shuffled.append(SimpleNamespace(A=A2, hom=GroupHom(A2, F1.S, imgs)))
    for f in mm.restricted_end_basis(M, H1):
        g = mm.end_transfer(M, H1, f, over=NF)
        assert mm.nf_transfer(M, H1, g) == mm.nf_transfer(M, H1, g, choice=shuffled)


def test_workaround_identity(example_module, F1, F_S4):
    for H in F1.centric_subgroups:
        if F1.is_fully_normalized(H):
            assert mm.workaround_report(example_module, H, reshuffles=3, seed=5)["holds"]
    M = regular_module(F1, F2)
    rep = mm.workaround_report(M, F1.S, reshuffles=2, seed=1)
    assert rep["holds"] and rep["y_family"] == [4, 4, 4]
    for H in F_S4.centric_subgroups:
        if F_S4.is_fully_normalized(H):
            assert mm.workaround_report(regular_module(F_S4, F2), H, reshuffles=2)["holds"]


def test_averaged_transfers(F_S4):
    H = normal_klein(F_S4)
    for M in (regular_module(F_S4, F2), free_module(F_S4, H)):
        rep = mm.averaged_transfer_report(M, H)
        assert rep["holds"] and rep["morphisms"] > 0


# ---------------------------------------------------------------------------
# relative projectivity and vertices


def test_projective_relative_to_S(F1, F_D8, example_module):
    for F, M in ((F1, example_module), (F_D8, regular_module(F_D8, F2)), (F1, regular_module(F1, F2))):
        res = mm.relative_projectivity(M, [F.S])
        assert res.projective
        total = mm.zero_hom(M, M)
        for H, f in res.witness.items():
            total = total + mm.end_transfer(M, H, f)
        assert total == mm.identity_hom(M)


def test_example_projectivity_and_vertex(example_module, F1, H1):
    assert mm.relative_projectivity(example_module, [H1]).projective
    assert not mm.relative_projectivity(example_module, []).projective
    assert mm.x_family(F1, H1) == [] and mm.y_family(F1, H1) == []
    data = mm.vertex(example_module, require_indecomposable=True)
    assert data.vertex is not None and F1.are_isomorphic(data.vertex, H1)
    assert data.indecomposable


def test_projectivity_monotone(F1):
    M = regular_module(F1, F2)
    cent = F1.centric_subgroups
    for i in range(1, 1 << len(cent)):
        fam = [c for j, c in enumerate(cent) if i >> j & 1]
        if mm.relative_projectivity(M, fam):
            for K in cent:
                assert mm.relative_projectivity(M, fam + [K])


def test_vertex_of_free_module_at_S(F1, F_D8):
    # the free module at S may split; every summand has a vertex and one of them has vertex S
    from fuscomp.idem import module_summands

    for F in (F1, F_D8):
        M = free_module(F, F.S)
        assert mm.defect_set(M)[-1] == F.S
        vertices = [mm.vertex(p.module, require_indecomposable=True).vertex for p in module_summands(M)]
        assert all(v is not None for v in vertices)
        assert F.S in vertices


def test_doubling_keeps_defect_set(example_module, F1):
    for M in (example_module, free_module(F1, F1.S), free_module(F1, klein_fours(F1)[1])):
        assert mm.defect_set(mm.direct_sum(M, M)) == mm.defect_set(M)


def test_vertex_needs_indecomposable(literal_example_module):
    with pytest.raises(mm.ModuleError):
        mm.vertex(literal_example_module, require_indecomposable=True)
    assert mm.vertex(literal_example_module).defect_set


def test_end_restrict_and_homs(example_module, F1, H1):
    M = example_module
    NF = op.nf_system(F1, H1)
    low = mm.restrict(M, NF)
    for f in mm.end_basis(M):
        assert f.is_morphism()
        assert mm.end_restrict(f, NF).is_morphism()
    assert rank(F2, np.stack([h.vector() for h in mm.end_basis(low)])) == len(mm.end_basis(low))
