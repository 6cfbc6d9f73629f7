from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from fuscomp.fusion import (
    FusionError,
    GroupHom,
    extend_on_generators,
    extends_over_H,
    fusion_from_group,
    fusion_from_isos,
    load_fusion,
    normalizer_system,
)
from fuscomp.green import klein_fours
from fuscomp.grp import center, load_group, normalizer, sylow_subgroup

from conftest import sylow_system

D8_KLEIN_ORDER3 = {
    "source": [[[1, 2], [3, 4]], [[1, 3], [2, 4]]],
    "images": [[[1, 3], [2, 4]], [[1, 4], [2, 3]]],
}


def all_automorphisms(S):
    """Brute force: every assignment of the two generators that extends to an automorphism."""
    G = S.group
    gens = G.generator_indices
    out = []
    for imgs in itertools.product(S.elements, repeat=len(gens)):
        try:
            phi = extend_on_generators(G, gens, list(imgs))
        except FusionError:
            continue
        if phi.image == S:
            out.append(phi)
    return out


def centric_aut_orders(F):
    return [len(F.aut(K)) for K in sorted((F.fully_normalized_rep(c[0]) for c in F.centric_classes()), key=lambda s: s.key)]


def test_inner_automorphisms_of_d8(F_D8):
    assert len(F_D8.aut(F_D8.S)) == 4
    assert len(all_automorphisms(F_D8.S)) == 8


def test_klein_four_automizer_in_F1(F1, H1, GL32):
    assert len(F1.aut(H1)) == 6
    assert normalizer(GL32, H1).order == 24
    assert len(klein_fours(F1)) == 2


def test_normalizer_system_is_local_group_system(F1, GL32):
    for H in klein_fours(F1):
        N = normalizer(GL32, H)
        assert normalizer_system(F1, H).same_homs(fusion_from_group(N, F1.S, 2))


def test_center_not_centric(F_D8, F1):
    Z = center(F_D8.S)
    assert Z.order == 2 and not F_D8.is_centric(Z)
    assert [K.order for K in F_D8.centric_subgroups] == [4, 4, 4, 8]
    assert [K.canonical_id for K in F1.centric_subgroups] == [50, 51, 52, 121]


def test_group_systems_saturated(F_D8, F_S4, F1):
    for F in (F_D8, F_S4, F1):
        assert F.saturation_report()["saturated"]


def test_gl23_dihedral_system_fails_axiom_one(GL23):
    from fuscomp.green import dihedral_subgroup

    S = dihedral_subgroup(GL23)
    rep = fusion_from_group(GL23, S, 2).saturation_report()
    assert rep == {"saturated": False, "axiom": 1, "aut_F_S": 8, "aut_S_S": 4}
    assert fusion_from_group(GL23, sylow_subgroup(GL23, 2), 2).is_saturated()


def test_full_automorphism_group_breaks_axiom_one(F_D8):
    # Out(D8) has order 2 = p, so Aut_S(S) is not Sylow in Aut_F(S)
    F = fusion_from_isos(F_D8.S, 2, all_automorphisms(F_D8.S))
    rep = F.saturation_report()
    assert rep["axiom"] == 1 and rep["aut_F_S"] == 8


def test_generated_abstract_system(tmp_path):
    spec = {"abstract": {"S": "D8", "p": 2, "homs": [D8_KLEIN_ORDER3], "closure": "generate", "name": "D8+"}}
    F = load_fusion(spec)
    assert F.is_saturated()
    assert centric_aut_orders(F) == centric_aut_orders(sylow_system("S4")) == [2, 6, 2, 4]
    path = tmp_path / "f.json"
    path.write_text(json.dumps(spec))
    assert load_fusion(path).same_homs(F)


def test_check_mode_reports_missing_composite():
    spec = {"abstract": {"S": "D8", "p": 2, "homs": [D8_KLEIN_ORDER3], "closure": "check"}}
    with pytest.raises(FusionError, match="lacks composite"):
        load_fusion(spec)


def test_check_mode_accepts_closed_tables():
    assert load_fusion({"abstract": {"S": "D8", "p": 2, "homs": [], "closure": "check"}}).same_homs(sylow_system("D8"))


def test_bad_hom_rejected():
    bad = {"source": [[[1, 2, 3, 4]]], "images": [[[1, 3]]]}
    with pytest.raises(FusionError, match="hom 0"):
        load_fusion({"abstract": {"S": "D8", "p": 2, "homs": [bad]}})
    with pytest.raises(FusionError, match="not an element"):
        load_fusion({"abstract": {"S": "D8", "p": 2, "homs": [{"source": [[[1, 2]]], "images": [[[1, 2]]]}]}})


def test_ambient_file_shapes(tmp_path):
    F = load_fusion({"ambient": "S4", "sylow_p": 2})
    assert F.S.order == 8 and F.is_saturated()
    G = load_group("S4")
    F2 = load_fusion({"ambient": "S4", "S": [[[1, 2, 3, 4]], [[1, 3]]], "p": 2})
    assert F2.S.order == 8
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(FusionError, match="byte offset"):
        load_fusion(bad)
    assert G.order == 24


def test_weak_and_standard_normalizer_agree_on_centrics(F_D8, F_S4, F1):
    for F in (F_D8, F_S4, F1):
        for H in F.centric_subgroups:
            if not F.is_fully_normalized(H):
                continue
            N = normalizer_system(F, H)
            for A in N.subgroups:
                std = {phi.images for phi in N.hom_set(A, N.S)}
                weak = {phi.images for phi in F.hom_set(A, N.S) if extends_over_H(F, H, phi)}
                assert std == weak


def test_normalizer_needs_fully_normalized(F1):
    bad = [H for H in F1.subgroups if not F1.is_fully_normalized(H)]
    assert bad
    with pytest.raises(FusionError):
        normalizer_system(F1, bad[0])


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_closure_invariants(data):
    F = _F1()
    subs = F.subgroups
    A = subs[data.draw(st.integers(0, len(subs) - 1))]
    homs = F.hom_set(A, F.S)
    phi = homs[data.draw(st.integers(0, len(homs) - 1))]
    # S-conjugations are present
    for s in F.S:
        assert F.contains(GroupHom(A, F.S, tuple(F.G.conj(s, a) for a in A)))
    # restriction to any subgroup stays in F
    below = F.subgroups_below(A)
    B = below[data.draw(st.integers(0, len(below) - 1))]
    assert F.contains(phi.restrict(B).corestrict(F.S))
    # composition with a morphism out of the image stays in F
    img = phi.image
    nxt = F.hom_set(img, F.S)
    psi = nxt[data.draw(st.integers(0, len(nxt) - 1))]
    assert F.contains(psi.compose(phi.corestrict(img)))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_centric_upward_closed_and_local_automizers(data):
    F = _F1()
    subs = F.subgroups
    H = subs[data.draw(st.integers(0, len(subs) - 1))]
    K = subs[data.draw(st.integers(0, len(subs) - 1))]
    if F.is_centric(H) and H <= K:
        assert F.is_centric(K)
    if F.is_centric(H) and F.is_fully_normalized(H):
        N = normalizer_system(F, H)
        assert {a.images for a in F.aut(H)} == {a.images for a in N.aut(H)}


_CACHE = {}


def _F1():
    if "F1" not in _CACHE:
        from fuscomp.green import example_system

        _CACHE["F1"] = example_system("GL3_2")
    return _CACHE["F1"]
