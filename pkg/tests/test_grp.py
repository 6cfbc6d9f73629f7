from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from fuscomp.grp import (
    FiniteGroup,
    GroupTooLarge,
    center,
    centralizer,
    conjugacy_partition,
    cycles_to_perm,
    double_coset,
    double_coset_reps,
    load_group,
    local_subgroups,
    normalizer,
    perm_to_cycles,
    subgroup_lattice,
    subgroups_of,
    sylow_subgroup,
    transporter,
)


def brute_subgroups(G):
    """Every subset of G closed under multiplication (finite, so a subgroup)."""
    found = []
    others = [g for g in range(G.order) if g != G.identity]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            s = set(extra) | {G.identity}
            if all(G.mul(a, b) in s for a in s for b in s):
                found.append(frozenset(s))
    return set(found)


def two_generated_subgroups(G):
    return {frozenset(G.closure([a, b])) for a in range(G.order) for b in range(a, G.order)}


def brute_double_cosets(G, K, H):
    seen, count = set(), 0
    for x in range(G.order):
        if x in seen:
            continue
        count += 1
        seen |= {G.mul(G.mul(k, x), h) for k in K for h in H}
    return count


def test_bundled_orders():
    orders = {n: load_group(n).order for n in ["C2", "C3", "S3", "D8", "Q8", "S4", "GL2_3", "GL3_2"]}
    assert orders == {"C2": 2, "C3": 3, "S3": 6, "D8": 8, "Q8": 8, "S4": 24, "GL2_3": 48, "GL3_2": 168}


def test_d8_subgroups_match_brute_force(D8):
    subs = subgroups_of(D8)
    assert {frozenset(s.elements) for s in subs} == brute_subgroups(D8)
    assert len(subs) == 10
    _, classes, _ = subgroup_lattice(D8)
    assert len(classes) == 8


def test_gl23_subgroups_match_two_generated_oracle(GL23):
    # GL(2,3) has 2-rank 2 and every subgroup is generated by two elements
    subs = subgroups_of(GL23)
    assert {frozenset(s.elements) for s in subs} == two_generated_subgroups(GL23)


def test_subgroups_sorted_canonically(S4):
    subs = subgroups_of(S4)
    assert [s.key for s in subs] == sorted(s.key for s in subs)
    assert [s.canonical_id for s in subs] == list(range(len(subs)))


def test_conjugacy_partition_is_partition(S4):
    subs = subgroups_of(S4)
    classes = conjugacy_partition(S4, subs)
    flat = sorted(i for c in classes for i in c)
    assert flat == list(range(len(subs)))
    for c in classes:
        assert len({subs[i].order for i in c}) == 1


def test_double_cosets_trivial_cases(D8, S4):
    W = D8.whole
    assert double_coset_reps(D8, W, W) == [D8.identity]
    # a Klein four is normal of index 2 in D8
    V = next(s for s in subgroups_of(D8) if s.order == 4 and all(D8.element_order(x) <= 2 for x in s))
    assert normalizer(D8, V) == W
    assert len(double_coset_reps(D8, V, V)) == 2


def test_double_cosets_match_oracle(S4):
    subs = subgroups_of(S4)
    for K in subs[::3]:
        for H in subs[::4]:
            reps = double_coset_reps(S4, K, H)
            assert len(reps) == brute_double_cosets(S4, K, H)
            union = set()
            for x in reps:
                dc = double_coset(S4, K, x, H)
                assert not (dc & union)
                union |= dc
            assert len(union) == S4.order


def test_double_cosets_need_containment(D8, S4):
    with pytest.raises(ValueError):
        double_coset_reps(D8.whole, S4.whole, D8.whole)


def test_sylow_orders(S4, GL23, GL32):
    assert sylow_subgroup(load_group("S3"), 2).order == 2
    assert sylow_subgroup(GL23, 2).order == 16
    assert sylow_subgroup(GL32, 2).order == 8
    assert sylow_subgroup(GL32, 7).order == 7
    assert sylow_subgroup(S4, 3).order == 3
    with pytest.raises(ValueError):
        sylow_subgroup(S4, 4)


def test_group_bound(monkeypatch):
    with pytest.raises(GroupTooLarge):
        load_group("S4", max_order=10)
    monkeypatch.setenv("FUSCOMP_MAX_GROUP", "20")
    with pytest.raises(GroupTooLarge, match="FUSCOMP_MAX_GROUP"):
        load_group("S4")
    monkeypatch.setenv("FUSCOMP_MAX_GROUP", "24")
    assert load_group("S4").order == 24


def test_generator_not_bijection_names_index():
    with pytest.raises(ValueError, match="generator 1"):
        FiniteGroup(3, [(1, 0, 2), (0, 0, 2)])
    with pytest.raises(ValueError, match="generator 1"):
        load_group({"name": "bad", "degree": 3, "generators": [[[1, 2]], [[1, 2], [2, 3]]]})


def test_missing_group_lists_bundled():
    with pytest.raises(ValueError, match="bundled: .*D8"):
        load_group("NoSuchGroup")


def test_group_file_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"degree": 3, ')
    with pytest.raises(ValueError, match="byte offset"):
        load_group(bad)
    good = tmp_path / "c3.json"
    good.write_text(json.dumps({"name": "C3", "degree": 3, "generators": [[[1, 2, 3]]]}))
    assert load_group(good).order == 3


def test_cycle_round_trip():
    p = cycles_to_perm([[1, 3, 2], [4, 5]], 6)
    assert perm_to_cycles(p) == [[1, 3, 2], [4, 5]]


def test_transporter_oracle(S4):
    subs = subgroups_of(S4)
    A, B = subs[3], subs[-2]
    got = set(transporter(S4, A, B))
    want = {g for g in range(S4.order) if A.conj(g) <= B}
    assert got == want


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_local_subgroup_properties(data):
    G = load_group("S4")
    subs = subgroups_of(G)
    H = subs[data.draw(st.integers(0, len(subs) - 1))]
    g = data.draw(st.integers(0, G.order - 1))
    N, C = local_subgroups(G, H)
    assert H <= N and C <= N
    assert (g in N) == (H.conj(g) == H)
    assert (g in C) == all(G.mul(g, h) == G.mul(h, g) for h in H)
    assert centralizer(G, H) == C
    assert H.conj(g).order == H.order
