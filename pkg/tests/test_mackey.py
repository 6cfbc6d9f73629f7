from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuscomp import mackey as mk
from fuscomp import orbitprod as op
from fuscomp.linalg import QQ, LinAlgError, fp


def composable_pairs(keys):
    return [(X, Y) for X in keys for Y in keys if Y.B == X.A]


def test_c2_basis_count_matches_biset_oracle(F_C2):
    assert len(mk.mackey_basis(F_C2)) == mk.biset_basis_count(F_C2) == 5


@pytest.mark.parametrize("name", ["F_D8", "F_S4", "F1"])
def test_basis_count_matches_biset_oracle(name, request):
    F = request.getfixturevalue(name)
    assert len(mk.mackey_basis(F)) == mk.biset_basis_count(F)


def test_c2_products_match_bisets(F_C2):
    keys = mk.mackey_basis(F_C2)
    for X, Y in composable_pairs(keys):
        assert mk.multiply_keys(X, Y) == mk.biset_product(X, Y)


def test_d8_products_match_bisets(F_D8):
    keys = mk.mackey_basis(F_D8)
    for X, Y in composable_pairs(keys):
        assert mk.multiply_keys(X, Y) == mk.biset_product(X, Y)


def test_random_F1_products_match_bisets(F1):
    keys = mk.mackey_basis(F1)
    pairs = composable_pairs(keys)
    rng = np.random.default_rng(11)
    for i in rng.choice(len(pairs), size=250, replace=False):
        X, Y = pairs[int(i)]
        assert mk.multiply_keys(X, Y) == mk.biset_product(X, Y)


def test_noncomposable_product_is_zero(F_D8):
    keys = mk.mackey_basis(F_D8)
    X = next(k for k in keys if k.A.order == 8)
    Y = next(k for k in keys if k.B.order == 1)
    assert mk.multiply_keys(X, Y) == Counter()


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_associativity(data):
    F = _system()
    keys = _keys()
    X = keys[data.draw(st.integers(0, len(keys) - 1))]
    ys = [k for k in keys if k.B == X.A]
    Y = ys[data.draw(st.integers(0, len(ys) - 1))]
    zs = [k for k in keys if k.B == Y.A]
    Z = zs[data.draw(st.integers(0, len(zs) - 1))]
    R = QQ
    x, y, z = (mk.MackeyElement.basis(R, k) for k in (X, Y, Z))
    assert (x * y) * z == x * (y * z)
    assert F is not None


def test_identity_keys_are_orthogonal_idempotents(F1):
    R = fp(2)
    ids = [mk.MackeyElement.basis(R, mk.identity_key(H)) for H in F1.subgroups]
    for i, a in enumerate(ids):
        for j, b in enumerate(ids):
            assert a * b == (a if i == j else mk.MackeyElement(R))
    one = mk.unit(F1, R)
    for X in mk.mackey_basis(F1)[::7]:
        x = mk.MackeyElement.basis(R, X)
        assert one * x == x == x * one


def test_klein_square_in_burnside_ring(F_D8):
    R = QQ
    V = F_D8.centric_subgroups[0]
    v = mk.burnside_class(F_D8, R, V)
    assert mk.burnside_product(F_D8, R, v, v) == v.scale(2)


@pytest.mark.parametrize("R", [fp(2), QQ], ids=["F2", "Q"])
def test_unit_of_self_system_is_S(F_D8, R):
    u = mk.burnside_unit(F_D8, R)
    S = mk.burnside_class(F_D8, R, F_D8.S)
    assert u.unit == S and u.S_inverse == S


@pytest.mark.parametrize("R", [fp(2), QQ], ids=["F2", "Q"])
def test_unit_F1(F1, R):
    u = mk.burnside_unit(F1, R)
    for H in mk.burnside_classes(F1):
        h = mk.burnside_class(F1, R, H)
        assert mk.burnside_product(F1, R, u.unit, h) == h
    S = mk.burnside_class(F1, R, F1.S)
    assert mk.burnside_product(F1, R, S, u.S_inverse) == u.unit


def test_rational_unit_reduces_to_mod2_unit(F1, F_S4):
    for F in (F1, F_S4):
        uq = mk.burnside_unit(F, QQ).unit.as_dict()
        u2 = mk.burnside_unit(F, fp(2)).unit.as_dict()
        reduced = {k: fp(2).scalar(v) for k, v in uq.items() if fp(2).scalar(v)}
        assert reduced == u2


def test_unit_needs_p_local(F1):
    with pytest.raises(LinAlgError):
        mk.burnside_unit(F1, fp(3))


@pytest.mark.parametrize("R", [fp(2), QQ], ids=["F2", "Q"])
def test_gamma_F1(F1, R):
    rep = mk.gamma_report(F1, R)
    assert rep["holds"], rep
    assert rep["product_checks"] == 16


def test_gamma_other_systems(F_D8, F_S4):
    for F in (F_D8, F_S4):
        assert mk.gamma_report(F, fp(2))["holds"]


def test_burnside_product_commutes(F1):
    R = QQ
    classes = mk.burnside_classes(F1)
    for H in classes:
        for K in classes:
            h, k = mk.burnside_class(F1, R, H), mk.burnside_class(F1, R, K)
            assert mk.burnside_product(F1, R, h, k) == mk.burnside_product(F1, R, k, h)


def test_product_sizes_are_burnside_coefficients(F1, H1):
    R = QQ
    h = mk.burnside_class(F1, R, H1)
    prod = mk.burnside_product(F1, R, h, h).as_dict()
    assert sum(prod.values()) == len(op.product_pairs(F1, H1, H1))


_CACHE: dict = {}


def _system():
    if "F" not in _CACHE:
        from fuscomp.green import example_system

        _CACHE["F"] = example_system("GL3_2")
    return _CACHE["F"]


def _keys():
    if "keys" not in _CACHE:
        _CACHE["keys"] = mk.mackey_basis(_system())
    return _CACHE["keys"]
