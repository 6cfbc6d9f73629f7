from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuscomp import idem
from fuscomp import mackey as mk
from fuscomp import mackeymod as mm
from fuscomp.green import example_element
from fuscomp.grp import load_group
from fuscomp.linalg import QQ, SubspaceSolver, fp, row_basis, solve

F2 = fp(2)


def group_algebra(name: str, R=F2) -> idem.FiniteAlgebra:
    """R[G] through the regular representation."""
    G = load_group(name)
    mats = []
    for g in range(G.order):
        m = R.zeros(G.order, G.order)
        for h in range(G.order):
            m[G.mul(g, h), h] = 1
        mats.append(m)
    return idem.FiniteAlgebra.from_matrices(R, mats, R.eye(G.order))


def matrix_units(n: int, entries, R=F2):
    out = []
    for i, j in entries:
        m = R.zeros(n, n)
        m[i, j] = 1
        out.append(m)
    return out


def span_closure(R, mats):
    """Subalgebra generated by ``mats`` (no unit added)."""
    n = mats[0].shape[0]
    basis = row_basis(R, np.stack([m.reshape(-1) for m in mats]))
    while True:
        cur = [b.reshape(n, n) for b in basis]
        prods = [R.matmul(a, b).reshape(-1) for a in cur for b in cur]
        new = row_basis(R, np.concatenate([basis, np.stack(prods)]))
        if new.shape[0] == basis.shape[0]:
            return [b.reshape(n, n) for b in basis]
        basis = new


def ideal_generated(A, x):
    vecs = [x] + [A.mul(A.basis_vector(i), x) for i in range(A.dim)] + [A.mul(x, A.basis_vector(i)) for i in range(A.dim)]
    vecs += [A.mul(A.mul(A.basis_vector(i), x), A.basis_vector(j)) for i in range(A.dim) for j in range(A.dim)]
    return A.span(vecs)


def induced_map(PI: idem.AlgebraMap, PJ: idem.AlgebraMap) -> idem.AlgebraMap:
    """The map ``A/I -> A/J`` with ``g PI = PJ``."""
    R = PI.source.R
    rows = [solve(R, PI.matrix.T, PJ.matrix[r]) for r in range(PJ.matrix.shape[0])]
    G = np.stack(rows) if rows else R.zeros(0, PI.target.dim)
    return idem.AlgebraMap(PI.target, PJ.target, G)


def nilpotent_ideal(A, W) -> bool:
    if not idem.is_two_sided_ideal(A, W):
        return False
    P = W
    for _ in range(A.dim + 1):
        if P.shape[0] == 0:
            return True
        P = A.product_space(P, W)
    return False


# ---------------------------------------------------------------------------
# radical


def test_radical_upper_triangular():
    A = idem.FiniteAlgebra.from_matrices(F2, matrix_units(2, [(0, 0), (0, 1), (1, 1)]), F2.eye(2))
    J = idem.radical(A)
    assert J.shape[0] == 1
    # oracle: strictly upper triangular matrices form a nilpotent ideal with semisimple quotient F2 x F2
    E12 = A.from_matrix(matrix_units(2, [(0, 1)])[0])
    assert idem.subspace_contains(F2, J, E12)
    assert nilpotent_ideal(A, J)
    Q, _ = idem.quotient(A, J)
    assert idem.radical(Q).shape[0] == 0


def test_radical_group_algebra_c2():
    A = group_algebra("C2")
    J = idem.radical(A)
    assert J.shape[0] == 1
    assert idem.subspace_contains(F2, J, A.add(A.unit, A.basis_vector(0 if A.unit[1] else 1)))
    assert nilpotent_ideal(A, J)


def test_radical_semisimple_inputs():
    full = matrix_units(2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    assert idem.radical(idem.FiniteAlgebra.from_matrices(F2, full, F2.eye(2))).shape[0] == 0
    diag = matrix_units(2, [(0, 0), (1, 1)])
    assert idem.radical(idem.FiniteAlgebra.from_matrices(F2, diag, F2.eye(2))).shape[0] == 0
    assert idem.radical(group_algebra("S3", QQ)).shape[0] == 0


def test_radical_group_algebras_match_nilpotent_oracle():
    # for a p-group the radical is the augmentation ideal
    for name in ("C2", "D8"):
        A = group_algebra(name)
        J = idem.radical(A)
        assert J.shape[0] == A.dim - 1
        assert nilpotent_ideal(A, J)
    S3 = group_algebra("S3")
    J = idem.radical(S3)
    assert nilpotent_ideal(S3, J)
    Q, _ = idem.quotient(S3, J)
    assert idem.radical(Q).shape[0] == 0


# ---------------------------------------------------------------------------
# idempotent decomposition


def test_local_algebra_has_single_idempotent():
    A = group_algebra("D8")
    dec = idem.decompose_identity(A)
    assert dec.count == 1 and np.array_equal(dec.idempotents[0], A.unit)


def test_product_of_fields_splits_into_coordinates():
    A = idem.FiniteAlgebra.from_matrices(F2, matrix_units(2, [(0, 0), (1, 1)]), F2.eye(2))
    dec = idem.decompose_identity(A)
    assert sorted(tuple(int(x) for x in e) for e in dec.idempotents) == [(0, 1), (1, 0)]


def test_group_algebra_s3_decomposition():
    A = group_algebra("S3")
    dec = idem.decompose_identity(A)
    cert = dec.certificates
    assert cert["idempotent"] and cert["orthogonal"] and cert["sum"] and cert["local"]
    # one projective cover of the trivial module (Cartan invariant 2), two copies of the 2-dim simple
    assert dec.count == 3
    assert cert["block_dims"] == [1, 1, 2]
    # every idempotent found is one of the 64 elements checked by enumeration
    all_idems = set(idem.idempotent_set(A))
    assert all(tuple(int(x) for x in e) in all_idems for e in dec.idempotents)


@pytest.mark.parametrize("seed", [0, 1, 2, 99, 12345])
def test_block_sizes_independent_of_seed(seed):
    A = group_algebra("S3")
    assert idem.decompose_identity(A, seed).certificates["block_dims"] == [1, 1, 2]


def test_decomposition_needs_idempotent():
    A = group_algebra("S3")
    with pytest.raises(idem.AlgebraError):
        idem.decompose_idempotent(A, A.basis_vector(1))
    with pytest.raises(idem.AlgebraError):
        idem.decompose_identity(group_algebra("S3", QQ))


def _automizer_corner(F, H):
    """The corner of the centric quotient at H spanned by the automorphisms of H."""
    R = F2
    keys = [mm.key_of(H, H, a) for a in F.aut(H)]
    n = len(keys)
    c = R.zeros(n, n, n)
    for i, X in enumerate(keys):
        for j, Y in enumerate(keys):
            prod = mk.centric_project(F, mk.MackeyElement.basis(R, X) * mk.MackeyElement.basis(R, Y))
            for k, v in prod.coeffs.items():
                c[i, j, keys.index(k)] = v
    unit = R.zeros(n)
    unit[keys.index(mk.identity_key(H))] = 1
    return idem.FiniteAlgebra(R, c, unit=unit), keys


def test_example_idempotent_in_automizer_corner(F1, H1):
    A, keys = _automizer_corner(F1, H1)
    assert A.dim == 6 and A.check_associative() and A.check_unit()
    x = example_element(F1, H1, F2)
    e = F2.zeros(A.dim)
    for k in x.coeffs:
        e[keys.index(k)] = 1
    assert A.is_idempotent(e)
    # central: it is the block idempotent of the 2x2 matrix block of F2[S3]
    for i in range(A.dim):
        b = A.basis_vector(i)
        assert np.array_equal(A.mul(e, b), A.mul(b, e))
    # the literal expectation (a local summand of 1) does not hold: it splits in two
    assert not idem.is_local_idempotent(A, e)
    dec = idem.decompose_idempotent(A, e)
    assert dec.count == 2 and dec.certificates["local"]
    full = idem.decompose_identity(A)
    assert full.count == 3


# ---------------------------------------------------------------------------
# endomorphism algebras


def test_end_algebra_of_sum(example_module):
    P = example_module
    n = idem.end_algebra(P).dim
    assert idem.end_algebra(mm.direct_sum(P, P)).dim == 4 * n
    assert idem.is_indecomposable(P)
    assert not idem.is_indecomposable(mm.direct_sum(P, P))


def test_end_algebra_of_zero_module(F1):
    A = idem.end_algebra(mm.zero_module(F1, F2))
    assert A.dim == 0
    assert not idem.is_indecomposable(mm.zero_module(F1, F2))


def test_literal_example_module_is_two_copies(literal_example_module, example_module):
    M, P = literal_example_module, example_module
    pieces = idem.module_summands(M)
    assert len(pieces) == 2
    assert all(idem.modules_isomorphic(p.module, P) for p in pieces)
    assert idem.modules_isomorphic(M, mm.direct_sum(P, P))
    assert idem.summand_multiplicities(P, M)["V"] == {0: 2}


# ---------------------------------------------------------------------------
# the abstract correspondence


def _fields_data():
    A = idem.FiniteAlgebra.from_matrices(F2, matrix_units(2, [(0, 0), (1, 1)]), F2.eye(2))
    zero = F2.zeros(0, A.dim)
    data = idem.CorrespondenceData(A, A, A.whole(), zero, zero, zero, lambda v: v, lambda v: v)
    return A, data


def test_degenerate_correspondence_is_identity():
    A, data = _fields_data()
    for b in idem.decompose_identity(A).idempotents:
        out = idem.near_iso_correspond(data, b)
        assert np.array_equal(out.a, b)
        assert set(out.conditions) == {str(n) for n in range(1, 9)}


def test_b_in_K_is_rejected():
    A, data = _fields_data()
    b = idem.decompose_identity(A).idempotents[0]
    data.K = A.span([b])
    with pytest.raises(idem.ConditionFailed) as exc:
        idem.near_iso_correspond(data, b)
    assert exc.value.number == 0


def test_condition_failure_names_number():
    A, data = _fields_data()
    data.f = lambda v: A.zero()
    with pytest.raises(idem.ConditionFailed) as exc:
        idem.check_conditions(data)
    assert exc.value.number == 4


# ---------------------------------------------------------------------------
# near isomorphisms on random small algebras


@st.composite
def random_algebra_data(draw):
    """A random subalgebra of 3x3 upper triangular matrices over F2 and a random element."""
    n = 3
    slots = [(i, j) for i in range(n) for j in range(i, n)]
    count = draw(st.integers(1, 3))
    mats = []
    for _ in range(count):
        bits = draw(st.lists(st.integers(0, 1), min_size=len(slots), max_size=len(slots)))
        m = F2.zeros(n, n)
        for (i, j), b in zip(slots, bits):
            m[i, j] = b
        mats.append(m)
    with_unit = draw(st.booleans())
    if with_unit:
        mats.append(F2.eye(n))
    mats = [m for m in mats if np.any(m)]
    if not mats:
        mats = [F2.eye(n)]
        with_unit = True
    basis = span_closure(F2, mats)
    unit = F2.eye(n) if with_unit else None
    A = idem.FiniteAlgebra.from_matrices(F2, basis, unit)
    coeffs = draw(st.lists(st.integers(0, 1), min_size=A.dim, max_size=A.dim))
    return A, F2.array(coeffs)


@settings(max_examples=40, deadline=None)
@given(random_algebra_data())
def test_projection_between_quotients_is_near_iso(data):
    A, x = data
    assert A.check_associative()
    J = ideal_generated(A, x)
    I = idem.subspace_sum(F2, A.product_space(A.whole(), J), A.product_space(J, A.whole()))
    assert idem.subspace_le(F2, I, J)
    QI, PI = idem.quotient(A, I)
    QJ, PJ = idem.quotient(A, J)
    g = induced_map(PI, PJ)
    assert g.is_multiplicative() and g.is_surjective()
    assert idem.is_near_isomorphism(g)
    # idempotents correspond bijectively and locality is preserved
    EI = idem.idempotent_set(QI)
    EJ = idem.idempotent_set(QJ)
    images = {tuple(int(v) for v in g(np.array(e))) for e in EI}
    assert len(EI) == len(EJ) == len(images) and images == set(EJ)
    if QI.unit is not None:
        for e in EI:
            e = np.array(e)
            if not QI.is_zero(e) and idem.is_local_idempotent(QI, e):
                assert idem.is_local_idempotent(QJ, g(e))


@settings(max_examples=40, deadline=None)
@given(random_algebra_data())
def test_near_iso_lemmas(data):
    A, x = data
    ident = idem.AlgebraMap(A, A, F2.eye(A.dim))
    assert idem.is_isomorphism(ident) and idem.is_near_isomorphism(ident)
    J = ideal_generated(A, x)
    Q, P = idem.quotient(A, J)
    near = idem.is_near_isomorphism(P)
    if A.unit is not None and near:
        assert idem.is_isomorphism(P)
    # factors of a near isomorphism: P = g f with f = A -> A/I surjective
    I = idem.subspace_sum(F2, A.product_space(A.whole(), J), A.product_space(J, A.whole()))
    QI, PI = idem.quotient(A, I)
    g = induced_map(PI, P)
    if near:
        assert idem.is_near_isomorphism(PI) and idem.is_near_isomorphism(g)
    # composition with an isomorphism keeps near isomorphisms
    if idem.is_near_isomorphism(g):
        assert idem.is_near_isomorphism(idem.AlgebraMap(Q, Q, F2.eye(Q.dim)).compose(g))
