import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexalab.exactfield import field_make
from hexalab.exactla import (
    AmbientMismatch,
    Subspace,
    image,
    is_zero,
    kernel_basis,
    left_kernel,
    rank,
    rref,
    solve,
    subspace_ops,
)

F7 = field_make("p=7")
FQ = field_make("q")
FB = field_make("gf2=16")


def mat(field, rows):
    return field.array([field(x) for r in rows for x in r], (len(rows), len(rows[0])))


def test_rref_hand_example():
    m = mat(F7, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    red, r, piv = rref(F7, m)
    assert r == 2 and piv == [0, 1]
    # rows are (1, 0, 1) and (0, 1, 1) since 2y + 3 = 1 + ... over F_7
    assert red[:2].tolist() == [[1, 0, 1], [0, 1, 1]]


def test_rational_rank_differs_from_mod_p():
    # determinant 7: singular mod 7, invertible over Q
    rows = [[1, 2], [3, 13]]
    assert rank(FQ, mat(FQ, rows)) == 2
    assert rank(F7, mat(F7, rows)) == 1


@st.composite
def matrices(draw, field=F7):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 6))
    vals = draw(st.lists(st.integers(0, 6), min_size=n * m, max_size=n * m))
    return mat(field, [vals[i * m : (i + 1) * m] for i in range(n)])


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel(m):
    k = kernel_basis(F7, m)
    assert rank(F7, m) + k.dim == m.shape[1]
    if k.dim:
        assert is_zero(F7.matmul(m, k.basis.T))
    lk = left_kernel(F7, m)
    if lk.dim:
        assert is_zero(F7.matmul(lk.basis, m))


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rref_is_canonical(m):
    red, r, _ = rref(F7, m)
    again, r2, _ = rref(F7, red)
    assert r == r2 and np.array_equal(red, again)
    # row operations do not change the span
    shuffled = m[::-1]
    assert Subspace.span(F7, m) == Subspace.span(F7, shuffled)


def test_subspace_equality_is_basis_identity():
    a = Subspace.span(F7, mat(F7, [[1, 1, 0], [0, 1, 1]]))
    b = Subspace.span(F7, mat(F7, [[1, 2, 1], [1, 0, 6]]))
    assert a == b
    assert a.fingerprint() == b.fingerprint()
    c = Subspace.span(F7, mat(F7, [[1, 0, 0]]))
    assert a != c


def test_sum_and_intersection():
    a = Subspace.span(F7, mat(F7, [[1, 0, 0], [0, 1, 0]]))
    b = Subspace.span(F7, mat(F7, [[0, 1, 0], [0, 0, 1]]))
    ops = subspace_ops(a, b)
    assert ops["sum_dim"] == 3 and ops["intersection_dim"] == 1 and not ops["equal"]


def test_contains_and_coords():
    a = Subspace.span(FB, mat(FB, [[1, 1, 0, 0], [0, 0, 1, 1]]))
    v = mat(FB, [[1, 1, 1, 1]])[0]
    assert a.contains(v)
    assert not a.contains(mat(FB, [[1, 0, 0, 0]])[0])
    assert a.coords(v).tolist() == [[1, 1]]
    with pytest.raises(ValueError):
        a.coords(mat(FB, [[1, 0, 0, 0]])[0])


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        Subspace.zero(F7, 3) == Subspace.zero(F7, 4)


def test_annihilator_and_restrict():
    a = Subspace.span(F7, mat(F7, [[1, 2, 3, 4]]))
    ann = a.annihilator()
    assert ann.shape == (3, 4)
    assert is_zero(F7.matmul(ann, a.basis.T))
    assert a.restrict([0, 2]).dim == 1


def test_solve_and_image():
    a = mat(FQ, [[2, 1], [1, 3]])
    b = mat(FQ, [[5], [10]])
    x = solve(FQ, a, b)
    assert np.array_equal(FQ.matmul(a, x), b)
    with pytest.raises(ValueError):
        solve(F7, mat(F7, [[1, 1], [1, 1]]), mat(F7, [[1], [2]]))
    assert image(F7, mat(F7, [[1, 2], [2, 4]])).dim == 1
