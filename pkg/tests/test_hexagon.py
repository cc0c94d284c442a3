from itertools import combinations, permutations

import numpy as np
import pytest

from hexalab.exactfield import Degenerate, Dual, Unattainable, field_make
from hexalab.exactla import Subspace, is_zero
from hexalab.hexagon import (
    EXPECTED_FIBER,
    FiniteOFamily,
    GenericFamily,
    InfinitesimalFamily,
    InnerResidue,
    boundary_functionals,
    boundary_relations_hold,
    certify_pentachora,
    cluster_space,
    edge_vector_matrix,
    edge_vectors_infinitesimal,
    eps,
    full_hexagon_check,
    functionals_for,
    general_position_b,
    general_position_gamma,
    inner_edge_functionals_vanish,
    permitted_space,
    phi_column_generic,
    phi_column_infinitesimal,
    psi_phi_identity_holds,
    vertex_relation_residues,
)
from hexalab.simplicial import DELTA5, all_clusters, delta1, faces, parse_omit, pentachora

BIG = field_make("p=2147483647")


@pytest.fixture(scope="module")
def generic():
    return GenericFamily(general_position_gamma(BIG, np.random.default_rng(11)))


@pytest.fixture(scope="module")
def infinitesimal():
    return InfinitesimalFamily.from_b(general_position_b(BIG, np.random.default_rng(12)))


def test_each_pentachoron_has_five_dim_space(generic, infinitesimal):
    for fam in (generic, infinitesimal):
        spaces = certify_pentachora(fam)
        assert sorted(v.dim for v in spaces.values()) == [5] * 6


def test_vertex_relations(generic, infinitesimal):
    for fam in (generic, infinitesimal):
        for u in pentachora():
            res = vertex_relation_residues(functionals_for(fam, u), fam.relation_coeff)
            assert all(is_zero(r) for r in res.values())


def test_b_relation_in_infinitesimal_case(infinitesimal):
    f = BIG
    b = infinitesimal.b
    u = (1, 2, 3, 4, 5)
    acc = f.zeros(10)
    for fn in functionals_for(infinitesimal, u):
        acc = f.add(acc, f.mul(b[fn.edge].value, fn.row(f, faces(u, 3))))
    assert is_zero(acc)


def test_infinitesimal_depends_only_on_omega():
    rng = np.random.default_rng(5)
    b = general_position_b(BIG, rng)
    a = dict(zip(range(1, 7), BIG.random_nonzero(rng, 6)))
    shifted = {(i, j): v + a[j] - a[i] for (i, j), v in b.items()}
    assert delta1(shifted) == delta1(b)
    u = (2, 3, 4, 5, 6)
    v1 = permitted_space(u, functionals_for(InfinitesimalFamily.from_b(b), u))
    v2 = permitted_space(u, functionals_for(InfinitesimalFamily.from_b(shifted), u))
    assert v1 == v2


def test_generic_column_vanishes_at_o_zero():
    # gamma_ij = -/+1 + o b_ij: the column is O(o), its o-coefficient matches the infinitesimal table up to a basis change
    f = BIG
    rng = np.random.default_rng(2)
    t = (1, 2, 3, 4)
    b = dict(zip(combinations(t, 2), f.random_nonzero(rng, 6)))

    def g(i, j):
        return Dual(f(eps(i, j)), b[(min(i, j), max(i, j))])

    col = phi_column_generic(g, t)
    assert all(x.a.is_zero() and y.a.is_zero() for x, y in col)
    lin = np.array([[x.b.value, y.b.value] for x, y in col], dtype=np.int64)
    w = delta1(b)
    table = np.array([[x.value, y.value] for x, y in phi_column_infinitesimal(w, t)], dtype=np.int64)
    assert Subspace.span(f, lin.T, 6) == Subspace.span(f, table.T, 6)


def test_finite_o_family_constant_part_is_the_table():
    b = general_position_b(BIG, np.random.default_rng(4))
    fo = FiniteOFamily(b)
    for t in [(1, 2, 3, 4), (2, 3, 5, 6)]:
        const = [(x.a, y.a) for x, y in fo.column_dual(t)]
        assert const == phi_column_infinitesimal(fo.omega, t)


def test_relabeling_preserves_dimensions(generic):
    perm = dict(zip(DELTA5, (3, 1, 6, 2, 5, 4)))
    moved = generic.relabel(perm)
    assert all(v.dim == 5 for v in certify_pentachora(moved).values())


def test_edge_vectors_span_permitted_space(infinitesimal):
    f = BIG
    for u in pentachora():
        tets = faces(u, 3)
        m = edge_vector_matrix(f, edge_vectors_infinitesimal(infinitesimal, u), tets)
        assert Subspace.span(f, m.T, 10) == permitted_space(u, functionals_for(infinitesimal, u))


def test_psi_phi_identity(infinitesimal):
    assert all(psi_phi_identity_holds(infinitesimal, t) for t in faces(DELTA5, 3))


def test_inner_cancellation_on_every_cluster(generic):
    for c in all_clusters():
        bfs = boundary_functionals(c, generic)
        assert inner_edge_functionals_vanish(c, bfs)
        assert boundary_relations_hold(c, generic, bfs)


def test_orientation_is_needed_for_inner_cancellation(generic):
    c = parse_omit("omit=6,5")
    unoriented = {u: functionals_for(generic, u) for u in c.pentachora}
    with pytest.raises(InnerResidue):
        boundary_functionals(c, generic, unoriented)


def test_cluster_space_dims(generic):
    two = cluster_space(parse_omit("omit=6,5"), generic)
    three = cluster_space(parse_omit("omit=6,5,4"), generic)
    assert two.boundary_restriction.dim == 8 and two.fiber_dim == EXPECTED_FIBER[2]
    assert three.boundary_restriction.dim == 9 and three.fiber_dim == EXPECTED_FIBER[3]


def test_full_hexagon(generic, infinitesimal):
    for fam in (generic, infinitesimal):
        rep = full_hexagon_check(fam)
        assert rep.passed
        assert len(rep.records) == 31
        assert rep.fiber_table() == {1: 0, 2: 0, 3: 0, 4: 1, 5: 4}
        assert rep.delta5_dim == 9


def test_degenerate_gamma_is_rejected():
    f = field_make("p=7")
    gamma = {(i, j): f(1) for i, j in permutations(DELTA5, 2)}
    with pytest.raises(Degenerate):
        functionals_for(GenericFamily(gamma), (1, 2, 3, 4, 5))


def test_general_position_samplers_meet_their_conditions():
    f = field_make("p=11")
    rng = np.random.default_rng(0)
    w = delta1(general_position_b(f, rng))
    assert all(not x.is_zero() for x in w.values())
    for i, j, k, l in combinations(DELTA5, 4):
        assert w[(j, k, l)] != w[(i, k, l)]
    fam = GenericFamily(general_position_gamma(f, rng))
    for t in faces(DELTA5, 3):
        fam.column(t)


@pytest.mark.parametrize("spec", ["p=3", "gf2=1"])
def test_tiny_fields_have_no_general_position(spec):
    f = field_make(spec)
    with pytest.raises(Unattainable):
        general_position_b(f, np.random.default_rng(0))
    with pytest.raises(Unattainable):
        general_position_gamma(f, np.random.default_rng(0))
