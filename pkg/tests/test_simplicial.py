from math import comb

import numpy as np
import pytest

from hexalab.exactfield import field_make
from hexalab.simplicial import (
    DELTA5,
    ClusterError,
    all_clusters,
    cluster_build,
    cocycle_check,
    complement,
    complex_from_pentachora,
    delta1,
    faces,
    omitted_vertex,
    orientation_sign,
    parse_omit,
    pentachora,
    random_cochain1,
    splittings,
)


def test_face_counts_of_delta5():
    assert [len(faces(DELTA5, d)) for d in range(6)] == [comb(6, d + 1) for d in range(6)]
    assert len(pentachora()) == 6


def test_omitted_vertex_and_sign():
    u = (1, 2, 3, 4, 5)
    assert omitted_vertex((1, 2, 4, 5), u) == 3
    assert [orientation_sign(t, u) for t in faces(u, 3)] == [1, -1, 1, -1, 1]
    with pytest.raises(ValueError):
        omitted_vertex((1, 2, 6, 5), u)


def test_boundary_of_boundary_signs_cancel():
    # every triangle of a pentachoron lies in two tetrahedra with opposite induced signs
    u = (1, 2, 3, 4, 5)
    for f in faces(u, 2):
        total = sum(orientation_sign(t, u) * orientation_sign(f, t) for t in faces(u, 3) if set(f) < set(t))
        assert total == 0


@pytest.mark.parametrize("k,inner,boundary", [(1, 0, 5), (2, 1, 8), (3, 3, 9), (4, 6, 8), (5, 10, 5)])
def test_cluster_tetrahedron_counts(k, inner, boundary):
    for c in all_clusters():
        if len(c.pentachora) == k:
            assert len(c.inner_tetrahedra) == inner
            assert len(c.boundary_tetrahedra) == boundary


def test_cluster_and_complement_share_boundary():
    for c, cbar in splittings():
        assert c.boundary_tetrahedra == cbar.boundary_tetrahedra


def test_thirty_one_splittings():
    sp = splittings()
    assert len(sp) == 31
    sizes = sorted(len(c.pentachora) for c, _ in sp)
    assert sizes.count(1) == 6 and sizes.count(2) == 15 and sizes.count(3) == 10
    assert len(all_clusters()) == 62


def test_parse_omit():
    c = parse_omit("omit=6,5")
    assert c.pentachora == ((1, 2, 3, 4, 5), (1, 2, 3, 4, 6))
    assert complement(c).pentachora == ((1, 2, 3, 5, 6), (1, 2, 4, 5, 6), (1, 3, 4, 5, 6), (2, 3, 4, 5, 6))
    assert c.counts()["inner_tetrahedra"] == 1


@pytest.mark.parametrize("bad", ["6,5", "omit=7", "omit=a", "omit=", "omit=1,2,3,4,5,6"])
def test_parse_omit_rejects(bad):
    with pytest.raises(ClusterError):
        parse_omit(bad)


def test_cluster_build_rejects_foreign_pentachoron():
    with pytest.raises(ClusterError):
        cluster_build([(1, 2, 3, 4, 7)])


def test_complex_from_pentachora_checks_shape():
    with pytest.raises(ClusterError):
        complex_from_pentachora([(1, 2, 3, 4)])
    with pytest.raises(ClusterError):
        complex_from_pentachora([])


def test_delta1_is_a_cocycle():
    for spec in ("p=7", "gf2=16", "q"):
        f = field_make(spec)
        b = random_cochain1(f, np.random.default_rng(3))
        w = delta1(b)
        assert len(w) == 20
        assert cocycle_check(w)


def test_cocycle_check_detects_failure():
    f = field_make("p=7")
    w = delta1(random_cochain1(f, np.random.default_rng(0)))
    w[(1, 2, 3)] = w[(1, 2, 3)] + f(1)
    assert not cocycle_check(w)
