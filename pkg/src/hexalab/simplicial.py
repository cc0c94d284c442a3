"""Combinatorics of the 5-simplex, its pentachoron clusters, and 1-/2-cochains."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

Simplex = tuple[int, ...]
Cochain1 = dict[Simplex, object]
Cochain2 = dict[Simplex, object]

DELTA5: Simplex = (1, 2, 3, 4, 5, 6)


class ClusterError(ValueError):
    pass


def simplex(vertices: Iterable[int]) -> Simplex:
    s = tuple(sorted(vertices))
    if len(set(s)) != len(s):
        raise ValueError(f"repeated vertex in {s}")
    return s


def faces(s: Simplex, d: int) -> list[Simplex]:
    """All d-dimensional faces of s, lexicographic."""
    if not 0 <= d <= len(s) - 1:
        raise ValueError(f"no {d}-faces in a {len(s) - 1}-simplex")
    return list(combinations(s, d + 1))


def label(s: Simplex) -> str:
    return "".join(map(str, s)) if all(0 <= v <= 9 for v in s) else "-".join(map(str, s))


def omitted_vertex(face: Simplex, s: Simplex) -> int:
    """The vertex of s missing from the codimension-one face."""
    if len(face) != len(s) - 1 or not set(face) < set(s):
        raise ValueError(f"{face} is not a facet of {s}")
    (v,) = set(s) - set(face)
    return v


def orientation_sign(t: Simplex, u: Simplex) -> int:
    """(-1)^(position in u of the vertex omitted by t); the coboundary sign."""
    return -1 if u.index(omitted_vertex(t, u)) % 2 else 1


def pentachora(ambient: Simplex = DELTA5) -> list[Simplex]:
    return faces(ambient, 4)


def pentachoron_omitting(v: int, ambient: Simplex = DELTA5) -> Simplex:
    return tuple(x for x in ambient if x != v)


@dataclass(frozen=True)
class Cluster:
    """A set of pentachora glued along shared tetrahedra."""

    pentachora: tuple[Simplex, ...]

    @cached_property
    def _tet_count(self) -> Counter:
        c = Counter(t for u in self.pentachora for t in faces(u, 3))
        bad = [t for t, n in c.items() if n > 2]
        if bad:
            raise ClusterError(f"tetrahedra in more than two pentachora: {bad}")
        return c

    @cached_property
    def tetrahedra(self) -> list[Simplex]:
        return sorted(self._tet_count)

    @cached_property
    def inner_tetrahedra(self) -> list[Simplex]:
        return [t for t in self.tetrahedra if self._tet_count[t] == 2]

    @cached_property
    def boundary_tetrahedra(self) -> list[Simplex]:
        return [t for t in self.tetrahedra if self._tet_count[t] == 1]

    @cached_property
    def edges(self) -> list[Simplex]:
        return sorted({e for u in self.pentachora for e in faces(u, 1)})

    @cached_property
    def triangles(self) -> list[Simplex]:
        return sorted({f for u in self.pentachora for f in faces(u, 2)})

    @cached_property
    def vertices(self) -> list[int]:
        return sorted({v for u in self.pentachora for v in u})

    @cached_property
    def boundary_edges(self) -> list[Simplex]:
        return sorted({e for t in self.boundary_tetrahedra for e in faces(t, 1)})

    @cached_property
    def boundary_vertices(self) -> list[int]:
        return sorted({v for t in self.boundary_tetrahedra for v in t})

    def tet_index(self) -> dict[Simplex, int]:
        return {t: i for i, t in enumerate(self.tetrahedra)}

    def counts(self) -> dict[str, int]:
        return {
            "pentachora": len(self.pentachora),
            "tetrahedra": len(self.tetrahedra),
            "inner_tetrahedra": len(self.inner_tetrahedra),
            "boundary_tetrahedra": len(self.boundary_tetrahedra),
            "edges": len(self.edges),
            "boundary_edges": len(self.boundary_edges),
            "vertices": len(self.vertices),
        }


def cluster_build(chosen: Iterable[Simplex], ambient: Simplex = DELTA5) -> Cluster:
    """Cluster of k pentachora of the boundary of ``ambient``, 1 <= k <= 5."""
    chosen = sorted({simplex(u) for u in chosen})
    allowed = set(pentachora(ambient))
    for u in chosen:
        if u not in allowed:
            raise ClusterError(f"{u} is not a 4-face of {ambient}")
    if not 1 <= len(chosen) <= len(allowed) - 1:
        raise ClusterError("a Pachner cluster needs between 1 and 5 pentachora")
    return Cluster(tuple(chosen))


def complex_from_pentachora(pents: Iterable[Iterable[int]]) -> Cluster:
    """Arbitrary finite list of pentachora (no boundary-of-simplex restriction)."""
    ps = sorted({simplex(u) for u in pents})
    for u in ps:
        if len(u) != 5:
            raise ClusterError(f"{u} is not a pentachoron")
    if not ps:
        raise ClusterError("empty complex")
    return Cluster(tuple(ps))


def complement(c: Cluster, ambient: Simplex = DELTA5) -> Cluster:
    return Cluster(tuple(u for u in pentachora(ambient) if u not in c.pentachora))


def parse_omit(text: str, ambient: Simplex = DELTA5) -> Cluster:
    """``omit=6,5`` -> pentachora 12345 and 12346."""
    text = text.strip()
    if not text.startswith("omit="):
        raise ClusterError(f"bad cluster spec {text!r}; expected omit=<v>,<v>,...")
    try:
        vs = [int(x) for x in text[5:].split(",") if x.strip()]
    except ValueError as exc:
        raise ClusterError(f"bad cluster spec {text!r}") from exc
    for v in vs:
        if v not in ambient:
            raise ClusterError(f"vertex {v} not in {ambient}")
    return cluster_build([pentachoron_omitting(v, ambient) for v in vs], ambient)


def splittings(ambient: Simplex = DELTA5) -> list[tuple[Cluster, Cluster]]:
    """The 31 unordered splittings {C, C-bar} with |C| <= 3.

    For |C| = 3 the side containing the first pentachoron is taken as C.
    """
    ps = pentachora(ambient)
    out = []
    for k in (1, 2, 3):
        for chosen in combinations(ps, k):
            if k == 3 and ps[0] not in chosen:
                continue
            c = cluster_build(chosen, ambient)
            out.append((c, complement(c, ambient)))
    return out


def all_clusters(ambient: Simplex = DELTA5) -> list[Cluster]:
    ps = pentachora(ambient)
    return [cluster_build(ch, ambient) for k in range(1, 6) for ch in combinations(ps, k)]


# ---------------------------------------------------------------------------
# 1- and 2-cochains


def delta1(b: Mapping[Simplex, object]) -> Cochain2:
    """omega_ijk = b_ij - b_ik + b_jk on every triangle spanned by b's vertices."""
    verts = sorted({v for e in b for v in e})
    return {(i, j, k): b[(i, j)] - b[(i, k)] + b[(j, k)] for i, j, k in combinations(verts, 3)}


def cocycle_check(omega: Mapping[Simplex, object]) -> bool:
    """Alternating sum omega_ijk - omega_ijl + omega_ikl - omega_jkl vanishes on every tetrahedron."""
    verts = sorted({v for f in omega for v in f})
    for i, j, k, l in combinations(verts, 4):
        s = omega[(i, j, k)] - omega[(i, j, l)] + omega[(i, k, l)] - omega[(j, k, l)]
        if s != 0:
            return False
    return True


def random_cochain1(field, rng, vertices: Iterable[int] = DELTA5) -> Cochain1:
    edges = list(combinations(sorted(vertices), 2))
    vals = field.random_nonzero(rng, len(edges))
    return dict(zip(edges, vals))
