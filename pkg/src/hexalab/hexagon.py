"""Edge functionals, edge vectors, permitted-coloring spaces and the full hexagon.

Colorings of a set of tetrahedra are vectors in F^(2T): tetrahedra in
lexicographic order, the pair (x_t, y_t) adjacent.  Edges of a tetrahedron
``t = (a, b, c, d)`` are always listed as ``ab, ac, ad, bc, bd, cd``.

Two families of edge functionals are provided:

* ``GenericFamily`` -- built from arbitrary generic coefficients gamma_ij,
* ``InfinitesimalFamily`` -- the o -> 0 limit of gamma_ij = -/+1 + o b_ij,
  depending on b only through omega = delta b.

``FiniteOFamily`` gives the first-order deformation of the infinitesimal
family (functionals over F[o]/(o^2)) used for the limit 4-cocycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Mapping

import numpy as np

from .exactfield import Degenerate, Dual, Field, Jet, Lift4, Scalar, Unattainable, require_nonzero
from .exactla import Subspace, is_zero, kernel_basis, rank, solve
from .simplicial import (
    DELTA5,
    Cluster,
    Simplex,
    delta1,
    faces,
    label,
    orientation_sign,
    pentachora,
    splittings,
)

# inner degrees of freedom of a k-pentachoron cluster, k = 1..5
EXPECTED_FIBER = {1: 0, 2: 0, 3: 0, 4: 1, 5: 4}
EXPECTED_DELTA5_DIM = 9


class InnerResidue(AssertionError):
    """A summed boundary functional kept a component on an inner tetrahedron."""


def tet_edges(t: Simplex) -> list[Simplex]:
    return list(combinations(t, 2))


def eps(i: int, j: int) -> int:
    """Value of gamma_ij at o = 0 in the infinitesimal family."""
    return -1 if i < j else 1


@dataclass(frozen=True)
class EdgeFunctional:
    edge: Simplex
    components: Mapping[Simplex, tuple]  # tetrahedron -> (phi1, phi2)

    def row(self, field: Field, tets: list[Simplex]) -> np.ndarray:
        out = field.zeros(2 * len(tets))
        for i, t in enumerate(tets):
            if t in self.components:
                p1, p2 = self.components[t]
                out[2 * i] = p1.value
                out[2 * i + 1] = p2.value
        return out


@dataclass(frozen=True)
class EdgeVector:
    edge: Simplex
    components: Mapping[Simplex, tuple]  # tetrahedron -> (psi1, psi2)

    def column(self, field: Field, tets: list[Simplex]) -> np.ndarray:
        return EdgeFunctional(self.edge, self.components).row(field, tets)


# ---------------------------------------------------------------------------
# per-tetrahedron columns


def phi_column_generic(g, t: Simplex) -> list[tuple]:
    """The six rows (phi_ab, ..., phi_cd) on t = abcd from coefficients g(i, j).

    Works over any commutative ring; ``g`` maps an ordered vertex pair to a
    ring element.
    """
    a, b, c, d = t
    G = {(i, j): g(t[i - 1], t[j - 1]) for i in range(1, 5) for j in range(1, 5) if i != j}
    A = G[2, 4] * G[3, 2] * G[4, 3] + G[2, 3] * G[3, 4] * G[4, 2]
    B = G[1, 4] * G[3, 1] * G[4, 3] + G[1, 3] * G[3, 4] * G[4, 1]
    C = G[1, 3] * G[2, 1] * G[3, 2] + G[1, 2] * G[2, 3] * G[3, 1]
    zero = A * 0
    return [
        (zero, -G[1, 3] * A),
        (G[1, 4] * A, G[1, 2] * A),
        (-G[1, 3] * A, zero),
        (-G[2, 4] * B, G[1, 3] * G[2, 1] * G[3, 4] * G[4, 2] - G[1, 2] * G[2, 4] * G[3, 1] * G[4, 3]),
        (G[2, 3] * B, C * G[4, 3]),
        (G[1, 3] * G[2, 4] * G[3, 2] * G[4, 1] - G[1, 4] * G[2, 3] * G[3, 1] * G[4, 2], -C * G[4, 2]),
    ]


def phi_column_infinitesimal(w, t: Simplex) -> list[tuple]:
    """The six rows on t = ijkl built from omega; ``w`` maps a triangle to omega."""
    i, j, k, l = t
    wijk, wijl, wikl, wjkl = w[(i, j, k)], w[(i, j, l)], w[(i, k, l)], w[(j, k, l)]
    zero = wijk * 0
    return [
        (wjkl - wikl, zero),
        (wijl, wjkl),
        (-wijk, -wjkl),
        (-wijl, -wikl),
        (wijk, wikl),
        (zero, wijk - wijl),
    ]


def psi_column_infinitesimal(w, t: Simplex) -> list[tuple]:
    """The six edge-vector components (psi_ab, ..., psi_cd) on t = ijkl."""
    i, j, k, l = t
    wijk, wijl, wikl, wjkl = w[(i, j, k)], w[(i, j, l)], w[(i, k, l)], w[(j, k, l)]
    require_nonzero(wijk, wijl, wikl, wjkl, wikl - wjkl, what="edge-vector denominator")
    zero = wijk * 0
    dd = wikl - wjkl
    return [
        ((wijk * wijl).inverse(), zero),
        (-(wijk * dd).inverse(), (wikl * dd).inverse()),
        ((wijl * dd).inverse(), -(wikl * dd).inverse()),
        ((wijk * dd).inverse(), -(dd * wjkl).inverse()),
        (-(wijl * dd).inverse(), (dd * wjkl).inverse()),
        (zero, -(wikl * wjkl).inverse()),
    ]


# ---------------------------------------------------------------------------
# families


class GenericFamily:
    kind = "generic"

    def __init__(self, gamma: Mapping[tuple[int, int], Scalar]):
        self.gamma = dict(gamma)
        self.field = next(iter(self.gamma.values())).field
        self._cache: dict[Simplex, list[tuple]] = {}

    @classmethod
    def random(cls, field: Field, rng, vertices=DELTA5) -> GenericFamily:
        pairs = [(i, j) for i in vertices for j in vertices if i != j]
        return cls(dict(zip(pairs, field.random_nonzero(rng, len(pairs)))))

    def relation_coeff(self, i: int, j: int) -> Scalar:
        return self.gamma[(i, j)]

    def required_nonzero(self, t: Simplex) -> list[Scalar]:
        G = {(i, j): self.gamma[(t[i - 1], t[j - 1])] for i in range(1, 5) for j in range(1, 5) if i != j}
        return list(G.values()) + [
            G[2, 4] * G[3, 2] * G[4, 3] + G[2, 3] * G[3, 4] * G[4, 2],
            G[1, 4] * G[3, 1] * G[4, 3] + G[1, 3] * G[3, 4] * G[4, 1],
            G[1, 3] * G[2, 1] * G[3, 2] + G[1, 2] * G[2, 3] * G[3, 1],
            G[1, 3] * G[2, 1] * G[3, 4] * G[4, 2] - G[1, 2] * G[2, 4] * G[3, 1] * G[4, 3],
            G[1, 3] * G[2, 4] * G[3, 2] * G[4, 1] - G[1, 4] * G[2, 3] * G[3, 1] * G[4, 2],
        ]

    def column(self, t: Simplex, check: bool = True) -> list[tuple]:
        if t not in self._cache:
            if check:
                require_nonzero(*self.required_nonzero(t), what=f"phi-column entry on {label(t)}")
            self._cache[t] = phi_column_generic(lambda i, j: self.gamma[(i, j)], t)
        return self._cache[t]

    def relabel(self, perm: Mapping[int, int]) -> GenericFamily:
        return GenericFamily({(perm[i], perm[j]): v for (i, j), v in self.gamma.items()})

    def describe(self) -> dict:
        return {"family": self.kind}


class InfinitesimalFamily:
    kind = "infinitesimal"

    def __init__(self, omega: Mapping[Simplex, Scalar], b: Mapping[Simplex, Scalar] | None = None):
        self.omega = dict(omega)
        self.b = dict(b) if b is not None else None
        self.field = next(iter(self.omega.values())).field
        self._cache: dict[Simplex, list[tuple]] = {}

    @classmethod
    def from_b(cls, b: Mapping[Simplex, Scalar]) -> InfinitesimalFamily:
        return cls(delta1(b), b)

    @classmethod
    def random(cls, field: Field, rng, vertices=DELTA5) -> InfinitesimalFamily:
        edges = list(combinations(sorted(vertices), 2))
        return cls.from_b(dict(zip(edges, field.random_nonzero(rng, len(edges)))))

    def relation_coeff(self, i: int, j: int) -> Scalar:
        return self.field(eps(i, j))

    def column(self, t: Simplex, check: bool = True) -> list[tuple]:
        # the table has no denominators; genericity is certified by rank instead
        if t not in self._cache:
            self._cache[t] = phi_column_infinitesimal(self.omega, t)
        return self._cache[t]

    def relabel(self, perm: Mapping[int, int]) -> InfinitesimalFamily:
        if self.b is None:
            raise ValueError("relabeling needs the 1-cochain b")
        nb = {}
        for (i, j), v in self.b.items():
            pi, pj = perm[i], perm[j]
            # b is antisymmetric under orientation reversal
            nb[(min(pi, pj), max(pi, pj))] = v if pi < pj else -v
        return InfinitesimalFamily.from_b(nb)

    def describe(self) -> dict:
        return {"family": self.kind}


# ---------------------------------------------------------------------------
# functionals, vectors and spaces


def _functionals(family, u: Simplex, orientation: int = 1, check: bool = True) -> list[EdgeFunctional]:
    comps: dict[Simplex, dict] = {e: {} for e in faces(u, 1)}
    for t in faces(u, 3):
        s = orientation_sign(t, u) * orientation
        for e, (p1, p2) in zip(tet_edges(t), family.column(t, check=check)):
            comps[e][t] = (p1 * s, p2 * s)
    return [EdgeFunctional(e, comps[e]) for e in faces(u, 1)]


def functionals_generic(gamma, u: Simplex, orientation: int = 1, check: bool = True) -> list[EdgeFunctional]:
    """Ten edge functionals of pentachoron u from generic gamma."""
    fam = gamma if isinstance(gamma, GenericFamily) else GenericFamily(gamma)
    return _functionals(fam, u, orientation, check)


def functionals_infinitesimal(omega, u: Simplex, orientation: int = 1, check: bool = True) -> list[EdgeFunctional]:
    """Ten edge functionals of pentachoron u in the infinitesimal case."""
    fam = omega if isinstance(omega, InfinitesimalFamily) else InfinitesimalFamily(omega)
    return _functionals(fam, u, orientation, check)


def functionals_for(family, u: Simplex, orientation: int = 1, check: bool = True) -> list[EdgeFunctional]:
    return _functionals(family, u, orientation, check)


def certify_pentachora(family, ambient: Simplex = DELTA5) -> dict[Simplex, Subspace]:
    """V_u for every pentachoron of ``ambient``; Degenerate unless each is 5-dimensional."""
    out = {}
    for u in pentachora(ambient):
        v = permitted_space(u, _functionals(family, u))
        if v.dim != 5:
            raise Degenerate(f"permitted space of {label(u)} has dim {v.dim}")
        out[u] = v
    return out


def functional_matrix(field: Field, functionals, tets: list[Simplex]) -> np.ndarray:
    rows = [f.row(field, tets) for f in functionals]
    if not rows:
        return field.zeros((0, 2 * len(tets)))
    return np.vstack(rows)


def permitted_space(u: Simplex, functionals) -> Subspace:
    """V_u: common kernel of the edge functionals of u."""
    field = _field_of(functionals)
    return kernel_basis(field, functional_matrix(field, functionals, faces(u, 3)))


def _field_of(functionals) -> Field:
    for f in functionals:
        for p1, _ in f.components.values():
            return p1.field
    raise ValueError("no components")


def vertex_relation_residues(functionals, coeff) -> dict[int, np.ndarray]:
    """sum_j coeff(i, j) phi_ij for each vertex i, as raw rows."""
    field = _field_of(functionals)
    tets = sorted({t for f in functionals for t in f.components})
    out = {}
    verts = sorted({v for f in functionals for v in f.edge})
    for i in verts:
        acc = field.zeros(2 * len(tets))
        for f in functionals:
            if i in f.edge:
                j = f.edge[1] if f.edge[0] == i else f.edge[0]
                acc = field.add(acc, field.mul(coeff(i, j).value, f.row(field, tets)))
        out[i] = acc
    return out


def edge_vectors_infinitesimal(omega, u: Simplex) -> list[EdgeVector]:
    """The explicit edge vectors psi_ij of u (no orientation signs)."""
    w = omega.omega if isinstance(omega, InfinitesimalFamily) else omega
    comps: dict[Simplex, dict] = {e: {} for e in faces(u, 1)}
    for t in faces(u, 3):
        for e, col in zip(tet_edges(t), psi_column_infinitesimal(w, t)):
            comps[e][t] = col
    return [EdgeVector(e, comps[e]) for e in faces(u, 1)]


def edge_vector_matrix(field: Field, vectors, tets: list[Simplex]) -> np.ndarray:
    """Columns are edge vectors."""
    return np.vstack([v.column(field, tets) for v in vectors]).T


def psi_phi_identity_holds(omega, t: Simplex) -> bool:
    """Psi_t = (omega_jkl - omega_ikl)^-1 diag(1/(w_ijk w_ijl), -1/(w_ikl w_jkl)) Phi_t^T."""
    w = omega.omega if isinstance(omega, InfinitesimalFamily) else omega
    i, j, k, l = t
    pref = (w[(j, k, l)] - w[(i, k, l)]).inverse()
    d1 = (w[(i, j, k)] * w[(i, j, l)]).inverse()
    d2 = -(w[(i, k, l)] * w[(j, k, l)]).inverse()
    phi = phi_column_infinitesimal(w, t)
    psi = psi_column_infinitesimal(w, t)
    return all(
        ps1 == pref * d1 * ph1 and ps2 == pref * d2 * ph2 for (ps1, ps2), (ph1, ph2) in zip(psi, phi)
    )


# ---------------------------------------------------------------------------
# clusters


def pentachoron_orientation(u: Simplex, ambient: Simplex = DELTA5) -> int:
    """Orientation of u as a face of the oriented boundary of ``ambient``."""
    if set(u) <= set(ambient) and len(ambient) == len(u) + 1:
        return orientation_sign(u, ambient)
    return 1


def cluster_functionals(cluster: Cluster, family, ambient: Simplex = DELTA5) -> dict[Simplex, list[EdgeFunctional]]:
    """Per-pentachoron functionals, each pentachoron oriented as a face of ``ambient``."""
    return {u: _functionals(family, u, pentachoron_orientation(u, ambient)) for u in cluster.pentachora}


@dataclass
class ClusterSpace:
    cluster: Cluster
    space: Subspace
    boundary_restriction: Subspace

    @property
    def fiber_dim(self) -> int:
        return self.space.dim - self.boundary_restriction.dim


def boundary_columns(cluster: Cluster) -> list[int]:
    idx = cluster.tet_index()
    return [2 * idx[t] + c for t in cluster.boundary_tetrahedra for c in (0, 1)]


def cluster_space(cluster: Cluster, family, per_pentachoron=None) -> ClusterSpace:
    """Permitted colorings of the cluster and their restriction to its boundary."""
    field = family.field
    tets = cluster.tetrahedra
    if per_pentachoron is None:
        per_pentachoron = cluster_functionals(cluster, family)
    mat = functional_matrix(field, [f for fs in per_pentachoron.values() for f in fs], tets)
    space = kernel_basis(field, mat)
    return ClusterSpace(cluster, space, space.restrict(boundary_columns(cluster)))


def boundary_functionals(cluster: Cluster, family, per_pentachoron=None) -> list[EdgeFunctional]:
    """phi^boundary_ij = sum over pentachora containing ij; inner components must cancel.

    Returned functionals carry components on boundary tetrahedra only, one per
    edge of the cluster (inner edges come out identically zero).
    """
    if per_pentachoron is None:
        per_pentachoron = cluster_functionals(cluster, family)
    inner = set(cluster.inner_tetrahedra)
    sums: dict[Simplex, dict[Simplex, tuple]] = {e: {} for e in cluster.edges}
    for fs in per_pentachoron.values():
        for f in fs:
            acc = sums[f.edge]
            for t, (p1, p2) in f.components.items():
                if t in acc:
                    q1, q2 = acc[t]
                    acc[t] = (q1 + p1, q2 + p2)
                else:
                    acc[t] = (p1, p2)
    out = []
    for e, comps in sums.items():
        for t in inner & comps.keys():
            p1, p2 = comps[t]
            if p1 != 0 or p2 != 0:
                raise InnerResidue(f"edge {label(e)} keeps a component on inner tetrahedron {label(t)}")
        out.append(EdgeFunctional(e, {t: v for t, v in comps.items() if t not in inner}))
    return out


def boundary_relations_hold(cluster: Cluster, family, bfs: list[EdgeFunctional]) -> bool:
    """sum over boundary edges ij at each boundary vertex i of gamma_ij phi^boundary_ij = 0."""
    field = family.field
    tets = cluster.boundary_tetrahedra
    bedges = set(cluster.boundary_edges)
    by_edge = {f.edge: f for f in bfs}
    for i in cluster.boundary_vertices:
        acc = field.zeros(2 * len(tets))
        for e in bedges:
            if i in e:
                j = e[1] if e[0] == i else e[0]
                acc = field.add(acc, field.mul(family.relation_coeff(i, j).value, by_edge[e].row(field, tets)))
        if not is_zero(acc):
            return False
    return True


def inner_edge_functionals_vanish(cluster: Cluster, bfs: list[EdgeFunctional]) -> bool:
    bedges = set(cluster.boundary_edges)
    return all(
        all(p1 == 0 and p2 == 0 for p1, p2 in f.components.values()) for f in bfs if f.edge not in bedges
    )


# ---------------------------------------------------------------------------
# full hexagon


@dataclass
class SplittingRecord:
    k: int
    cluster: list[str]
    complement: list[str]
    boundary_dim: int
    boundary_dim_complement: int
    restrictions_equal: bool
    fiber: int
    fiber_complement: int

    @property
    def passed(self) -> bool:
        return (
            self.restrictions_equal
            and self.fiber == EXPECTED_FIBER[self.k]
            and self.fiber_complement == EXPECTED_FIBER[6 - self.k]
        )

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "cluster": self.cluster,
            "complement": self.complement,
            "boundary_dim": self.boundary_dim,
            "boundary_dim_complement": self.boundary_dim_complement,
            "restrictions_equal": self.restrictions_equal,
            "fiber": self.fiber,
            "fiber_complement": self.fiber_complement,
            "passed": self.passed,
        }


@dataclass
class HexagonReport:
    records: list[SplittingRecord] = dc_field(default_factory=list)
    delta5_dim: int = -1
    delta5_fingerprint: str = ""

    @property
    def passed(self) -> bool:
        return (
            len(self.records) == 31
            and all(r.passed for r in self.records)
            and self.delta5_dim == EXPECTED_DELTA5_DIM
        )

    def fiber_table(self) -> dict[int, int]:
        out = {}
        for r in self.records:
            out[r.k] = r.fiber
            out[6 - r.k] = r.fiber_complement
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "splittings": [r.to_dict() for r in self.records],
            "fiber_table": {str(k): v for k, v in self.fiber_table().items()},
            "delta5_dim": self.delta5_dim,
            "delta5_fingerprint": self.delta5_fingerprint,
            "passed": self.passed,
        }


def whole_boundary(ambient: Simplex = DELTA5) -> Cluster:
    return Cluster(tuple(pentachora(ambient)))


def delta5_space(family, ambient: Simplex = DELTA5) -> Subspace:
    """Permitted colorings of the boundary of the 5-simplex, F^30 ambient."""
    return cluster_space(whole_boundary(ambient), family).space


def full_hexagon_check(family, ambient: Simplex = DELTA5) -> HexagonReport:
    """Boundary-restriction equality and fiber counts on all 31 splittings, plus dim V(d Delta^5)."""
    per_u = {u: _functionals(family, u, pentachoron_orientation(u, ambient)) for u in pentachora(ambient)}
    report = HexagonReport()
    for c, cbar in splittings(ambient):
        sc = cluster_space(c, family, {u: per_u[u] for u in c.pentachora})
        sb = cluster_space(cbar, family, {u: per_u[u] for u in cbar.pentachora})
        report.records.append(
            SplittingRecord(
                k=len(c.pentachora),
                cluster=[label(u) for u in c.pentachora],
                complement=[label(u) for u in cbar.pentachora],
                boundary_dim=sc.boundary_restriction.dim,
                boundary_dim_complement=sb.boundary_restriction.dim,
                restrictions_equal=sc.boundary_restriction == sb.boundary_restriction,
                fiber=sc.fiber_dim,
                fiber_complement=sb.fiber_dim,
            )
        )
    total = cluster_space(whole_boundary(ambient), family, per_u).space
    report.delta5_dim = total.dim
    report.delta5_fingerprint = total.fingerprint()
    return report


# ---------------------------------------------------------------------------
# first-order deformation of the infinitesimal family


def general_position_b(field: Field, rng, vertices=DELTA5, batch: int = 4096, max_draws: int = 1 << 18):
    """Nonzero 1-cochain b with omega = delta b nonzero on every triangle and
    omega_jkl != omega_ikl on every tetrahedron ijkl.

    These are the conditions the first-order deformation needs: the o^1 column
    drops rank where omega_jkl = 0, and the table drops rank where the two
    omegas agree.  Drawn by rejection in batches; Unattainable if the budget runs out.
    """
    if field.size is not None and field.size <= 3:
        # exhaustive: over F_2 and F_3 no b works even on one pentachoron
        raise Unattainable(f"no general-position 1-cochain exists over {field!r}")
    verts = sorted(vertices)
    edges = list(combinations(verts, 2))
    idx = {e: i for i, e in enumerate(edges)}
    drawn = 0
    while drawn < max_draws:
        raw = field.array(field.random_nonzero(rng, len(edges) * batch), (len(edges), batch))
        drawn += batch
        w = {
            (i, j, k): field.add(field.sub(raw[idx[(i, j)]], raw[idx[(i, k)]]), raw[idx[(j, k)]])
            for i, j, k in combinations(verts, 3)
        }
        ok = np.ones(batch, dtype=bool)
        for v in w.values():
            ok &= v != 0
        for i, j, k, l in combinations(verts, 4):
            ok &= field.sub(w[(j, k, l)], w[(i, k, l)]) != 0
        hits = np.flatnonzero(ok)
        if hits.size:
            col = raw[:, int(hits[0])]
            return {e: Scalar(field, field._box(col[i])) for i, e in enumerate(edges)}
    raise Unattainable(f"no general-position 1-cochain in {max_draws} draws over {field!r}")


def _gamma_denominators(field: Field, G, t: Simplex, batch: int) -> np.ndarray:
    """Mask of draws where the five phi-column polynomials on t are all nonzero."""
    add, sub, mul = field.add, field.sub, field.mul
    g = {(a, b): G[(t[a - 1], t[b - 1])] for a in range(1, 5) for b in range(1, 5) if a != b}
    m3 = lambda x, y, z: mul(mul(g[x], g[y]), g[z])
    m4 = lambda w, x, y, z: mul(mul(g[w], g[x]), mul(g[y], g[z]))
    ok = np.ones(batch, dtype=bool)
    for v in (
        add(m3((2, 4), (3, 2), (4, 3)), m3((2, 3), (3, 4), (4, 2))),
        add(m3((1, 4), (3, 1), (4, 3)), m3((1, 3), (3, 4), (4, 1))),
        add(m3((1, 3), (2, 1), (3, 2)), m3((1, 2), (2, 3), (3, 1))),
        sub(m4((1, 3), (2, 1), (3, 4), (4, 2)), m4((1, 2), (2, 4), (3, 1), (4, 3))),
        sub(m4((1, 3), (2, 4), (3, 2), (4, 1)), m4((1, 4), (2, 3), (3, 1), (4, 2))),
    ):
        ok &= v != 0
    return ok


def general_position_gamma(field: Field, rng, vertices=DELTA5, batches=(8, 64, 512, 4096), budget: int = 256):
    """Nonzero gamma with every phi-column polynomial nonzero on every tetrahedron.

    Sampled vertex by vertex: the gammas between vertex v and the earlier
    vertices are drawn by rejection against the tetrahedra containing v, with
    earlier values held fixed, in growing batches.  A stage that finds nothing
    backtracks one vertex.  Over small fields a plain draw almost never clears
    all tetrahedra at once.  Unattainable after ``budget`` failed stages.
    """
    if field.size is not None and field.size <= 3:
        # exhaustive: no gamma over F_2 or F_3 clears even one tetrahedron
        raise Unattainable(f"no general-position gamma exists over {field!r}")
    verts = sorted(vertices)
    stages = []
    for n, v in enumerate(verts):
        prev = verts[:n]
        new = [(v, i) for i in prev] + [(i, v) for i in prev]
        tets = [tuple(sorted(rest + (v,))) for rest in combinations(prev, 3)]
        if new:
            stages.append((new, tets))
    chosen: list[dict] = []
    failures = 0
    while len(chosen) < len(stages):
        new, tets = stages[len(chosen)]
        fixed = {e: x for part in chosen for e, x in part.items()}
        for batch in batches:
            raw = field.array(field.random_nonzero(rng, len(new) * batch), (len(new), batch))
            G = {e: np.broadcast_to(x, (batch,)) for e, x in fixed.items()}
            G.update({e: raw[k] for k, e in enumerate(new)})
            ok = np.ones(batch, dtype=bool)
            for t in tets:
                ok &= _gamma_denominators(field, G, t, batch)
            hits = np.flatnonzero(ok)
            if hits.size:
                chosen.append({e: raw[k, int(hits[0])] for k, e in enumerate(new)})
                break
        else:
            failures += 1
            if failures >= budget:
                raise Unattainable(f"no general-position gamma after {budget} failed stages over {field!r}")
            if chosen:
                chosen.pop()
    return {e: Scalar(field, field._box(x)) for part in chosen for e, x in part.items()}


class FiniteOFamily:
    """Edge functionals for gamma_ij = -/+1 + o b_ij to first order in o.

    The generic phi-column evaluated at these gammas vanishes at o = 0, so the
    column is divided by o (and, in characteristic 2, by the integer factor 2
    it carries over Z, computed through a mod-4 lift).  Each tetrahedron's
    column is then moved, by one constant 2x2 change of color basis, so that
    its o^0 part equals the infinitesimal table.  ``column_dual`` returns the
    result over F[o]/(o^2).
    """

    def __init__(self, b: Mapping[Simplex, Scalar]):
        self.b = dict(b)
        self.field: Field = next(iter(self.b.values())).field
        self.infinitesimal = InfinitesimalFamily.from_b(self.b)
        self.omega = self.infinitesimal.omega
        self._cache: dict[Simplex, list[tuple[Dual, Dual]]] = {}
        self.basis_changes: dict[Simplex, np.ndarray] = {}

    def _raw_orders(self, t: Simplex) -> tuple[list[tuple], list[tuple]]:
        """o^1 and o^2 coefficients of the (rescaled) generic column on t."""
        f = self.field
        if f.characteristic == 2:

            def g(i, j):
                bij = self.b[(min(i, j), max(i, j))]
                return Jet((Lift4.integer(f, eps(i, j)), Lift4.of(bij), Lift4.integer(f, 0)))

            col = phi_column_generic(g, t)
            for row in col:
                for e in row:
                    if e.coeffs[0] != 0:
                        raise Degenerate("generic column does not vanish at o = 0")
            first = [tuple(e.coeffs[1].halve() for e in row) for row in col]
            second = [tuple(e.coeffs[2].halve() for e in row) for row in col]
            return first, second

        def g(i, j):
            return Jet((f(eps(i, j)), self.b[(min(i, j), max(i, j))], f.zero))

        col = phi_column_generic(g, t)
        for row in col:
            for e in row:
                if e.coeffs[0] != 0:
                    raise Degenerate("generic column does not vanish at o = 0")
        return [tuple(e.coeffs[1] for e in row) for row in col], [tuple(e.coeffs[2] for e in row) for row in col]

    def column_dual(self, t: Simplex) -> list[tuple[Dual, Dual]]:
        if t in self._cache:
            return self._cache[t]
        f = self.field
        first, second = self._raw_orders(t)
        table = self.infinitesimal.column(t)
        p1 = f.array([x for row in first for x in row], (6, 2))
        p2 = f.array([x for row in second for x in row], (6, 2))
        tab = f.array([x for row in table for x in row], (6, 2))
        if rank(f, p1) != 2:
            raise Degenerate(f"first-order column on {label(t)} has rank < 2")
        try:
            gmat = solve(f, p1, tab)
        except ValueError as exc:
            raise Degenerate(f"first-order column on {label(t)} does not match the table") from exc
        if not np.all(f.matmul(p1, gmat) == tab):
            raise Degenerate("basis change does not reproduce the table")
        if rank(f, gmat) != 2:
            raise Degenerate(f"singular basis change on {label(t)}")
        self.basis_changes[t] = gmat
        const = f.matmul(p1, gmat)
        lin = f.matmul(p2, gmat)
        out = []
        for r in range(6):
            out.append(
                tuple(Dual(Scalar(f, f._box(const[r, c])), Scalar(f, f._box(lin[r, c]))) for c in range(2))
            )
        self._cache[t] = out
        return out

    def dual_matrix(self, u: Simplex) -> list[list[Dual]]:
        """10x10 functional matrix of u over F[o]/(o^2); o^0 part is the infinitesimal one."""
        f = self.field
        tets = faces(u, 3)
        zero = Dual(f.zero, f.zero)
        rows = {e: [zero] * 10 for e in faces(u, 1)}
        for ti, t in enumerate(tets):
            s = orientation_sign(t, u)
            for e, (d1, d2) in zip(tet_edges(t), self.column_dual(t)):
                rows[e][2 * ti] = d1 * s
                rows[e][2 * ti + 1] = d2 * s
        return [rows[e] for e in faces(u, 1)]


def dual_constant_part(field: Field, rows) -> np.ndarray:
    return field.array([x.a for row in rows for x in row], (len(rows), len(rows[0])))


def dual_linear_part(field: Field, rows) -> np.ndarray:
    return field.array([x.b for row in rows for x in row], (len(rows), len(rows[0])))
