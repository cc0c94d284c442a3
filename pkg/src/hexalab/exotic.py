"""Exotic chain complexes built from edge vectors.

Single pentachoron u:

    0 -> F^vertices -eta-> F^edges -psi-> F^(2 x tets) -phi-> F^edges -gamma-> F^vertices -> 0

General pentachoron list K:

    0 -> F^vertices -eta-> F^edges -psi-> F^(2 x tets) -Phi-> F^(5 x pentachora) -> 0

A differential d_i : C_i -> C_{i+1} is stored as a (dim C_{i+1}) x (dim C_i) matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .exactfield import Degenerate, Field, Scalar
from .exactla import Subspace, is_zero, kernel_basis, left_kernel, rank
from .hexagon import functional_matrix, functionals_for, permitted_space
from .simplicial import Cluster, Simplex, complex_from_pentachora, faces, label


class CompositionNonzero(AssertionError):
    pass


class ComplexFileError(ValueError):
    pass


@dataclass
class ChainComplex:
    dims: list[int]
    differentials: list[np.ndarray]
    field: Field
    names: list[str] | None = None

    def __post_init__(self):
        if len(self.differentials) != len(self.dims) - 1:
            raise ValueError("need one differential between consecutive spaces")
        for i, d in enumerate(self.differentials):
            if d.shape != (self.dims[i + 1], self.dims[i]):
                raise ValueError(f"d_{i} has shape {d.shape}, expected {(self.dims[i + 1], self.dims[i])}")
        for i in range(len(self.differentials) - 1):
            prod = self.field.matmul(self.differentials[i + 1], self.differentials[i])
            if not is_zero(prod):
                raise CompositionNonzero(f"d_{i + 1} d_{i} != 0")

    def ranks(self) -> list[int]:
        return [rank(self.field, d) for d in self.differentials]


@dataclass
class HomologyProfile:
    dims: list[int]
    kernel: list[int]
    image_in: list[int]
    homology: list[int]

    @property
    def acyclic(self) -> bool:
        return not any(self.homology)

    def euler_holds(self) -> bool:
        alt = lambda xs: sum((-1) ** i * x for i, x in enumerate(xs))
        return alt(self.dims) == alt(self.homology)

    def to_dict(self) -> dict:
        return {
            "dims": self.dims,
            "kernel": self.kernel,
            "image_in": self.image_in,
            "homology": self.homology,
            "euler_characteristic": sum((-1) ** i * x for i, x in enumerate(self.dims)),
        }


def homology_profile(c: ChainComplex) -> HomologyProfile:
    r = c.ranks()
    n = len(c.dims)
    image_in = [0] + r
    kernel = [c.dims[i] - (r[i] if i < n - 1 else 0) for i in range(n)]
    homology = [k - im for k, im in zip(kernel, image_in)]
    if any(h < 0 for h in homology):
        raise CompositionNonzero("negative homology; compositions cannot vanish")
    return HomologyProfile(list(c.dims), kernel, image_in, homology)


# ---------------------------------------------------------------------------
# single pentachoron


def _normalize(field: Field, v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(v != 0)
    if nz.size == 0:
        raise Degenerate("zero generator")
    return field.mul(v, field.inv(v[nz[0]]))


def edge_vectors_from_space(v: Subspace, u: Simplex) -> dict[Simplex, np.ndarray]:
    """psi_ij: the permitted coloring vanishing on the two tetrahedra not containing ij."""
    f = v.field
    tets = faces(u, 3)
    out = {}
    for e in faces(u, 1):
        cols = [2 * i + c for i, t in enumerate(tets) if not set(e) <= set(t) for c in (0, 1)]
        coeffs = kernel_basis(f, v.basis[:, cols].T)
        if coeffs.dim != 1:
            raise Degenerate(f"edge vector space of {label(e)} has dim {coeffs.dim}")
        out[e] = _normalize(f, f.matmul(coeffs.basis, v.basis)[0])
    return out


def eta_from_edge_vectors(field: Field, psi: Mapping[Simplex, np.ndarray], u: Simplex) -> dict[tuple[int, int], Scalar]:
    """eta_ij from the one relation among the four edge vectors at each vertex i."""
    eta = {}
    for i in u:
        edges = [e for e in faces(u, 1) if i in e]
        rel = left_kernel(field, np.vstack([psi[e] for e in edges]))
        if rel.dim != 1:
            raise Degenerate(f"relation space at vertex {i} has dim {rel.dim}")
        coef = _normalize(field, rel.basis[0])
        for e, c in zip(edges, coef):
            j = e[1] if e[0] == i else e[0]
            eta[(i, j)] = Scalar(field, field._box(c))
    return eta


def pentachoron_complex(family, u: Simplex) -> ChainComplex:
    """The five-term complex of one pentachoron; ``family`` supplies gamma and phi."""
    f = family.field
    tets = faces(u, 3)
    edges = faces(u, 1)
    verts = list(u)
    funcs = functionals_for(family, u)
    v = permitted_space(u, funcs)
    if v.dim != 5:
        raise Degenerate(f"V_{label(u)} has dim {v.dim}")
    psi = edge_vectors_from_space(v, u)
    eta = eta_from_edge_vectors(f, psi, u)
    eta_m = f.zeros((len(edges), len(verts)))
    gamma_m = f.zeros((len(verts), len(edges)))
    for r, (i, j) in enumerate(edges):
        a, b = verts.index(i), verts.index(j)
        eta_m[r, a] = eta[(i, j)].value
        eta_m[r, b] = eta[(j, i)].value
        gamma_m[a, r] = family.relation_coeff(i, j).value
        gamma_m[b, r] = family.relation_coeff(j, i).value
    psi_m = np.vstack([psi[e] for e in edges]).T
    phi_m = functional_matrix(f, funcs, tets)
    return ChainComplex(
        [5, 10, 10, 10, 5],
        [eta_m, psi_m, phi_m, gamma_m],
        f,
        ["vertices", "edges", "colorings", "edges", "vertices"],
    )


# ---------------------------------------------------------------------------
# general complex


def random_eta(field: Field, rng, k: Cluster) -> dict[tuple[int, int], Scalar]:
    pairs = [(i, j) for i, j in k.edges] + [(j, i) for i, j in k.edges]
    pairs.sort()
    return dict(zip(pairs, field.random_nonzero(rng, len(pairs))))


def eta_matrix_of_tet(field: Field, eta: Mapping[tuple[int, int], Scalar], t: Simplex) -> np.ndarray:
    """6x4: row ab has eta_ab in column a and eta_ba in column b."""
    m = field.zeros((6, 4))
    for r, (a, b) in enumerate(combinations(t, 2)):
        m[r, t.index(a)] = eta[(a, b)].value
        m[r, t.index(b)] = eta[(b, a)].value
    return m


def psi_block(field: Field, eta, t: Simplex) -> np.ndarray:
    """2x6 canonical basis of the left kernel of the eta matrix of t."""
    m = eta_matrix_of_tet(field, eta, t)
    if rank(field, m) < 4:
        raise Degenerate(f"eta-relation matrix of {label(t)} has rank < 4")
    return left_kernel(field, m).basis


@dataclass
class GeneralComplex:
    complex: ChainComplex
    pentachoron_dims: dict[Simplex, int]
    block_ranks: dict[Simplex, int]


def general_complex(k: Cluster, eta: Mapping[tuple[int, int], Scalar]) -> GeneralComplex:
    f = next(iter(eta.values())).field
    verts = k.vertices
    edges = k.edges
    tets = k.tetrahedra
    pents = list(k.pentachora)
    eidx = {e: i for i, e in enumerate(edges)}
    tidx = {t: i for i, t in enumerate(tets)}
    eta_m = f.zeros((len(edges), len(verts)))
    for r, (i, j) in enumerate(edges):
        eta_m[r, verts.index(i)] = eta[(i, j)].value
        eta_m[r, verts.index(j)] = eta[(j, i)].value
    psi_m = f.zeros((2 * len(tets), len(edges)))
    block_ranks = {}
    for t in tets:
        blk = psi_block(f, eta, t)
        block_ranks[t] = rank(f, blk)
        for c, e in enumerate(combinations(t, 2)):
            psi_m[2 * tidx[t] : 2 * tidx[t] + 2, eidx[e]] = blk[:, c]
    phi_m = f.zeros((5 * len(pents), 2 * len(tets)))
    pdims = {}
    for p, u in enumerate(pents):
        rows = [2 * tidx[t] + c for t in faces(u, 3) for c in (0, 1)]
        vu = Subspace.span(f, psi_m[rows, :].T, 10)
        pdims[u] = vu.dim
        if vu.dim != 5:
            raise Degenerate(f"edge vectors span {vu.dim} dims on {label(u)}")
        phi_m[np.ix_(range(5 * p, 5 * p + 5), rows)] = vu.annihilator()
    cc = ChainComplex(
        [len(verts), len(edges), 2 * len(tets), 5 * len(pents)],
        [eta_m, psi_m, phi_m],
        f,
        ["vertices", "edges", "colorings", "pentachora"],
    )
    return GeneralComplex(cc, pdims, block_ranks)


# ---------------------------------------------------------------------------
# complex files


def parse_complex(text: str) -> Cluster:
    """One pentachoron per line, five whitespace-separated vertex labels; # comments."""
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ComplexFileError(f"line {n}: expected 5 vertex labels, got {len(parts)}")
        if len(set(parts)) != 5:
            raise ComplexFileError(f"line {n}: repeated vertex")
        rows.append(parts)
    if not rows:
        raise ComplexFileError("no pentachora")
    labels = sorted({x for r in rows for x in r}, key=_label_key)
    ids = {x: int(x) if all(_is_int(y) for y in labels) else i + 1 for i, x in enumerate(labels)}
    return complex_from_pentachora([ids[x] for x in r] for r in rows)


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def _label_key(s: str):
    return (0, int(s), "") if _is_int(s) else (1, 0, s)


def load_complex(path: str | Path) -> Cluster:
    return parse_complex(Path(path).read_text())


def format_complex(pents: Iterable[Simplex]) -> str:
    return "".join(" ".join(map(str, u)) + "\n" for u in pents)
