"""Symmetric bilinear hexagon cochains on the 5-simplex.

An n-cochain (n = 3, 4, 5) assigns to every n-simplex s a symmetric bilinear
form on the permitted colorings of s: the full 2-dim color space of a
tetrahedron, V_u (dim 5) for a pentachoron, V(d Delta^5) (dim 9) for the
5-simplex.  Forms are stored as symmetric matrices in the recorded echelon
bases held by a ``CochainContext``; flattened coordinates are the upper
triangles (diagonal included), so the cochain spaces have dimensions
15*3 = 45, 6*15 = 90 and 45.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .exactfield import Degenerate, Field, Scalar, require_nonzero
from .exactla import Subspace, dual_kernel_basis, is_zero, rank
from .hexagon import (
    FiniteOFamily,
    dual_constant_part,
    dual_linear_part,
    functionals_for,
    permitted_space,
    whole_boundary,
    cluster_space,
)
from .simplicial import DELTA5, Simplex, faces, label, orientation_sign, pentachora


class DimMismatch(Degenerate):
    pass


class NonvanishingConstantPart(AssertionError):
    """The o^0 part of delta c^(3) did not vanish on V_u."""


class CharNot2(ValueError):
    pass


# ---------------------------------------------------------------------------
# symmetric matrix coordinates


def sym_index(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_flatten(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    return np.array([m[i, j] for i, j in sym_index(n)], dtype=m.dtype)


def sym_unflatten(field: Field, v: np.ndarray, n: int) -> np.ndarray:
    m = field.zeros((n, n))
    for val, (i, j) in zip(v, sym_index(n)):
        m[i, j] = val
        m[j, i] = val
    return m


def congruence(field: Field, r: np.ndarray, m: np.ndarray) -> np.ndarray:
    """r^T m r."""
    return field.matmul(field.matmul(r.T, m), r)


def is_symmetric(m: np.ndarray) -> bool:
    return bool(np.all(m == m.T))


# ---------------------------------------------------------------------------
# context


@dataclass
class CochainContext:
    """Recorded bases of V_u and V(d Delta^5) plus restriction maps."""

    field: Field
    family: object
    tetrahedra: list[Simplex]
    pentachora: list[Simplex]
    v_pent: dict[Simplex, Subspace]
    v_delta: Subspace
    tet_restriction: dict[tuple[Simplex, Simplex], np.ndarray]  # (t, u) -> 2x5
    pent_restriction: dict[Simplex, np.ndarray]  # u -> 5x9

    @classmethod
    def build(cls, family, ambient: Simplex = DELTA5) -> CochainContext:
        field = family.field
        pents = pentachora(ambient)
        tets = faces(ambient, 3)
        v_pent = {}
        for u in pents:
            v = permitted_space(u, functionals_for(family, u))
            if v.dim != 5:
                raise DimMismatch(f"V_{label(u)} has dim {v.dim}, expected 5")
            v_pent[u] = v
        v_delta = cluster_space(whole_boundary(ambient), family).space
        if v_delta.dim != 9:
            raise DimMismatch(f"V(dDelta^5) has dim {v_delta.dim}, expected 9")
        tet_res = {}
        for u in pents:
            for i, t in enumerate(faces(u, 3)):
                tet_res[(t, u)] = np.ascontiguousarray(v_pent[u].basis[:, 2 * i : 2 * i + 2].T)
        tidx = {t: i for i, t in enumerate(tets)}
        pent_res = {}
        for u in pents:
            cols = [2 * tidx[t] + c for t in faces(u, 3) for c in (0, 1)]
            restricted = v_delta.basis[:, cols]
            pent_res[u] = np.ascontiguousarray(v_pent[u].coords(restricted).T)
        return cls(field, family, tets, pents, v_pent, v_delta, tet_res, pent_res)

    def fingerprints(self) -> dict[str, str]:
        out = {label(u): v.fingerprint() for u, v in self.v_pent.items()}
        out["delta5"] = self.v_delta.fingerprint()
        return out


def cochain_dims(ctx: CochainContext) -> tuple[int, int, int]:
    for u, v in ctx.v_pent.items():
        if v.dim != 5:
            raise DimMismatch(f"V_{label(u)} has dim {v.dim}")
    if ctx.v_delta.dim != 9:
        raise DimMismatch(f"V(dDelta^5) has dim {ctx.v_delta.dim}")
    n3 = len(ctx.tetrahedra) * 3
    n4 = sum(v.dim * (v.dim + 1) // 2 for v in ctx.v_pent.values())
    n5 = ctx.v_delta.dim * (ctx.v_delta.dim + 1) // 2
    return n3, n4, n5


# ---------------------------------------------------------------------------
# cochains


@dataclass
class SymBilinearCochain:
    level: int
    components: dict[Simplex, np.ndarray]

    def flatten(self, ctx: CochainContext) -> np.ndarray:
        keys = {3: ctx.tetrahedra, 4: ctx.pentachora, 5: [DELTA5]}[self.level]
        return np.concatenate([sym_flatten(self.components[s]) for s in keys])

    @classmethod
    def unflatten(cls, ctx: CochainContext, level: int, v: np.ndarray) -> SymBilinearCochain:
        keys = {3: ctx.tetrahedra, 4: ctx.pentachora, 5: [DELTA5]}[level]
        n = {3: 2, 4: 5, 5: 9}[level]
        size = n * (n + 1) // 2
        comps = {}
        for i, s in enumerate(keys):
            comps[s] = sym_unflatten(ctx.field, v[i * size : (i + 1) * size], n)
        return cls(level, comps)

    def is_zero(self) -> bool:
        return all(is_zero(m) for m in self.components.values())


def coboundary(c: SymBilinearCochain, ctx: CochainContext) -> SymBilinearCochain:
    """(delta c)_s(v, v') = sum_k (-1)^k c_{d_k s}(v|, v'|) in the recorded bases."""
    f = ctx.field
    if c.level == 3:
        out = {}
        for u in ctx.pentachora:
            acc = f.zeros((5, 5))
            for t in faces(u, 3):
                term = congruence(f, ctx.tet_restriction[(t, u)], c.components[t])
                if orientation_sign(t, u) < 0:
                    acc = f.sub(acc, term)
                else:
                    acc = f.add(acc, term)
            out[u] = acc
        return SymBilinearCochain(4, out)
    if c.level == 4:
        acc = f.zeros((9, 9))
        for u in ctx.pentachora:
            term = congruence(f, ctx.pent_restriction[u], c.components[u])
            if orientation_sign(u, DELTA5) < 0:
                acc = f.sub(acc, term)
            else:
                acc = f.add(acc, term)
        return SymBilinearCochain(5, {DELTA5: acc})
    raise ValueError(f"no coboundary from level {c.level}")


def coboundary_matrix(ctx: CochainContext, level: int) -> np.ndarray:
    """delta_3 (90x45) or delta_4 (45x90) in flattened coordinates."""
    n_in = {3: 45, 4: 90}[level]
    f = ctx.field
    cols = []
    for k in range(n_in):
        e = f.zeros(n_in)
        e[k] = f.from_int(1)
        cols.append(coboundary(SymBilinearCochain.unflatten(ctx, level, e), ctx).flatten(ctx))
    return np.vstack(cols).T


# ---------------------------------------------------------------------------
# the 3-cocycle


def z3(omega: Mapping[Simplex, Scalar], t: Simplex) -> np.ndarray:
    """Diagonal form (w_jkl - w_ikl) diag(w_ijk w_ijl, -w_ikl w_jkl) on the colors of t."""
    i, j, k, l = t
    w = omega
    d = w[(j, k, l)] - w[(i, k, l)]
    f = d.field
    m = f.zeros((2, 2))
    m[0, 0] = (d * w[(i, j, k)] * w[(i, j, l)]).value
    m[1, 1] = (-(d * w[(i, k, l)] * w[(j, k, l)])).value
    return m


def z3_cochain(omega, ctx: CochainContext) -> SymBilinearCochain:
    return SymBilinearCochain(3, {t: z3(omega, t) for t in ctx.tetrahedra})


def pentachoron_form(omega, u: Simplex) -> np.ndarray:
    """10x10 matrix of sum_t eps_t z3_t on all colorings of u (the scalar product)."""
    tets = faces(u, 3)
    f = next(iter(omega.values())).field
    q = f.zeros((10, 10))
    for i, t in enumerate(tets):
        blk = z3(omega, t)
        if orientation_sign(t, u) < 0:
            blk = f.neg(blk)
        q[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blk
    return q


def scalar_product(u: Simplex, c, c2, omega) -> Scalar:
    """<c, c'> = sum over t in u of eps_t z3_t(c|t, c'|t) for colorings of u (length 10)."""
    f = next(iter(omega.values())).field
    q = pentachoron_form(omega, u)
    a = np.asarray(c, dtype=f.dtype)[None, :]
    b = np.asarray(c2, dtype=f.dtype)[:, None]
    return Scalar(f, f._box(f.matmul(f.matmul(a, q), b)[0, 0]))


def gram(field: Field, basis: np.ndarray, q: np.ndarray) -> np.ndarray:
    return field.matmul(field.matmul(basis, q), basis.T)


def isotropy_check(u: Simplex, ctx: CochainContext) -> bool:
    """True iff the scalar product vanishes on V_u x V_u."""
    q = pentachoron_form(ctx.family.omega, u)
    return is_zero(gram(ctx.field, ctx.v_pent[u].basis, q))


def z3_sum_residue(u: Simplex, ctx: CochainContext) -> np.ndarray:
    """Gram matrix of sum_t eps_t z_t on the recorded basis of V_u."""
    return coboundary(z3_cochain(ctx.family.omega, ctx), ctx).components[u]


# ---------------------------------------------------------------------------
# nontriviality on a single pentachoron


def elementary_forms(u: Simplex, ctx: CochainContext) -> list[np.ndarray]:
    """x_t x'_t, x_t y'_t + y_t x'_t, y_t y'_t for t in u, pulled back to V_u."""
    f = ctx.field
    out = []
    for t in faces(u, 3):
        r = ctx.tet_restriction[(t, u)]
        for a, b in ((0, 0), (0, 1), (1, 1)):
            e = f.zeros((2, 2))
            e[a, b] = f.from_int(1)
            e[b, a] = f.from_int(1)
            out.append(congruence(f, r, e))
    return out


def elementary_rank(u: Simplex, ctx: CochainContext) -> int:
    return rank(ctx.field, np.vstack([sym_flatten(m) for m in elementary_forms(u, ctx)]))


def nontrivial_on_pentachoron(form: np.ndarray, u: Simplex, ctx: CochainContext) -> bool:
    """form is not a combination of the pulled-back elementary forms of u."""
    rows = [sym_flatten(m) for m in elementary_forms(u, ctx)]
    base = rank(ctx.field, np.vstack(rows))
    return rank(ctx.field, np.vstack(rows + [sym_flatten(form)])) == base + 1


# ---------------------------------------------------------------------------
# the limit 4-cocycle


@dataclass
class LimitCocycle:
    cochain: SymBilinearCochain
    constant_parts_vanish: bool
    lift_invariant: bool


def _lift_basis(fam: FiniteOFamily, u: Simplex, ctx: CochainContext) -> tuple[np.ndarray, np.ndarray]:
    """First-order lift (B, B1) of the recorded basis B of V_u."""
    f = ctx.field
    lifts = dual_kernel_basis(fam.dual_matrix(u))
    rows = [[x for x in v] for v in lifts]
    v0 = dual_constant_part(f, rows)
    v1 = dual_linear_part(f, rows)
    vu = ctx.v_pent[u]
    if Subspace.span(f, v0, 10) != vu:
        raise Degenerate(f"constant parts of the lift do not span V_{label(u)}")
    # recorded basis B = T^-1 v0 where v0 = T B
    t = vu.coords(v0)
    tinv = _inverse(f, t)
    return f.matmul(tinv, v0), f.matmul(tinv, v1)


def _inverse(field: Field, m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    from .exactla import rref

    red, r, _ = rref(field, np.hstack([m, field.eye(n)]))
    if r < n or not np.all(red[:, :n] == field.eye(n)):
        raise Degenerate("singular change of basis")
    return red[:, n:]


def _first_order_gram(field: Field, b0, b1, q) -> tuple[np.ndarray, np.ndarray]:
    g0 = gram(field, b0, q)
    g1 = field.add(field.matmul(field.matmul(b1, q), b0.T), field.matmul(field.matmul(b0, q), b1.T))
    return g0, g1


def z4_limit(b: Mapping[Simplex, Scalar], ctx: CochainContext, rng=None) -> LimitCocycle:
    """lim (delta c^(3)) / o with gamma_ij = -/+1 + o b_ij, on the recorded bases.

    The o^0 part of each Gram matrix must vanish.  The result is recomputed with
    a second first-order lift (shifted by a random element of V_u) and compared.
    """
    f = ctx.field
    fam = FiniteOFamily(b)
    omega = fam.omega
    comps = {}
    const_ok = True
    invariant = True
    rng = rng if rng is not None else np.random.default_rng(0)
    for u in ctx.pentachora:
        q = pentachoron_form(omega, u)
        b0, b1 = _lift_basis(fam, u, ctx)
        g0, g1 = _first_order_gram(f, b0, b1, q)
        if not is_zero(g0):
            const_ok = False
            raise NonvanishingConstantPart(f"o^0 Gram on V_{label(u)} is nonzero")
        shift = f.array(f.random_nonzero(rng, 25), (5, 5))
        b1_alt = f.add(b1, f.matmul(shift, b0))
        _, g1_alt = _first_order_gram(f, b0, b1_alt, q)
        invariant = invariant and bool(np.all(g1_alt == g1))
        comps[u] = g1
    return LimitCocycle(SymBilinearCochain(4, comps), const_ok, invariant)


# ---------------------------------------------------------------------------
# characteristic-2 4-cocycle


def zeta_form(omega, u: Simplex) -> np.ndarray:
    """10x10 symmetric matrix of zeta_u on all colorings of u = ijklm (char 2)."""
    f = next(iter(omega.values())).field
    if f.characteristic != 2:
        raise CharNot2("zeta is defined in characteristic 2 only")
    v = dict(zip(range(1, 6), u))

    def w(a, b, c):
        return omega[(v[a], v[b], v[c])]

    den1 = w(1, 2, 4) + w(1, 2, 3)
    den2 = w(1, 3, 4) * w(2, 3, 5) + w(1, 3, 5) * w(2, 3, 4)
    require_nonzero(den1, den2, what=f"zeta denominator on {label(u)}")
    big = (
        w(1, 2, 4) * w(1, 2, 5) * w(1, 3, 5)
        + w(1, 2, 3) * w(1, 2, 5) * w(1, 3, 5)
        + w(1, 2, 4) * w(1, 2, 5) * w(1, 3, 4)
        + w(1, 2, 3) * w(1, 2, 4) * w(1, 3, 4)
    )
    p35 = (w(1, 2, 5) + w(1, 2, 3)) * (w(1, 2, 5) + w(1, 2, 4))
    c34 = w(1, 3, 4) * w(1, 3, 5) * (w(1, 3, 5) + w(1, 3, 4))
    tets = faces(u, 3)

    def x(*face):
        return 2 * tets.index(tuple(v[a] for a in face))

    def y(*face):
        return x(*face) + 1

    terms = [
        (w(1, 2, 3) * w(1, 2, 4) * p35 * big / (den1 * den2), x(1, 2, 4, 5), x(1, 2, 3, 5)),
        (w(1, 2, 3) * p35 * c34 / den2, x(1, 3, 4, 5), x(1, 2, 3, 5)),
        (w(1, 2, 3) * w(1, 2, 3) * p35 * big / (den1 * den2), x(1, 2, 3, 5), x(1, 2, 3, 5)),
        (w(1, 2, 4) * p35 * c34 / den2, x(1, 3, 4, 5), x(1, 2, 4, 5)),
        (w(1, 2, 4) * w(1, 2, 4) * p35 * big / (den1 * den2), x(1, 2, 4, 5), x(1, 2, 4, 5)),
        (
            (w(1, 2, 5) + w(1, 2, 4)) * w(1, 3, 4) * w(1, 3, 4) * w(1, 3, 5) * w(1, 3, 5)
            * (w(1, 3, 5) + w(1, 3, 4)) / den2,
            x(1, 3, 4, 5),
            x(1, 3, 4, 5),
        ),
        (
            w(2, 3, 4) * w(2, 3, 5) * (w(2, 3, 5) + w(2, 3, 4))
            * (big + w(1, 2, 5) * w(1, 3, 4) * w(1, 3, 5) + w(1, 2, 4) * w(1, 3, 4) * w(1, 3, 5))
            / den2,
            x(2, 3, 4, 5),
            x(2, 3, 4, 5),
        ),
        (w(1, 2, 3) * w(2, 3, 4) * w(2, 3, 5) * (w(2, 4, 5) + w(3, 4, 5)), x(2, 3, 4, 5), x(2, 3, 4, 5)),
        (
            (w(2, 4, 5) + w(1, 4, 5)) * (w(2, 4, 5) + w(3, 4, 5)) * w(2, 4, 5) * w(3, 4, 5),
            y(2, 3, 4, 5),
            y(2, 3, 4, 5),
        ),
    ]
    m = f.zeros((10, 10))
    for coef, a, b in terms:
        # off-diagonal terms are (x_a x'_b + x_b x'_a); diagonal ones x_a x'_a
        m[a, b] = f.add(m[a, b], coef.value)
        if a != b:
            m[b, a] = f.add(m[b, a], coef.value)
    return m


def zeta4_char2(ctx: CochainContext) -> SymBilinearCochain:
    """zeta_u on the recorded basis of every V_u."""
    f = ctx.field
    if f.characteristic != 2:
        raise CharNot2("zeta is defined in characteristic 2 only")
    omega = ctx.family.omega
    return SymBilinearCochain(
        4, {u: gram(f, ctx.v_pent[u].basis, zeta_form(omega, u)) for u in ctx.pentachora}
    )


def zeta_six_term_sum(ctx: CochainContext) -> np.ndarray:
    """Gram matrix on V(d Delta^5) of the plain sum of the six zeta components."""
    f = ctx.field
    omega = ctx.family.omega
    tidx = {t: i for i, t in enumerate(ctx.tetrahedra)}
    acc = f.zeros((9, 9))
    for u in ctx.pentachora:
        cols = [2 * tidx[t] + c for t in faces(u, 3) for c in (0, 1)]
        r = ctx.v_delta.basis[:, cols]
        acc = f.add(acc, gram(f, r, zeta_form(omega, u)))
    return acc


# ---------------------------------------------------------------------------
# cohomology dimensions


@dataclass
class CohomologyDims:
    dims: tuple[int, int, int]
    rank_delta3: int
    rank_delta4: int
    h3: int
    h4: int
    delta_squared_zero: bool
    z3_closed: bool
    generators: dict

    def to_dict(self) -> dict:
        return {
            "cochain_dims": list(self.dims),
            "rank_delta3": self.rank_delta3,
            "rank_delta4": self.rank_delta4,
            "dim_H3": self.h3,
            "dim_H4": self.h4,
            "delta4_delta3_zero": self.delta_squared_zero,
            "z3_in_ker_delta3": self.z3_closed,
            "generators": self.generators,
        }


def cohomology_dims(ctx: CochainContext, generators: Mapping[str, SymBilinearCochain] | None = None) -> CohomologyDims:
    """Ranks of delta_3, delta_4 and dims of H^3 = ker delta_3, H^4; generator tests."""
    f = ctx.field
    dims = cochain_dims(ctx)
    d3 = coboundary_matrix(ctx, 3)
    d4 = coboundary_matrix(ctx, 4)
    r3 = rank(f, d3)
    r4 = rank(f, d4)
    sq = is_zero(f.matmul(d4, d3))
    z = z3_cochain(ctx.family.omega, ctx).flatten(ctx)
    z_closed = is_zero(f.matmul(d3, z[:, None]))
    gens = {}
    im3 = d3.T  # rows span im delta_3
    for name, c in (generators or {}).items():
        v = c.flatten(ctx)
        closed = is_zero(f.matmul(d4, v[:, None]))
        jump = rank(f, np.vstack([im3, v[None, :]])) - r3
        gens[name] = {"in_ker_delta4": closed, "outside_im_delta3": jump == 1}
    return CohomologyDims(dims, r3, r4, dims[0] - r3, (dims[1] - r4) - r3, sq, z_closed, gens)


def difference_rank_jump(ctx: CochainContext, a: SymBilinearCochain, b: SymBilinearCochain) -> int:
    """rank[im delta_3 | a - b] - rank(im delta_3): 0 iff a and b are cohomologous."""
    f = ctx.field
    d3 = coboundary_matrix(ctx, 3)
    diff = f.sub(a.flatten(ctx), b.flatten(ctx))
    return rank(f, np.vstack([d3.T, diff[None, :]])) - rank(f, d3)
