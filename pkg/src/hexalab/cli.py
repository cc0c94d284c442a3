"""``hexalab verify <suite>``: run verification suites and emit a JSON report.

Exit status: 0 when every check passed (possibly after resampling degenerate
samples), 1 when some check failed or errored, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .cohomology import (
    CochainContext,
    cochain_dims,
    coboundary,
    cohomology_dims,
    difference_rank_jump,
    elementary_rank,
    gram,
    isotropy_check,
    nontrivial_on_pentachoron,
    pentachoron_form,
    z3_sum_residue,
    z4_limit,
    zeta4_char2,
    zeta_six_term_sum,
)
from .exactfield import Degenerate, FieldSpecError, ResampleExhausted, Unattainable, field_make, resample
from .exactla import Subspace, is_zero
from .exotic import ComplexFileError, general_complex, homology_profile, load_complex, pentachoron_complex, random_eta
from .hexagon import (
    EXPECTED_FIBER,
    EdgeFunctional,
    GenericFamily,
    InfinitesimalFamily,
    InnerResidue,
    boundary_functionals,
    boundary_relations_hold,
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
    psi_phi_identity_holds,
    vertex_relation_residues,
)
from .simplicial import (
    DELTA5,
    Cluster,
    ClusterError,
    all_clusters,
    complement,
    faces,
    label,
    parse_omit,
    pentachora,
    random_cochain1,
)

SUITES = ["pentachoron", "pachner", "exotic", "cocycle3", "cocycle4", "cocycle4char2", "cohomology", "isotropy"]
EXPECTED_BOUNDARY_DIM = {2: 8, 3: 9}
SAFE_INT = 2**53


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    suite: str
    field: str
    seed: int
    trials: int = 1
    cluster: str | None = None
    complex: str | None = None
    out: str | None = None

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "field": self.field,
            "seed": self.seed,
            "trials": self.trials,
            "cluster": self.cluster,
            "complex": self.complex,
        }


# ---------------------------------------------------------------------------
# samplers


def rank_certified_context(field, rng):
    """Infinitesimal family from a random nonzero b; Degenerate unless every V_u is 5-dim."""
    b = random_cochain1(field, rng)
    return b, CochainContext.build(InfinitesimalFamily.from_b(b))


def general_context(field, rng):
    b = general_position_b(field, rng)
    return b, CochainContext.build(InfinitesimalFamily.from_b(b))


def all_zero(rows) -> bool:
    return all(is_zero(r) for r in rows)


def require_dims(what: str, got: dict, expected) -> None:
    """Dimensions are generic claims: a shortfall marks a rank-drop sample, which is resampled."""
    for key, d in got.items():
        want = expected[key] if isinstance(expected, dict) else expected
        if d != want:
            raise Degenerate(f"rank drop: {what} {key} has dim {d}, generic value {want}")


# ---------------------------------------------------------------------------
# per-trial checks; each returns (ok, data) or raises Degenerate


def check_dims_generic(field, rng):
    fam = GenericFamily(general_position_gamma(field, rng))
    dims, relations = {}, True
    for u in pentachora():
        funcs = functionals_for(fam, u)
        dims[label(u)] = permitted_space(u, funcs).dim
        relations &= all_zero(vertex_relation_residues(funcs, fam.relation_coeff).values())
    require_dims("V_u", dims, 5)
    ok = relations
    return ok, {"dims": dims, "vertex_relations": relations}


def check_dims_infinitesimal(field, rng):
    b = general_position_b(field, rng)
    fam = InfinitesimalFamily.from_b(b)
    dims, eps_rel, b_rel = {}, True, True
    for u in pentachora():
        funcs = functionals_for(fam, u)
        dims[label(u)] = permitted_space(u, funcs).dim
        eps_rel &= all_zero(vertex_relation_residues(funcs, fam.relation_coeff).values())
        acc = field.zeros(10)
        for f in funcs:
            acc = field.add(acc, field.mul(b[f.edge].value, f.row(field, faces(u, 3))))
        b_rel &= is_zero(acc)
    require_dims("V_u", dims, 5)
    ok = eps_rel and b_rel
    return ok, {"dims": dims, "eps_relations": eps_rel, "b_relations": b_rel}


def check_psi_phi(field, rng):
    b = general_position_b(field, rng)
    fam = InfinitesimalFamily.from_b(b)
    identity = in_space = eps_rel = b_rel = True
    for u in pentachora():
        tets = faces(u, 3)
        identity &= all(psi_phi_identity_holds(fam, t) for t in tets)
        vecs = edge_vectors_infinitesimal(fam, u)
        m = edge_vector_matrix(field, vecs, tets)
        v = permitted_space(u, functionals_for(fam, u))
        in_space &= Subspace.span(field, m.T, 10) == v
        as_rows = [EdgeFunctional(x.edge, x.components) for x in vecs]
        eps_rel &= all_zero(vertex_relation_residues(as_rows, lambda i, j: field(eps(i, j))).values())
        acc = field.zeros(10)
        for x in vecs:
            acc = field.add(acc, field.mul(b[x.edge].value, x.column(field, tets)))
        b_rel &= is_zero(acc)
    data = {
        "psi_phi_identity": identity,
        "edge_vectors_span_V_u": in_space,
        "eps_relations": eps_rel,
        "b_relations": b_rel,
    }
    return identity and in_space and eps_rel and b_rel, data


def _hexagon(fam):
    rep = full_hexagon_check(fam)
    require_dims("V", {"delta5": rep.delta5_dim}, 9)
    for r in rep.records:
        name = "+".join(r.cluster)
        require_dims("fiber of", {name: r.fiber, "complement of " + name: r.fiber_complement},
                     {name: EXPECTED_FIBER[r.k], "complement of " + name: EXPECTED_FIBER[6 - r.k]})
        for k, d in ((r.k, r.boundary_dim), (6 - r.k, r.boundary_dim_complement)):
            if k in EXPECTED_BOUNDARY_DIM:
                require_dims("boundary space of a cluster of size", {k: d}, EXPECTED_BOUNDARY_DIM[k])
    bdims: dict[int, set] = {}
    for r in rep.records:
        bdims.setdefault(r.k, set()).add(r.boundary_dim)
        bdims.setdefault(6 - r.k, set()).add(r.boundary_dim_complement)
    boundary_ok = all(bdims.get(k) == {d} for k, d in EXPECTED_BOUNDARY_DIM.items())
    data = rep.to_dict()
    data["boundary_dims"] = {str(k): sorted(v) for k, v in sorted(bdims.items())}
    data["expected_fiber"] = {str(k): v for k, v in EXPECTED_FIBER.items()}
    return rep.passed and boundary_ok, data


def check_hexagon_generic(field, rng):
    return _hexagon(GenericFamily(general_position_gamma(field, rng)))


def check_hexagon_infinitesimal(field, rng):
    return _hexagon(InfinitesimalFamily.from_b(general_position_b(field, rng)))


def _inner_cancellation(cluster: Cluster, fam) -> dict:
    try:
        bfs = boundary_functionals(cluster, fam)
    except InnerResidue as exc:
        return {"inner_cancel": False, "detail": str(exc)}
    return {
        "inner_cancel": True,
        "inner_edges_vanish": inner_edge_functionals_vanish(cluster, bfs),
        "boundary_relations": boundary_relations_hold(cluster, fam, bfs),
    }


def check_inner_cancellation(field, rng):
    fams = {
        "generic": GenericFamily(general_position_gamma(field, rng)),
        "infinitesimal": InfinitesimalFamily.from_b(general_position_b(field, rng)),
    }
    data = {}
    ok = True
    for name, fam in fams.items():
        bad = []
        clusters = all_clusters()
        for c in clusters:
            r = _inner_cancellation(c, fam)
            if not all(v for k, v in r.items() if k != "detail"):
                bad.append([label(u) for u in c.pentachora])
        data[name] = {"clusters": len(clusters), "failures": bad}
        ok &= not bad
    return ok, data


def check_cluster(cluster: Cluster):
    def run(field, rng):
        fam = GenericFamily(general_position_gamma(field, rng))
        cbar = complement(cluster)
        sc, sb = cluster_space(cluster, fam), cluster_space(cbar, fam)
        k = len(cluster.pentachora)
        require_dims("fiber", {"cluster": sc.fiber_dim, "complement": sb.fiber_dim},
                     {"cluster": EXPECTED_FIBER[k], "complement": EXPECTED_FIBER[6 - k]})
        t1 = _inner_cancellation(cluster, fam)
        data = {
            "cluster": [label(u) for u in cluster.pentachora],
            "complement": [label(u) for u in cbar.pentachora],
            "counts": cluster.counts(),
            "boundary_dim": sc.boundary_restriction.dim,
            "fiber": sc.fiber_dim,
            "fiber_complement": sb.fiber_dim,
            "restrictions_equal": sc.boundary_restriction == sb.boundary_restriction,
            "inner_cancellation": t1,
        }
        ok = (
            data["restrictions_equal"]
            and sc.fiber_dim == EXPECTED_FIBER[k]
            and sb.fiber_dim == EXPECTED_FIBER[6 - k]
            and all(v for key, v in t1.items() if key != "detail")
        )
        return ok, data

    return run


def check_exotic_pentachoron(field, rng):
    u = (1, 2, 3, 4, 5)
    fam = GenericFamily(general_position_gamma(field, rng, u))
    cc = pentachoron_complex(fam, u)
    prof = homology_profile(cc)
    ranks = cc.ranks()
    require_dims("differential", dict(enumerate(ranks)), 5)
    ok = cc.dims == [5, 10, 10, 10, 5] and ranks == [5, 5, 5, 5] and prof.acyclic and prof.euler_holds()
    return ok, {"ranks": ranks, "profile": prof.to_dict(), "compositions_zero": True}


def check_exotic_general(k: Cluster, name: str):
    def run(field, rng):
        g = general_complex(k, random_eta(field, rng, k))
        prof = homology_profile(g.complex)
        blocks_ok = all(r == 2 for r in g.block_ranks.values())
        dims_ok = all(d == 5 for d in g.pentachoron_dims.values())
        ok = prof.euler_holds() and blocks_ok and dims_ok
        if len(k.pentachora) == 1:
            # truncation of the five-term complex, which is acyclic
            ok &= prof.acyclic
        data = {
            "complex": name,
            "pentachora": len(k.pentachora),
            "profile": prof.to_dict(),
            "euler_identity": prof.euler_holds(),
            "psi_blocks_rank_2": blocks_ok,
            "edge_vector_span_dims": sorted(set(g.pentachoron_dims.values())),
        }
        return ok, data

    return run


def check_z3_sum(field, rng):
    _, ctx = rank_certified_context(field, rng)
    per_u = {label(u): is_zero(z3_sum_residue(u, ctx)) for u in ctx.pentachora}
    cd = cohomology_dims(ctx)
    ok = all(per_u.values()) and cd.z3_closed
    return ok, {"signed_sum_per_pentachoron": per_u, "z3_in_ker_delta3": cd.z3_closed, "bases": ctx.fingerprints()}


def check_cohomology(field, rng):
    _, ctx = rank_certified_context(field, rng)
    cd = cohomology_dims(ctx)
    dims = cochain_dims(ctx)
    ok = (
        dims == (45, 90, 45)
        and cd.rank_delta3 <= 44
        and cd.h3 >= 1
        and cd.h4 >= 1
        and cd.delta_squared_zero
        and cd.z3_closed
    )
    return ok, cd.to_dict()


def check_limit_cocycle(field, rng):
    b, ctx = general_context(field, rng)
    z = z4_limit(b, ctx, rng)
    u = ctx.pentachora[0]
    comp = z.cochain.components[u]
    closed = coboundary(z.cochain, ctx).is_zero()
    erank = elementary_rank(u, ctx)
    require_dims("elementary span on", {label(u): erank}, 14)
    nontrivial = nontrivial_on_pentachoron(comp, u, ctx)
    gens = cohomology_dims(ctx, {"z4": z.cochain}).generators["z4"]
    data = {
        "constant_part_vanishes": z.constant_parts_vanish,
        "lift_invariant": z.lift_invariant,
        "in_ker_delta4": closed,
        "elementary_rank": erank,
        "rank_with_z4": erank + int(nontrivial),
        "outside_im_delta3": gens["outside_im_delta3"],
    }
    ok = z.constant_parts_vanish and z.lift_invariant and closed and erank == 14 and nontrivial
    ok &= gens["outside_im_delta3"]
    return ok, data


def check_zeta(field, rng):
    b, ctx = general_context(field, rng)
    zt = zeta4_char2(ctx)
    u = ctx.pentachora[0]
    six = is_zero(zeta_six_term_sum(ctx))
    nontrivial = nontrivial_on_pentachoron(zt.components[u], u, ctx)
    gens = cohomology_dims(ctx, {"zeta": zt}).generators["zeta"]
    data = {
        "six_term_sum_vanishes": six,
        "nontrivial_on_12345": nontrivial,
        "in_ker_delta4": gens["in_ker_delta4"],
        "outside_im_delta3": gens["outside_im_delta3"],
    }
    try:
        z = z4_limit(b, ctx, rng)
        # observation only: rank jump of zeta - z4 against im delta_3
        data["zeta_minus_z4_rank_jump"] = difference_rank_jump(ctx, zt, z.cochain)
    except Degenerate as exc:
        data["zeta_minus_z4_rank_jump"] = f"unavailable: {exc}"
    ok = six and nontrivial and gens["in_ker_delta4"] and gens["outside_im_delta3"]
    return ok, data


def check_isotropy(field, rng):
    _, ctx = rank_certified_context(field, rng)
    iso = {label(u): isotropy_check(u, ctx) for u in ctx.pentachora}
    consistent = all(
        bool(np.all(z3_sum_residue(u, ctx) == gram(field, ctx.v_pent[u].basis, pentachoron_form(ctx.family.omega, u))))
        for u in ctx.pentachora
    )
    form_nonzero = all(not is_zero(pentachoron_form(ctx.family.omega, u)) for u in ctx.pentachora)
    dims = {label(u): v.dim for u, v in ctx.v_pent.items()}
    ok = all(iso.values()) and consistent and form_nonzero and all(d == 5 for d in dims.values())
    return ok, {
        "isotropic": iso,
        "maximal": all(d == 5 for d in dims.values()),
        "agrees_with_signed_sum": consistent,
        "form_nonzero_on_all_colorings": form_nonzero,
    }


# ---------------------------------------------------------------------------
# running


def run_check(name: str, params: dict, build: Callable, field, cfg: RunConfig) -> dict:
    trials = []
    statuses = []
    for i in range(cfg.trials):
        seed = cfg.seed + i
        entry: dict = {"seed": seed}
        log: list[str] = []
        try:
            (ok, data), attempts = resample(lambda rng: build(field, rng), seed, log=log)
            entry["attempts"] = attempts
            entry["ok"] = bool(ok)
            entry["data"] = data
            statuses.append("pass" if ok and attempts == 1 else "degenerate-resampled" if ok else "fail")
        except (ResampleExhausted, Unattainable) as exc:
            entry["error"] = str(exc)
            statuses.append("error")
        except AssertionError as exc:
            entry["ok"] = False
            entry["error"] = f"{type(exc).__name__}: {exc}"
            statuses.append("fail")
        if log:
            entry["resampled"] = log
        trials.append(entry)
    for s in ("fail", "error", "degenerate-resampled"):
        if s in statuses:
            status = s
            break
    else:
        status = "pass"
    return {"name": name, "params": params, "status": status, "trials": trials}


def suite_checks(suite: str, field, cfg: RunConfig) -> list[tuple[str, dict, Callable]]:
    if suite == "pentachoron":
        return [
            ("pentachoron.dims.generic", {"family": "generic"}, check_dims_generic),
            ("pentachoron.dims.infinitesimal", {"family": "infinitesimal"}, check_dims_infinitesimal),
            ("pentachoron.psi_phi_duality", {"family": "infinitesimal"}, check_psi_phi),
        ]
    if suite == "pachner":
        out = [
            ("pachner.full_hexagon.generic", {"family": "generic"}, check_hexagon_generic),
            ("pachner.full_hexagon.infinitesimal", {"family": "infinitesimal"}, check_hexagon_infinitesimal),
            ("pachner.inner_cancellation", {"clusters": "all"}, check_inner_cancellation),
        ]
        if cfg.cluster:
            out.append(("pachner.cluster", {"cluster": cfg.cluster}, check_cluster(parse_omit(cfg.cluster))))
        return out
    if suite == "exotic":
        out = [
            ("exotic.pentachoron", {"pentachoron": "12345"}, check_exotic_pentachoron),
            ("exotic.general.pentachoron", {"complex": "12345"}, check_exotic_general(Cluster(((1, 2, 3, 4, 5),)), "12345")),
            ("exotic.general.boundary", {"complex": "boundary of the 5-simplex"}, check_exotic_general(Cluster(tuple(pentachora(DELTA5))), "delta5")),
        ]
        if cfg.complex:
            k = load_complex(cfg.complex)
            out.append(("exotic.general.file", {"complex": cfg.complex}, check_exotic_general(k, cfg.complex)))
        return out
    if suite == "cocycle3":
        return [("cocycle3.signed_sum", {}, check_z3_sum)]
    if suite == "cocycle4":
        return [("cocycle4.limit", {}, check_limit_cocycle)]
    if suite == "cocycle4char2":
        return [("cocycle4char2.zeta", {}, check_zeta)]
    if suite == "cohomology":
        return [("cohomology.dims", {}, check_cohomology)]
    if suite == "isotropy":
        return [("isotropy.scalar_product", {}, check_isotropy)]
    raise UsageError(f"unknown suite {suite!r}")


def selected_suites(suite: str, field) -> list[str]:
    if suite == "all":
        return [s for s in SUITES if s != "cocycle4char2" or field.characteristic == 2]
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ['all'])}")
    if suite == "cocycle4char2" and field.characteristic != 2:
        raise UsageError("cocycle4char2 needs a binary field (gf2=<k>)")
    return [suite]


def build_checks(cfg: RunConfig):
    """Validate the config; returns (field, [(name, params, build)]) or raises UsageError."""
    if cfg.trials < 1:
        raise UsageError("--trials must be at least 1")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    try:
        field = field_make(cfg.field)
        checks = []
        for s in selected_suites(cfg.suite, field):
            checks.extend(suite_checks(s, field, cfg))
    except (FieldSpecError, ClusterError, ComplexFileError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    return field, checks


def run(cfg: RunConfig) -> dict:
    field, checks = build_checks(cfg)
    records = [run_check(name, params, build, field, cfg) for name, params, build in checks]
    counts = {s: sum(r["status"] == s for r in records) for s in ("pass", "degenerate-resampled", "fail", "error")}
    passed = counts["fail"] == 0 and counts["error"] == 0
    config = cfg.to_dict()
    config["field"] = field.describe()
    config["version"] = __version__
    return {
        "config": config,
        "checks": records,
        "summary": {"checks": len(records), **counts, "passed": passed},
    }


def jsonable(x):
    """Ints beyond the 53-bit safe range become decimal strings; numpy scalars become python ones."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        x = int(x)
        return str(x) if abs(x) >= SAFE_INT else x
    return x


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2) + "\n"


def exit_status(report: dict) -> int:
    return 0 if report["summary"]["passed"] else 1


# ---------------------------------------------------------------------------
# argument parsing


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from exc


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hexalab", description="Exact verification of nonconstant hexagon structures.")
    p.add_argument("--version", action="version", version=f"hexalab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite and print a JSON report")
    v.add_argument("suite", help=f"one of {', '.join(SUITES + ['all'])}")
    v.add_argument("--field", default="p=2147483647", help="p=<prime>, gf2=<k> or q (default p=2147483647)")
    v.add_argument("--seed", type=_seed, default=None, help="base seed (default $HEXALAB_SEED, else 0)")
    v.add_argument("--trials", type=int, default=1, help="independent seeds seed, seed+1, ... (default 1)")
    v.add_argument("--cluster", default=None, help="extra pachner check for a cluster, e.g. omit=6,5")
    v.add_argument("--complex", default=None, help="pentachoron list file for the exotic suite")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")
    return p


def config_from_args(args) -> RunConfig:
    seed = args.seed
    if seed is None:
        env = os.environ.get("HEXALAB_SEED")
        try:
            seed = int(env, 0) if env else 0
        except ValueError as exc:
            raise UsageError(f"HEXALAB_SEED is not an integer: {env!r}") from exc
    return RunConfig(args.suite, args.field, seed, args.trials, args.cluster, args.complex, args.out)


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report = run(config_from_args(args))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hexalab: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report["summary"]
    # wall time goes to stderr so the report stays byte-identical across runs
    print(
        f"hexalab: {s['checks']} checks, {s['pass']} pass, {s['degenerate-resampled']} resampled, "
        f"{s['fail']} fail, {s['error']} error in {time.perf_counter() - start:.2f}s",
        file=sys.stderr,
    )
    return exit_status(report)


if __name__ == "__main__":
    sys.exit(main())
