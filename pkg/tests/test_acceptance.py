"""One test per acceptance criterion; each prints a PASS/FAIL line (collected in the terminal summary)."""

from itertools import combinations, product

import numpy as np
import pytest
from conftest import record

from hexalab import cli
from hexalab.cli import RunConfig, run_check
from hexalab.exactfield import field_make
from hexalab.simplicial import Cluster, pentachora

BIG = "p=2147483647"
FIELDS = ["p=3", "p=7", BIG, "gf2=16"]


def checks(build, field=BIG, trials=5, seed=0, name="check"):
    cfg = RunConfig("acceptance", field, seed, trials)
    return run_check(name, {}, build, field_make(field), cfg)


def strict(rec):
    # over the large prime no resampling is expected
    return rec["status"] == "pass"


def settled(rec):
    return rec["status"] in ("pass", "degenerate-resampled")


def data(rec):
    return [t["data"] for t in rec["trials"]]


def test_criterion_01_pentachoron_dimension():
    rec = checks(cli.check_dims_generic)
    dims = {d for t in data(rec) for d in t["dims"].values()} if settled(rec) else set()
    ok = strict(rec) and dims == {5}
    record(1, ok, f"dim V_u over all six pentachora, 5 seeds: {sorted(dims)}")
    assert ok


def test_criterion_02_cluster_dimensions():
    gen = checks(cli.check_hexagon_generic)
    inf = checks(cli.check_hexagon_infinitesimal)
    ok = strict(gen) and strict(inf)
    if ok:
        for t in data(gen) + data(inf):
            ok &= t["boundary_dims"]["2"] == [8] and t["boundary_dims"]["3"] == [9]
            ok &= t["fiber_table"] == {"1": 0, "2": 0, "3": 0, "4": 1, "5": 4}
    record(2, ok, "boundary dims 8 and 9, fibers (0,0,0,1,4), generic and infinitesimal, 5 seeds")
    assert ok


def test_criterion_03_full_hexagon():
    rec = checks(cli.check_hexagon_generic, seed=100)
    ok = strict(rec)
    for t in data(rec):
        ok &= len(t["splittings"]) == 31 and all(s["passed"] for s in t["splittings"])
        ok &= t["delta5_dim"] == 9
    record(3, ok, "31 splittings satisfy both conditions, dim V = 9")
    assert ok


def test_criterion_04_inner_cancellation():
    rec = checks(cli.check_inner_cancellation)
    ok = strict(rec) and all(not t[f]["failures"] and t[f]["clusters"] == 62 for t in data(rec) for f in t)
    record(4, ok, "inner components cancel and boundary relations hold on all 62 clusters, both families")
    assert ok


def test_criterion_05_five_term_complex():
    rec = checks(cli.check_exotic_pentachoron)
    ok = strict(rec) and all(t["ranks"] == [5, 5, 5, 5] and t["profile"]["homology"] == [0] * 5 for t in data(rec))
    record(5, ok, "compositions zero, dims (5,10,10,10,5), ranks (5,5,5,5), acyclic")
    assert ok


def test_criterion_06_general_complex():
    one = checks(cli.check_exotic_general(Cluster(((1, 2, 3, 4, 5),)), "12345"))
    whole = checks(cli.check_exotic_general(Cluster(tuple(pentachora())), "delta5"))
    ok = strict(one) and strict(whole)
    profiles = sorted({str(t["profile"]["homology"]) for t in data(whole)}) if ok else []
    record(6, ok, f"spans dim 5, Euler identity holds; boundary homology {', '.join(profiles)}")
    assert ok


def test_criterion_07_three_cocycle():
    results = {f: checks(cli.check_z3_sum, field=f) for f in FIELDS}
    ok = all(settled(r) for r in results.values()) and strict(results[BIG])
    summary = ", ".join(f"{f}: {r['status']}" for f, r in results.items())
    record(7, ok, f"signed z3 sum vanishes and z3 in ker delta3; {summary}")
    assert ok


def test_criterion_08_cochain_dims():
    rec = checks(cli.check_cohomology)
    ok = strict(rec)
    obs = set()
    for t in data(rec):
        ok &= t["cochain_dims"] == [45, 90, 45] and t["rank_delta3"] <= 44
        ok &= t["dim_H3"] >= 1 and t["dim_H4"] >= 1
        obs.add((t["rank_delta3"], t["dim_H3"], t["dim_H4"]))
    record(8, ok, f"dims (45,90,45); observed (rank delta3, H3, H4) = {sorted(obs)}")
    assert ok


def no_general_position_over_f3_on_one_pentachoron() -> int:
    """Count b in F_3^10 on pentachoron 12345 with every omega and every d_t nonzero."""
    u = (1, 2, 3, 4, 5)
    edges = list(combinations(u, 2))
    b = np.array(list(product(range(3), repeat=10)), dtype=np.int64).T
    col = {e: b[i] for i, e in enumerate(edges)}
    w = {(i, j, k): (col[(i, j)] - col[(i, k)] + col[(j, k)]) % 3 for i, j, k in combinations(u, 3)}
    ok = np.ones(b.shape[1], dtype=bool)
    for v in w.values():
        ok &= v != 0
    for i, j, k, l in combinations(u, 4):
        ok &= (w[(j, k, l)] - w[(i, k, l)]) % 3 != 0
    return int(ok.sum())


@pytest.mark.xfail(
    strict=True,
    reason="over F_3 no 1-cochain is in general position (exhaustive over 3^10 on one pentachoron); "
    "over GF(2^16) the lifted limit cocycle lies in the elementary span",
)
def test_criterion_09_limit_cocycle():
    results = {f: checks(cli.check_limit_cocycle, field=f, trials=2) for f in FIELDS}
    f3_count = no_general_position_over_f3_on_one_pentachoron()
    ok = all(settled(r) for r in results.values())
    parts = []
    for f, r in results.items():
        if r["status"] == "error":
            parts.append(f"{f}: error")
            continue
        d = r["trials"][0].get("data", {})
        parts.append(f"{f}: {r['status']} (rank {d.get('elementary_rank')}->{d.get('rank_with_z4')})")
    record(9, ok, "; ".join(parts) + f"; general-position b over F_3 on 12345: {f3_count} of 59049")
    # the two odd large-field cases must hold regardless
    assert settled(results[BIG]) and settled(results["p=7"])
    assert f3_count == 0
    assert ok


def test_criterion_10_zeta():
    rec = checks(cli.check_zeta, field="gf2=16")
    ok = settled(rec) and all(
        t["six_term_sum_vanishes"] and t["nontrivial_on_12345"] and t["in_ker_delta4"] for t in data(rec)
    )
    jumps = sorted({t["zeta_minus_z4_rank_jump"] for t in data(rec)}) if settled(rec) else []
    record(10, ok, f"six-term sum vanishes, nontrivial on 12345 over GF(2^16); zeta - z4 rank jump {jumps}")
    assert ok


def test_criterion_11_isotropy():
    rec = checks(cli.check_isotropy)
    ok = strict(rec) and all(all(t["isotropic"].values()) and t["maximal"] for t in data(rec))
    record(11, ok, "scalar product vanishes on V_u x V_u for all six pentachora, dim 5 (maximal)")
    assert ok


def test_criterion_12_determinism(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code = cli.main(["verify", "all", "--seed", "42", "--out", str(path)])
        outs.append((code, path.read_bytes()))
    ok = outs[0] == outs[1] and outs[0][0] == 0
    record(12, ok, "two runs of `verify all --seed 42` give byte-identical reports")
    assert ok


def test_criterion_13_psi_phi_duality():
    rec = checks(cli.check_psi_phi)
    ok = strict(rec) and all(all(t.values()) for t in data(rec))
    record(13, ok, "psi-phi identity per tetrahedron, psi spans V_u, eps- and b-relations, 5 seeds")
    assert ok
