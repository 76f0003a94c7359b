#!/usr/bin/env python3
"""Smoke test for the qlnc_py extension module.

Builds nothing itself: run `cargo build -p qlnc-py` first, then
`python3 python/smoke_test.py`. The script locates the compiled cdylib,
exposes it under the importable name, and exercises the main entry points.
"""

import math
import os
import shutil
import sys
import tempfile

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_module():
    candidates = [
        os.path.join(REPO, "target", profile, "libqlnc_py.so")
        for profile in ("release", "debug")
    ]
    lib = next((c for c in candidates if os.path.exists(c)), None)
    if lib is None:
        sys.exit("libqlnc_py.so not found; run `cargo build -p qlnc-py` first")
    stage = tempfile.mkdtemp(prefix="qlnc_py_")
    shutil.copy(lib, os.path.join(stage, "qlnc_py.so"))
    sys.path.insert(0, stage)
    import qlnc_py

    return qlnc_py


def main():
    q = load_module()
    print(f"qlnc_py {q.__version__}")

    topo = q.Topology.load(os.path.join(REPO, "topologies", "diamond.toml"))
    assert topo.validate() == [], topo.validate()
    assert topo.node_count() == 4
    assert topo.precision() == 2
    print(f"loaded {topo!r}, precision n = {topo.precision()}")

    # modulator and quantizer hand examples
    re, im = q.encode_symbol([1, 0, 0, 1])
    assert math.isclose(re, 0.5 / math.sqrt(2), rel_tol=1e-12)
    assert math.isclose(im, 0.25 / math.sqrt(2), rel_tol=1e-12)
    assert q.quantize(6.7, -3.2, 2) == [0, 1, 1, 1]
    assert q.quantize(5.9, 0.3, 1) == [1, 0]
    print("encode/quantize hand examples OK")

    # transition law normalizes
    law = q.transition_law(topo, 3, tuples=[[0, 1, 1, 0], [1, 0, 0, 1]])
    assert len(law) == 16
    assert math.isclose(sum(law), 1.0, abs_tol=1e-9)
    print("transition law normalizes OK")

    # cut-set bound: data processing holds per cut
    report = q.cutset(topo, mode="both", mc_samples=2000, seed=7)
    assert len(report["rows"]) == 4
    for row in report["rows"]:
        width = row["discrete_ci"] or 0.0
        assert row["discrete_bits"] <= row["gaussian_bits"] + width + 1e-9, row
    assert report["discrete_min"] <= report["gaussian_min"] + 1e-9
    print(
        "cutset OK: CS_G = {:.3f}, CS_D = {:.3f}".format(
            report["gaussian_min"], report["discrete_min"]
        )
    )

    # short sweep: precision column tracks the scaling
    rows = q.sweep(topo, 0, 2, mc_samples=2000, seed=7)
    assert [r["n"] for r in rows] == [2, 3, 4]
    print("sweep OK:", [(r["k"], round(r["gap_bits"], 2)) for r in rows])

    # multicast equals the minimum over destinations
    multi = q.Topology.load(os.path.join(REPO, "topologies", "two_destinations.toml"))
    m = q.multicast(multi, mode="gaussian")
    per_dest = [d["gaussian_min"] for d in m["per_destination"]]
    assert m["gaussian_bits"] == min(per_dest)
    print("multicast OK:", m["gaussian_bits"])

    # a trivial-codebook simulation never errs under exact ML, and the same
    # seed reproduces byte-identical results
    small = q.Topology.load(os.path.join(REPO, "topologies", "diamond_small.toml"))
    r1 = q.simulate(small, block_len=2, msg_bits=0, trials=25, seed=11)
    assert r1["errors"] == 0 and r1["bler"] == 0.0
    r2 = q.simulate(small, block_len=2, msg_bits=1, trials=40, seed=12)
    r3 = q.simulate(small, block_len=2, msg_bits=1, trials=40, seed=12)
    assert r2 == r3
    print("simulate OK: B=0 bler=0, seeded runs reproducible")

    print("smoke test passed")


if __name__ == "__main__":
    main()
