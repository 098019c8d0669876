"""Smoke test for the pygrnpdmp extension.

Build and install first:
    pip install --no-build-isolation -e crates/py
Then run:
    python python/smoke_test.py
"""

import json
import math
import pathlib
import tempfile

import pygrnpdmp as g

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    net = g.Network.load(str(ROOT / "crates/core/configs/toggle_weak.json"))
    assert net.n == 2
    c = net.constants()
    assert c.r > 0 and c.rho > 0 and c.is_dissipative()
    assert c.bound_p(0.0, 1.0) >= 1.0
    assert c.bound_p(5.0, 1.0) < c.bound_p(0.0, 1.0)
    k = net.kon([0.0, 0.0])
    assert len(k) == 2 and all(0.0 < v for v in k)
    assert g.Network.from_json(net.to_json()).n == 2

    times = [0.0, 1.0, 2.0]
    tr = g.simulate_protein(net, [0.0, 0.0], 2.0, seed=1, sample_times=times)
    assert len(tr.samples) == 3 and tr.bursts >= 0
    again = g.simulate_protein(net, [0.0, 0.0], 2.0, seed=1, sample_times=times)
    assert again.terminal == tr.terminal

    mp = g.simulate_mrna_protein(net, [0.0] * 4, 2.0, seed=2)
    assert len(mp.terminal) == 4

    run = g.couple(net, [0.0, 0.0], [3.0, 3.0], 5.0, seed=3)
    assert run.violations == 0
    gap = math.dist(run.first, run.second)
    assert gap <= run.u * math.sqrt(2) + 1e-9

    ps = g.p_star(1.0, 1.0, 1.0, 1.0)
    assert 0.0 < ps <= g.p_infinite(1.0, 1.0, 1.0, 1.0) <= 1.0
    s = g.waiting_cdf_finite(1.0, 1.0, 1.0, 0.7, 1.0)
    assert abs(g.invert_waiting_cdf(1.0, 1.0, 1.0, s, 1.0) - 0.7) < 1e-9

    a = g.companion_samples(1.0, 1.0, 1.0, 1.0, 2.0, 2000, seed=4)
    b = g.companion_samples(1.0, 1.0, 1.0, 1.0, 2.0, 2000, seed=5, method="thinning")
    d, crit, passes = g.ks_two_sample(a, b)
    assert passes, (d, crit)

    pts = [[0.0, 0.0], [1.0, 1.0]]
    assert abs(g.empirical_w1_exact(pts, [[0.0, 1.0], [1.0, 2.0]]) - 1.0) < 1e-12
    assert g.w1_lower_marginals(pts, pts) == 0.0

    with tempfile.TemporaryDirectory() as out:
        manifest = json.loads(g.run_command("bounds", out, seed=0,
                                            config=str(ROOT / "crates/core/configs/toggle_weak.json")))
        assert manifest["outputs"], manifest
        assert (pathlib.Path(out) / "manifest.json").exists()

    print("pygrnpdmp", g.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
