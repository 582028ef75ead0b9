"""Quick end-to-end check of the ibsaea Python module.

Build and install first:  pip install --no-build-isolation .
"""

import json
import math
import random
import tempfile
from pathlib import Path

import ibsaea


def main():
    assert "sphere" in ibsaea.benchmarks()
    assert ibsaea.base_value("sphere", [1.0, 2.0]) == 5.0

    p = ibsaea.Problem("rastrigin", 3, seed=7)
    assert abs(p.evaluate(p.shift)) < 1e-12
    assert len(p.lower) == 3

    score = ibsaea.ucb_tuned_score([0.5, 0.7], 4)
    assert abs(score - (0.6 + math.sqrt(math.log(4) / 8))) < 1e-12

    steps = ibsaea.bandit_sim([0.2, 0.8], 500, policy="ucb-t", seed=1)
    assert len(steps) == 500
    assert steps[-1][3] >= 0.0

    rng = random.Random(0)
    sphere = ibsaea.Problem("sphere", 2, seed=1)
    pts = [[rng.uniform(lo, hi) for lo, hi in zip(sphere.lower, sphere.upper)] for _ in range(12)]
    vals = [sphere.evaluate(x) for x in pts]
    gp = ibsaea.GaussianProcess(sphere, pts, vals)
    rbf = ibsaea.Rbf(sphere, pts, vals)
    for x, y in zip(pts, vals):
        mean, var = gp.predict(x)
        assert abs(mean - y) <= 1e-6 * (1 + abs(y)), (mean, y)
        assert var >= 0.0
        assert abs(rbf.predict(x) - y) <= 1e-6 * (1 + abs(y))
    assert gp.lcb(pts[0], 2.0) <= gp.predict(pts[0])[0]

    r = ibsaea.run("ucb", "sphere", 2, trial=0)
    assert (r.init_evaluations, r.evaluations) == (4, 10)
    assert r.selections and r.selections[0][2] is not None
    assert r.final_best == r.best_so_far[-1]
    assert all(b <= a for a, b in zip(r.best_so_far, r.best_so_far[1:]))

    stat, pval, verdict = ibsaea.wilcoxon_rank_sum([1, 2, 3, 4], [5, 6, 7, 8])
    assert verdict == "win" and 0 < pval < 0.05, (stat, pval, verdict)
    assert ibsaea.pairwise_outperform([1, 2], [3, 4]) == 1.0
    assert ibsaea.mid_ranks([3.0, 1.0, 3.0]) == [2.5, 1.0, 2.5]

    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "config.json"
        cfg.write_text(json.dumps({
            "frameworks": ["ucb", "par"],
            "problems": [{"benchmark": "sphere", "dimension": 2}],
            "trials": 3,
        }))
        out = Path(tmp) / "runs"
        runs = ibsaea.run_experiment(str(cfg), str(out))
        assert len(runs) == 6
        assert len(ibsaea.load_results(str(out))) == 6
        text = ibsaea.analyze(str(out), ["ucb"], 0.05)
        assert "Average ranking" in text

    try:
        ibsaea.Problem("nope", 2)
    except KeyError:
        pass
    else:
        raise AssertionError("unknown benchmark accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
