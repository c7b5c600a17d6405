"""Regenerate pilot/calibration.json: measurements behind the calibrated thresholds."""

import json
import math
import statistics
import sys
import time
from pathlib import Path

from equisep.convexity import convex_number
from equisep.generators import gen_random, gen_theorem32
from equisep.stabbing import low_stab_spanning_tree, tree_stab

OUT = Path(__file__).with_name("calibration.json")


def theorem32_rows(ms):
    rows = []
    for M in ms:
        t0 = time.perf_counter()
        inst = gen_theorem32(M)
        con = convex_number(inst.points).value
        rows.append(
            {
                "M": M,
                "N": inst.points.n,
                "convex_number": con,
                "convex_over_M": con / M,
                "t": str(inst.params.t),
                "vertices": inst.curve.n,
                **inst.certificates,
                "seconds": round(time.perf_counter() - t0, 1),
            }
        )
        print(rows[-1], file=sys.stderr)
    return rows


def tree_rows(ns, seeds, max_test_lines):
    rows = []
    for N in ns:
        stabs = []
        for seed in range(seeds):
            ps = gen_random(N, seed)
            stabs.append(tree_stab(low_stab_spanning_tree(ps, max_test_lines=max_test_lines), ps).value)
        rows.append(
            {
                "N": N,
                "max_test_lines": max_test_lines,
                "seeds": seeds,
                "mean_stab_over_sqrtN": round(statistics.mean(stabs) / math.sqrt(N), 4),
                "max_stab": max(stabs),
                "max_stab_over_sqrtN": round(max(stabs) / math.sqrt(N), 4),
            }
        )
        print(rows[-1], file=sys.stderr)
    return rows


def main():
    data = {
        "thresholds": {
            "theorem32_convex_number_per_M": 4,
            "tree_stab_per_sqrtN": 6,
        },
        "theorem32": theorem32_rows([2, 3, 4, 5]),
        "tree": tree_rows([64, 256], 20, 1024) + tree_rows([64, 256], 20, 4096),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
