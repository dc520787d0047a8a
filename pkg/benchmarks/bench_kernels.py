#!/usr/bin/env python3
"""Compare the numba kernel with the pure-python fallback.

The backend is fixed at import time by ZENO_KERNEL, so each backend runs in
its own subprocess.  Both must return identical verdicts.

    python3 benchmarks/bench_kernels.py [--steps 200000]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r'''
import json, sys, time
from zeno import _kernels, gallery
from zeno.engine import RunBudget, TuringMachine, run
from zeno.tmc import compile_program, corpus_twin_prime

steps = int(sys.argv[1])
_kernels.warm_up()
cases = [("work-marcher", gallery.load("work-marcher"), ""),
         ("bounce", gallery.load("bounce"), ""),
         ("counter", gallery.load("counter"), ""),
         ("twin-prime (compiled)", compile_program(corpus_twin_prime()), "")]
out = []
for name, desc, word in cases:
    m = TuringMachine(desc)
    t = time.perf_counter()
    v = run(m, word, RunBudget(steps, 10_000))
    dt = time.perf_counter() - t
    out.append({"case": name, "seconds": dt, "verdict": repr(v)})
print(json.dumps({"backend": _kernels.BACKEND, "cases": out}))
'''


def measure(backend: str, steps: int) -> dict:
    env = dict(os.environ, ZENO_KERNEL=backend)
    res = subprocess.run([sys.executable, "-c", WORKER, str(steps)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    args = ap.parse_args()
    results = {b: measure(b, args.steps) for b in ("numba", "python")}
    fast, slow = results["numba"], results["python"]
    print(f"{'case':<24}{'numba s':>10}{'python s':>10}{'speedup':>10}  same verdict")
    for a, b in zip(fast["cases"], slow["cases"]):
        same = a["verdict"] == b["verdict"]
        print(f"{a['case']:<24}{a['seconds']:>10.4f}{b['seconds']:>10.4f}"
              f"{b['seconds'] / max(a['seconds'], 1e-9):>10.1f}  {same}")
        if not same:
            print(f"  numba:  {a['verdict']}\n  python: {b['verdict']}")
            sys.exit(1)
    if fast["backend"] != "numba":
        print("note: numba is not importable here; both runs used the fallback")


if __name__ == "__main__":
    main()
