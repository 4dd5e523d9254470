"""Throughput comparison of the compiled and pure-numpy kernel backends.

Run:  python3 benchmarks/benchmark_kernels.py [n_pairs]

Spawns one subprocess per backend (the backend is chosen at import time via
EXOSPIN_BACKEND), times kernel_batch for every interaction kind on identical
inputs, and prints pairs/second plus the speedup ratio.
"""

import json
import os
import subprocess
import sys
import time

_WORKER = """
import json, os, sys, time
import numpy as np
from exospin.kernels import BACKEND, PotentialKind, kernel_batch

n = int(sys.argv[1])
rng = np.random.default_rng(12345)
r = rng.uniform(-50e-6, 50e-6, (n, 3)) + np.array([0.0, 0.0, 60e-6])
v = np.array([4.7, 0.0, 0.0])
sigma_nv = np.array([1.0, 0.0, 0.0])
sigma_tm = np.array([0.17, 0.0, 0.98])
out = {"backend": BACKEND, "rates": {}}
for kind in PotentialKind:
    kernel_batch(kind, r, v, sigma_nv, sigma_tm, 5e-6)  # warm up
    reps, t0 = 0, time.perf_counter()
    while time.perf_counter() - t0 < 0.5:
        kernel_batch(kind, r, v, sigma_nv, sigma_tm, 5e-6)
        reps += 1
    out["rates"][kind.name] = reps * n / (time.perf_counter() - t0)
print(json.dumps(out))
"""


def run_backend(name: str, n: int) -> dict:
    env = dict(os.environ, EXOSPIN_BACKEND=name)
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER, str(n)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.splitlines()[-1])


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1 << 20
    results = {name: run_backend(name, n) for name in ("python", "cython")}
    for name, res in results.items():
        if res["backend"] != name:
            raise SystemExit(f"requested backend {name!r} but got {res['backend']!r}")
    print(f"kernel_batch throughput, {n} pairs per call")
    print(f"{'kind':<8} {'python (Mpairs/s)':>18} {'cython (Mpairs/s)':>18} {'speedup':>8}")
    for kind in results["python"]["rates"]:
        py = results["python"]["rates"][kind]
        cy = results["cython"]["rates"][kind]
        print(f"{kind:<8} {py / 1e6:>18.1f} {cy / 1e6:>18.1f} {cy / py:>7.2f}x")


if __name__ == "__main__":
    main()
