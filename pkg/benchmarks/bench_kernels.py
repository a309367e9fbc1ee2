"""Time the hot kernels with numba and with the pure-numpy fallback.

The backend is fixed at import time, so each one runs in its own interpreter.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from mobitube import backend_name, circle, trefoil, Tube
from mobitube.contact import far_scan
from mobitube.energy import EnergyParams, energy, ohara_energy

repeat = int(sys.argv[1])
cases = {
    "energy trefoil 96x32": lambda: energy(Tube(trefoil(), 0.2), EnergyParams(grid=(96, 32))),
    "energy torus 48x48": lambda: energy(Tube(circle(2.0), 0.5), EnergyParams(grid=(48, 48))),
    "far scan trefoil 64x32": lambda: far_scan(Tube(trefoil(), 0.3), 64, 32),
    "ohara trefoil 2048": lambda: ohara_energy(trefoil(), grid=2048),
}
out = {"backend": backend_name(), "times": {}}
for name, fn in cases.items():
    fn()  # warm up (compilation, cached tables)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["times"][name] = best
print(json.dumps(out))
"""


def run(no_numba, repeat):
    env = dict(os.environ)
    env.pop("MOBITUBE_NO_NUMBA", None)
    if no_numba:
        env["MOBITUBE_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)],
                         env=env, capture_output=True, text=True, check=False)
    if res.returncode:
        sys.exit(res.stderr)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    if fast["backend"] != "numba":
        print("numba is not available; only the numpy timings are meaningful")
    print(f"{'case':28s} {fast['backend']:>10s} {slow['backend']:>10s} {'speedup':>8s}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:28s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
