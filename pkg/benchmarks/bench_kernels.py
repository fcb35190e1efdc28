"""Time the compiled integrator against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each variant runs in its own interpreter because the backend is chosen at
import time from VORWAVE_NO_NUMBA. Compilation is excluded by a warm-up call.
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = """
import json, sys, time
import numpy as np
from vorwave import _jit
from vorwave.vorticity import make_spec
from vorwave.stream import build_stream_solution, depth_sequences
from vorwave.dispersion import sigma_eval

repeat = int(sys.argv[1])
spec = make_spec({"kind": "linear", "b": 1.0})
st = build_stream_solution(spec, 2.0, "0-", n_samples=9)
sigma_eval(st, 0.5)
taus = np.linspace(0.1, 20.0, repeat)
t = time.perf_counter()
for tau in taus:
    sigma_eval(st, float(tau))
t_sigma = time.perf_counter() - t
poly = make_spec({"kind": "polynomial", "coeffs": [0.1, 1.2, -0.4]})
depth_sequences(poly, 1.3, j_max=2)
t = time.perf_counter()
for s in np.linspace(1.3, 3.0, max(2, repeat // 20)):
    depth_sequences(poly, float(s), j_max=2)
t_depth = time.perf_counter() - t
print(json.dumps({"numba": _jit.NUMBA_ENABLED, "sigma_eval": t_sigma, "depth_sequences": t_depth}))
"""


def run(no_numba, repeat):
    env = dict(os.environ)
    env.pop("VORWAVE_NO_NUMBA", None)
    if no_numba:
        env["VORWAVE_NO_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=100, help="sigma evaluations per variant")
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    print(f"{'task':<18}{'numba [s]':>12}{'python [s]':>12}{'speedup':>10}")
    for key in ("sigma_eval", "depth_sequences"):
        print(f"{key:<18}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>10.1f}")
    if not fast["numba"]:
        print("warning: numba is not importable, both runs used the fallback")


if __name__ == "__main__":
    main()
