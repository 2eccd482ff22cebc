"""Time the hot kernels with numba and with the pure-Python fallback.

Each path runs in its own interpreter because the choice is fixed at import
time by ``WLSURV_DISABLE_JIT``.  Compilation (or cache loading) is excluded
by a warm-up call.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
from wlsurv import _jit
from wlsurv.censoring import load_bundled
from wlsurv.likelihood import make_context, loglik_and_score
from wlsurv.special import log_upper_inc_gamma, psi_integral
from wlsurv.estimation import fit
from wlsurv.montecarlo import StudyConfig, run_study

repeat = int(sys.argv[1])
rats = make_context(load_bundled("rats"))
cases = {
    "log_upper_inc_gamma(2.5, 4.0)": (lambda: log_upper_inc_gamma(2.5, 4.0), 2000),
    "psi_integral(2.5, 4.0)": (lambda: psi_integral(2.5, 4.0), 200),
    "loglik+score, rats": (lambda: loglik_and_score((0.1, 20.0), rats), 200),
    "fit WL, rats": (lambda: fit(rats), 5),
    "study n=50 random N=20": (lambda: run_study(StudyConfig((2.0, 0.5), 50, "random", p_target=0.2,
                                                             replicates=20, seed=1), workers=1), 1),
}
out = {"numba": _jit.NUMBA_ENABLED}
for name, (fn, number) in cases.items():
    fn()  # warm-up: compile or load cache
    best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
    out[name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, WLSURV_DISABLE_JIT="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    jit = run(False, args.repeat)
    plain = run(True, args.repeat)
    if not jit.pop("numba"):
        print("warning: numba unavailable, both columns use the fallback", file=sys.stderr)
    plain.pop("numba")
    width = max(map(len, jit))
    print(f"{'kernel':<{width}}  {'numba':>12}  {'fallback':>12}  {'speed-up':>8}")
    for name in jit:
        a, b = jit[name], plain[name]
        print(f"{name:<{width}}  {a * 1e6:>10.1f}us  {b * 1e6:>10.1f}us  {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
