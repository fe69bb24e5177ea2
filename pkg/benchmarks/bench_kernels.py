"""Compare the numba and pure-numpy kernel backends.

Two measurements:

* per-kernel call cost on a 4-knot curve (the size every BD computation sees),
  both backends timed in this process;
* end-to-end ``search_paradox`` wall time, each backend in a fresh subprocess
  selected through ``RDAVG_NUMBA`` so import-time backend choice is honoured.

Usage: python3 benchmarks/bench_kernels.py [--calls N] [--trials N]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from rdavg import _kernels

SEARCH_SNIPPET = """
import json, time
from rdavg import _kernels
from rdavg.synthetic import SearchConfig, search_paradox
search_paradox(SearchConfig(trials=20, seed=1))  # warm-up / jit compile
t0 = time.perf_counter()
found = search_paradox(SearchConfig(trials={trials}, seed=42))
print(json.dumps({{"backend": _kernels.BACKEND, "seconds": time.perf_counter() - t0, "found": len(found)}}))
"""


def kernel_calls(k):
    x = np.array([30.0, 32.5, 35.0, 38.0])
    y = np.log10(np.array([0.05, 0.1, 0.2, 0.4]))
    xs = np.linspace(30.5, 37.5, 16)
    m = k.pchip_slopes(x, y)
    breaks, coefs = x, k.hermite_coefs(x, y, m)
    return {
        "pchip_slopes": lambda: k.pchip_slopes(x, y),
        "hermite_coefs": lambda: k.hermite_coefs(x, y, m),
        "poly_solve": lambda: k.poly_solve(x, y),
        "ppoly_eval": lambda: k.ppoly_eval(breaks, coefs, xs),
        "ppoly_integrate": lambda: k.ppoly_integrate(breaks, coefs, 30.5, 37.5),
    }


def bench_kernels(calls):
    backends = {"numpy": _kernels.numpy_kernels}
    if _kernels.numba_kernels is not None:
        backends["numba"] = _kernels.numba_kernels
    rows = {}
    for name, k in backends.items():
        fns = kernel_calls(k)
        for fn in fns.values():
            fn()  # compile
        for kernel, fn in fns.items():
            rows.setdefault(kernel, {})[name] = min(timeit.repeat(fn, number=calls, repeat=3)) / calls * 1e6
    return rows


def bench_search(trials):
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, RDAVG_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-c", SEARCH_SNIPPET.format(trials=trials)],
            env=env, capture_output=True, text=True, check=True,
        )
        res = json.loads(proc.stdout.strip().splitlines()[-1])
        out[res["backend"]] = res
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--calls", type=int, default=20_000)
    p.add_argument("--trials", type=int, default=2_000)
    args = p.parse_args(argv)

    print(f"kernel cost per call, microseconds ({args.calls} calls, best of 3)")
    print(f"{'kernel':<18}{'numpy':>10}{'numba':>10}{'speedup':>10}")
    for kernel, t in bench_kernels(args.calls).items():
        nb = t.get("numba", float("nan"))
        print(f"{kernel:<18}{t['numpy']:>10.2f}{nb:>10.2f}{t['numpy'] / nb:>9.1f}x")

    print(f"\nsearch_paradox, {args.trials} trials (seed 42)")
    res = bench_search(args.trials)
    for name, r in res.items():
        print(f"{name:<8}{r['seconds']:>8.2f} s  {args.trials / r['seconds']:>8.0f} trials/s  found={r['found']}")
    if len(res) == 2 and res["numpy"]["found"] != res["numba"]["found"]:
        print("warning: backends disagree on the number of instances", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
