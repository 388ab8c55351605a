"""Compare the compiled and pure-Python Reed-Solomon kernels.

Usage: python3 benchmarks/bench_rs_kernels.py [--blocks N] [--errors E]
"""
import argparse
import time

import numpy as np

from semlink.classic import _rs_py

try:
    from semlink.classic import _rs_core
except ImportError:
    _rs_core = None


def make_blocks(n_blocks, n, k, errors, seed):
    rng = np.random.default_rng(seed)
    msgs = [list(map(int, rng.integers(0, 256, k))) for _ in range(n_blocks)]
    received = []
    for m in msgs:
        cw = m + list(_rs_py.encode_parity(m, n - k))
        for pos in rng.choice(n, size=errors, replace=False):
            cw[pos] ^= int(rng.integers(1, 256))
        received.append(cw)
    return msgs, received


def time_backend(mod, msgs, received, nsym, repeat):
    best_enc = best_dec = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for m in msgs:
            mod.encode_parity(m, nsym)
        best_enc = min(best_enc, time.perf_counter() - t0)
        work = [list(cw) for cw in received]
        t0 = time.perf_counter()
        for cw in work:
            mod.decode(cw, nsym)
        best_dec = min(best_dec, time.perf_counter() - t0)
    return best_enc, best_dec, work


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--blocks", type=int, default=2000)
    p.add_argument("--n", type=int, default=42)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--errors", type=int, default=6)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    msgs, received = make_blocks(args.blocks, args.n, args.k, args.errors, args.seed)
    nsym = args.n - args.k
    backends = [("python", _rs_py)] + ([("cython", _rs_core)] if _rs_core else [])
    results = {}
    for name, mod in backends:
        enc, dec, decoded = time_backend(mod, msgs, received, nsym, args.repeat)
        results[name] = (enc, dec)
        ok = all(cw[:args.k] == m for cw, m in zip(decoded, msgs))
        print(f"{name:7s} encode {1e6 * enc / args.blocks:8.2f} us/block  "
              f"decode {1e6 * dec / args.blocks:8.2f} us/block  correct={ok}")
    if "cython" in results:
        py, cy = results["python"], results["cython"]
        print(f"speedup encode x{py[0] / cy[0]:.1f}  decode x{py[1] / cy[1]:.1f}")
    else:
        print("compiled backend not built; run `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
