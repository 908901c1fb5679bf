#!/usr/bin/env python3
"""Compare the pure-Python and compiled sparse-series kernels.

The hot loops of the whole pipeline are the three dictionary kernels
(multiply, scaled add, p-power map).  This script times both backends
on deterministic workloads shaped like the real expansions (a few
hundred scattered exponents, full-range coefficients) and checks that
they produce identical dictionaries before timing anything.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --terms 2000 --rounds 7
"""

import argparse
import sys
import time

from astower import _kernel_py
from astower.ff import make_field
from astower.rng import SplitMix64

try:
    from astower import _kernel
except ImportError:
    _kernel = None


def sparse_dict(gen: SplitMix64, q: int, terms: int, span: int) -> dict:
    out = {}
    while len(out) < terms:
        e = gen.randbelow(span) - span // 2
        out[e] = 1 + gen.randbelow(q - 1)
    return out


def best_time(fn, args, rounds: int) -> float:
    best = float("inf")
    for _ in range(rounds):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--terms", type=int, default=600,
                        help="terms per operand (default 600)")
    parser.add_argument("--rounds", type=int, default=5,
                        help="timing rounds, best is kept (default 5)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _kernel is None:
        print("compiled kernel not built; timing the pure backend only",
              file=sys.stderr)

    header = f"{'kernel':<14} {'field':<8} {'pure ms':>9} {'compiled ms':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for p, n in ((3, 3), (5, 3), (3, 5)):
        ctx = make_field(p, n)
        gen = SplitMix64(args.seed + p * 1000 + n)
        a = sparse_dict(gen, ctx.q, args.terms, 20 * args.terms)
        b = sparse_dict(gen, ctx.q, args.terms, 20 * args.terms)
        scalar = 1 + gen.randbelow(ctx.q - 1)
        kargs = ctx.kernel_args
        cases = [
            ("lp_mul", (a, b) + kargs),
            ("lp_add_scaled", (a, b, scalar) + kargs),
            ("lp_map_pow", (a, p, ctx.FROB[1])),
        ]
        for name, call_args in cases:
            pure_fn = getattr(_kernel_py, name)
            pure_out = pure_fn(*call_args)
            pure_t = best_time(pure_fn, call_args, args.rounds)
            if _kernel is not None:
                comp_fn = getattr(_kernel, name)
                comp_out = comp_fn(*call_args)
                if comp_out != pure_out:
                    print(f"BACKEND MISMATCH in {name} over F_{ctx.q}",
                          file=sys.stderr)
                    return 1
                comp_t = best_time(comp_fn, call_args, args.rounds)
                ratio = f"{pure_t / comp_t:7.2f}x" if comp_t else "n/a"
                print(f"{name:<14} F_{ctx.q:<6} {pure_t * 1e3:9.3f} "
                      f"{comp_t * 1e3:12.3f} {ratio:>8}")
            else:
                print(f"{name:<14} F_{ctx.q:<6} {pure_t * 1e3:9.3f} "
                      f"{'-':>12} {'-':>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
