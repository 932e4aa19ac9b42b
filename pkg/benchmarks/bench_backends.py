"""Compare the compiled kernels, the numpy fallback, and per-game evaluation.

The axiom suite spends essentially all of its time evaluating value rules
over many small games, so the batch kernels are the only hot path worth
compiling. This script times the three routes on identical inputs and
confirms they agree.

Run:  python benchmarks/bench_backends.py [--games 200000] [--dim 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qdlab._kernels import _fallback
from qdlab.games import (
    BornValue,
    DeterministicValue,
    FMeanValue,
    QuantumGame,
    UniformSupportValue,
    exponential_transform,
)
from qdlab.hilbert import OrthonormalBasis, derive_rng, haar_state_batch

try:
    from qdlab._kernels import _core
except ImportError:
    _core = None


def _time(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", type=int, default=200_000)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--loop-games", type=int, default=5_000,
                        help="games for the per-object loop (kept small; it is slow)")
    args = parser.parse_args()

    rng = derive_rng(0, "bench")
    amps = haar_state_batch(args.games, args.dim, rng)
    utils = rng.uniform(-10.0, 10.0, (args.games, args.dim))
    probs = np.ascontiguousarray(np.abs(amps) ** 2)
    mods = np.ascontiguousarray(np.abs(amps))
    cutils = np.ascontiguousarray(utils)

    functionals = [
        ("born", BornValue()),
        ("uniform", UniformSupportValue()),
        ("deterministic", DeterministicValue()),
        ("fmean-exp", FMeanValue(exponential_transform(1.0))),
    ]

    kernel_calls = {
        "born": lambda impl: impl.born_values(probs, cutils),
        "uniform": lambda impl: impl.uniform_support_values(mods, cutils, 1e-9),
        "deterministic": lambda impl: impl.deterministic_values(mods, cutils, 1e-9),
        "fmean-exp": lambda impl: impl.fmean_values(
            probs, cutils, _fallback.TRANSFORM_EXPONENTIAL, 1.0
        ),
    }

    basis = OrthonormalBasis.computational(args.dim)
    n_loop = min(args.loop_games, args.games)

    print(f"{args.games} games, dim={args.dim} "
          f"(per-game loop uses {n_loop} games, scaled)\n")
    header = f"{'rule':<14}{'compiled':>12}{'numpy':>12}{'per-game':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, functional in functionals:
        call = kernel_calls[name]
        t_numpy = _time(lambda: call(_fallback))
        if _core is not None:
            t_compiled = _time(lambda: call(_core))
            agree = np.allclose(call(_core), call(_fallback), rtol=1e-12, atol=1e-12)
        else:
            t_compiled, agree = float("nan"), True

        def loop():
            for i in range(n_loop):
                functional.evaluate(QuantumGame(basis, utils[i], amps[i]))

        t_loop = _time(loop, repeats=2) * (args.games / n_loop)
        speed = t_loop / t_compiled if _core is not None else t_loop / t_numpy
        flag = "" if agree else "  DISAGREE"
        print(f"{name:<14}{t_compiled:>11.4f}s{t_numpy:>11.4f}s{t_loop:>11.2f}s"
              f"{speed:>9.0f}x{flag}")
    if _core is None:
        print("\ncompiled core not built; compiled column is n/a")


if __name__ == "__main__":
    main()
