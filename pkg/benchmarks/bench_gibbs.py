"""Benchmark the jitted Gibbs kernels against the pure-Python fallback.

Runs the same seeded chain through both backends in-process (the compiled
functions and their undecorated sources are both importable) and reports
per-sweep wall time. The two paths are bit-identical; only speed differs.

Usage: python benchmarks/bench_gibbs.py [--docs 300] [--T 8] [--sweeps 20]
"""

import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from trait.backend import NUMBA_ACTIVE  # noqa: E402
from trait.sampler import kernels  # noqa: E402
from trait.sampler.gibbs import gibbs_sweep  # noqa: E402
from trait.sampler.hyper import Hyperparams  # noqa: E402
from trait.sampler.state import init_state  # noqa: E402
from trait.sampler.synthetic import SyntheticSpec, generate_synthetic  # noqa: E402


def build_state(docs, T, seed):
    spec = SyntheticSpec(n_docs=docs, T=T, S=2, vocab_size=200,
                         sentences_per_doc=(6, 10), tokens_per_sentence=(6, 10))
    corpus, _ = generate_synthetic(spec, seed=seed)
    hyper = Hyperparams(T=T, S=2, epsilon=0.0, lam=0.0, seed=seed,
                        iterations=0, burn_in=0,
                        alpha=np.full((2, len(corpus.vocabulary)), 0.05))
    return corpus, init_state(corpus, None, None, hyper)


def time_sweeps(state, sweeps):
    gibbs_sweep(state)  # warm-up (includes JIT compilation when active)
    start = time.perf_counter()
    for _ in range(sweeps):
        gibbs_sweep(state)
    return (time.perf_counter() - start) / sweeps


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=300)
    parser.add_argument("--T", type=int, default=8)
    parser.add_argument("--sweeps", type=int, default=20)
    args = parser.parse_args(argv)

    corpus, state = build_state(args.docs, args.T, seed=0)
    n = corpus.n_sentences
    print(f"corpus: {args.docs} docs, {n} sentences, T={args.T}")

    if not NUMBA_ACTIVE:
        per = time_sweeps(state, args.sweeps)
        print(f"pure-python path: {per * 1e3:.1f} ms/sweep "
              f"({n / per:.0f} sentences/s)")
        print("numba unavailable or disabled; set TRAIT_NO_NUMBA=0 and install "
              "numba to compare")
        return 0

    jitted = time_sweeps(state, args.sweeps)
    print(f"numba path:       {jitted * 1e3:8.2f} ms/sweep "
          f"({n / jitted:,.0f} sentences/s)")

    # swap in the undecorated kernels for the fallback measurement
    originals = {}
    for name in ("apply_sentence", "conditional_matrix", "pick_cell",
                 "gibbs_sweep_kernel", "foldin_sweep_kernel", "rebuild_tables",
                 "mrf_agreement"):
        fn = getattr(kernels, name)
        originals[name] = fn
        setattr(kernels, name, getattr(fn, "py_func", fn))
    try:
        _, plain_state = build_state(args.docs, args.T, seed=0)
        plain = time_sweeps(plain_state, max(args.sweeps // 10, 1))
    finally:
        for name, fn in originals.items():
            setattr(kernels, name, fn)

    print(f"pure-python path: {plain * 1e3:8.2f} ms/sweep "
          f"({n / plain:,.0f} sentences/s)")
    print(f"speedup: {plain / jitted:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
