"""Compare the compiled and numpy kernel backends on the hot paths.

    python3 benchmarks/bench_kernels.py [--N 5] [--rows 4096] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from bakerlab import _kernels
from bakerlab.perturb import PerturbationSpec


def bench(fn, repeat):
    fn()  # warm caches and plans
    times = timeit.repeat(fn, number=1, repeat=repeat)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--rows", type=int, default=4096)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    N, K = args.N, args.rows
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(K, 1 << N)) + 1j * rng.normal(size=(K, 1 << N))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    rows = np.ascontiguousarray(rows)
    spec = PerturbationSpec.y_rotation_middle(0.2)
    u0, u1, q = spec.gate(0), spec.gate(1), spec.target(N) if N % 2 else 1

    cases = {
        "centered_dft": lambda m: m.centered_dft(rows, N, False),
        "baker n=1": lambda m: m.baker(rows, N, 1),
        f"baker n={N}": lambda m: m.baker(rows, N, N),
        "perturbed_step": lambda m: m.perturbed_step(rows, N, 1, u0, u1, q),
    }
    backends = _kernels.available_backends()
    print(f"N={N}, rows={K}, backends={backends}, default={_kernels.BACKEND}")
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + "   speedup")
    for label, call in cases.items():
        times = [bench(lambda impl=_kernels.get_backend(b): call(impl), args.repeat) for b in backends]
        speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{label:<18}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
