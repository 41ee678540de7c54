"""Compare the compiled kernel core against the pure-Python fallback.

Run:  python benchmarks/benchmark_kernels.py
"""
import time

import numpy as np

from spectral_poisson._kernels import load_backend


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = {}
    for name in ("compiled", "pure"):
        mod = load_backend(name)
        if mod is None:
            print(f"{name}: not available")
        else:
            backends[name] = mod
    if not backends:
        return

    period = 2 * np.pi
    n_steps = 2048
    x = period * np.arange(2 * n_steps + 1) / (2 * n_steps)
    u = np.ascontiguousarray(0.3 * np.cos(x))
    z = 2.3 + 1.1j
    h = period / n_steps

    x0 = np.array([-1.0, 0.5, 2.0])
    p0 = np.array([1.2, 0.8, 0.5])
    q0 = np.array([0.3, -0.1, -0.4])

    rows = []
    for name, mod in backends.items():
        t_mon = timeit(lambda: mod.monodromy_propagate(u, z, h, n_steps))
        t_pk = timeit(lambda: mod.peakon_flow_steps(x0, p0, 1e-3, 5000, 500, 1e-6), repeat=3)
        t_td = timeit(lambda: mod.toda_flow_steps(x0, q0, 1e-3, 5000, 500), repeat=3)
        rows.append((name, t_mon, t_pk, t_td))

    print(f"{'backend':<10} {'monodromy(2048)':>16} {'peakon(5k)':>12} {'toda(5k)':>12}")
    for name, a, b, c in rows:
        print(f"{name:<10} {a * 1e3:>13.3f} ms {b * 1e3:>9.1f} ms {c * 1e3:>9.1f} ms")
    if len(rows) == 2:
        ref = {r[0]: r for r in rows}
        if "compiled" in ref and "pure" in ref:
            for idx, label in ((1, "monodromy"), (2, "peakon"), (3, "toda")):
                speed = ref["pure"][idx] / ref["compiled"][idx]
                print(f"speedup {label}: {speed:.0f}x")

    # agreement sanity
    if len(backends) == 2:
        a = backends["compiled"].monodromy_propagate(u, z, h, n_steps)
        b = backends["pure"].monodromy_propagate(u, z, h, n_steps)
        print("max |compiled - pure| (monodromy):", max(abs(x - y) for x, y in zip(a, b)))


if __name__ == "__main__":
    main()
