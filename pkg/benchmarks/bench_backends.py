"""Benchmark the compiled fast core against the NumPy fallback.

Run:  python benchmarks/bench_backends.py

Times the two hot kernels (covariance matrix assembly and the singular
quadrature integrand) at realistic sizes, plus an end-to-end Langevin
covariance evaluation through each backend.
"""

import time

import numpy as np

from lamperti_lab.backend import available_backends, get_backend
from lamperti_lab.quadmesh import RegionMesh


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_matrices(mod, n):
    t = np.exp(1.5 * np.linspace(0.0, 5.0, n))
    out = {}
    out["sub_cov_matrix"] = _time(lambda: mod.sub_cov_matrix(t, 0.7))
    out["bi_cov_matrix"] = _time(lambda: mod.bi_cov_matrix(t, 0.7, 0.6))
    return out


def bench_integrand(mod):
    mesh = RegionMesh(a=np.exp(3.0), b=1.0, sigma=-0.5, beta=0.375,
                      J_out=28, splits=2)
    s, y, _ = mesh.groups["full"]
    out = {}
    out[f"integrand_sub ({s.size} pts)"] = _time(
        lambda: mod.langevin_integrand_sub(s, y, 0.75, 0.375, 0))
    out[f"integrand_bi ({s.size} pts)"] = _time(
        lambda: mod.langevin_integrand_bi(s, y, 0.8, 0.75, 0.3, 0))
    return out


def bench_langevin_cov():
    """End-to-end covariance evaluation, forcing each backend in turn."""
    import lamperti_lab.backend as backend
    from lamperti_lab import HurstParams, LangevinSpec, langevin_cov

    spec = LangevinSpec(params=HurstParams(H=0.75, alpha=1.5), family="sub")
    saved = (backend.langevin_integrand_sub, backend.langevin_integrand_bi)
    results = {}
    try:
        for name in available_backends():
            mod = get_backend(name)
            backend.langevin_integrand_sub = mod.langevin_integrand_sub
            backend.langevin_integrand_bi = mod.langevin_integrand_bi
            results[name] = _time(lambda: langevin_cov(spec, 1.0, 2.0),
                                  repeats=3)
    finally:
        backend.langevin_integrand_sub, backend.langevin_integrand_bi = saved
    return results


def main():
    names = available_backends()
    print(f"available backends: {', '.join(names)}\n")
    rows = {}
    for name in names:
        mod = get_backend(name)
        rows[name] = {}
        for n in (512, 2048):
            for key, val in bench_matrices(mod, n).items():
                rows[name][f"{key} n={n}"] = val
        rows[name].update(bench_integrand(mod))
    keys = list(next(iter(rows.values())))
    width = max(len(k) for k in keys) + 2
    header = "kernel".ljust(width) + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for key in keys:
        line = key.ljust(width)
        vals = [rows[n][key] for n in names]
        line += "".join(f"{v*1e3:>10.2f}ms" for v in vals)
        if len(vals) == 2:
            line += f"{vals[1]/vals[0]:>9.2f}x"
        print(line)
    print("\nend-to-end langevin_cov(u=1, v=2):")
    for name, val in bench_langevin_cov().items():
        print(f"  {name:>8}: {val*1e3:8.2f} ms")


if __name__ == "__main__":
    main()
