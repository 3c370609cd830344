"""Compare the compiled and pure-Python kernels on a synthetic fleet.

    python3 benchmarks/bench_kernels.py [--traces 200] [--repeat 5]
"""

import argparse
import time

import numpy as np

from routeprobe import kernels, synth
from routeprobe.config import default_regions
from routeprobe.probe import builtin_loose


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--traces", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rs = default_regions()
    table = builtin_loose().compile(rs)
    fleet = synth.generate_fleet(args.traces, [], args.seed, rs,
                                 synth.FleetConfig(max_laps=4))
    lons = np.concatenate([np.asarray(t.longitudes) for t, _ in fleet])
    lats = np.concatenate([np.asarray(t.latitudes) for t, _ in fleet])
    bounds = np.asarray(rs.bounds(), dtype=np.float64)
    start = table.index("AIRPORT")
    print(f"{len(fleet)} traces, {len(lons)} fixes")

    impls = {"python": kernels.python}
    if kernels.compiled is not None:
        impls["cython"] = kernels.compiled
    else:
        print("compiled kernels not built; timing the fallback only")

    results = {}
    for name, impl in impls.items():
        cls = impl.classify_points(lons, lats, bounds)
        c = best_of(lambda: impl.classify_points(lons, lats, bounds), args.repeat)
        r = best_of(lambda: impl.run_table(table.table, cls, start), args.repeat)
        results[name] = (c, r, cls)
        print(f"{name:>7}: classify {c * 1e3:8.2f} ms   run_table {r * 1e3:8.2f} ms")
    if "cython" in results:
        py, cy = results["python"], results["cython"]
        assert (py[2] == cy[2]).all()
        print(f"speedup: classify x{py[0] / cy[0]:.0f}, run_table x{py[1] / cy[1]:.0f}")


if __name__ == "__main__":
    main()
