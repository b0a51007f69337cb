"""Wall-time scaling of the pipeline on synthetic stable systems.

Times each stage (energies, transform, balancing, realization) for a sweep of
state dimensions and reports the log-log growth rate of the total, which
should sit near the degree-plus-one power of n for degree-3 energy functions.

Run:  python demos/06_scaling_bench.py
"""

from nlbt.bench import loglog_slope, run_bench


def main():
    sizes = [8, 16, 32, 64, 96]
    rows = run_bench(sizes, d_energy=3, repetitions=3, seed=0)
    print(f"{'n':>4s} {'energy':>9s} {'inod':>9s} {'balance':>9s} {'realize':>9s} {'total':>9s}")
    for r in rows:
        print(f"{r['n']:4d} {r['energy']:9.4f} {r['inod']:9.4f} "
              f"{r['balance']:9.4f} {r['realization']:9.4f} {r['total']:9.4f}")
    print(f"\nlog-log slope of total time: {loglog_slope(rows):.2f}")
    print("(degree-3 energies imply roughly n^4 work at these sizes)")


if __name__ == "__main__":
    main()
