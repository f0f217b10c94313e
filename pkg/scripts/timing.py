"""Wall-clock timings for the main computations, repeated to smooth out noise."""
import argparse
import statistics
import time

from dgbv import example, prepare, solve_f_manifold, solve_weak_primitive, verify_gcm


def clock(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    jobs = [
        ("basis cubic", lambda: prepare(example("cubic"))),
        ("basis quadrics", lambda: prepare(example("quadrics"))),
        ("basis quartic", lambda: prepare(example("quartic"))),
        ("fmanifold cubic order 3", lambda: solve_f_manifold(prepare(example("cubic")), 3)),
        ("fmanifold quadrics order 3", lambda: solve_f_manifold(prepare(example("quadrics")), 3)),
        ("primitive+residual cubic order 2", lambda: verify_gcm(solve_weak_primitive(prepare(example("cubic")), None, 2))),
        ("primitive quartic order 2", lambda: solve_weak_primitive(prepare(example("quartic")), None, 2)),
    ]
    for label, fn in jobs:
        print(f"{label:40s} {clock(fn, args.repeat):8.3f} s")


if __name__ == "__main__":
    main()
