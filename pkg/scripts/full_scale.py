"""Full-resolution two-source run: 200 x 200 cells, dt = 0.0005, 300,000 steps.

Prints the event log and the trail-strength history; exits nonzero when the
formation < depletion < fade ordering is violated for either source.
"""

import argparse
import sys
import time

from antforage.scenario import load_bundled, validate
from antforage.stepper import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="two_sources")
    ap.add_argument("--every", type=int, default=10, help="print every N-th time-series row")
    args = ap.parse_args()

    s = load_bundled(args.scenario)
    problems = validate(s)
    if problems:
        sys.exit("\n".join(map(str, problems)))
    t0 = time.perf_counter()
    report = run(s)
    print(f"{report.termination} after {report.steps_done} steps, {time.perf_counter() - t0:.0f} s")
    if report.error:
        sys.exit(report.error)
    for row in report.series[:: args.every]:
        food = " ".join(f"{x:9.4f}" for x in row.food)
        trail = " ".join(f"{x:7.4f}" for x in row.trail)
        print(f"t={row.t:7.2f}  food {food}  trail {trail}")
    ok = True
    for k, ev in enumerate(report.events.sources):
        print(f"source {k}: {ev.as_dict()}")
        times = (ev.formation_time, ev.depletion_time, ev.fade_time)
        ok &= None not in times and times[0] < times[1] < times[2]
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
