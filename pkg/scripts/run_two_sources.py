"""Desk-scale two-source experiment (100 x 100 cells, same simulated time as the full run).

Writes time series, snapshots and manifest through the same path as the CLI,
then prints the event log and a coarse trail history.
"""

import argparse
import json
import sys
from pathlib import Path

from antforage import cli
from antforage.diagnostics import read_timeseries_csv
from antforage.scenario import bundled_config_text


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/two_sources_desk")
    ap.add_argument("--scenario", default="two_sources_desk")
    ap.add_argument("--every", type=int, default=10, help="print every N-th time-series row")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = out.parent / f"{args.scenario}.toml"
    config.write_text(bundled_config_text(args.scenario))
    code = cli.main(["run", "--config", str(config), "--out", str(out), "--force"])
    if code:
        sys.exit(code)

    for row in read_timeseries_csv(out / "timeseries.csv")[:: args.every]:
        food = " ".join(f"{row[k]:9.4f}" for k in row if k.startswith("food_"))
        trail = " ".join(f"{row[k]:7.4f}" for k in row if k.startswith("trail_"))
        print(f"t={row['t']:7.2f}  food {food}  trail {trail}")
    for k, ev in enumerate(json.loads((out / "manifest.json").read_text())["events"]):
        print(f"source {k}: {ev}")


if __name__ == "__main__":
    main()
