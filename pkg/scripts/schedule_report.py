"""Print the cycle schedule and throughput for 4 and 8 nodes per cycle."""

import sys

from fsdsim.bench import run_schedule_report

f_c = float(sys.argv[1]) if len(sys.argv) > 1 else 400e6
for p in (4, 8):
    print(f"== {p} nodes per cycle ==")
    print(run_schedule_report(p, "11111144", f_c))
