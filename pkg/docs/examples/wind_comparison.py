"""Backstepping and PID on the spiral climb with a wind step at t = 25 s.

Both controllers share the same plant, trajectory, PD position loop and
disturbance, so the table isolates the attitude/altitude controller. The
``controlled`` row aggregates the roll, pitch, yaw and altitude errors. The
``position`` row is dominated by the shared position loop: the constant wind
force leaves a steady horizontal offset that neither inner controller can
remove.

    python3 docs/examples/wind_comparison.py [out_dir]
"""
import sys

from quadbackstep import wind_scenario
from quadbackstep.analysis import compare
from quadbackstep.plotting import emit_plots

out_dir = sys.argv[1] if len(sys.argv) > 1 else "wind_comparison"

result = compare(wind_scenario("backstepping"), wind_scenario("pid"), concurrent=True)
print(result.to_text())

paths = emit_plots(list(result.traces), out_dir)
print("\nplots:", ", ".join(sorted(paths.values())))
