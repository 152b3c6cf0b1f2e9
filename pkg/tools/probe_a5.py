"""Targeted A5 probe: pin the three crossings with moderate precision."""

import sys

import numpy as np

from polarq.polar import construct_rm
from polarq.sim import (DecoderConfig, RunConfig, StopRule,
                        interpolate_ebn0_at_fer, run_point)
from polarq.epmu import build_table_for

rm = construct_rm(8, 2)


def sweep(name, algebra, rule, points, metric, min_errors=60, max_frames=60_000):
    cfg = RunConfig(code=rm, channel="3q-biawgn",
                    decoder=DecoderConfig(algebra=algebra, list_size=128,
                                          pm_rule=rule),
                    sweep_ebn0_db=tuple(points),
                    stop=StopRule(min_errors=min_errors, max_frames=max_frames,
                                  metric=metric),
                    seed=555)
    recs = []
    for x in points:
        table = build_table_for(rm, x) if rule == "epmu" else None
        rec = run_point(cfg, x, epmu_table=table)
        recs.append(rec)
        print(name, x, rec.frames, dict(rec.errors), flush=True)
    return recs


l3 = sweep("l3", "l3", None, (4.9, 5.2, 5.5), "pm")
unq = sweep("unq", "linf", None, (3.0, 3.3, 3.6), "pm")
ep = sweep("epmu", "l3", "epmu", (4.1, 4.4, 4.7), "list")

x_l3 = interpolate_ebn0_at_fer(l3, 1e-3, "pm")
x_unq = interpolate_ebn0_at_fer(unq, 1e-3, "pm")
x_ep = interpolate_ebn0_at_fer(ep, 1e-3, "lml")
print(f"l3 pm {x_l3:.3f}  unq pm {x_unq:.3f}  epmu lml {x_ep:.3f}")
print(f"loss {x_l3 - x_unq:.3f} (1.9+-0.25)   gain {x_l3 - x_ep:.3f} (0.9+-0.2)")
