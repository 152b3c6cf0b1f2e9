#!/usr/bin/env python3
"""List decoding under coarse quantization: why the path metric fails.

Runs a short Monte-Carlo at n = 64 with the three-level list decoder and
prints the four frame-error metrics. The gap between PM-FER and List-FER is
the effect the in-list ML selection recovers: the transmitted word sits in
the list but the quantized path metric cannot find it.
"""

import numpy as np

from polarq import BiAwgnParams, DecoderConfig, RunConfig, StopRule, beec_from, optimize_delta
from polarq.de import TernaryRep, design_code
from polarq.sim import run_point

params = BiAwgnParams.from_ebn0_db(4.0, rate=0.5)
tern = TernaryRep()
code = design_code(6, 32, tern.channel_pmf(beec_from(params, optimize_delta(params)[0])),
                   tern, design_snr_db=4.0)

cfg = RunConfig(code=code, channel="3q-biawgn",
                decoder=DecoderConfig(algebra="l3", list_size=16),
                sweep_ebn0_db=(3.0, 4.0, 5.0),
                stop=StopRule(min_errors=60, max_frames=40_000, metric="pm"),
                seed=7)

print(f"{'Eb/N0':>6} {'frames':>7} {'PM-FER':>9} {'LML-FER':>9} "
      f"{'List-FER':>9} {'ML-LB':>9}")
for x in cfg.sweep_ebn0_db:
    rec = run_point(cfg, x)
    print(f"{x:6.1f} {rec.frames:7d} {rec.fer('pm'):9.2e} {rec.fer('lml'):9.2e} "
          f"{rec.fer('list'):9.2e} {rec.fer('mllb'):9.2e}")

print("\nSelecting by channel likelihood instead of PM closes most of the")
print("gap to the list error rate; the remainder is list management, which")
print("is what the expected-PM-update tables attack.")
