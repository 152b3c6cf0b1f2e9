"""Coarse FER calibration to locate the 1e-3 crossings of every
acceptance configuration (low accuracy, wide sweeps)."""

import json
import sys
import time

import numpy as np

from polarq.de import GridRep, LlrGrid, design_code
from polarq.channel import BiAwgnParams
from polarq.polar import construct_rm
from polarq.sim import DecoderConfig, RunConfig, StopRule, run_point

DESIGN_EBN0 = 4.5

from polarq.de import TernaryRep
from polarq.channel import beec_from, optimize_delta

tern = TernaryRep()
params = BiAwgnParams.from_ebn0_db(DESIGN_EBN0, 0.5)
de_code = design_code(8, 128,
                      tern.channel_pmf(beec_from(params, optimize_delta(params)[0])),
                      tern, design_snr_db=DESIGN_EBN0)
rm_code = construct_rm(8, 2)

CONFIGS = {
    "a1a_unq_sc": (de_code, "biawgn", "linf", 1, None, np.arange(2.4, 4.61, 0.4)),
    "a1b_unq3q_sc": (de_code, "3q-biawgn", "linf", 1, None, np.arange(3.2, 5.81, 0.4)),
    "a1c_l3_sc": (de_code, "3q-biawgn", "l3", 1, None, np.arange(4.0, 7.01, 0.4)),
    "a3_l3_scl32": (de_code, "3q-biawgn", "l3", 32, None, np.arange(3.0, 5.81, 0.4)),
    "a4_l3_epmu32": (de_code, "3q-biawgn", "l3", 32, "epmu", np.arange(2.8, 5.01, 0.4)),
    "a4_unq3q_scl32": (de_code, "3q-biawgn", "linf", 32, None, np.arange(2.4, 4.41, 0.4)),
    "a5_l3_scl128": (rm_code, "3q-biawgn", "l3", 128, None, np.arange(2.8, 5.61, 0.4)),
    "a5_unq3q_scl128": (rm_code, "3q-biawgn", "linf", 128, None, np.arange(1.2, 3.61, 0.4)),
    "a5_l3_epmu128": (rm_code, "3q-biawgn", "l3", 128, "epmu", np.arange(2.0, 4.81, 0.4)),
}


def main(names):
    results = {}
    for name, (code, chan, alg, L, rule, sweep) in CONFIGS.items():
        if names and name not in names:
            continue
        cfg = RunConfig(code=code, channel=chan,
                        decoder=DecoderConfig(algebra=alg, list_size=L, pm_rule=rule),
                        sweep_ebn0_db=tuple(round(x, 2) for x in sweep),
                        stop=StopRule(min_errors=25, max_frames=25_000, metric="pm"),
                        seed=2024)
        rows = []
        for x in cfg.sweep_ebn0_db:
            table = None
            if rule == "epmu":
                from polarq.epmu import build_table_for
                table = build_table_for(code, x)
            t0 = time.time()
            rec = run_point(cfg, x, epmu_table=table)
            rows.append({
                "ebn0": x, "frames": rec.frames,
                "pm": rec.fer("pm"), "lml": rec.fer("lml"),
                "list": rec.fer("list"), "mllb": rec.fer("mllb"),
                "secs": round(time.time() - t0, 1),
            })
            print(name, rows[-1], flush=True)
            if rec.fer("pm") < 2e-3 and rec.errors["pm"] < 25:
                break
        results[name] = rows
    with open("/root/pkg/tools/calibration.json", "w") as fh:
        json.dump(results, fh, indent=1)


if __name__ == "__main__":
    main(set(sys.argv[1:]))
