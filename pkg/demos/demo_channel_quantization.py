#!/usr/bin/env python3
"""Three-level quantization of the BiAWGN channel.

Sweeps the SNR, picks the capacity-optimal dead-zone threshold at each
point, and prints the induced error-and-erasure channel next to the
capacities with and without quantization. The last column is the LLR
magnitude an unquantized decoder should assign to the saturated levels.
"""

import numpy as np

from polarq import (BiAwgnParams, beec_capacity, beec_from,
                    beec_llr_reconstruction, biawgn_capacity, optimize_delta)

print(f"{'Eb/N0':>6} {'sigma^2':>8} {'delta*':>7} "
      f"{'p_corr':>7} {'p_eras':>7} {'p_err':>7} "
      f"{'C_awgn':>7} {'C_3lvl':>7} {'recon':>6}")

for ebn0_db in np.arange(0.0, 6.1, 1.0):
    params = BiAwgnParams.from_ebn0_db(ebn0_db, rate=0.5)
    delta, cap3 = optimize_delta(params)
    beec = beec_from(params, delta)
    print(f"{ebn0_db:6.1f} {params.sigma2:8.4f} {delta:7.3f} "
          f"{beec.p_correct:7.4f} {beec.p_erase:7.4f} {beec.p_error:7.4f} "
          f"{biawgn_capacity(params):7.4f} {cap3:7.4f} "
          f"{beec_llr_reconstruction(beec):6.3f}")

print("\nQuantization keeps most of the mutual information at high SNR;")
print("the erasure band shields the decoder from low-confidence signs.")
