"""Polar coding with coarsely quantized SC/SCL decoding.

Code construction and encoding, SC and SC-list decoding over pluggable LLR
algebras (unquantized, three-level, and the coupled joint algebra), density
evolution analysis and code design, EPMU list enhancement, and a Monte-Carlo
FER harness.
"""

from .channel import (BeecParams, BiAwgnParams, QuantizerParams, beec_capacity,
                      beec_from, beec_llr_reconstruction, biawgn_capacity,
                      make_quantizer, optimize_delta, quantize, transmit)
from .de import (GridRep, LlrGrid, TernaryRep, design_code, evolve, rate_curve,
                 reliability_report)
from .epmu import EpmuTable, build_table_for, joint_channel_pmf, joint_evolve
from .llr_algebra import (JointAlgebra, RealAlgebra, TernaryAlgebra, joint_minsum,
                          real_exact, real_minsum, ternary)
from .polar import (CodeSpec, bit_reversal_permute, construct_rm, encode,
                    polar_transform)
from .sc import sc_decode, sc_genie_llrs, synthetic_llr_bruteforce
from .scl import (FinalList, mllb_trial, pm_update, scl_decode, scl_decode_batch,
                  select_lowest_pm, select_ml)
from .sim import (DecoderConfig, FerRecord, RunConfig, StopRule, gap_db,
                  interpolate_ebn0_at_fer, run_point, run_sweep)

__version__ = "0.1.0"
