import numpy as np
import pytest

from polarq.channel import LLR_CAP
from polarq.llr_algebra import real_exact, real_minsum, ternary
from polarq.polar import CodeSpec, construct_rm, encode, polar_transform
from polarq.sc import (sc_decode, sc_exact_llrs, sc_genie_llrs,
                       synthetic_llr_bruteforce)


def full_rate_spec(m):
    return CodeSpec(m=m, info_set=tuple(range(2**m)))


class TestScDecode:
    def test_noiseless_roundtrip(self):
        rng = np.random.default_rng(0)
        spec = construct_rm(5, 2)
        msg = rng.integers(0, 2, spec.k, dtype=np.int8)
        c = encode(spec, msg)
        lam = LLR_CAP * (1.0 - 2.0 * c)
        uhat, info = sc_decode(spec, lam, real_minsum)
        assert (info == msg).all()
        assert (polar_transform(uhat, spec.m) == c).all()

    def test_ternary_all_plus_one_decodes_zero(self):
        spec = construct_rm(4, 2)
        uhat, info = sc_decode(spec, np.ones(16, dtype=np.int8), ternary)
        assert not uhat.any()

    def test_tie_llr_decides_zero(self):
        spec = full_rate_spec(2)
        uhat, _ = sc_decode(spec, np.zeros(4, dtype=np.int8), ternary)
        assert not uhat.any()

    def test_frozen_bits_forced_to_zero(self):
        spec = CodeSpec(m=3, info_set=(7,))
        rng = np.random.default_rng(1)
        uhat, _ = sc_decode(spec, rng.normal(0, 3, 8), real_minsum)
        assert not uhat[:7].any()

    def test_batched_equals_per_frame(self):
        spec = construct_rm(4, 1)
        rng = np.random.default_rng(2)
        ys = rng.normal(0, 2, (20, 16))
        batch_u, _ = sc_decode(spec, ys, real_minsum)
        for t in range(20):
            one, _ = sc_decode(spec, ys[t], real_minsum)
            assert (one == batch_u[t]).all()

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            sc_decode(construct_rm(3, 1), np.zeros(4), real_minsum)


class TestGenie:
    def test_matches_decode_llrs_when_no_errors(self):
        spec = construct_rm(4, 2)
        rng = np.random.default_rng(3)
        msg = rng.integers(0, 2, spec.k, dtype=np.int8)
        c = encode(spec, msg)
        lam = 20.0 * (1.0 - 2.0 * c) + rng.normal(0, 0.5, 16)
        uhat, _ = sc_decode(spec, lam, real_minsum)
        u_true = np.zeros(16, dtype=np.int8)
        u_true[list(spec.info_set)] = msg
        assert (uhat == u_true).all()  # noise low enough for error-free SC
        # identical partial sums -> identical decision LLRs
        genie = sc_genie_llrs(spec, lam, u_true, real_minsum)
        redo = sc_genie_llrs(spec, lam, uhat, real_minsum)
        assert np.allclose(genie, redo)

    def test_deterministic(self):
        spec = construct_rm(3, 1)
        rng = np.random.default_rng(4)
        y = rng.normal(0, 2, 8)
        u = rng.integers(0, 2, 8, dtype=np.int8)
        assert (sc_genie_llrs(spec, y, u, real_minsum)
                == sc_genie_llrs(spec, y, u, real_minsum)).all()

    def test_channel_symmetry_flips_decision_llrs(self):
        # BMS symmetry: flipping channel LLR signs on the support of x(w)
        # while offsetting the genie word by w flips exactly the decision
        # LLRs where w is 1; the complement word w = 1 flips all of them.
        # Exhaustive over w for n=4.
        spec = full_rate_spec(2)
        rng = np.random.default_rng(8)
        y = rng.normal(0, 2, 4)
        u = np.array([0, 1, 1, 0], dtype=np.int8)
        lam = sc_genie_llrs(spec, y, u, real_exact)
        for bits in range(16):
            w = ((bits >> np.arange(4)) & 1).astype(np.int8)
            xw = polar_transform(w, 2)
            lam_flip = sc_genie_llrs(spec, y * (1 - 2 * xw),
                                     (u ^ w).astype(np.int8), real_exact)
            assert np.allclose(lam_flip, (1 - 2 * w) * lam, atol=1e-12)


class TestBruteForceOracle:
    def test_last_bit_is_direct_ratio(self):
        spec = full_rate_spec(3)
        rng = np.random.default_rng(5)
        y = rng.normal(0, 2, 8)
        prefix = rng.integers(0, 2, 7, dtype=np.int8)
        lam = synthetic_llr_bruteforce(spec, y, prefix, 7)
        u0 = np.append(prefix, 0).astype(np.int8)
        u1 = np.append(prefix, 1).astype(np.int8)
        x0 = polar_transform(u0, 3)
        x1 = polar_transform(u1, 3)
        direct = -(x0 * y).sum() + (x1 * y).sum()
        assert lam == pytest.approx(direct, abs=1e-12)

    def test_recursion_matches_oracle_randomized(self):
        rng = np.random.default_rng(6)
        for m in (1, 2, 3):
            spec = full_rate_spec(m)
            n = spec.n
            for _ in range(40):
                y = rng.normal(0, 2, n)
                u = rng.integers(0, 2, n, dtype=np.int8)
                lam_rec = sc_exact_llrs(spec, y, u)
                for i in range(n):
                    bf = synthetic_llr_bruteforce(spec, y, u[:i], i)
                    assert lam_rec[i] == pytest.approx(bf, abs=1e-9)

    def test_recursion_matches_oracle_beec_sign_patterns(self):
        # every +-1 channel sign pattern on a quantized channel, n=8
        spec = full_rate_spec(3)
        recon = 2.2
        u = np.zeros(8, dtype=np.int8)
        for bits in range(256):
            y = recon * (1 - 2 * ((bits >> np.arange(8)) & 1)).astype(float)
            lam_rec = sc_exact_llrs(spec, y, u)
            for i in range(8):
                bf = synthetic_llr_bruteforce(spec, y, u[:i], i)
                assert lam_rec[i] == pytest.approx(bf, abs=1e-9)

    def test_oracle_channel_symmetry(self):
        # same symmetry as the recursion: offset by w, flip obs on x(w)
        spec = full_rate_spec(3)
        rng = np.random.default_rng(7)
        for _ in range(20):
            y = rng.choice([-1.5, 0.0, 1.5], 8)
            w = rng.integers(0, 2, 8, dtype=np.int8)
            prefix = rng.integers(0, 2, 3, dtype=np.int8)
            xw = polar_transform(w, 3)
            lam = synthetic_llr_bruteforce(spec, y, prefix, 3)
            lam_w = synthetic_llr_bruteforce(spec, y * (1 - 2 * xw),
                                             (prefix ^ w[:3]).astype(np.int8), 3)
            assert lam_w == pytest.approx((1 - 2 * w[3]) * lam, abs=1e-12)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            synthetic_llr_bruteforce(full_rate_spec(5), np.zeros(32), np.zeros(0, np.int8), 0)
