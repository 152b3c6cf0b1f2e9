import numpy as np
import pytest
from scipy.stats import beta

from polarq.channel import BiAwgnParams, transmit
from polarq.llr_algebra import real_minsum
from polarq.polar import construct_rm, encode
from polarq.sc import sc_decode
from polarq.sim import (DecoderConfig, FerRecord, RunConfig, StopRule,
                        binomial_ci, gap_db, interpolate_ebn0_at_fer,
                        read_fer_csv, run_point, run_sweep, write_fer_csv,
                        _draw_frames, _frame_rng)

SPEC16 = construct_rm(4, 2)


def config(channel="3q-biawgn", algebra="l3", L=4, rule=None, sweep=(2.0,),
           min_errors=8, max_frames=3000, metric="all", seed=9):
    return RunConfig(
        code=SPEC16,
        channel=channel,
        decoder=DecoderConfig(algebra=algebra, list_size=L, pm_rule=rule),
        sweep_ebn0_db=tuple(sweep),
        stop=StopRule(min_errors=min_errors, max_frames=max_frames, metric=metric),
        seed=seed,
    )


class TestConfig:
    def test_json_roundtrip(self):
        cfg = config()
        again = RunConfig.from_json(cfg.to_json())
        assert again == cfg

    def test_rejects_empty_sweep(self):
        with pytest.raises(ValueError):
            config(sweep=())

    def test_rejects_ternary_on_unquantized(self):
        with pytest.raises(ValueError):
            config(channel="biawgn", algebra="l3")

    def test_rejects_bad_stop(self):
        with pytest.raises(ValueError):
            StopRule(min_errors=0)
        with pytest.raises(ValueError):
            StopRule(max_frames=0)


class TestBinomialCi:
    def test_matches_beta_quantile_oracle(self):
        rng = np.random.default_rng(0)
        cases = [(0, 100), (100, 100), (1, 37), (5, 50), (100, 100_000)]
        cases += [(int(e), int(f)) for e, f in
                  zip(rng.integers(1, 400, 15), rng.integers(500, 10_000, 15))]
        for e, f in cases:
            lo, hi = binomial_ci(e, f)
            want_lo = 0.0 if e == 0 else beta.ppf(0.025, e, f - e + 1)
            want_hi = 1.0 if e == f else beta.ppf(0.975, e + 1, f - e)
            assert lo == pytest.approx(want_lo, abs=1e-10)
            assert hi == pytest.approx(want_hi, abs=1e-10)

    def test_interval_brackets_point_estimate(self):
        lo, hi = binomial_ci(100, 100_000)
        assert lo < 100 / 100_000 < hi


class TestInterpolation:
    def recs(self, pts):
        out = []
        for x, f in pts:
            r = FerRecord(ebn0_db=x, frames=1_000_000)
            r.errors["pm"] = int(round(f * 1_000_000))
            out.append(r)
        return out

    def test_exact_grid_hit(self):
        recs = self.recs([(2.0, 1e-2), (3.0, 1e-3), (4.0, 1e-4)])
        assert interpolate_ebn0_at_fer(recs, 1e-3) == pytest.approx(3.0)

    def test_log_linear_midpoint(self):
        recs = self.recs([(2.0, 1e-2), (3.0, 1e-4)])
        assert interpolate_ebn0_at_fer(recs, 1e-3) == pytest.approx(2.5)

    def test_gap_antisymmetric(self):
        a = self.recs([(2.0, 1e-2), (3.0, 1e-4)])
        b = self.recs([(2.6, 1e-2), (3.4, 1e-4)])
        g1 = gap_db(a, b, 1e-3)
        g2 = gap_db(b, a, 1e-3)
        assert g1 == pytest.approx(-g2)

    def test_unbracketed_target_rejected(self):
        recs = self.recs([(2.0, 1e-2), (3.0, 1e-3)])
        with pytest.raises(ValueError):
            interpolate_ebn0_at_fer(recs, 1e-5)


class TestFrameRng:
    def test_streams_differ_by_frame(self):
        a = _frame_rng(1, 0).standard_normal(4)
        b = _frame_rng(1, 1).standard_normal(4)
        assert not np.allclose(a, b)

    def test_draws_independent_of_batch_split(self):
        m1, n1 = _draw_frames(SPEC16, 5, 0, 10)
        m2a, n2a = _draw_frames(SPEC16, 5, 0, 4)
        m2b, n2b = _draw_frames(SPEC16, 5, 4, 6)
        assert (np.vstack([m2a, m2b]) == m1).all()
        assert np.allclose(np.vstack([n2a, n2b]), n1)


class TestRunPoint:
    def test_noiseless_point_has_no_errors(self):
        cfg = config(sweep=(30.0,), max_frames=500, min_errors=1)
        rec = run_point(cfg, 30.0)
        assert rec.frames == 500
        assert all(v == 0 for v in rec.errors.values())

    def test_deterministic_across_batch_sizes(self):
        cfg = config(max_frames=1200, min_errors=10**9)
        a = run_point(cfg, 2.0, batch_frames=128)
        b = run_point(cfg, 2.0, batch_frames=512)
        assert a.errors == b.errors and a.frames == b.frames

    def test_deterministic_across_thread_counts(self):
        cfg = config(max_frames=1200, min_errors=10**9)
        a = run_point(cfg, 2.0, threads=1)
        b = run_point(cfg, 2.0, threads=3)
        assert a.errors == b.errors and a.frames == b.frames

    def test_metric_coherence_counts(self):
        cfg = config(max_frames=4000, min_errors=10**9, L=8)
        rec = run_point(cfg, 1.0)
        assert rec.errors["list"] <= min(rec.errors["pm"], rec.errors["lml"])
        assert rec.errors["mllb"] <= rec.errors["lml"]
        assert rec.errors["pm"] > 0

    def test_list_one_pm_fer_equals_sc_fer(self):
        cfg = config(algebra="linf", L=1, max_frames=2000, min_errors=10**9,
                     channel="biawgn", seed=3)
        rec = run_point(cfg, 1.0)
        # replay the same frames through the plain SC decoder
        params = BiAwgnParams.from_ebn0_db(1.0, SPEC16.rate)
        msgs, noise = _draw_frames(SPEC16, 3, 0, rec.frames)
        x = encode(SPEC16, msgs)
        lam = params.mu * ((1.0 - 2.0 * x) + np.sqrt(params.sigma2) * noise)
        uhat, info = sc_decode(SPEC16, lam, real_minsum)
        sc_errors = int((info != msgs).any(axis=1).sum())
        assert rec.errors["pm"] == sc_errors

    def test_epmu_requires_table(self):
        cfg = config(rule="epmu")
        with pytest.raises(ValueError):
            run_point(cfg, 2.0)

    def test_full_list_lml_matches_exhaustive_ml(self):
        # n=8, k=4, L=16: the list holds the whole codebook, so in-list ML
        # is exhaustive ML; counts agree within overlapping 95% CIs
        spec = construct_rm(3, 1)
        cfg = RunConfig(code=spec, channel="biawgn",
                        decoder=DecoderConfig(algebra="linf", list_size=16),
                        sweep_ebn0_db=(2.0,),
                        stop=StopRule(min_errors=10**9, max_frames=6000),
                        seed=11)
        rec = run_point(cfg, 2.0)
        params = BiAwgnParams.from_ebn0_db(2.0, spec.rate)
        msgs, noise = _draw_frames(spec, 11, 0, rec.frames)
        x = encode(spec, msgs)
        lam = params.mu * ((1.0 - 2.0 * x) + np.sqrt(params.sigma2) * noise)
        k = spec.k
        all_msgs = ((np.arange(2**k)[:, None] >> np.arange(k)[None, :]) & 1).astype(np.int8)
        cws = encode(spec, all_msgs)
        scores = lam @ (1 - 2 * cws).T.astype(float)
        ml_err = int((np.argmax(scores, axis=1)
                      != (msgs.astype(np.int64) @ (1 << np.arange(k)))).sum())
        lo_a, hi_a = binomial_ci(rec.errors["lml"], rec.frames)
        lo_b, hi_b = binomial_ci(ml_err, rec.frames)
        assert max(lo_a, lo_b) <= min(hi_a, hi_b)


class TestSweepAndCsv:
    def test_stop_rule_on_pm_metric(self):
        cfg = config(metric="pm", min_errors=5, max_frames=50_000)
        rec = run_point(cfg, 1.0)
        assert rec.errors["pm"] >= 5

    def test_csv_roundtrip_and_determinism(self, tmp_path):
        cfg = config(sweep=(1.0, 2.0), max_frames=800, min_errors=10**9)
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        run_sweep(cfg, out_csv=p1)
        run_sweep(cfg, out_csv=p2)
        assert p1.read_bytes() == p2.read_bytes()
        records = read_fer_csv(p1)
        assert len(records) == 2
        assert records[0].ebn0_db == 1.0
        assert records[0].frames == 800

    def test_epmu_sweep_builds_tables(self):
        spec = construct_rm(3, 1)
        cfg = RunConfig(code=spec, channel="3q-biawgn",
                        decoder=DecoderConfig(algebra="l3", list_size=2,
                                              pm_rule="epmu"),
                        sweep_ebn0_db=(2.0,),
                        stop=StopRule(min_errors=1, max_frames=400), seed=1)
        recs = run_sweep(cfg)
        assert recs[0].frames > 0
