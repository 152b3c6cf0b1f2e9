from math import exp, log, sqrt

import numpy as np
import pytest
from scipy.integrate import quad

from polarq.channel import (BiAwgnParams, beec_from, optimize_delta, quantize,
                            transmit)
from polarq.de import GridRep, LlrGrid, TernaryRep, evolve
from polarq.epmu import (EpmuTable, JointPmf, build_epmu_table, build_table_for,
                         code_hash, epmu_pm_update, joint_channel_pmf, joint_cn,
                         joint_evolve, joint_vn, snap_delta_to_edge, symmetrize)
from polarq.llr_algebra import JointAlgebra, joint_minsum
from polarq.polar import CodeSpec, construct_rm
from polarq.sc import sc_genie_llrs

PARAMS = BiAwgnParams.from_ebn0_db(2.0, 0.5)
GRID = LlrGrid()
DELTA, _ = optimize_delta(PARAMS)


def softplus_increment(lam, u):
    s = lam if u == 1 else -lam
    return np.logaddexp(0.0, s)


class TestJointChannel:
    def test_unq_marginal_is_binned_gaussian(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        assert np.allclose(j.unq_marginal(), GRID.gaussian_pmf(PARAMS.mu, 2 * PARAMS.mu))
        assert j.total() == pytest.approx(1.0, abs=1e-12)

    def test_q_marginal_matches_beec_at_snapped_threshold(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        snapped = snap_delta_to_edge(GRID, DELTA)
        beec = beec_from(PARAMS, snapped)
        marg = j.q_marginal()
        assert marg[0] == pytest.approx(beec.p_error, abs=1e-6)
        assert marg[1] == pytest.approx(beec.p_erase, abs=1e-6)
        assert marg[2] == pytest.approx(beec.p_correct, abs=1e-6)

    def test_level_supports_respect_threshold(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        snapped = snap_delta_to_edge(GRID, DELTA)
        v = GRID.values
        assert j.mass[0][v > -snapped].sum() == 0
        assert j.mass[1][np.abs(v) > snapped].sum() == 0
        assert j.mass[2][v < snapped].sum() == 0

    def test_components_are_dependent(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        # mutual information between level and a coarse unq statistic
        qm = j.q_marginal()
        um = j.unq_marginal()
        mi = 0.0
        for qi in range(3):
            for half in (GRID.values < 0, GRID.values >= 0):
                pxy = j.mass[qi][half].sum()
                px, py = qm[qi], um[half].sum()
                if pxy > 0:
                    mi += pxy * log(pxy / (px * py))
        assert mi > 0.05

    def test_rejects_threshold_off_grid(self):
        with pytest.raises(ValueError):
            joint_channel_pmf(PARAMS, GRID.half_extent + 1.0, GRID)


class TestJointEvolve:
    def test_m2_marginals_match_single_algebra(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        joints = joint_evolve(2, j, GRID)
        tern = TernaryRep()
        grep = GridRep(GRID, "minsum")
        t_pmfs = evolve(2, j.q_marginal(), tern)
        g_pmfs = evolve(2, j.unq_marginal(), grep)
        for i in range(4):
            assert np.allclose(joints[i].q_marginal(), t_pmfs[i], atol=1e-12)
            assert np.allclose(joints[i].unq_marginal(), g_pmfs[i], atol=1e-10)

    def test_huge_threshold_decouples_to_erasures(self):
        j = joint_channel_pmf(PARAMS, 50.0, GRID)
        joints = joint_evolve(2, j, GRID)
        grep = GridRep(GRID, "minsum")
        g_pmfs = evolve(2, j.unq_marginal(), grep)
        for i in range(4):
            assert joints[i].q_marginal()[1] > 1 - 1e-9
            assert np.allclose(joints[i].unq_marginal(), g_pmfs[i], atol=1e-10)

    def test_matches_coupled_genie_monte_carlo(self):
        # one joint-algebra genie decode yields both components from the
        # same channel draw; compare per-index cells against joint DE on a
        # fine grid. Cell edges sit on grid edges; the tolerance adds the
        # DE mass near each edge to absorb channel-binning drift.
        m, n = 3, 8
        grid = LlrGrid(spacing=1 / 256, half_extent=40.0)
        jch = joint_channel_pmf(PARAMS, DELTA, grid)
        joints = joint_evolve(m, jch, grid)
        rng = np.random.default_rng(11)
        trials = 400_000
        lam = transmit(np.zeros((trials, n), np.int8), PARAMS, rng)
        q = quantize(lam, snap_delta_to_edge(grid, DELTA))
        spec = CodeSpec(m=m, info_set=tuple(range(n)))
        packed = JointAlgebra.pack(q, lam)
        out = sc_genie_llrs(spec, packed, np.zeros(n, np.int8), joint_minsum)
        q_out = JointAlgebra.q_part(out)
        u_out = JointAlgebra.unq_part(out)
        edges = np.array([-24.0, -8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, 24.0])
        drift = 4 * grid.spacing * sqrt(2**m / 12.0) * 4  # 4 sigma of binning drift
        k = grid.half_bins
        idx = np.round(edges / grid.spacing).astype(int) + k
        for i in range(n):
            for qi, lvl in enumerate((-1, 0, 1)):
                row = joints[i].mass[qi]
                csum = np.concatenate([[0.0], np.cumsum(row)])
                sel = q_out[:, i] == lvl
                for e0, e1, j0, j1 in zip(edges[:-1], edges[1:], idx[:-1], idx[1:]):
                    p_de = csum[j1] - csum[j0]
                    emp = float(np.mean(sel & (u_out[:, i] >= e0) & (u_out[:, i] < e1)))
                    se = sqrt(max(p_de * (1 - p_de), 1e-12) / trials)
                    band = int(round(drift / grid.spacing))
                    slack = (row[max(j0 - band, 0):j0 + band].sum()
                             + row[max(j1 - band, 0):j1 + band].sum())
                    assert abs(emp - p_de) < 4 * se + slack + 1e-9, (i, lvl, e0)


class TestSymmetrize:
    def test_symmetric_pmf_is_fixed_point(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        sym = JointPmf(mass=0.5 * (j.mass + j.mass[::-1, ::-1]))
        spec = construct_rm(0, 0)
        out = symmetrize(sym, 0, spec)
        assert np.allclose(out.mass, sym.mass)

    def test_ternary_marginal_example(self):
        mass = np.zeros((3, GRID.size))
        z = GRID.zero_index()
        mass[0, z - 40] = 0.1
        mass[1, z] = 0.2
        mass[2, z + 40] = 0.7
        spec = CodeSpec(m=0, info_set=(0,))
        out = symmetrize(JointPmf(mass=mass), 0, spec)
        assert np.allclose(out.q_marginal(), [0.4, 0.2, 0.4])

    def test_frozen_index_unchanged(self):
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        spec = CodeSpec(m=0, info_set=())
        assert np.allclose(symmetrize(j, 0, spec).mass, j.mass)


class TestEpmuTable:
    def test_degenerate_point_mass_reproduces_increment(self):
        mass = np.zeros((3, GRID.size))
        lam0 = 3.0
        z = GRID.zero_index()
        mass[2, z + round(lam0 / GRID.spacing)] = 1.0
        spec = CodeSpec(m=0, info_set=())
        table = build_epmu_table(spec, [JointPmf(mass=mass)], GRID)
        for u in (0, 1):
            assert table.entries[0, 2, u] == pytest.approx(
                softplus_increment(lam0, u), abs=1e-12)

    def test_channel_level_cell_matches_quadrature(self):
        spec = CodeSpec(m=0, info_set=())
        j = joint_channel_pmf(PARAMS, DELTA, GRID)
        table = build_epmu_table(spec, [j], GRID)
        snapped = snap_delta_to_edge(GRID, DELTA)
        mu, var = PARAMS.mu, 2 * PARAMS.mu

        def pdf(x):
            return exp(-(x - mu) ** 2 / (2 * var)) / sqrt(2 * np.pi * var)

        for u in (0, 1):
            num = quad(lambda x: softplus_increment(x, u) * pdf(x),
                       -snapped, snapped, epsabs=1e-12)[0]
            den = quad(pdf, -snapped, snapped, epsabs=1e-12)[0]
            assert table.entries[0, 1, u] == pytest.approx(num / den, abs=1e-4)

    def test_tower_property(self):
        spec = construct_rm(4, 2)
        table, joints = _built_table(spec, 2.5)
        vals = GRID.values
        for i, j in enumerate(joints):
            um = j.unq_marginal()
            for u in (0, 1):
                lhs = sum(j.mass[qi].sum() * table.entries[i, qi, u] for qi in range(3))
                rhs = np.dot(um, softplus_increment(vals, u))
                assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_symmetry_for_information_indices(self):
        spec = construct_rm(4, 2)
        table, _ = _built_table(spec, 2.5)
        for i in spec.info_set:
            for qi in range(3):
                for u in (0, 1):
                    assert table.entries[i, qi, u] == pytest.approx(
                        table.entries[i, 2 - qi, 1 - u], abs=1e-12)

    def test_entries_nonnegative_finite(self):
        spec = construct_rm(4, 2)
        table, _ = _built_table(spec, 2.5)
        assert np.isfinite(table.entries).all()
        assert (table.entries >= 0).all()

    def test_reliable_index_orders_penalties(self):
        spec = construct_rm(4, 1)
        table, _ = _built_table(spec, 3.0)
        i = spec.info_set[-1]  # most reliable position
        assert table.entries[i, 2, 0] * 10 < table.entries[i, 2, 1]

    def test_update_and_json_roundtrip(self):
        spec = construct_rm(3, 1)
        table = build_table_for(spec, 2.0, grid=GRID)
        pm2 = epmu_pm_update(table, spec.info_set[0], 1, 0, 1.5)
        assert pm2 == pytest.approx(1.5 + table.entries[spec.info_set[0], 2, 0])
        again = EpmuTable.from_json(table.to_json())
        assert np.allclose(again.entries, table.entries)
        assert again.code_hash == code_hash(spec)
        assert again.ebn0_db == table.ebn0_db

    def test_dead_zone_cell_converges_to_refined_value(self):
        # as the dead zone shrinks, the erasure cell's conditional mean goes
        # to zero and the entry approaches the refined increment there (ln 2)
        spec = CodeSpec(m=0, info_set=())
        gaps = []
        for delta in (1.0, 0.3, 0.05):
            j = joint_channel_pmf(PARAMS, delta, GRID)
            table = build_epmu_table(spec, [j], GRID)
            gaps.append(abs(table.entries[0, 1, 0] - log(2)))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-3

    def test_decoder_integration_changes_outcomes(self):
        from polarq.llr_algebra import ternary
        from polarq.scl import scl_decode_batch
        spec = construct_rm(5, 2)
        table = build_table_for(spec, 1.0, grid=GRID)
        rng = np.random.default_rng(12)
        lam = transmit(np.zeros((400, 32), np.int8),
                       BiAwgnParams.from_ebn0_db(1.0, spec.rate), rng)
        q = quantize(lam, table.delta)
        _, cw_r, _, v_r = scl_decode_batch(spec, q, ternary, 8, "refined")
        _, cw_e, _, v_e = scl_decode_batch(spec, q, ternary, 8, "epmu",
                                           epmu_table=table)
        in_r = (cw_r == 0).all(axis=2).any(axis=1)
        in_e = (cw_e == 0).all(axis=2).any(axis=1)
        assert (in_r != in_e).any()  # list construction genuinely differs


def _built_table(spec, ebn0_db):
    params = BiAwgnParams.from_ebn0_db(ebn0_db, spec.rate)
    delta, _ = optimize_delta(params)
    jch = joint_channel_pmf(params, delta, GRID)
    joints = [symmetrize(j, i, spec)
              for i, j in enumerate(joint_evolve(spec.m, jch, GRID))]
    table = build_epmu_table(spec, joints, GRID, ebn0_db=ebn0_db,
                             delta=snap_delta_to_edge(GRID, delta))
    return table, joints
