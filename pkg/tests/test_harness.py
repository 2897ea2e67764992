import numpy as np
import pytest

from crmimo.geometry import GeometryConfig
from crmimo.units import dbm_to_mw, mw_to_dbm
from crmimo.harness import (
    RECORD_FIELDS,
    SUMMARY_FIELDS,
    ExperimentConfig,
    prepare_trial,
    run_sweep,
    run_trial,
    trial_rng,
)

SMALL = ExperimentConfig(
    geometry=GeometryConfig(num_ue=4, m_bs=16, m_ue=4),
    sweep_var="K",
    sweep_values=(3, 4),
    trials=6,
    seed=42,
)


def record_payload(r):
    # everything except the wall clock
    return (
        r.sweep_var, r.sweep_value, r.solver, r.trial, r.admitted,
        r.total_power_mw, r.est_int_pu1_mw, r.est_int_pu2_mw,
        r.true_int_pu1_mw, r.true_int_pu2_mw, r.rates,
    )


class TestUnits:
    def test_dbm_to_mw_anchor_points(self):
        assert dbm_to_mw(0.0) == 1.0
        assert dbm_to_mw(60.0) == pytest.approx(1e6)
        assert dbm_to_mw(-20.0) == pytest.approx(0.01)

    def test_round_trip(self):
        for x in (-30.0, 0.0, 17.3, 100.0):
            assert mw_to_dbm(dbm_to_mw(x)) == pytest.approx(x, abs=1e-12)

    def test_mw_to_dbm_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            mw_to_dbm(0.0)


class TestConfigValidation:
    def test_rejects_unknown_sweep_var(self):
        with pytest.raises(ValueError):
            ExperimentConfig(sweep_var="bandwidth", sweep_values=(1,))

    def test_rejects_unknown_solver(self):
        with pytest.raises(ValueError):
            ExperimentConfig(solvers=("simplex",))

    def test_rejects_empty_sweep(self):
        with pytest.raises(ValueError):
            ExperimentConfig(sweep_values=())


class TestTrialSeeding:
    def test_distinct_cells_get_distinct_streams(self):
        a = trial_rng(1, 10.0, 0).standard_normal(4)
        b = trial_rng(1, 10.0, 1).standard_normal(4)
        c = trial_rng(1, 20.0, 0).standard_normal(4)
        d = trial_rng(2, 10.0, 0).standard_normal(4)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)

    def test_same_key_reproduces(self):
        assert np.array_equal(
            trial_rng(5, -20.0, 7).standard_normal(8),
            trial_rng(5, -20.0, 7).standard_normal(8),
        )


class TestRunTrial:
    def test_bit_identical_records(self):
        a = run_trial(SMALL, 4, 2)
        b = run_trial(SMALL, 4, 2)
        assert [record_payload(r) for r in a] == [record_payload(r) for r in b]

    def test_solvers_share_identical_pipeline(self):
        ctx1 = prepare_trial(SMALL, 4, 0)
        ctx2 = prepare_trial(SMALL, 4, 0)
        assert np.array_equal(ctx1.problem.gamma, ctx2.problem.gamma)
        assert np.array_equal(ctx1.problem.g1, ctx2.problem.g1)
        recs = run_trial(SMALL, 4, 0)
        assert len(recs) == 3
        assert [r.solver for r in recs] == ["equal_power", "equal_rate", "ilp"]

    def test_preset_trial_satisfies_result_invariants(self):
        cfg = ExperimentConfig()  # K=10, M_b=128, M_u=4, 60/0/1/0 dBm
        for t in range(5):
            ctx = prepare_trial(cfg, 10, t)
            for rec in run_trial(cfg, 10, t):
                assert 0 <= rec.admitted <= 10
                assert rec.total_power_mw <= ctx.problem.constraints.p0 + 1e-9
                assert rec.est_int_pu1_mw <= ctx.problem.constraints.i0 + 1e-9
                assert rec.est_int_pu2_mw <= ctx.problem.constraints.i0 + 1e-9
                assert np.isfinite(rec.true_int_pu1_mw)

    def test_sweep_value_changes_constraints_only_for_constraint_sweeps(self):
        cfg = ExperimentConfig(
            geometry=GeometryConfig(num_ue=3, m_bs=16, m_ue=4),
            sweep_var="P0_dbm", sweep_values=(30.0, 40.0), trials=1,
        )
        a = prepare_trial(cfg, 30.0, 0)
        assert a.problem.constraints.p0 == pytest.approx(1e3)
        b = prepare_trial(cfg, 40.0, 0)
        assert b.problem.constraints.p0 == pytest.approx(1e4)


class TestRunSweep:
    def test_record_count_and_summary_shape(self, tmp_path):
        records, summary = run_sweep(SMALL, out_dir=str(tmp_path))
        assert len(records) == 2 * 6 * 3  # values x trials x solvers
        assert len(summary) == 2 * 3
        header = (tmp_path / "records.csv").read_text().splitlines()[0]
        assert header == ",".join(RECORD_FIELDS)
        header = (tmp_path / "summary.csv").read_text().splitlines()[0]
        assert header == ",".join(SUMMARY_FIELDS)

    def test_single_trial_summary_equals_record(self):
        cfg = ExperimentConfig(
            geometry=GeometryConfig(num_ue=3, m_bs=16, m_ue=4),
            sweep_var="K", sweep_values=(3,), trials=1,
        )
        records, summary = run_sweep(cfg)
        for row in summary:
            (rec,) = [r for r in records if r.solver == row.solver]
            assert row.mean_admitted == rec.admitted
            assert row.stderr == 0.0

    def test_mean_bounded_by_k(self):
        _, summary = run_sweep(SMALL)
        for row in summary:
            assert 0.0 <= row.mean_admitted <= row.sweep_value

    def test_ilp_mean_dominates_heuristics_per_cell(self):
        records, summary = run_sweep(SMALL)
        means = {(r.sweep_value, r.solver): r.mean_admitted for r in summary}
        for value in (3.0, 4.0):
            assert means[(value, "ilp")] >= means[(value, "equal_rate")]
            assert means[(value, "ilp")] >= means[(value, "equal_power")]
        # per-trial dominance too
        by_trial = {}
        for r in records:
            by_trial.setdefault((r.sweep_value, r.trial), {})[r.solver] = r.admitted
        for cell in by_trial.values():
            assert cell["ilp"] >= cell["equal_rate"]
            assert cell["ilp"] >= cell["equal_power"]

    def test_threads_do_not_change_output(self, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        run_sweep(SMALL, threads=1, out_dir=str(tmp_path / "a"))
        run_sweep(SMALL, threads=2, out_dir=str(tmp_path / "b"))
        assert (tmp_path / "a/records.csv").read_bytes() == \
            (tmp_path / "b/records.csv").read_bytes()
        assert (tmp_path / "a/summary.csv").read_bytes() == \
            (tmp_path / "b/summary.csv").read_bytes()

    def test_floats_serialized_with_nine_significant_digits(self, tmp_path):
        run_sweep(SMALL, out_dir=str(tmp_path))
        lines = (tmp_path / "records.csv").read_text().splitlines()[1:]
        sample = lines[0].split(",")
        total_power = sample[RECORD_FIELDS.index("total_power_mw")]
        digits = total_power.replace(".", "").replace("-", "").lstrip("0")
        digits = digits.split("e")[0]
        assert len(digits) <= 9
