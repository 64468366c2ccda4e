import os

import numpy as np
import pytest

from threelevel.cli import (BUILTINS, ConfigError, ScenarioConfig,
                            TABLE_COLUMNS, build_config, emit_table,
                            load_config, load_table, main, parse_config_text,
                            run_scenario, run_sweep, run_trajectory,
                            summarize)
from threelevel.dissipation import Configuration, derived_rates


class TestConfigParsing:
    def test_basic_keys_and_comments(self):
        text = """
        # a comment
        scenario = demo
        configuration = xi
        rates.gamma1 = 0.25   # inline comment
        pulses.ordering = intuitive
        detuning.delta0 = 500
        """
        cfg = build_config(parse_config_text(text))
        assert cfg.scenario == "demo"
        assert cfg.configuration is Configuration.XI
        assert cfg.rates.gamma1 == 0.25
        assert cfg.ordering == "intuitive"
        assert cfg.delta0 == 500.0

    def test_unknown_keys_all_reported(self):
        text = "bogus = 1\nrates.gamma9 = 2\nhorizon = 1.0\n"
        with pytest.raises(ConfigError) as err:
            build_config(parse_config_text(text))
        assert "bogus" in err.value.problems
        assert "rates.gamma9" in err.value.problems

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("horizon = 1\nhorizon = 2\n")

    def test_bad_value_reported_with_key(self):
        with pytest.raises(ConfigError) as err:
            build_config(parse_config_text("rates.gamma1 = fast\n"))
        assert "rates.gamma1" in err.value.problems

    def test_sweep_axis_parsing(self):
        cfg = build_config(parse_config_text(
            "sweep.detuning.delta0 = 100, 300, 1000\n"))
        assert cfg.sweep == (("detuning.delta0", (100.0, 300.0, 1000.0)),)

    def test_non_numeric_sweep_target_rejected(self):
        with pytest.raises(ConfigError):
            build_config(parse_config_text("sweep.pulses.ordering = 1, 2\n"))

    def test_validation_catches_bad_fields(self):
        with pytest.raises(ConfigError) as err:
            build_config(parse_config_text(
                "horizon = -1\ninitial_state = bare_9\n"))
        assert "horizon" in err.value.problems
        assert "initial_state" in err.value.problems

    def test_load_config_unknown_source(self):
        with pytest.raises(ConfigError):
            load_config("no_such_scenario")


class TestBuiltins:
    @pytest.mark.parametrize("name", sorted(BUILTINS))
    def test_builtin_parses(self, name):
        cfg = load_config(name)
        assert cfg.scenario == name

    def test_caption_parameters_encoded(self):
        """Transverse widths 0.5/T, peak couplings 100/T, detuning 1000/T,
        and the ground-coherence decay family 0.005/0.05."""
        for name, gc_T in [("stirap_fig2", 0.005), ("bstirap_fig3", 0.005),
                           ("purity_delta_fig4", 0.05),
                           ("hadamard_hold", 0.05)]:
            cfg = load_config(name)
            der = derived_rates(cfg.configuration, cfg.rates)
            T = cfg.horizon
            assert der.Gamma1 * T == pytest.approx(0.5)
            assert der.Gamma2 * T == pytest.approx(0.5 + gc_T)
            assert der.gamma_c * T == pytest.approx(gc_T)
            assert cfg.peak_omega * T == pytest.approx(100.0)
        assert load_config("stirap_fig2").delta0 == 1000.0
        assert load_config("purity_delta_fig4").sweep == \
            (("detuning.delta0", (100.0, 300.0, 1000.0)),)

    def test_orderings(self):
        assert load_config("stirap_fig2").ordering == "counterintuitive"
        assert load_config("bstirap_fig3").ordering == "intuitive"
        assert load_config("hadamard_hold").ordering == "static"


class TestEmitTable:
    def make_record(self, tmp_path, samples=40):
        cfg = load_config("stirap_fig2")
        cfg = ScenarioConfig(**{**cfg.__dict__, "samples": samples,
                                "rel_tol": 1e-7, "abs_tol": 1e-9})
        return cfg, run_scenario(cfg, str(tmp_path))

    def test_header_and_row_count(self, tmp_path):
        _, record = self.make_record(tmp_path)
        with open(record.table_path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert len(lines) == 41
        header = lines[0].split(",")
        assert header[0] == "t"
        assert header == TABLE_COLUMNS

    def test_roundtrip_reproduces_summary(self, tmp_path):
        cfg, record = self.make_record(tmp_path)
        table = load_table(record.table_path)
        # 17 significant digits round-trip doubles exactly
        assert table["rho22_re"][-1] == record.summary["final_pop_bare_2"]
        assert table["purity"].min() == record.summary["purity_min"]
        assert table["R22"][-1] == record.summary["final_pop_adiabatic_2"]

    def test_io_error_carries_path(self, tmp_path):
        cfg = load_config("stirap_fig2")
        traj = run_trajectory(ScenarioConfig(**{**cfg.__dict__,
                                                "samples": 5,
                                                "rel_tol": 1e-6,
                                                "abs_tol": 1e-8}))
        missing = os.path.join(str(tmp_path), "no", "such", "dir", "t.csv")
        with pytest.raises(OSError) as err:
            emit_table(traj, missing)
        assert "t.csv" in str(err.value)


class TestRunScenario:
    def test_closed_system_purity_is_one(self, tmp_path):
        text = """
        scenario = closed
        initial_state = bare_1
        pulses.peak_omega = 100.0
        pulses.ordering = counterintuitive
        detuning.delta0 = 1000.0
        output.samples = 101
        """
        cfg = build_config(parse_config_text(text))
        record = run_scenario(cfg, str(tmp_path))
        table = load_table(record.table_path)
        np.testing.assert_allclose(table["purity"], 1.0, atol=1e-8)

    def test_transfer_example(self, tmp_path):
        record = run_scenario(load_config("stirap_fig2"), str(tmp_path))
        assert record.summary["transfer_efficiency"] > 0.9

    def test_bright_transfer_example(self, tmp_path):
        record = run_scenario(load_config("bstirap_fig3"), str(tmp_path))
        assert record.summary["transfer_efficiency"] > 0.9

    def test_determinism_bitwise(self, tmp_path):
        cfg = load_config("stirap_fig2")
        cfg = ScenarioConfig(**{**cfg.__dict__, "samples": 60,
                                "rel_tol": 1e-7, "abs_tol": 1e-9})
        a = run_scenario(cfg, str(tmp_path / "a"))
        b = run_scenario(cfg, str(tmp_path / "b"))
        with open(a.table_path, "rb") as fh:
            bytes_a = fh.read()
        with open(b.table_path, "rb") as fh:
            bytes_b = fh.read()
        assert bytes_a == bytes_b


class TestRunSweep:
    def small(self, extra=""):
        text = f"""
        scenario = sweep_demo
        pulses.peak_omega = 50.0
        pulses.ordering = counterintuitive
        detuning.delta0 = 400.0
        output.samples = 30
        propagator.rel_tol = 1e-7
        propagator.abs_tol = 1e-9
        {extra}
        """
        return build_config(parse_config_text(text))

    def test_cross_product_grid(self, tmp_path):
        cfg = self.small("sweep.detuning.delta0 = 200, 400, 800\n"
                         "sweep.pulses.peak_omega = 40, 60, 80\n")
        records = run_sweep(cfg, str(tmp_path))
        assert len(records) == 9
        assert all(r.error is None for r in records)
        # order is grid order: first axis outermost
        assert records[0].params["detuning.delta0"] == 200.0
        assert records[0].params["pulses.peak_omega"] == 40.0
        assert records[1].params["pulses.peak_omega"] == 60.0

    def test_single_point_equals_run_scenario(self, tmp_path):
        cfg = self.small()
        records = run_sweep(cfg, str(tmp_path / "sweep"))
        direct = run_scenario(cfg, str(tmp_path / "direct"))
        assert len(records) == 1
        assert records[0].summary == direct.summary

    def test_per_point_failure_recorded(self, tmp_path):
        cfg = self.small("sweep.rates.gamma1 = 0.2, -1.0, 0.4\n")
        records = run_sweep(cfg, str(tmp_path))
        assert len(records) == 3
        assert records[0].error is None
        assert records[1].error is not None
        assert records[2].error is None

    def test_worker_pool_order_stable(self, tmp_path):
        cfg = self.small("sweep.detuning.delta0 = 200, 400, 800\n")
        seq = run_sweep(cfg, str(tmp_path / "seq"), workers=1)
        par = run_sweep(cfg, str(tmp_path / "par"), workers=3)
        assert [r.scenario_id for r in seq] == [r.scenario_id for r in par]
        for a, b in zip(seq, par):
            assert a.summary == b.summary

    def test_detuning_sweep_purity_monotone(self, tmp_path):
        """Bright-state mixing shrinks with detuning, so the minimum purity
        grows along the sweep."""
        text = """
        scenario = purity_sweep
        initial_state = bare_1
        rates.gamma1 = 0.5
        rates.gamma2 = 0.5
        rates.gamma2_deph = 0.1
        pulses.peak_omega = 100.0
        pulses.ordering = intuitive
        output.samples = 101
        propagator.rel_tol = 1e-8
        propagator.abs_tol = 1e-10
        sweep.detuning.delta0 = 200, 500, 1000
        """
        cfg = build_config(parse_config_text(text))
        records = run_sweep(cfg, str(tmp_path))
        minima = [r.summary["purity_min"] for r in records]
        assert minima[0] < minima[1] < minima[2]


class TestPropagatorPaths:
    """All configured method/basis routes land on the same physics."""

    def base_text(self, extra):
        return f"""
        scenario = route_check
        rates.gamma1 = 0.5
        rates.gamma2 = 0.5
        rates.gamma2_deph = 0.01
        pulses.peak_omega = 100.0
        pulses.ordering = counterintuitive
        detuning.delta0 = 1000.0
        output.samples = 101
        {extra}
        """

    def final_transfer(self, extra=""):
        cfg = build_config(parse_config_text(self.base_text(extra)))
        traj = run_trajectory(cfg)
        return float(traj.pops_bare[-1, 1])

    def test_adiabatic_basis_route(self):
        bare = self.final_transfer()
        adia = self.final_transfer("propagator.basis = adiabatic")
        assert abs(bare - adia) < 1e-6

    def test_fixed_rk4_route(self):
        bare = self.final_transfer()
        fixed = self.final_transfer("propagator.method = fixed_rk4\n"
                                    "propagator.n_steps = 20000")
        assert abs(bare - fixed) < 1e-5

    def test_expm_oracle_route(self):
        bare = self.final_transfer()
        oracle = self.final_transfer("propagator.method = expm_oracle\n"
                                     "propagator.n_slices = 2000")
        assert abs(bare - oracle) < 1e-4

    def test_shaped_detuning_route(self, tmp_path):
        text = """
        scenario = shaped_route
        rates.gamma1 = 0.5
        rates.gamma2 = 0.5
        rates.gamma2_deph = 0.01
        initial_state = adiabatic_2
        pulses.peak_omega = 100.0
        pulses.ordering = static
        detuning.kind = shaped
        detuning.delta0 = 7.0711
        detuning.gamma1 = 0.5
        detuning.t0 = 0.0
        output.samples = 101
        """
        cfg = build_config(parse_config_text(text))
        record = run_scenario(cfg, str(tmp_path))
        table = load_table(record.table_path)
        # the detuning column follows the exponential sweep
        assert table["delta"][0] == pytest.approx(7.0711 * np.hypot(100, 100),
                                                  rel=1e-6)
        assert table["delta"][-1] / table["delta"][0] == pytest.approx(
            np.exp(0.5), rel=1e-6)
        # a bright-state hold in the large-detuning regime barely decays
        assert record.summary["final_pop_adiabatic_2"] > 0.98


class TestMainEntry:
    def test_list_builtins(self, capsys):
        assert main(["list-builtins"]) == 0
        out = capsys.readouterr().out
        for name in BUILTINS:
            assert name in out

    def test_validate_builtin(self, capsys):
        assert main(["validate", "stirap_fig2"]) == 0

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("bogus = 1\n", encoding="utf-8")
        assert main(["validate", str(bad)]) == 2

    def test_run_with_flags(self, tmp_path, capsys):
        code = main(["--out-dir", str(tmp_path), "--samples", "40",
                     "--tol", "1e-7", "run", "stirap_fig2"])
        assert code == 0
        assert (tmp_path / "stirap_fig2.csv").exists()
        out = capsys.readouterr().out
        assert "transfer" in out

    def test_out_dir_env_default(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("THREELEVEL_OUT_DIR", str(tmp_path))
        code = main(["--samples", "30", "--tol", "1e-7", "run",
                     "hadamard_hold"])
        assert code == 0
        assert (tmp_path / "hadamard_hold.csv").exists()
