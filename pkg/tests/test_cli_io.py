import math
import xml.etree.ElementTree as ET
import pytest

import overfit_lab.cli as cli
from overfit_lab.config import parse_config, serialize_config
from overfit_lab.csvio import write_csv, write_singular_values_csv, write_spectrum_csv
from overfit_lab.errors import ConfigError, NumericError, PlotFieldError
from overfit_lab.experiments import (
    ExperimentConfig,
    ExperimentReport,
    TrialRecord,
    aggregate,
    run_condnum,
)
from overfit_lab.plotting import render_plot

# frozen output of run_condnum(n_grid=(8,), trials=2, master_seed=7);
# schema drift or any nondeterminism shows up as a byte difference here
GOLDEN_CONDNUM = """\
experiment,seed,N,M,trial,spectrum,law,kernel,s_max,s_min,condition_number,ratio_to_theory,s_min_over_n_lambda_n,s_min_over_n,min_p_squared,mse,bias,variance,m_truncated,variance_full,truncation_gap,truncation_bound,bound_holds
condnum,1082242704324474087,8,80,0,polynomial,gaussian,,9.937382405140124,0.06365397068214852,156.11567194702937,2.439307374172334,,,,,,,,,,,
condnum,219182256276397182,8,80,1,polynomial,gaussian,,7.194338032710189,0.05741825807979992,125.2970444124497,1.9577663189445265,,,,,,,,,,,
"""


class TestParseConfig:
    def test_empty_file_gives_protocol_defaults(self):
        cfg = parse_config("")
        assert cfg.eta == 10
        assert cfg.trials == 20
        assert cfg.n_test == 1000
        assert cfg.sigma == 1.0

    def test_eta_one_rejected_at_boundary(self):
        with pytest.raises(ConfigError, match="eta"):
            parse_config("eta = 1\n")

    def test_flag_override_beats_file(self):
        cfg = parse_config("trials = 20\n", overrides={"trials": "5"})
        assert cfg.trials == 5

    def test_unknown_key_names_key_and_line(self):
        with pytest.raises(ConfigError, match="line 2.*banana"):
            parse_config("trials = 3\nbanana = 7\n")

    def test_malformed_value_names_key_and_line(self):
        with pytest.raises(ConfigError, match="line 1.*trials"):
            parse_config("trials = many\n")

    def test_comments_and_blank_lines(self):
        cfg = parse_config("# protocol\n\ntrials = 3  # fewer\nn_grid = 8, 16\n")
        assert cfg.trials == 3
        assert cfg.n_grid == (8, 16)

    def test_unknown_override_rejected(self):
        with pytest.raises(ConfigError, match="override.*banana"):
            parse_config("", overrides={"banana": "1"})

    def test_round_trip(self):
        cfg = ExperimentConfig(
            experiment="learning_curve", spectrum="exponential", a=0.5,
            n_grid=(16, 32), trials=4, sigma=0.25, master_seed=99,
            anchors_in_training=True, truncation_etas=(3, 7),
            interval_hi=1.75, out="results.csv",
        )
        assert parse_config(serialize_config(cfg)) == cfg

    def test_invariants_surface_as_config_errors(self):
        with pytest.raises(ConfigError):
            parse_config("n_grid = 64, 32\n")


class TestCsv:
    def _mini_report(self):
        cfg = ExperimentConfig(experiment="condnum", n_grid=(8,), trials=2,
                               master_seed=7)
        return run_condnum(cfg)

    def test_empty_report_header_only(self, tmp_path):
        cfg = ExperimentConfig()
        path = tmp_path / "empty.csv"
        write_csv(ExperimentReport(cfg, [], {}), path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("experiment,seed,N,M,trial")

    def test_single_record_two_lines(self, tmp_path):
        cfg = ExperimentConfig()
        rec = TrialRecord("condnum", seed=1, N=8, M=80, trial=0, mse=0.125)
        path = tmp_path / "one.csv"
        write_csv(ExperimentReport(cfg, [rec], {}), path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert ",0.125," in lines[1]

    def test_rewrite_is_byte_identical(self, tmp_path):
        report = self._mini_report()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(report, p1)
        write_csv(report, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_golden_file(self, tmp_path):
        report = self._mini_report()
        path = tmp_path / "golden.csv"
        write_csv(report, path)
        assert path.read_text() == GOLDEN_CONDNUM

    def test_inf_sentinel(self, tmp_path):
        cfg = ExperimentConfig()
        rec = TrialRecord("condnum", seed=1, N=8, M=80, trial=0,
                          condition_number=math.inf)
        path = tmp_path / "inf.csv"
        write_csv(ExperimentReport(cfg, [rec], {}), path)
        assert ",inf," in path.read_text()

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "lf.csv"
        write_csv(self._mini_report(), path)
        raw = path.read_bytes()
        assert b"\r" not in raw

    def test_spectrum_csv(self, tmp_path):
        from overfit_lab.spectra import make_spectrum

        path = tmp_path / "spec.csv"
        write_spectrum_csv(make_spectrum("polynomial", 1.0, 3), path)
        assert path.read_text() == "k,lambda_k\n1,1.0\n2,0.25\n3,0.1111111111111111\n"

    def test_singular_values_csv(self, tmp_path):
        path = tmp_path / "sv.csv"
        write_singular_values_csv([4.0, 1.0], path)
        assert path.read_text() == "index,singular_value\n1,4.0\n2,1.0\n"


def _toy_report(ns=(8, 16, 32), laws=("gaussian",), value=lambda n, i: 1.0 + i):
    cfg = ExperimentConfig()
    recs = []
    for law in laws:
        for n in ns:
            for i in range(3):
                recs.append(TrialRecord(
                    "condnum", seed=i, N=n, M=10 * n, trial=i,
                    spectrum="polynomial", law=law,
                    ratio_to_theory=value(n, i),
                ))
    return ExperimentReport(cfg, recs, aggregate(recs))


class TestRenderPlot:
    def test_single_n_marker_only(self, tmp_path):
        report = _toy_report(ns=(8,))
        path = tmp_path / "one.svg"
        render_plot(report, path, y_field="ratio_to_theory")
        text = path.read_text()
        ET.fromstring(text)  # well-formed XML
        assert "<polyline" not in text
        assert "<circle" in text

    def test_series_per_varying_group(self, tmp_path):
        report = _toy_report(laws=("gaussian", "cosine"))
        path = tmp_path / "two.svg"
        render_plot(report, path, y_field="ratio_to_theory")
        text = path.read_text()
        assert text.count("<polyline") == 2
        assert ">cosine<" in text and ">gaussian<" in text

    def test_nonfinite_dropped_with_count(self, tmp_path):
        report = _toy_report(value=lambda n, i: math.inf if n == 16 else 1.0)
        path = tmp_path / "drop.svg"
        render_plot(report, path, y_field="ratio_to_theory")
        text = path.read_text()
        assert "<!-- dropped-points: 1 -->" in text

    def test_missing_field(self, tmp_path):
        report = _toy_report()
        with pytest.raises(PlotFieldError):
            render_plot(report, tmp_path / "x.svg", y_field="mse")

    def test_log_axes_deterministic(self, tmp_path):
        report = _toy_report()
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        render_plot(report, p1, y_field="ratio_to_theory", log_x=True, log_y=True)
        render_plot(report, p2, y_field="ratio_to_theory", log_x=True, log_y=True)
        assert p1.read_bytes() == p2.read_bytes()


class TestCli:
    def test_condnum_end_to_end(self, tmp_path):
        out = tmp_path / "out.csv"
        plot = tmp_path / "out.svg"
        code = cli.main([
            "condnum", "--out", str(out), "--plot", str(plot),
            "--n_grid", "8", "--trials", "2",
        ])
        assert code == 0
        assert out.read_text().startswith("experiment,seed,N,M,trial")
        assert plot.read_text().startswith("<?xml")

    def test_config_file_plus_flags(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("trials = 4\nn_grid = 8\n")
        out = tmp_path / "o.csv"
        code = cli.main(["condnum", "--config", str(cfg_file),
                         "--trials", "2", "--out", str(out)])
        assert code == 0
        assert out.read_text().count("\n") == 1 + 2  # header + two trials

    def test_validation_error_exit_code(self, tmp_path, capsys):
        code = cli.main(["condnum", "--out", str(tmp_path / "x.csv"),
                         "--eta", "1"])
        assert code == 1
        assert "eta" in capsys.readouterr().err

    def test_unknown_flag_exit_code(self, tmp_path):
        assert cli.main(["condnum", "--out", str(tmp_path / "x.csv"),
                         "--banana", "1"]) == 1

    def test_numeric_failure_exit_code(self, tmp_path, monkeypatch):
        def boom(cfg):
            raise NumericError("synthetic")

        monkeypatch.setattr(cli, "run_experiment", boom)
        assert cli.main(["condnum", "--out", str(tmp_path / "x.csv"),
                         "--n_grid", "8", "--trials", "1"]) == 2

    def test_env_seed_override(self, tmp_path, monkeypatch):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        out3 = tmp_path / "c.csv"
        args = ["condnum", "--n_grid", "8", "--trials", "1"]
        assert cli.main(args + ["--out", str(out1)]) == 0
        monkeypatch.setenv("OVERFIT_LAB_SEED", "12345")
        assert cli.main(args + ["--out", str(out2)]) == 0
        # explicit flag still wins over the environment
        assert cli.main(args + ["--out", str(out3),
                                "--master_seed", "2024"]) == 0
        assert out1.read_bytes() != out2.read_bytes()
        assert out1.read_bytes() == out3.read_bytes()

    def test_spectrum_dump(self, tmp_path):
        out = tmp_path / "spec.csv"
        code = cli.main(["spectrum-dump", "--out", str(out),
                         "--spectrum_length", "4"])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,lambda_k"
        assert lines[1] == "1,1.0"
        assert len(lines) == 5

    def test_hyphenated_flags_accepted(self, tmp_path):
        out = tmp_path / "h.csv"
        assert cli.main(["condnum", "--n-grid", "8", "--trials", "1",
                         "--out", str(out)]) == 0

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["condnum", "--config", str(tmp_path / "nope.cfg"),
                         "--out", str(tmp_path / "x.csv")]) == 1
