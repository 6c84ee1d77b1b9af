"""Command-line surface: every subcommand end to end, plus determinism."""

import pathlib
import wave

import numpy as np

from gef.cli import main


def run(argv):
    return main(argv)


def make_wav(path, freq=500.0, fs=16000, duration=0.02):
    t = np.arange(int(fs * duration)) / fs
    samples = (0.5 * np.sin(2 * np.pi * freq * t) * 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(fs)
        wf.writeframes(samples.tobytes())


def make_csv_signal(path, fs=20000, duration=0.02):
    t = np.arange(int(fs * duration)) / fs
    v = np.exp(-(((t - 0.008) / 0.003) ** 2)) * np.sin(2 * np.pi * 400.0 * t)
    lines = ["t,value"] + [f"{ti:.10g},{vi:.10g}" for ti, vi in zip(t, v)]
    path.write_text("\n".join(lines) + "\n")


class TestBode:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "bode.csv"
        assert run(["bode", "--Ap", "0.05", "--Bu", "2.5", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "beta,mag_db,phase_cycles"
        assert len(lines) == 1025

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert run(["bode", "--Ap", "0.1", "--Bu", "7/2", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_empty_grid_is_usage_error(self, tmp_path, capsys):
        code = run(["bode", "--Ap", "0.05", "--Bu", "2.5", "-n", "0",
                    "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_plot_script_sidecar(self, tmp_path):
        out = tmp_path / "bode.csv"
        assert run(["bode", "--Ap", "0.05", "--out", str(out), "--plot-script"]) == 0
        assert (tmp_path / "bode.csv.gnuplot").exists()


class TestChars:
    def test_sweep(self, tmp_path):
        out = tmp_path / "chars.csv"
        assert run(["chars", "--Ap", "0.1", "--Bu-start", "2", "--Bu-stop", "4",
                    "--Bu-step", "0.5", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("B_u,beta_peak,Q_erb")
        assert len(lines) == 6


class TestImpulse:
    def test_scaled_time_table(self, tmp_path):
        out = tmp_path / "h.csv"
        assert run(["impulse", "--Ap", "0.1", "--Bu", "2", "--t-max", "50",
                    "--step", "0.05", "--gtf", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t_tilde,h,h_gtf"
        assert len(lines) == 1002

    def test_seconds_table(self, tmp_path):
        out = tmp_path / "g.csv"
        assert run(["impulse", "--Ap", "0.1", "--Bu", "2", "--cf", "1000",
                    "--t-max", "40", "--step", "0.05", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "t_seconds,g"

    def test_tf_overlay(self, tmp_path):
        out = tmp_path / "tf.csv"
        assert run(["impulse", "--Ap", "0.1", "--Bu", "2", "--t-max", "400",
                    "--step", "0.05", "--gtf", "--tf-of-h", "--out", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert header == "beta,mag_db_h,mag_db_h_gtf,mag_db_tf"


class TestFilter:
    def test_csv_input(self, tmp_path):
        sig = tmp_path / "sig.csv"
        make_csv_signal(sig)
        out = tmp_path / "out.csv"
        assert run(["filter", "--Ap", "0.1", "--Bu", "5/2", "--cf", "400",
                    "--input", str(sig), "--method", "integral", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t_seconds,q"
        assert len(lines) == 401

    def test_wav_input(self, tmp_path):
        wav = tmp_path / "sig.wav"
        make_wav(wav)
        out = tmp_path / "out.csv"
        assert run(["filter", "--Ap", "0.1", "--Bu", "2", "--cf", "500",
                    "--input", str(wav), "--method", "convolution", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 321

    def test_missing_cf_is_validation_error(self, tmp_path, capsys):
        sig = tmp_path / "sig.csv"
        make_csv_signal(sig)
        code = run(["filter", "--Ap", "0.1", "--Bu", "2", "--input", str(sig)])
        assert code == 1

    def test_ode_with_rational_exponent_is_validation_error(self, tmp_path):
        sig = tmp_path / "sig.csv"
        make_csv_signal(sig)
        code = run(["filter", "--Ap", "0.1", "--Bu", "5/2", "--cf", "400",
                    "--input", str(sig), "--method", "ode"])
        assert code == 1


class TestBank:
    def test_long_and_spectrogram_outputs(self, tmp_path):
        sig = tmp_path / "sig.csv"
        make_csv_signal(sig)
        out = tmp_path / "bank.csv"
        spec = tmp_path / "spec.csv"
        assert run(["bank", "--Ap", "0.1", "--Bu", "2", "--cf-map", "log:3,300,1200",
                    "--input", str(sig), "--method", "convolution", "--frame", "0.004",
                    "--out", str(out), "--spectrogram-out", str(spec)]) == 0
        assert out.read_text().splitlines()[0] == "cf_hz,t_seconds,q"
        spec_lines = spec.read_text().splitlines()
        assert spec_lines[0].startswith("cf_hz,")
        assert len(spec_lines) == 4

    def test_bad_map_spec(self, tmp_path):
        sig = tmp_path / "sig.csv"
        make_csv_signal(sig)
        assert run(["bank", "--Ap", "0.1", "--Bu", "2", "--cf-map", "banana",
                    "--input", str(sig)]) == 1


class TestEquiv:
    def test_integer_case_table(self, tmp_path):
        out = tmp_path / "equiv.csv"
        assert run(["equiv", "integer", "--Ap", "0.1", "--bp", "1", "--Bu", "3",
                    "--grid-step", "0.02", "--t-max", "30", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "case,method,max_abs,rel_max,early,late"
        rows = {ln.split(",")[1]: float(ln.split(",")[3]) for ln in lines[1:]}
        assert rows["integral"] <= 1e-3
        assert rows["ode_rk4"] <= 1e-3
        assert rows["convolution"] <= 1e-3

    def test_half_integer_case_table(self, tmp_path):
        out = tmp_path / "equiv.csv"
        assert run(["equiv", "half-integer", "--grid-step", "0.02", "--t-max", "30",
                    "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert any(ln.split(",")[1] == "dft" for ln in lines[1:])


class TestCascadeCheck:
    def test_passes(self, capsys):
        assert run(["cascade-check", "--Bu", "5/2"]) == 0
        assert "pass" in capsys.readouterr().out

    def test_exponent_snapping_reported(self, capsys):
        assert run(["cascade-check", "--Bu", "2.5000001"]) == 0
        assert "snapped" in capsys.readouterr().err


class TestConfig:
    def test_config_supplies_defaults(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("ap = 0.05\nbu = 5/2\n")
        out = tmp_path / "bode.csv"
        assert run(["--config", str(cfg), "bode", "--Ap", "0.05", "--out", str(out)]) == 0
        assert out.exists()

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("this is not a key value pair\n")
        assert run(["--config", str(cfg), "cascade-check", "--Bu", "2"]) == 1


class TestGoldenFiles:
    """Byte-stable regression against frozen outputs, plus an independent
    numeric cross-check of the frozen values (closed-form magnitude/phase
    route, not the grid/unwrap route the CLI uses)."""

    GOLDEN = pathlib.Path(__file__).parent / "oracles"

    def test_bode_bytes_stable(self, tmp_path):
        out = tmp_path / "bode.csv"
        assert run(["bode", "--Ap", "0.1", "--Bu", "5/2", "--beta-min", "0.1",
                    "--beta-max", "3.0", "-n", "64", "--out", str(out)]) == 0
        assert out.read_bytes() == (self.GOLDEN / "bode_golden.csv").read_bytes()

    def test_bode_golden_values_against_closed_form(self):
        from gef.characteristics import magnitude_db_rel_peak, phase
        from gef.core import FilterParams

        rows = np.genfromtxt(self.GOLDEN / "bode_golden.csv", delimiter=",", names=True)
        params = FilterParams(0.1, 1.0, B_u="5/2")
        betas = rows["beta"]
        mag = magnitude_db_rel_peak(params, betas)
        mag -= np.max(mag)  # grid-referenced like the CLI output
        np.testing.assert_allclose(rows["mag_db"], mag, rtol=1e-10, atol=1e-10)
        ph = (phase(params, betas) - phase(params, betas[0])) / (2 * np.pi)
        np.testing.assert_allclose(rows["phase_cycles"], ph, rtol=1e-10, atol=1e-10)

    def test_chars_bytes_stable(self, tmp_path):
        out = tmp_path / "chars.csv"
        assert run(["chars", "--Ap", "0.1", "--Bu-start", "2", "--Bu-stop", "3",
                    "--Bu-step", "0.5", "--out", str(out)]) == 0
        assert out.read_bytes() == (self.GOLDEN / "chars_golden.csv").read_bytes()


class TestSignalExport:
    def test_sampled_signal_csv(self):
        from gef.core import Domain, SampledSignal
        from gef.signals import integer_equiv_input

        sig = integer_equiv_input().sample(0.5, 4)
        lines = sig.to_csv().splitlines()
        assert lines[0] == "t_tilde,value"
        assert len(lines) == 5
        seconds = SampledSignal(np.zeros(2), 1e-3, Domain.SECONDS)
        assert seconds.to_csv().splitlines()[0] == "t_seconds,value"
