import csv
import json

import numpy as np
import pytest

from rtnsim.cli import main
from rtnsim.config import from_dict
from rtnsim.errors import ConfigError


def write_config(tmp_path, **data):
    data.setdefault("master_seed", 1)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_noise_trace_deterministic(tmp_path):
    cfg = write_config(tmp_path, noise={"tau_c_ns": 10.0, "j0_mhz": 1.0})
    assert main(["noise-trace", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["noise-trace", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a_noise_trace.csv").read_bytes()
    assert a == (tmp_path / "b_noise_trace.csv").read_bytes()
    header, data = read_csv(tmp_path / "a_noise_trace.csv")
    assert header == ["t_ns", "value"]
    np.testing.assert_allclose(np.abs(data[:, 1]), 1e-3)
    assert b"\r\n" not in a


def _jump_count(tmp_path, tau_c, seed):
    cfg = write_config(tmp_path, master_seed=seed, noise={"tau_c_ns": tau_c, "j0_mhz": 1.0},
                       noise_trace={"duration_ns": 300.0, "sample_step_ns": 0.05})
    out = tmp_path / f"t{tau_c}_{seed}"
    assert main(["noise-trace", "--config", cfg, "--out", str(out)]) == 0
    _, data = read_csv(f"{out}_noise_trace.csv")
    return int(np.count_nonzero(np.diff(data[:, 1])))


def test_fewer_jumps_for_longer_correlation_time(tmp_path):
    wins = sum(_jump_count(tmp_path, 10.0, s) > _jump_count(tmp_path, 30.0, s) for s in range(10))
    assert wins >= 9


def test_zero_amplitude_trace_is_zero(tmp_path):
    cfg = write_config(tmp_path, noise={"j0_mhz": 0.0})
    assert main(["noise-trace", "--config", cfg, "--out", str(tmp_path / "z")]) == 0
    _, data = read_csv(tmp_path / "z_noise_trace.csv")
    assert np.all(data[:, 1] == 0)


def test_spectrum_batch_and_fit(tmp_path):
    cfg = write_config(tmp_path, noise={"j0_mhz": 1.0},
                       spectrum={"tau_c_ns": [1, 10, 30], "n_realizations": 20,
                                 "fit_band_per_ns": [0.2, 0.5]})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    for tag in ("1", "10", "30"):
        header, data = read_csv(tmp_path / f"s_spectrum_tc{tag}.csv")
        assert header == ["f_per_ns", "psd", "lorentzian_ref"]
        fit = json.loads((tmp_path / f"s_spectrum_tc{tag}_fit.json").read_text())
        assert set(fit) == {"c", "alpha", "f_lo", "f_hi", "residual"}


def test_spectrum_tracks_lorentzian(tmp_path):
    cfg = write_config(tmp_path, noise={"j0_mhz": 1.0, "tau_c_ns": 10.0},
                       spectrum={"n_realizations": 4000, "sampling": "cell"})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    _, data = read_csv(tmp_path / "s_spectrum.csv")
    f, psd, ref = data.T
    band = (f >= 1 / 20000) & (f <= 0.5)
    assert np.max(np.abs(psd[band] / ref[band] - 1)) < 0.10


def test_spectrum_self_test(tmp_path):
    cfg = write_config(tmp_path, spectrum={"n_realizations": 1})
    assert main(["spectrum", "--self-test", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    out = json.loads((tmp_path / "s_spectrum_selftest.json").read_text())
    assert out["passed"] and out["alpha"] == pytest.approx(0.89, abs=1e-10)


def test_evolve_noise_free(tmp_path):
    cfg = write_config(tmp_path, noise={"j0_mhz": 0.0}, ensemble={"n_trajectories": 10, "batch_size": 5},
                       protocol={"db_mode": "off_after_prep"})
    assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "e")]) == 0
    header, data = read_csv(tmp_path / "e_evolve.csv")
    assert header == ["t_ns", "ddse", "concurrence", "ddse_stderr"]
    t, d, c, _ = data.T
    assert np.all(np.abs(d[t <= 25]) < 1e-9)
    post = t > 25
    np.testing.assert_allclose(d[post], c[post], atol=1e-9)
    assert np.all(c[post] >= 0)


def _envelope_peak(tmp_path, name, **noise):
    cfg = write_config(tmp_path, master_seed=4, noise=noise,
                       ensemble={"n_trajectories": 1000, "batch_size": 100},
                       protocol={"entangle_duration_ns": 300.0})
    assert main(["evolve", "--config", cfg, "--out", str(tmp_path / name)]) == 0
    _, data = read_csv(tmp_path / f"{name}_evolve.csv")
    return data[:, 2].max()


def test_evolve_decay_ordering(tmp_path):
    base = _envelope_peak(tmp_path, "a", tau_c_ns=9.0, j0_mhz=11.6)
    stronger = _envelope_peak(tmp_path, "b", tau_c_ns=9.0, j0_mhz=23.2)
    slower = _envelope_peak(tmp_path, "c", tau_c_ns=18.0, j0_mhz=11.6)
    assert stronger < base and slower < base


def test_sweep_output_and_worker_invariance(tmp_path):
    cfg = write_config(tmp_path, ensemble={"n_trajectories": 200, "batch_size": 50},
                       sweep={"mode": "prep", "values": [10.0, 30.0], "R": 2.0})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "w1"), "--workers", "1"]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "w4"), "--workers", "4"]) == 0
    a = (tmp_path / "w1_sweep_prep.csv").read_bytes()
    assert a == (tmp_path / "w4_sweep_prep.csv").read_bytes()
    header, data = read_csv(tmp_path / "w1_sweep_prep.csv")
    assert header == ["swept_value", "max_concurrence", "t_star_ns", "stderr"]
    np.testing.assert_array_equal(data[:, 0], [10.0, 30.0])


def test_mode_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, ensemble={"n_trajectories": 100, "batch_size": 100},
                       sweep={"mode": "prep", "values": [1.0]})
    assert main(["sweep", "--config", cfg, "--mode", "R", "--out", str(tmp_path / "m")]) == 0
    assert (tmp_path / "m_sweep_R.csv").exists()


def test_missing_seed_is_an_error(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"noise": {"tau_c_ns": 3.0}}))
    assert main(["evolve", "--config", str(path)]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error category=config")


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path, noise={"tau_c": 3.0})
    assert main(["noise-trace", "--config", cfg]) == 2
    assert "tau_c" in capsys.readouterr().err


def test_invalid_physics_reported_as_config(tmp_path, capsys):
    cfg = write_config(tmp_path, noise={"tau_c_ns": -1.0})
    assert main(["noise-trace", "--config", cfg]) == 2
    assert capsys.readouterr().err.startswith("error category=config")


def test_spectrum_too_short_is_parameter_error(tmp_path, capsys):
    cfg = write_config(tmp_path, noise={"tau_c_ns": 100.0}, spectrum={"n_realizations": 1})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / "s")]) == 2
    assert capsys.readouterr().err.startswith("error category=parameter")


def test_unwritable_output(tmp_path, capsys):
    cfg = write_config(tmp_path)
    target = tmp_path / "missing_dir" / "x"
    assert main(["noise-trace", "--config", cfg, "--out", str(target)]) == 3
    err = capsys.readouterr().err
    assert err.startswith("error category=io") and "missing_dir" in err


def test_bad_json(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    assert main(["evolve", "--config", str(path)]) == 2


def test_config_defaults():
    cfg = from_dict({"master_seed": 9})
    assert cfg.noise.j0_convention == "angular"
    assert cfg.noise.amplitude() == pytest.approx(0.0116)
    assert cfg.ensemble.n_trajectories == 5000 and cfg.ensemble.batch_size == 100
    with pytest.raises(ConfigError):
        from_dict({"master_seed": True})
