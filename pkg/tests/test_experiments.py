import json
import math

import pytest
import yaml

from lbmbsn import __version__
from lbmbsn.cli import main
from lbmbsn.config import KINDS, PROFILES, SWEEP_DEFAULTS, default_config, dump_spec, load_config, validate
from lbmbsn.errors import ConfigError
from lbmbsn.experiments import TOL, resolve_threads, run


def small_tauc(tmp_path, name="a", **extra):
    raw = {"kind": "tauc_sweep", "magnets": ["M1"], "classes": ["IMA_circular"],
           "sweep": {"ns_min": 3e5, "ns_max": 3e5, "n_points": 1}, "base_seed": 7, **extra}
    return validate(raw, profile="smoke", output_dir=str(tmp_path / name))


def test_defaults_fill_every_kind():
    for kind in KINDS:
        spec = validate(default_config(kind))
        assert spec.kind == kind and spec.profile == "strict"
        assert spec.output_dir == f"runs/{kind}"
        assert set(SWEEP_DEFAULTS[kind]) <= set(spec.sweep)
        assert [m["name"] for m in spec.magnets] == ["M1", "M2"]
    assert validate(default_config("step_response")).ensemble_size == 100


def test_smoke_profile_scales_durations():
    strict = validate({"kind": "boltzmann"})
    smoke = validate({"kind": "boltzmann"}, profile="smoke")
    assert smoke.sweep["ima_duration_tau"] == 2200.0  # floor wins over 600
    assert smoke.sweep["pma_duration_tau"] == pytest.approx(4000.0)
    assert strict.sweep["ima_duration_tau"] == 6000.0
    assert smoke.tolerance_scale == pytest.approx(math.sqrt(10))
    assert PROFILES["strict"].tolerance_scale == 1.0


def test_numbers_from_strings():
    spec = validate({"kind": "tauc_sweep", "sweep": {"ns_min": "1e5", "ns_max": "1e6"}})
    assert spec.sweep["ns_min"] == 1e5


@pytest.mark.parametrize("raw,path", [
    ({"kind": "nope"}, "kind"),
    ({"kind": "step_response", "ensemble_size": 0}, "ensemble_size"),
    ({"kind": "step_response", "ensemble_size": 50}, "ensemble_size"),
    ({"kind": "sigmoid", "magnets": ["M1", "M1"]}, "magnets[1].name"),
    ({"kind": "sigmoid", "magnets": ["M7"]}, "magnets[0].preset"),
    ({"kind": "sigmoid", "magnets": [{"name": "x", "colour": 1}]}, "magnets[0]"),
    ({"kind": "sigmoid", "designs": ["C_magic"]}, "designs[0]"),
    ({"kind": "sigmoid", "sweep": {"avg_window_tau": -1}}, "sweep.avg_window_tau"),
    ({"kind": "sigmoid", "sweep": {"ns_min": 1}}, "sweep"),
    ({"kind": "tauc_sweep", "sweep": {"ns_min": 1e6, "ns_max": 1e5}}, "sweep.ns_max"),
    ({"kind": "tauc_sweep", "base_seed": -1}, "base_seed"),
    ({"kind": "tauc_sweep", "temperature": 0}, "temperature"),
    ({"kind": "tauc_sweep", "dt": {"IMA_circular": "auto"}}, "dt.IMA_circular"),
    ({"kind": "tauc_sweep", "extra": 1}, "<root>"),
    ({"kind": "step_response", "sweep": {"step_to": -10}}, "sweep.step_to"),
])
def test_rejections_name_the_field(raw, path):
    with pytest.raises(ConfigError) as exc:
        validate(raw)
    assert exc.value.path == path
    assert str(exc.value).startswith(f"{path}: ")


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: [unterminated\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    (tmp_path / "list.yaml").write_text("- 1\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "list.yaml")


def test_dump_roundtrip(tmp_path):
    spec = validate({"kind": "sigmoid", "magnets": [{"name": "big", "preset": "M2", "alpha": 0.02}]})
    dump_spec(spec, tmp_path / "s.yaml")
    again = validate(yaml.safe_load((tmp_path / "s.yaml").read_text()))
    assert again.digest() == spec.digest()
    assert again.magnet_specs()[0].alpha == 0.02


def test_digest_ignores_output_dir_only():
    a = validate({"kind": "sigmoid"}, output_dir="x")
    b = validate({"kind": "sigmoid"}, output_dir="y")
    c = validate({"kind": "sigmoid"}, seed=1)
    assert a.digest() == b.digest() != c.digest()


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("LBMBSN_THREADS", raising=False)
    assert resolve_threads() == 1
    monkeypatch.setenv("LBMBSN_THREADS", "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2


def test_tolerances_are_positive():
    assert all(v > 0 for v in TOL.values())


def test_run_writes_manifest_and_is_deterministic(tmp_path):
    m1 = run(small_tauc(tmp_path, "a"))
    m2 = run(small_tauc(tmp_path, "b"))
    d1 = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert d1["status"] == "pass" and m1.exit_code == 0
    assert d1["version"] == __version__ and d1["base_seed"] == 7 and d1["profile"] == "smoke"
    assert m1.spec_hash == m2.spec_hash
    assert [f["sha256"] for f in m1.files] == [f["sha256"] for f in m2.files]
    assert (tmp_path / "a" / "tauc_sweep.csv").read_bytes() == (tmp_path / "b" / "tauc_sweep.csv").read_bytes()
    names = [q["name"] for q in m1.quantities]
    assert any(n.startswith("tau_c[IMA_circular") for n in names)
    header = (tmp_path / "a" / "tauc_sweep.csv").read_text().splitlines()[0]
    assert header.startswith("class,")


def test_threads_do_not_change_results(tmp_path):
    a = run(small_tauc(tmp_path, "a"), threads=1)
    b = run(small_tauc(tmp_path, "b"), threads=2)
    assert [f["sha256"] for f in a.files] == [f["sha256"] for f in b.files]


def test_seed_changes_results(tmp_path):
    a = run(small_tauc(tmp_path, "a"))
    b = run(small_tauc(tmp_path, "b", base_seed=8))
    assert a.spec_hash != b.spec_hash
    assert [f["sha256"] for f in a.files] != [f["sha256"] for f in b.files]


def test_cli_config_error_exit(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({"kind": "step_response", "ensemble_size": 0}))
    assert main(["step_response", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "ensemble_size" in capsys.readouterr().err
    assert main(["sigmoid", "--config", str(cfg)]) == 2  # kind mismatch
    assert main(["suite", "--config", str(cfg)]) == 2


def test_cli_runs_small_config(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({"kind": "tauc_sweep", "magnets": ["M1"], "classes": ["IMA_circular"],
                                   "sweep": {"ns_min": 3e5, "ns_max": 3e5, "n_points": 1}}))
    code = main(["tauc_sweep", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "3",
                 "--tolerance-profile", "smoke"])
    assert code == 0
    out = capsys.readouterr().out
    assert "tauc_sweep: pass" in out
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["base_seed"] == 3


def test_power_trace_smoke(tmp_path):
    spec = validate({"kind": "power_trace", "magnets": ["M1"], "designs": ["B_series_fet"]},
                    profile="smoke", output_dir=str(tmp_path / "p"))
    m = run(spec)
    assert m.exit_code == 0, m.breaches
    names = {q["name"] for q in m.quantities}
    assert any(n.startswith("p_mtj[") for n in names)


def test_cli_runtime_error_exit(tmp_path, monkeypatch, capsys):
    from lbmbsn import experiments
    from lbmbsn.errors import IntegrationError

    def boom(spec, run):
        raise IntegrationError("diverged", step_index=5)

    monkeypatch.setitem(experiments.RUNNERS, "sigmoid", boom)
    assert main(["sigmoid", "--out", str(tmp_path / "o")]) == 3
    assert "diverged" in capsys.readouterr().err
