import json

import pytest

from latticedex import InvariantViolation, load_code
from latticedex.cli import (
    ExperimentSpec,
    _parse_sets,
    _parse_snr,
    build_from_spec,
    main,
    resolve_primes,
    spec_from_preset,
)
from latticedex.errors import InvalidArgument
from latticedex.presets import (
    PRESET_PRIME_SELECTORS,
    preset_field_and_primes,
    preset_names,
)


# ---- spec plumbing ----

def test_experiment_spec_round_trip():
    spec = spec_from_preset("example1")
    again = ExperimentSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert again == spec


def test_experiment_spec_rejects_unknown_keys():
    with pytest.raises(InvalidArgument):
        ExperimentSpec.from_dict({"label": "x", "snr": [10]})


def test_preset_selectors_reproduce_preset_primes():
    for name in preset_names():
        field, primes = preset_field_and_primes(name)
        resolved = resolve_primes(field, PRESET_PRIME_SELECTORS[name])
        assert len(resolved) == len(primes)
        for a, b in zip(resolved, primes):
            assert a == b


def test_build_from_spec_matches_preset(ex3_code):
    spec = spec_from_preset("example3")
    code = build_from_spec(spec)
    assert code.content_hash() == ex3_code.content_hash()


def test_resolve_primes_errors():
    field, _ = preset_field_and_primes("example2")
    with pytest.raises(InvalidArgument) as e:
        resolve_primes(field, [{"split_completely": 11}])  # 11 is inert
    assert "inert" in str(e.value)
    with pytest.raises(InvalidArgument) as e:
        resolve_primes(field, [{"above": 7, "index": 2}])
    assert "h=2" in str(e.value)
    with pytest.raises(InvalidArgument):
        resolve_primes(field, [{"nonsense": 3}])
    with pytest.raises(InvalidArgument):
        resolve_primes(field, ["7"])


def test_parse_snr():
    assert _parse_snr("10,12,14") == [10.0, 12.0, 14.0]
    assert _parse_snr("10:20:5") == [10.0, 15.0, 20.0]
    assert _parse_snr("10:11:0.5") == [10.0, 10.5, 11.0]
    with pytest.raises(InvalidArgument):
        _parse_snr("10:20")
    with pytest.raises(InvalidArgument):
        _parse_snr("10:20:-2")


def test_parse_sets():
    assert _parse_sets("[[],[1],[1,2]]", 2) == [[], [1], [1, 2]]
    assert _parse_sets("all", 2) == [[1], [2], [1, 2]]
    with pytest.raises(InvalidArgument):
        _parse_sets("not json", 2)
    with pytest.raises(InvalidArgument):
        _parse_sets("[1,2]", 2)


# ---- exit codes ----

def test_missing_subcommand_exits_1(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1


def test_design_without_source_exits_1(capsys):
    assert main(["design"]) == 1
    assert "preset" in capsys.readouterr().err


def test_missing_config_file_exits_1(tmp_path, capsys):
    assert main(["design", "--config", str(tmp_path / "absent.json")]) == 1


def test_malformed_config_exits_1(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["design", "--config", str(path)]) == 1
    path.write_text(json.dumps({"label": "x", "unknown_key": 1}))
    assert main(["design", "--config", str(path)]) == 1


def test_infeasible_design_exits_3(tmp_path, capsys):
    spec = spec_from_preset("example1")
    spec.enumeration_cap = 10
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert main(["design", "--config", str(path), "--out-dir", str(tmp_path)]) == 3
    assert "infeasible" in capsys.readouterr().err


def test_invariant_violation_exits_2(monkeypatch, capsys):
    import latticedex.cli as cli_mod

    def boom(args):
        raise InvariantViolation("made up for the exit-code path")

    # main() rebuilds the parser each call, so the stub is picked up
    monkeypatch.setattr(cli_mod, "cmd_presets", boom)
    assert cli_mod.main(["presets"]) == 2
    assert "invariant" in capsys.readouterr().err


def test_bad_simulate_arguments_exit_1(tmp_path, capsys):
    assert main(["simulate", "--preset", "example1", "--trials", "0",
                 "--out-dir", str(tmp_path)]) == 1
    assert main(["simulate", "--preset", "example1", "--min-errors", "0",
                 "--out-dir", str(tmp_path)]) == 1
    assert main(["simulate", "--preset", "example1", "--snr", "10:20",
                 "--out-dir", str(tmp_path)]) == 1
    assert main(["simulate", "--preset", "example1", "--snr", "1,2",
                 "--sets", "oops", "--out-dir", str(tmp_path)]) == 1


# ---- design ----

def test_design_writes_code_and_points(tmp_path, capsys, ex1_code):
    rc = main(["design", "--preset", "example1", "--out-dir", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "55 points" in out
    code_path = tmp_path / "example1_code.json"
    points_path = tmp_path / "example1_points.csv"
    assert code_path.exists() and points_path.exists()
    code = load_code(code_path)
    assert code.content_hash() == ex1_code.content_hash()
    lines = points_path.read_text().splitlines()
    assert lines[0] == "index,label,c0,c1,x0,x1"
    assert len(lines) == 56


def test_design_regeneration_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["design", "--preset", "example2", "--out-dir", str(a)]) == 0
    assert main(["design", "--preset", "example2", "--out-dir", str(b)]) == 0
    assert (a / "example2_code.json").read_bytes() == (b / "example2_code.json").read_bytes()
    assert (a / "example2_points.csv").read_bytes() == (b / "example2_points.csv").read_bytes()


def test_design_from_config_matches_preset(tmp_path):
    spec = spec_from_preset("example3")
    cfg = tmp_path / "ex3.json"
    cfg.write_text(json.dumps(spec.to_dict()))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["design", "--config", str(cfg), "--out-dir", str(a)]) == 0
    assert main(["design", "--preset", "example3", "--out-dir", str(b)]) == 0
    assert (a / "example3_code.json").read_bytes() == (b / "example3_code.json").read_bytes()


# ---- analyze ----

def test_analyze_preset_table(capsys):
    rc = main(["analyze", "--preset", "example1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "Gamma(C) = 6.0206" in out
    assert "{1,2}" in out
    assert "d0^2 = 2" in out


def test_analyze_json_payload(tmp_path, capsys):
    payload_path = tmp_path / "report.json"
    rc = main(["analyze", "--preset", "example3", "--json", str(payload_path)])
    assert rc == 0
    payload = json.loads(payload_path.read_text())
    assert len(payload["reports"]) == 3
    assert all(r["bounds_ok"] for r in payload["reports"])
    assert abs(payload["overall_gamma_db"] - 6.0206) < 1e-3


def test_analyze_saved_code_file(tmp_path, capsys):
    assert main(["design", "--preset", "example1", "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    rc = main(["analyze", "--code", str(tmp_path / "example1_code.json"),
               "--sets", "[[1]]"])
    assert rc == 0
    assert "Gamma(C)" in capsys.readouterr().out


def test_analyze_explicit_sets(capsys):
    rc = main(["analyze", "--preset", "example1", "--sets", "[[2],[1,2]]"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "{2}" in out and "{1,2}" in out
    assert not any(line.startswith("{1}") for line in out.splitlines())


# ---- simulate ----

def test_simulate_writes_curves_and_gaps(tmp_path, capsys):
    rc = main(["simulate", "--preset", "example1", "--snr", "8,12,16,20",
               "--trials", "40000", "--min-errors", "100", "--seed", "3",
               "--workers", "1", "--sets", "[[],[2]]", "--gap-at", "0.05",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    base = tmp_path / "example1_awgn_Snone.csv"
    s2 = tmp_path / "example1_awgn_S2.csv"
    assert base.exists() and s2.exists()
    assert "gap at SER 0.05 for S=[2]" in out
    assert len(base.read_text().splitlines()) == 5


def test_simulate_respects_config_sets(tmp_path):
    spec = spec_from_preset("example1")
    spec.side_info_sets = [[1]]
    spec.snr_db = [6.0, 10.0]
    spec.min_errors = 50
    spec.max_trials = 20_000
    spec.out_dir = str(tmp_path)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(spec.to_dict()))
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert (tmp_path / "example1_awgn_S1.csv").exists()
    assert not (tmp_path / "example1_awgn_Snone.csv").exists()


def test_simulate_worker_flag_keeps_bytes(tmp_path):
    common = ["simulate", "--preset", "example2", "--snr", "6,10",
              "--trials", "25000", "--min-errors", "80", "--seed", "5",
              "--sets", "[[1]]"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(common + ["--workers", "1", "--out-dir", str(a)]) == 0
    assert main(common + ["--workers", "3", "--out-dir", str(b)]) == 0
    fa = a / "example2_awgn_S1.csv"
    fb = b / "example2_awgn_S1.csv"
    assert fa.read_bytes() == fb.read_bytes()


def test_simulate_label_override(tmp_path):
    rc = main(["simulate", "--preset", "example1", "--snr", "8", "--trials",
               "5000", "--min-errors", "10", "--label", "mylabel",
               "--sets", "[[]]", "--out-dir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "mylabel_awgn_Snone.csv").exists()


# ---- presets ----

def test_presets_lists_all(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in preset_names():
        assert name in out
    assert "55 points" in out
