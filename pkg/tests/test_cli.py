"""Command-line surface: exit codes, report shapes, determinism."""

import json

import pytest

from astower.cli import main
from astower.ff import make_field


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(argv, capsys):
    code, out, _ = run(argv, capsys)
    return code, json.loads(out)


def test_no_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_bad_characteristic_is_usage_error(capsys):
    code, _, err = run(["conductor", "--p", "4", "--s", "1"], capsys)
    assert code == 2
    assert err.strip()


def test_bad_format_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["genus", "--p", "3", "--s", "1", "--format", "yaml"])
    assert exc.value.code == 2


def test_verify_p3s1(capsys):
    code, payload = run_json(["verify", "--p", "3", "--s", "1"], capsys)
    assert code == 0
    assert payload["command"] == "verify"
    assert payload["params"] == {"p": 3, "s": 1, "q0": 3, "q": 27, "n": 3}
    assert payload["group_order"] == 3 ** 18
    assert payload["genus"] == 143210574
    assert payload["genus_printed"] == 174298176
    assert payload["bound"] == 3 * 143210574
    assert payload["is_big"] is False
    assert payload["is_big_printed"] is False
    assert payload["readings_agree"] is True


def test_genus_output_is_canonical_json(capsys):
    code, out, _ = run(["genus", "--p", "3", "--s", "1"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert out == json.dumps(payload, sort_keys=True, indent=2) + "\n"
    assert payload["genus"] == 143210574
    assert payload["weighted_sum"] == 174299697
    labels = [row["label"] for row in payload["classes"]]
    assert labels == ["y2", "v1", "v2", "w"]
    assert [row["conductor"] for row in payload["classes"]] == \
        [38, 254, 281, 308]


def test_conductor_report(capsys):
    code, payload = run_json(["conductor", "--p", "3", "--s", "1"], capsys)
    assert code == 0
    assert payload["base_floor"] == {
        "conductor": 11, "line_genus": 9, "lines": 13, "genus": 117}
    assert {row["label"]: row["conductor"] for row in payload["classes"]} == \
        {"y2": 38, "v1": 254, "v2": 281, "w": 308}
    assert payload["two_floor_groups"] == {"11": 13, "12": 351}
    assert payload["two_floor_genus"] == 3627


def test_conductor_skips_two_floor_outside_p3(capsys):
    code, payload = run_json(["conductor", "--p", "5", "--s", "1"], capsys)
    assert code == 0
    assert "two_floor_groups" not in payload
    assert {row["label"]: row["conductor"] for row in payload["classes"]} == \
        {"y2": 152, "v1": 3152, "v2": 3277, "w": 3402}


def test_audit_exits_3_on_mismatch_rows(capsys):
    code, payload = run_json(["audit", "--p", "3", "--s", "1"], capsys)
    assert code == 3
    assert payload["mismatches"] == 1
    rows = {row["label"]: row for row in payload["rows"]}
    assert rows["y2"]["match"] and rows["y2"]["closed"] == 387
    assert not rows["w"]["match"]
    assert rows["w"]["closed"] == "1341/2"
    assert rows["w"]["difference"] == "27/2"
    assert rows["w"]["pipeline"] == 657


def test_commutators_table(capsys):
    code, payload = run_json(["commutators", "--p", "3", "--s", "1"], capsys)
    assert code == 0
    assert payload["sigma_pairs_commute"] is True
    assert len(payload["pairs"]) == 9
    ctx = make_field(3, 3)
    two = 2
    for row in payload["pairs"]:
        expected = ctx.neg(ctx.mul(two, ctx.mul(row["gamma_i"],
                                                row["gamma_j"])))
        assert row["w_shift"] == expected
        assert row["reverse_w_shift"] == ctx.neg(expected)


def test_prolong_report(capsys):
    code, payload = run_json(["prolong", "--p", "3", "--s", "1"], capsys)
    assert code == 0
    assert payload["translations_certified"] == 27
    assert payload["restriction_ok"] is True
    assert payload["inverses_ok"] is True
    assert payload["cocycles_vertical"] is True
    assert payload["multiplicity"] == 27 ** 5
    assert payload["total_order"] == 27 ** 6


def test_out_file_and_thread_count_do_not_change_bytes(tmp_path, capsys):
    f1 = tmp_path / "one.json"
    f2 = tmp_path / "four.json"
    code1, out1, _ = run(["genus", "--p", "3", "--s", "1",
                          "--threads", "1", "--out", str(f1)], capsys)
    code2, out2, _ = run(["genus", "--p", "3", "--s", "1",
                          "--threads", "4", "--out", str(f2)], capsys)
    assert code1 == code2 == 0
    assert out1 == out2 == ""  # report goes to the file, not stdout
    assert f1.read_bytes() == f2.read_bytes()
    json.loads(f1.read_text())


def test_cache_round_trip(tmp_path, capsys):
    cache = tmp_path / "cache"
    args = ["conductor", "--p", "3", "--s", "1", "--cache-dir", str(cache)]
    code1, out1, _ = run(args, capsys)
    entries = list(cache.glob("*.json"))
    assert code1 == 0 and len(entries) == 1
    code2, out2, _ = run(args, capsys)
    assert code2 == 0
    assert out1 == out2
    assert list(cache.glob("*.json")) == entries


def test_cache_key_tracks_seed(tmp_path, capsys):
    cache = tmp_path / "cache"
    base = ["conductor", "--p", "3", "--s", "1", "--cache-dir", str(cache)]
    run(base, capsys)
    run(base + ["--seed", "9"], capsys)
    assert len(list(cache.glob("*.json"))) == 2


def test_markdown_format(capsys):
    code, out, _ = run(["audit", "--p", "3", "--s", "1", "--format", "md"],
                       capsys)
    assert code == 3  # format does not change the exit code
    assert out.startswith("# astower audit")
    assert "| label |" in out or "| closed |" in out


def test_timings_go_to_stderr_not_stdout(capsys):
    _, out, err = run(["verify", "--p", "3", "--s", "1"], capsys)
    assert "elapsed" not in out
    assert "elapsed" in err
