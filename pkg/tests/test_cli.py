import json

import pytest

from nullcode.cli import main


def test_code_preset_output(capsys):
    assert main(["code", "preset", "--t", "2"]) == 0
    out = capsys.readouterr().out
    assert "n=3" in out and "q=16" in out and "N=15" in out
    assert "m=5" in out and "k=1" in out


def test_instance_gen_deterministic(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ["instance", "gen", "--t", "2", "--p", "1/64", "--seed", "7"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_instance_verify_and_solve(tmp_path, capsys):
    path = tmp_path / "toy.json"
    # a tiny generic code keeps the tables small
    code_path = tmp_path / "code.json"
    code_path.write_text(
        json.dumps(
            {
                "kind": "generic-linear",
                "field": {"s": 2, "modulus": 7},
                "m": 1,
                "genmat": [[1, 1]],
            }
        )
    )
    assert (
        main(
            [
                "instance", "gen", "--config", str(code_path),
                "--p", "0/1", "--seed", "1", "--out", str(path),
            ]
        )
        == 0
    )
    capsys.readouterr()
    assert main(["instance", "verify", "--in", str(path), "--x", "2 2"]) == 0
    assert "valid" in capsys.readouterr().out
    assert main(["instance", "verify", "--in", str(path), "--x", "1 2"]) == 1
    capsys.readouterr()
    assert main(["instance", "solve", "--in", str(path)]) == 0
    assert "4 solutions" in capsys.readouterr().out


def test_qft_subcommand(capsys):
    assert main(["qsim", "qft", "--s", "2"]) == 0


def test_lrcheck_exit_codes():
    ok = [
        "code", "lrcheck", "--N", "63", "--m", "9", "--k", "6",
        "--ell", "0", "--s", "2", "--r", "8", "--zeta", "0.4", "--q", "64",
    ]
    assert main(ok) == 0
    bad = [
        "code", "lrcheck", "--N", "63", "--m", "9", "--k", "6",
        "--ell", str(64**3), "--s", "2", "--r", "8", "--zeta", "0.4", "--q", "64",
    ]
    assert main(bad) == 1


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["code", "preset"])  # missing --t
    assert exc.value.code == 2


def test_table_stats_subcommand(capsys):
    assert main(["qsim", "claim66", "--sigma", "4", "--p", "1/4"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["mean_W0_sq"] == 0.75


def test_report_roundtrip(tmp_path, capsys):
    src = tmp_path / "r.jsonl"
    src.write_text('{"a": 1.0}\n{"a": 3.0}\n')
    out = tmp_path / "summary.csv"
    assert main(["report", "--glob", str(src), "--out", str(out)]) == 0
    body = out.read_text()
    assert "a" in body and "2" in body  # mean of 1 and 3


def test_report_parse_error(tmp_path):
    src = tmp_path / "bad.jsonl"
    src.write_text("not json\n")
    assert main(["report", "--glob", str(src)]) == 1


def test_report_empty_glob(tmp_path, capsys):
    assert main(["report", "--glob", str(tmp_path / "nothing-*.jsonl")]) == 0


def test_pipeline_subcommand(tmp_path):
    out = tmp_path / "l51.jsonl"
    rc = main(
        [
            "qsim", "lemma51", "--toy", "--p", "1/16",
            "--trials", "3", "--seed", "0", "--out", str(out),
        ]
    )
    assert rc == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    done = [r for r in recs if "l2_distance" in r]
    assert len(done) == 3


def test_hash_check_subcommand(capsys):
    assert main(["hash", "check", "--lam", "2", "--r", "4"]) == 0
    assert "independent" in capsys.readouterr().out


def test_report_mixed_schema_rejected(tmp_path):
    src = tmp_path / "mixed.jsonl"
    src.write_text('{"a": 1.0}\n{"b": 2.0}\n')
    assert main(["report", "--glob", str(src)]) == 1


def test_pipeline_subcommand_with_config_file(tmp_path):
    import nullcode.configs as configs

    code_path = tmp_path / "toy.json"
    code_path.write_text(json.dumps({"code": configs.toy_selfdual_spec().to_json()}))
    out = tmp_path / "r.jsonl"
    rc = main(
        [
            "qsim", "lemma51", "--config", str(code_path), "--p", "1/16",
            "--trials", "2", "--seed", "3", "--out", str(out),
        ]
    )
    assert rc == 0


def test_proto_subcommands(tmp_path, capsys):
    assert main(["proto", "drp", "--n-bits", "8", "--trials", "3", "--seed", "1"]) == 0
    assert (
        main(
            [
                "proto", "transform", "--n-bits", "6", "--depth", "3",
                "--trials", "2", "--pairs", "50", "--seed", "2",
            ]
        )
        == 0
    )
    assert main(["proto", "cleanup", "--n-bits", "5", "--depth", "3", "--trials", "2"]) == 0
    assert main(["proto", "run", "--n-bits", "6", "--depth", "3"]) == 0
    assert main(["proto", "danger", "--trials", "5"]) == 0


def test_tbnc_subcommands(tmp_path, capsys):
    path = tmp_path / "tb.json"
    assert main(["tbnc", "gen", "--t", "2", "--seed", "4", "--out", str(path)]) == 0
    capsys.readouterr()
    assert main(["tbnc", "alg2", "--t", "1", "--trials", "2", "--seed", "5"]) == 0
    capsys.readouterr()
    assert (
        main(
            [
                "tbnc", "totality", "--samples", "10", "--keys", "4",
                "--seed", "6", "--lam", "4",
            ]
        )
        == 0
    )


def test_tbnc_verify_subcommand(tmp_path, capsys):
    import numpy as np

    from nullcode import configs, instances, tbnc

    spec = configs.toy_repetition_spec(2, 2)
    fam = configs.toy_family(spec)
    copies = []
    for i in range(2):
        c = instances.sample_unfolded_instance(spec, 6, i)
        copies.append(
            instances.OracleInstance(
                spec=spec,
                p=c.p,
                seed=i,
                tables=np.zeros_like(c.tables),
                unfolded=np.zeros_like(c.unfolded),
            )
        )
    payload = {
        "t": 2,
        "family": fam.to_json(),
        "code": spec.to_json(),
        "copies": [instances.instance_to_json(c) for c in copies],
    }
    path = tmp_path / "tb.json"
    path.write_text(json.dumps(payload))
    key = ",".join("0" for _ in range(fam.lam))
    assert (
        main(
            [
                "tbnc", "verify", "--in", str(path),
                "--key", key, "--solutions", "2 2;3 3",
            ]
        )
        == 0
    )
    capsys.readouterr()
    assert (
        main(
            [
                "tbnc", "verify", "--in", str(path),
                "--key", key, "--solutions", "2 1;3 3",
            ]
        )
        == 1
    )


def test_result_files_regenerate_bit_identically(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    args = ["qsim", "lemma51", "--toy", "--p", "1/16", "--trials", "2", "--seed", "11"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_env_budget_override(monkeypatch):
    from nullcode import budget

    monkeypatch.setenv("NULLCODE_BUDGET", "16")
    assert budget.amplitude_budget() == 16
    monkeypatch.delenv("NULLCODE_BUDGET")
    assert budget.amplitude_budget() == budget.DEFAULT_AMPLITUDE_BUDGET
