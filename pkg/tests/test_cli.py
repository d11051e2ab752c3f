import json
import random
import subprocess
import sys

import pytest

from fermconic import cli, oracle


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert cli.REVISION in capsys.readouterr().out


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["no-such-command"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["derive", "--option", "3"])
    assert info.value.code == 2


def test_casestudy_text_output_and_exit_code(capsys):
    code, out, _ = run(["casestudy"], capsys)
    assert "f3 = -20 t^2(t-1)^2 a^5 b^5 c^5: OK" in out
    # the two literal f5 specializations fail, so the suite fails
    assert code == 1 and out.strip().endswith("overall: FAIL")


def test_identities_json_payload(capsys):
    code, out, _ = run(["identities", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["command"] == "identities" and data["ok"] is (code == 0)
    failing = {c["name"] for r in data["reports"] for c in r["checks"] if not c["ok"] and c.get("gated", True)}
    assert "k=3: sum g_i f_j - F_k = 0" in failing
    assert all("sum M_i u_i^" not in name for name in failing)


def test_examples_json_to_file(tmp_path, capsys):
    path = tmp_path / "ex.json"
    code, out, _ = run(["examples", "--json", "--output", str(path)], capsys)
    assert out == ""
    data = json.loads(path.read_text())
    assert code == (0 if data["ok"] else 1)


def test_derive_and_dump_smn(capsys):
    code, out, _ = run(["derive", "--option", "2", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["option"] == 2
    code, out, _ = run(["dump-smn", "--max-total", "3", "--json"], capsys)
    data = json.loads(out)
    assert code == 0 and "S_2_0" in data and "S_0_4" not in data


def test_bitangent_commands(capsys):
    code, out, _ = run(["bitangent", "mmap", "--u", "1,2,3,5,7"], capsys)
    assert code == 0 and out.startswith("[")
    code, out, _ = run(["bitangent", "mmap", "--u", "1,1,2,2,3"], capsys)
    assert code == 1 and "base locus" in out
    code, out, _ = run(["bitangent", "check", "--p", "1,-1,0,0,0", "--q", "0,0,1,-1,0", "--json"], capsys)
    assert code == 0 and json.loads(out)["ok"]


def test_bitangent_rejects_wrong_arity(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["bitangent", "mmap", "--u", "1,2,3"])
    assert info.value.code == 2


def test_oracle_prime_too_large(capsys):
    code, _, err = run(["oracle", "--prime", "103", "--trials", "1"], capsys)
    assert code == 2 and "p <= 101" in err


def test_oracle_small_run_and_replay(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FERMCONIC_SEED", "3")
    code, out, _ = run(["oracle", "--trials", "2", "--json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["seed"] == 3 and data["agreed"] == 2
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(oracle.planted_instance(101, random.Random(1)).to_json()))
    code, out, _ = run(["oracle", "--replay", str(path)], capsys)
    assert code == 0 and out.strip().endswith("overall: OK")


def test_console_script_logs_to_stderr_only():
    proc = subprocess.run([sys.executable, "-m", "fermconic.cli", "-v", "dump-smn", "--max-total", "2", "--json"],
                          capture_output=True, text=True, check=True)
    json.loads(proc.stdout)
