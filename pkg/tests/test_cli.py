import json
import re

import pytest

from codemoments.cli import main
from codemoments.moments_exact import EnsembleParams, central_moment_exact


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_kraw_json_norms(capsys):
    code, out, _ = run_cli(capsys, "kraw", "4", "2", "--k", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["norms"]["2"]["abs"] == {"num": "6", "den": "1"}
    assert payload["norms"]["3"]["abs"] == {"num": "30", "den": "1"}
    assert payload["norms"]["3"]["signed"] == {"num": "24", "den": "1"}
    assert payload["table"]["values"] == ["6", "0", "-2", "0", "6"]
    assert payload["manifest"]["command"] == "kraw"


def test_kraw_all_ones_table(capsys):
    code, out, _ = run_cli(capsys, "kraw", "6", "0", "--k", "2")
    assert code == 0
    assert json.loads(out)["table"]["values"] == ["1"] * 7


def test_kraw_invalid_params_exit_2(capsys):
    code, _, err = run_cli(capsys, "kraw", "4", "5")
    assert code == 2
    assert "invalid parameters" in err


def test_kraw_csv_with_manifest_comment(capsys):
    code, out, _ = run_cli(capsys, "kraw", "4", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# manifest: ")
    manifest = json.loads(lines[0].removeprefix("# manifest: "))
    assert manifest["parameters"]["n"] == 4
    assert lines[1] == "j,binom,value"
    assert lines[2] == "0,1,6"


def test_moments_exact_paths_agree(capsys):
    code, out, _ = run_cli(capsys, "moments", "4", "2", "1", "--k", "2", "--method", "exact-ensemble")
    assert code == 0
    ens = json.loads(out)
    code, out, _ = run_cli(capsys, "moments", "4", "2", "1", "--k", "2", "--method", "exact-sum")
    assert code == 0
    tup = json.loads(out)
    assert ens["value"] == tup["value"] == {"num": "3", "den": "2"}
    assert ens["method"] == "ensemble"
    assert tup["method"] == "tuple-sum"
    assert "wall_time_ms" in ens


def test_moments_json_reproducible_modulo_walltime(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "moments", "5", "2", "2", "--k", "3", "--method", "exact-sum")
        assert code == 0
        outs.append(re.sub(r'"wall_time_ms": [0-9.e+-]+', '"wall_time_ms": X', out))
    assert outs[0] == outs[1]


def test_moments_mc_deterministic(capsys):
    args = ("moments", "4", "2", "1", "--k", "2", "--method", "mc", "--samples", "20000", "--seed", "7")
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    code, out2, _ = run_cli(capsys, *args, "--workers", "4")
    assert code == 0
    p1, p2 = json.loads(out1), json.loads(out2)
    assert p1["histogram"] == p2["histogram"]
    assert p1["rows"] == p2["rows"]
    est = float(p1["rows"][1]["central_moment"]["num"]) / float(p1["rows"][1]["central_moment"]["den"])
    assert est == pytest.approx(1.5, abs=4 * p1["rows"][1]["stderr"])


def test_moments_budget_exceeded_exit_3(capsys):
    code, _, err = run_cli(
        capsys, "moments", "24", "8", "4", "--k", "3", "--method", "exact-sum", "--max-tuple-work", "1000"
    )
    assert code == 3
    assert "budget exceeded" in err


def test_moments_invalid_params_exit_2(capsys):
    code, _, err = run_cli(capsys, "moments", "4", "0", "1", "--k", "2")
    assert code == 2


def test_exponents_csv(capsys):
    code, out, _ = run_cli(capsys, "exponents", "8", "2", "2", "--kmax", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# manifest: ")
    assert lines[1] == "n,i,k,m,psi_n,F_n,theorem_exponent,k0,flags"
    k2_row = lines[2].split(",")
    assert k2_row[:4] == ["8", "2", "2", "2"]
    assert float(k2_row[6]) == 0.0


def test_exponents_json(capsys):
    code, out, _ = run_cli(capsys, "exponents", "8", "2", "2", "--kmax", "4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert [row["k"] for row in payload["rows"]] == [2, 3, 4]
    assert all("k0" in row and "flags" in row for row in payload["rows"])


def test_verify_quick_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--level", "quick", "--seed", "0")
    assert code == 0
    assert "12/12 checks passed" in out
    assert "variance_identity" in out and "trend_report" in out


def test_verify_catches_tampered_recurrence(capsys, monkeypatch):
    # mutation test: corrupt the Krawtchouk recurrence and the suite must fail
    from codemoments import verify
    from codemoments.krawtchouk import KrawtchoukTable, build_table_recurrence

    def tampered(n, i, max_n=4096):
        table = build_table_recurrence(n, i, max_n)
        values = list(table.values)
        values[-1] += 1
        return KrawtchoukTable(n=n, i=i, values=tuple(values))

    monkeypatch.setattr(verify, "build_table_recurrence", tampered)
    code, out, _ = run_cli(capsys, "verify", "--level", "quick")
    assert code == 1
    assert "FAIL" in out


def test_report_writes_csv_and_figures(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "report", "--n", "8", "16", "--k", "4", "--out-dir", str(tmp_path)
    )
    assert code == 0
    assert (tmp_path / "trend.csv").exists()
    assert (tmp_path / "trend.png").exists()
    assert (tmp_path / "exponents_n8.png").exists()
    assert (tmp_path / "exponents_n16.png").exists()
    body = (tmp_path / "trend.csv").read_text()
    assert body.startswith("# manifest: ")
    assert "theorem_exponent" in body


def test_report_respects_output_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CODEMOMENTS_OUTDIR", str(tmp_path / "envdir"))
    code, _, _ = run_cli(capsys, "report", "--n", "8", "--k", "4", "--no-figures")
    assert code == 0
    assert (tmp_path / "envdir" / "trend.csv").exists()


def test_output_file_option(tmp_path, capsys):
    target = tmp_path / "kraw.json"
    code, out, _ = run_cli(capsys, "kraw", "4", "2", "-o", str(target))
    assert code == 0
    assert json.loads(target.read_text())["norms"]["2"]["abs"]["num"] == "6"


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "codemoments" in capsys.readouterr().out
