import pathlib

from plotkit.cli import main

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def test_renders_and_exits_zero(tmp_path):
    out = tmp_path / "fig.svg"
    rc = main(["risk_vs_n", str(FIXTURES / "risk_vs_n.csv"), "-o", str(out)])
    assert rc == 0
    assert out.exists()


def test_missing_column_exits_one_naming_it(tmp_path, capsys):
    rc = main(["risk_vs_n", str(FIXTURES / "missing_col.csv"), "-o", str(tmp_path / "f.svg")])
    assert rc == 1
    assert "mc_excess_rls" in capsys.readouterr().err


def test_header_only_exits_zero(tmp_path):
    # header_only.csv carries the risk_vs_n header and no rows
    out = tmp_path / "empty.svg"
    rc = main(["risk_vs_n", str(FIXTURES / "header_only.csv"), "-o", str(out)])
    assert rc == 0
    assert out.exists()


def test_missing_file_exits_one(tmp_path, capsys):
    rc = main(["vc_chain", str(FIXTURES / "absent.csv"), "-o", str(tmp_path / "f.svg")])
    assert rc == 1
    assert "cannot read" in capsys.readouterr().err


def test_log_flags_accepted(tmp_path):
    out = tmp_path / "log.svg"
    rc = main(["residual_decay", str(FIXTURES / "residual_decay.csv"), "-o", str(out), "--logx", "--logy"])
    assert rc == 0
    assert out.exists()
