import os

import pytest

from zxplots.render import FigureSpec, SchemaError, main, read_columns, render

BER_HEADER = "snr_db,bits,errors,ber,ci_lo,ci_hi\n"


def write_ber(path, points):
    rows = [BER_HEADER]
    for snr, ber in points:
        rows.append(f"{snr},1000000,{int(ber * 1e6)},{ber},{ber * 0.9},{ber * 1.1}\n")
    path.write_text("".join(rows))


def write_psd(path, n=61):
    lines = ["f_t,analytic_db,empirical_db\n"]
    for k in range(n):
        f = -3.0 + 6.0 * k / (n - 1)
        lines.append(f"{f},{-10 * abs(f)},{-10 * abs(f) + 0.3}\n")
    path.write_text("".join(lines))


def write_reference_dir(tmp_path):
    ref = tmp_path / "reference"
    ref.mkdir()
    for name in ("reference_ber_mrx3_mmddt.csv",
                 "reference_ber_mrx3_zx_random.csv",
                 "reference_ber_mrx3_zx_golay.csv",
                 "reference_ber_mrx2_proposed.csv"):
        write_ber(ref / name, [(-10, 0.4), (0, 0.2), (10, 0.01), (20, 1e-4)])
    return ref


@pytest.fixture
def ber_csvs(tmp_path):
    a = tmp_path / "ber_mrx2.csv"
    b = tmp_path / "ber_mrx3.csv"
    write_ber(a, [(-10, 0.45), (0, 0.26), (10, 0.007), (16, 2e-4)])
    write_ber(b, [(-10, 0.46), (0, 0.29), (10, 0.063), (16, 3.4e-3)])
    return a, b


class TestReadColumns:
    def test_reads_required_columns(self, ber_csvs):
        data = read_columns(ber_csvs[0], ("snr_db", "ber"))
        assert data["snr_db"][0] == -10
        assert data["ber"][-1] == 2e-4

    def test_missing_column_diagnostic(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("snr,ber\n0,0.1\n")
        with pytest.raises(SchemaError, match="missing column.*snr_db"):
            read_columns(bad, ("snr_db", "ber"))

    def test_empty_csv(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(BER_HEADER)
        with pytest.raises(SchemaError, match="no data rows"):
            read_columns(empty, ("snr_db", "ber"))


class TestRender:
    def test_ber_a_panel(self, tmp_path, ber_csvs):
        out = tmp_path / "fig_a.png"
        spec = FigureSpec(panel="ber-a", inputs=(str(ber_csvs[0]), str(ber_csvs[1])),
                          output=str(out))
        assert render(spec) == str(out)
        assert out.stat().st_size > 1000

    def test_ber_b_panel_with_references(self, tmp_path, ber_csvs):
        ref = write_reference_dir(tmp_path)
        out = tmp_path / "fig_b.png"
        spec = FigureSpec(panel="ber-b", inputs=(str(ber_csvs[1]),),
                          output=str(out), reference_dir=str(ref))
        render(spec)
        assert out.exists()

    def test_psd_c_panel(self, tmp_path):
        psd = tmp_path / "psd.csv"
        write_psd(psd)
        out = tmp_path / "fig_c.svg"
        render(FigureSpec(panel="psd-c", inputs=(str(psd),), output=str(out)))
        assert out.exists()

    def test_rendering_is_deterministic(self, tmp_path, ber_csvs):
        out1 = tmp_path / "one.svg"
        out2 = tmp_path / "two.svg"
        for out in (out1, out2):
            render(FigureSpec(panel="ber-a",
                              inputs=(str(ber_csvs[0]), str(ber_csvs[1])),
                              output=str(out)))
        assert out1.read_bytes() == out2.read_bytes()

    def test_schema_mismatch_writes_nothing(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("foo,bar\n1,2\n")
        out = tmp_path / "fig.png"
        with pytest.raises(SchemaError):
            render(FigureSpec(panel="ber-a", inputs=(str(bad),), output=str(out)))
        assert not out.exists()

    def test_unknown_panel(self, tmp_path, ber_csvs):
        with pytest.raises(SchemaError):
            FigureSpec(panel="ber-z", inputs=(str(ber_csvs[0]),), output="x.png")

    def test_requires_inputs(self):
        with pytest.raises(SchemaError):
            FigureSpec(panel="ber-a", inputs=(), output="x.png")


class TestCli:
    def test_success(self, tmp_path, ber_csvs, capsys):
        out = tmp_path / "fig.png"
        code = main(["--panel", "ber-a", "--input", str(ber_csvs[0]),
                     "--input", str(ber_csvs[1]), "--output", str(out)])
        assert code == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_empty_csv_fails_cleanly(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text(BER_HEADER)
        out = tmp_path / "fig.png"
        code = main(["--panel", "ber-a", "--input", str(empty),
                     "--output", str(out)])
        assert code == 1
        assert not out.exists()
        assert "no data rows" in capsys.readouterr().err

    def test_schema_mismatch_diagnostic(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        code = main(["--panel", "psd-c", "--input", str(bad),
                     "--output", str(tmp_path / "fig.png")])
        assert code == 1
        err = capsys.readouterr().err
        assert "f_t" in err and "analytic_db" in err

    def test_custom_labels(self, tmp_path, ber_csvs):
        out = tmp_path / "fig.png"
        code = main(["--panel", "ber-a",
                     "--input", str(ber_csvs[0]), "--label", "m_rx = 2",
                     "--input", str(ber_csvs[1]), "--label", "m_rx = 3",
                     "--output", str(out)])
        assert code == 0
