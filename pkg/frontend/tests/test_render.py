import numpy as np
import pytest

from qecdyn_figures.render import FigureError, FigureSpec, main, render


def write_curves(path, levels=3):
    tau = np.linspace(0.0, 1.5, 40)
    cols = [np.exp(-(3**k) * tau) for k in range(levels + 1)]
    header = "tau," + ",".join(f"l{k}" for k in range(levels + 1))
    rows = "\n".join(
        ",".join(f"{v:.17g}" for v in (t, *[c[i] for c in cols])) for i, t in enumerate(tau)
    )
    path.write_text(header + "\n" + rows + "\n")


def write_hsvs(path):
    lines = ["level,component,index,hsv"]
    for level in (1, 2):
        for comp in ("x", "z"):
            for i in range(5):
                lines.append(f"{level},{comp},{i},{10.0**(-i - level):.17g}")
    path.write_text("\n".join(lines) + "\n")


def write_study(path):
    tau = np.linspace(0.0, 1.5, 30)
    exact = np.exp(-3 * tau)
    path.write_text(
        "tau,exact,order4,order3,order2\n"
        + "\n".join(
            f"{t:.17g},{e:.17g},{e * 1.001:.17g},{e * 1.01:.17g},{e * 1.05:.17g}"
            for t, e in zip(tau, exact)
        )
        + "\n"
    )


def write_error(path, scale=1e-3):
    tau = np.linspace(0.0, 1.5, 30)
    exact = np.exp(-3 * tau)
    delta = scale * np.sin(8 * tau)
    path.write_text(
        "tau,exact,approx,delta\n"
        + "\n".join(
            f"{t:.17g},{e:.17g},{e + d:.17g},{d:.17g}"
            for t, e, d in zip(tau, exact, delta)
        )
        + "\n"
    )


class TestSpecValidation:
    def test_unknown_figure(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("tau,l0\n0,1\n")
        with pytest.raises(FigureError):
            FigureSpec("fig9", (p,), tmp_path / "out.png")

    def test_missing_input(self, tmp_path):
        with pytest.raises(FigureError):
            FigureSpec("fig1", (tmp_path / "missing.csv",), tmp_path / "out.png")

    def test_empty_inputs(self, tmp_path):
        with pytest.raises(FigureError):
            FigureSpec("fig1", (), tmp_path / "out.png")


class TestRendering:
    def test_fig1(self, tmp_path):
        src = tmp_path / "curves.csv"
        write_curves(src)
        out = render(FigureSpec("fig1", (src,), tmp_path / "fig1.png"))
        assert out.exists() and out.stat().st_size > 0

    def test_fig2(self, tmp_path):
        src = tmp_path / "hsvs.csv"
        write_hsvs(src)
        out = render(FigureSpec("fig2", (src,), tmp_path / "fig2.png"))
        assert out.exists()

    def test_fig3(self, tmp_path):
        src = tmp_path / "study.csv"
        write_study(src)
        out = render(FigureSpec("fig3", (src,), tmp_path / "fig3.png"))
        assert out.exists()

    def test_fig4_multiple_inputs(self, tmp_path):
        srcs = []
        for level in (1, 2, 3):
            p = tmp_path / f"error_l{level}_z.csv"
            write_error(p, scale=10.0**-level)
            srcs.append(p)
        out = render(FigureSpec("fig4", tuple(srcs), tmp_path / "fig4.png"))
        assert out.exists()


class TestSchemaErrors:
    def test_wrong_header_rejected_no_file_written(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text("time,val\n0,1\n0.1,0.9\n")
        out = tmp_path / "fig1.png"
        with pytest.raises(FigureError):
            render(FigureSpec("fig1", (src,), out))
        assert not out.exists()

    def test_empty_file(self, tmp_path):
        src = tmp_path / "empty.csv"
        src.write_text("")
        with pytest.raises(FigureError):
            render(FigureSpec("fig1", (src,), tmp_path / "out.png"))

    def test_non_numeric_cell(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text("tau,l0\n0,abc\n")
        with pytest.raises(FigureError):
            render(FigureSpec("fig1", (src,), tmp_path / "out.png"))

    def test_fig2_missing_z_rows(self, tmp_path):
        src = tmp_path / "hsvs.csv"
        src.write_text("level,component,index,hsv\n1,x,0,0.1\n")
        with pytest.raises(FigureError):
            render(FigureSpec("fig2", (src,), tmp_path / "out.png"))

    def test_fig4_wrong_schema(self, tmp_path):
        src = tmp_path / "err.csv"
        src.write_text("tau,value\n0,1\n")
        with pytest.raises(FigureError):
            render(FigureSpec("fig4", (src,), tmp_path / "out.png"))


class TestMain:
    def test_cli_success(self, tmp_path):
        src = tmp_path / "curves.csv"
        write_curves(src)
        out = tmp_path / "fig1.png"
        assert main(["--fig", "fig1", "--in", str(src), "--out", str(out)]) == 0
        assert out.exists()

    def test_cli_schema_error_exit_2(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text("nope\n1\n")
        assert main(["--fig", "fig1", "--in", str(src), "--out", str(tmp_path / "o.png")]) == 2
