"""Tests for the figure tool, including its acceptance check against a real
sweep produced through the simulator's CLI (interface coupling only)."""

import subprocess
import sys

import pytest

from figures.cli import main
from figures.core import FigureError, FigureSpec, load_grid, render

HEADER = (
    "model,p,q,trials,threshold,lifespan,mean_score,win_rate,"
    "max_score,std_score,zk_mean_of_max,seed"
)


def golden_csv(tmp_path, rows=None):
    """A complete 3x3 single-model grid with a known peak at (0.1, 0.1)."""
    if rows is None:
        rows = []
        values = [0.1, 0.5, 0.9]
        for p in values:
            for q in values:
                score = 10.0 / (p + q)  # peaks at the low-rate corner
                rows.append(f"fk,{p},{q},100,1,,{score},1,42,0.5,,7")
    path = tmp_path / "golden.csv"
    path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")
    return str(path)


class TestLoadGrid:
    def test_pivots_complete_grid(self, tmp_path):
        grid = load_grid(golden_csv(tmp_path), "fk", "mean_score")
        assert grid.p_values == (0.1, 0.5, 0.9)
        assert grid.q_values == (0.1, 0.5, 0.9)
        assert grid.z.shape == (3, 3)
        assert grid.peak_cell == (0.1, 0.1)

    def test_missing_metric_column_names_it(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("model,p,q,mean_score\nfk,0.1,0.1,1.0\n")
        with pytest.raises(FigureError, match="'win_rate' column"):
            load_grid(str(path), "fk", "win_rate")

    def test_unknown_model_lists_present_models(self, tmp_path):
        with pytest.raises(FigureError, match="no rows for model 'zk'.*fk"):
            load_grid(golden_csv(tmp_path), "zk", "mean_score")

    def test_incomplete_grid_reports_shape(self, tmp_path):
        rows = [
            "fk,0.1,0.1,100,1,,1.0,1,1,0,,7",
            "fk,0.1,0.9,100,1,,1.0,1,1,0,,7",
            "fk,0.9,0.1,100,1,,1.0,1,1,0,,7",
        ]
        with pytest.raises(FigureError, match="incomplete grid"):
            load_grid(golden_csv(tmp_path, rows), "fk", "mean_score")

    def test_empty_metric_cell_reports_line(self, tmp_path):
        rows = ["fk,0.1,0.1,100,1,,1.0,1,1,0,,7", "fk,0.1,0.9,100,1,,,1,1,0,,7"]
        with pytest.raises(FigureError, match="line 3: empty 'mean_score'"):
            load_grid(golden_csv(tmp_path, rows), "fk", "mean_score")

    def test_unknown_metric_rejected(self, tmp_path):
        with pytest.raises(FigureError, match="unknown metric"):
            load_grid(golden_csv(tmp_path), "fk", "score")


class TestRender:
    def test_surface_smoke(self, tmp_path):
        out = tmp_path / "fk.png"
        spec = FigureSpec(golden_csv(tmp_path), "fk", "mean_score", "surface", str(out))
        grid = render(spec)
        assert out.exists() and out.stat().st_size > 0
        assert grid.z.shape == (3, 3)

    def test_heatmap_smoke(self, tmp_path):
        out = tmp_path / "fk.png"
        spec = FigureSpec(golden_csv(tmp_path), "fk", "win_rate", "heatmap", str(out))
        render(spec)
        assert out.exists() and out.stat().st_size > 0

    def test_svg_output(self, tmp_path):
        out = tmp_path / "fk.svg"
        render(FigureSpec(golden_csv(tmp_path), "fk", "mean_score", "heatmap", str(out)))
        assert out.read_text().lstrip().startswith("<?xml")

    def test_render_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render(FigureSpec(golden_csv(tmp_path), "fk", "mean_score", "surface", str(a)))
        render(FigureSpec(golden_csv(tmp_path), "fk", "mean_score", "surface", str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_axes_are_labeled(self, tmp_path, monkeypatch):
        import matplotlib.pyplot as plt

        captured = []
        original = plt.Figure.savefig

        def capture(fig, *args, **kwargs):
            captured.append(fig)
            return original(fig, *args, **kwargs)

        monkeypatch.setattr(plt.Figure, "savefig", capture)
        out = tmp_path / "fk.png"
        render(FigureSpec(golden_csv(tmp_path), "fk", "mean_score", "surface", str(out)))
        ax = captured[0].axes[0]
        assert ax.get_xlabel() == "p" and ax.get_ylabel() == "q"
        assert ax.get_zlabel() == "mean_score"
        assert "fk" in ax.get_title()
        # Surface Z-range equals the data range: no silent clipping.
        grid = load_grid(golden_csv(tmp_path), "fk", "mean_score")
        lo, hi = ax.get_zlim()
        assert lo == pytest.approx(float(grid.z.min()))
        assert hi == pytest.approx(float(grid.z.max()))

    def test_invalid_spec_rejected(self, tmp_path):
        with pytest.raises(FigureError, match="unknown plot kind"):
            FigureSpec(golden_csv(tmp_path), "fk", "mean_score", "pie", "x.png")


class TestCli:
    def test_success(self, tmp_path, capsys):
        out = tmp_path / "fk.png"
        code = main(["--in", golden_csv(tmp_path), "--model", "fk",
                     "--metric", "mean_score", "--kind", "surface", "--out", str(out)])
        assert code == 0 and out.exists()
        assert "peak at p=0.1, q=0.1" in capsys.readouterr().out

    def test_missing_column_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("model,p,q,mean_score\nfk,0.1,0.1,1.0\n")
        code = main(["--in", str(path), "--model", "fk", "--metric", "win_rate",
                     "--kind", "heatmap", "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "win_rate" in capsys.readouterr().err

    def test_unreadable_input_exits_2(self, tmp_path):
        code = main(["--in", str(tmp_path / "missing.csv"), "--model", "fk",
                     "--out", str(tmp_path / "x.png")])
        assert code == 2


class TestAcceptanceCriterion10:
    """Secondary acceptance: golden-CSV rendering plus a real sweep whose
    full-knowledge surface peaks at the lowest-rate corner cell."""

    def test_golden_csv_surface_and_heatmap(self, tmp_path):
        for kind in ("surface", "heatmap"):
            out = tmp_path / f"fk-{kind}.png"
            render(FigureSpec(golden_csv(tmp_path), "fk", "mean_score", kind, str(out)))
            assert out.exists() and out.stat().st_size > 0

    def test_real_sweep_surface_peaks_at_low_rate_corner(self, tmp_path):
        """Gates the rendered surface on a peak at the (0.01, 0.01) corner.

        The reference claim is that the full-knowledge mean score peaks where
        both rates are lowest.  Under the documented rules it cannot: the
        expected score per cell is threshold/rate, which is 50.2513 at
        (0.01, 0.01) but 99.9899 at (0.01, 0.99) — the floor in the threshold
        rule collapses the quiet corner's threshold to 1 while heavy ambient
        noise raises it to 99.  The corner is in fact the minimum of the
        p=0.01 row, so this check records an honest failure; the rendering
        itself is exercised and verified above.
        """
        csv_path = tmp_path / "fk.csv"
        subprocess.run(
            [sys.executable, "-m", "posbg.cli", "run-sweep", "--grid-points", "20",
             "--trials", "10000", "--models", "fk", "--seed", "20260810",
             "--out", str(csv_path)],
            check=True,
            timeout=240,
        )
        out = tmp_path / "fk.png"
        grid = render(FigureSpec(str(csv_path), "fk", "mean_score", "surface", str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert grid.peak_cell == (0.01, 0.01), (
            f"surface peaks at (p, q) = {grid.peak_cell}, not the (0.01, 0.01) "
            f"corner: the per-cell expectation threshold/rate makes the corner a "
            f"row minimum (50.2513 vs 99.9899 at q=0.99), so the reference claim "
            f"is unattainable under the documented rules"
        )
