"""Tests for jcspectra.actions: run, validate and emit-plot."""

from io import StringIO
from pathlib import Path
from unittest.mock import patch

import pytest

from jcspectra.actions import emit_plot, run, validate

COMMUTATORS_TOML = """
[grid]
values = [16, 64, 256]

[experiment]
kind = "commutators"

[output]
path = "out"
"""

FAILING_TOML = """
[grid]
values = [64, 128, 256]

[experiment]
kind = "residual"
target_slope = 5.0

[output]
path = "out"
"""


def _write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    _ = path.write_text(text)
    return path


class TestRunAction:
    """Test the run action."""

    @patch("sys.stdout", new_callable=StringIO)
    def test_passing_config(self, mock_stdout: StringIO, tmp_path: Path) -> None:
        """Test a passing experiment prints PASS lines and writes its files."""
        config = _write(tmp_path, "comm.toml", COMMUTATORS_TOML)
        run.main([str(config)])
        output = mock_stdout.getvalue()
        assert "Running commutators (comm)..." in output
        assert "PASS [Lambda, G] = A" in output
        assert (tmp_path / "out" / "comm.csv").exists()
        assert (tmp_path / "out" / "comm.json").exists()

    @patch("sys.stdout", new_callable=StringIO)
    def test_output_override(self, mock_stdout: StringIO, tmp_path: Path) -> None:
        """Test --output replaces the configured directory."""
        config = _write(tmp_path, "comm.toml", COMMUTATORS_TOML)
        run.main([str(config), "--output", str(tmp_path / "elsewhere"), "--workers", "2"])
        assert (tmp_path / "elsewhere" / "comm.dat").exists()
        assert not (tmp_path / "out").exists()
        assert "Wrote" in mock_stdout.getvalue()

    @patch("sys.stdout", new_callable=StringIO)
    def test_failed_criterion(self, mock_stdout: StringIO, tmp_path: Path) -> None:
        """Test a missed rate exits 1 and still writes the results."""
        config = _write(tmp_path, "residual.toml", FAILING_TOML)
        with pytest.raises(SystemExit) as exc_info:
            run.main([str(config)])
        assert exc_info.value.code == 1
        assert "FAIL residual" in mock_stdout.getvalue()
        assert (tmp_path / "out" / "residual.csv").exists()

    @patch("sys.stderr", new_callable=StringIO)
    def test_missing_config(self, mock_stderr: StringIO, tmp_path: Path) -> None:
        """Test an unreadable config is a usage error."""
        with pytest.raises(SystemExit) as exc_info:
            run.main([str(tmp_path / "nope.toml")])
        assert exc_info.value.code == 2
        assert "Error: cannot load config" in mock_stderr.getvalue()

    @patch("sys.stderr", new_callable=StringIO)
    def test_invalid_config(self, mock_stderr: StringIO, tmp_path: Path) -> None:
        """Test a config that fails validation is a usage error."""
        config = _write(tmp_path, "bad.toml", '[experiment]\nkind = "residual"\n')
        with pytest.raises(SystemExit) as exc_info:
            run.main([str(config)])
        assert exc_info.value.code == 2
        assert "[grid]" in mock_stderr.getvalue()

    @patch("sys.stderr", new_callable=StringIO)
    def test_bad_workers_override(self, mock_stderr: StringIO, tmp_path: Path) -> None:
        """Test --workers 0 is rejected like the config key."""
        config = _write(tmp_path, "comm.toml", COMMUTATORS_TOML)
        with pytest.raises(SystemExit) as exc_info:
            run.main([str(config), "--workers", "0"])
        assert exc_info.value.code == 2
        assert "workers" in mock_stderr.getvalue()


class TestValidateAction:
    """Test the validate action."""

    @patch("sys.stdout", new_callable=StringIO)
    def test_all_identities_hold(self, mock_stdout: StringIO) -> None:
        """Test the suite passes without writing files."""
        validate.main([])
        output = mock_stdout.getvalue()
        assert "FAIL" not in output
        assert "identities hold" in output

    @patch("sys.stdout", new_callable=StringIO)
    def test_output_directory(self, mock_stdout: StringIO, tmp_path: Path) -> None:
        """Test --output writes validate.csv next to the JSON summary."""
        validate.main(["--output", str(tmp_path)])
        assert (tmp_path / "validate.csv").read_text().startswith("index,name,passed,defect,tol")
        assert (tmp_path / "validate.json").exists()


class TestEmitPlot:
    """Test the emit-plot action."""

    CSV = "n,remainder,localized\n128,0.5,1\n256,0.25,1\n512,,0\n"

    def test_read_column_skips_empty(self, tmp_path: Path) -> None:
        """Test empty cells are left out."""
        path = _write(tmp_path, "r.csv", self.CSV)
        assert emit_plot.read_column(path, "remainder") == [(128.0, 0.5), (256.0, 0.25)]

    def test_read_column_missing(self, tmp_path: Path) -> None:
        """Test an unknown column names the available ones."""
        path = _write(tmp_path, "r.csv", self.CSV)
        with pytest.raises(LookupError, match="have: n, remainder, localized"):
            _ = emit_plot.read_column(path, "gap")

    def test_format_pairs(self) -> None:
        """Test the two-column text form."""
        assert emit_plot.format_pairs([(128.0, 0.5)]) == "128 0.5\n"

    @patch("sys.stdout", new_callable=StringIO)
    def test_main_stdout(self, mock_stdout: StringIO, tmp_path: Path) -> None:
        """Test plot data goes to stdout by default."""
        path = _write(tmp_path, "r.csv", self.CSV)
        emit_plot.main([str(path), "remainder"])
        assert mock_stdout.getvalue() == "128 0.5\n256 0.25\n"

    def test_main_output_file(self, tmp_path: Path) -> None:
        """Test --output writes the same text to a file."""
        path = _write(tmp_path, "r.csv", self.CSV)
        emit_plot.main([str(path), "localized", "--output", str(tmp_path / "l.dat")])
        assert (tmp_path / "l.dat").read_text() == "128 1\n256 1\n512 0\n"

    @patch("sys.stderr", new_callable=StringIO)
    def test_main_missing_column(self, mock_stderr: StringIO, tmp_path: Path) -> None:
        """Test an unknown column exits 2."""
        path = _write(tmp_path, "r.csv", self.CSV)
        with pytest.raises(SystemExit) as exc_info:
            emit_plot.main([str(path), "gap"])
        assert exc_info.value.code == 2
        assert "column 'gap'" in mock_stderr.getvalue()

    @patch("sys.stderr", new_callable=StringIO)
    def test_main_missing_file(self, mock_stderr: StringIO, tmp_path: Path) -> None:
        """Test an unreadable CSV exits 2."""
        with pytest.raises(SystemExit) as exc_info:
            emit_plot.main([str(tmp_path / "nope.csv"), "remainder"])
        assert exc_info.value.code == 2
        assert "cannot read" in mock_stderr.getvalue()

    def test_render_png(self, tmp_path: Path) -> None:
        """Test the log-log chart skips non-positive points and writes a PNG."""
        from PIL import Image

        png = tmp_path / "plot.png"
        plotted = emit_plot.render_loglog([(128.0, 0.5), (256.0, -0.25), (0.0, 1.0)], png, "t")
        assert plotted == 2
        with Image.open(png) as img:
            assert img.size == emit_plot.PNG_SIZE
            assert img.format == "PNG"
