"""Tests for the Markdown report loader and the artifact writers."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from fracplap.core.config import ExperimentConfig
from fracplap.reporting import (
    HASH_PREFIX,
    ReportLoader,
    csv_text,
    format_float,
    json_text,
    read_csv_column,
    render_report,
    report_loader,
    write_csv,
    write_json,
    write_markdown,
)

DIGEST = "ab" * 32


class TestReportLoader:
    """Test the ReportLoader class."""

    def test_loader_initialization(self) -> None:
        """Test that the packaged templates are found."""
        assert report_loader.templates_dir.exists()
        assert report_loader.templates_dir.name == "templates"

    def test_custom_templates_dir(self, tmp_path: Path) -> None:
        """Test initialization with a custom templates directory."""
        (tmp_path / "tiny.md").write_text("λ = {{ value | sig(3) }}\n", encoding="utf-8")
        loader = ReportLoader(tmp_path)
        assert loader.templates_dir == tmp_path
        assert loader.render_report("tiny.md", value=math.pi) == "λ = 3.14\n"

    def test_load_template_not_found(self) -> None:
        """Test loading a non-existent template raises error."""
        with pytest.raises(FileNotFoundError, match="Template 'nonexistent.md' not found"):
            report_loader.load_template("nonexistent.md")

    @pytest.mark.parametrize("name", ["check-weight.md", "eigen.md", "bounds.md", "solve.md", "bifurcate.md"])
    def test_command_templates_exist(self, name: str) -> None:
        """Test that every command has a summary template."""
        assert hasattr(report_loader.load_template(name), "render")

    def test_render_check_weight(self) -> None:
        """Test rendering the weight class summary."""
        result = {
            "kind": "power",
            "beta": 0.5,
            "class": "lorentz",
            "member": True,
            "witness_a": None,
            "witness_r": None,
            "margin": 0.25,
            "verdict": "member",
            "p0": 1.5,
            "q0": 2.0,
            "method": "analytic",
            "diagnostic": "",
        }
        text = render_report("check-weight.md", result=result, config=ExperimentConfig())
        assert "# Weight class check" in text
        assert "| lorentz | true | n/a | n/a | 0.25 |" in text
        assert "analytic branch: **member**" in text

    def test_optional_sections_skipped(self) -> None:
        """Test that eigen.md omits simplicity and oracle rows when absent."""
        result = {
            "lambda1": 1.5,
            "residual1": 1e-12,
            "lambda2": 4.0,
            "residual2": 1e-9,
            "path_points": 32,
            "iterations2": 12,
            "path_converged": True,
            "positive_part_mass": 0.5,
            "negative_part_mass": 0.5,
        }
        text = render_report("eigen.md", result=result, config=ExperimentConfig())
        assert "second (path minimax)" in text
        assert "simplicity" not in text
        assert "dense p = 2" not in text


class TestWriters:
    """Test CSV, JSON and Markdown artifacts."""

    def test_format_float_round_trips(self) -> None:
        """Test seventeen significant digits."""
        value = 0.1 + 0.2
        assert float(format_float(value)) == value

    def test_csv_layout(self) -> None:
        """Test hash comment, header and cell formatting."""
        text = csv_text(["lambda", "member", "note"], [[1.5, True, None]], DIGEST)
        lines = text.splitlines()
        assert lines[0] == HASH_PREFIX + DIGEST
        assert lines[1] == "lambda,member,note"
        assert lines[2] == "1.5,true,"

    def test_csv_row_width_checked(self) -> None:
        """Test that ragged rows are rejected."""
        with pytest.raises(ValueError, match="Row has 1 cells, header has 2"):
            csv_text(["a", "b"], [[1.0]], DIGEST)

    def test_json_hash_first(self) -> None:
        """Test that config_sha256 is the first key and the rest are sorted."""
        text = json_text({"zeta": 1, "alpha": np.float64(2.5), "flag": np.bool_(True)}, DIGEST)
        data = json.loads(text)
        assert list(data) == ["config_sha256", "alpha", "flag", "zeta"]
        assert data["config_sha256"] == DIGEST
        assert data["alpha"] == 2.5
        assert data["flag"] is True

    def test_json_non_finite_as_strings(self) -> None:
        """Test that ±inf and nan survive as strings."""
        data = json.loads(json_text({"r": math.inf, "values": np.array([1.0, -math.inf])}, DIGEST))
        assert data["r"] == "inf"
        assert data["values"] == [1.0, "-inf"]

    def test_json_empty_payload(self) -> None:
        """Test a payload with no keys."""
        assert json.loads(json_text({}, DIGEST)) == {"config_sha256": DIGEST}

    def test_written_files(self, tmp_path: Path) -> None:
        """Test that writers create directories and read back."""
        csv_path = write_csv(tmp_path / "eigen" / "path.csv", ["k", "energy"], [[0, 1.25], [1, 2.5]], DIGEST)
        json_path = write_json(tmp_path / "eigen" / "summary.json", {"lambda1": 1.25}, DIGEST)
        md_path = write_markdown(tmp_path / "eigen" / "summary.md", "# Eigenpairs\n", DIGEST)
        np.testing.assert_array_equal(read_csv_column(csv_path, "energy"), [1.25, 2.5])
        assert json.loads(json_path.read_text(encoding="utf-8"))["lambda1"] == 1.25
        assert md_path.read_text(encoding="utf-8").startswith(HASH_PREFIX + DIGEST + "\n\n# Eigenpairs")

    def test_writes_are_byte_identical(self, tmp_path: Path) -> None:
        """Test that repeated writes give identical bytes."""
        rows = [[1.0 / 3.0, math.pi]]
        first = write_csv(tmp_path / "a.csv", ["x", "y"], rows, DIGEST).read_bytes()
        second = write_csv(tmp_path / "b.csv", ["x", "y"], rows, DIGEST).read_bytes()
        assert first == second

    def test_read_missing_column(self, tmp_path: Path) -> None:
        """Test that an absent column is named."""
        path = write_csv(tmp_path / "t.csv", ["a"], [[1.0]], DIGEST)
        with pytest.raises(ValueError, match="no column 'b'"):
            read_csv_column(path, "b")
