"""
Acceptance runs of every checked-in config.

These sweep the full grids (up to n = 8192) and take minutes, so they are
marked as integration tests and skipped by default. Run them with:

    uv run pytest -m integration
"""

import dataclasses
from pathlib import Path

import pytest

from jcspectra.config import load_config
from jcspectra.experiments import run_experiment, write_artifacts

CONFIG_DIR = Path(__file__).parent.parent / "configs"


@pytest.mark.integration
@pytest.mark.parametrize("config", sorted(CONFIG_DIR.glob("*.toml")), ids=lambda p: p.stem)
def test_config_passes(config: Path, tmp_path: Path) -> None:
    """Test each config meets its pass criterion and writes its artefacts."""
    cfg = dataclasses.replace(load_config(config), output_dir=tmp_path)
    result = run_experiment(cfg)
    failed = [f"{c.name}: {c.detail}" for c in result.checks if not c.passed]
    assert failed == []
    assert result.exit_code == 0
    for path in write_artifacts(cfg, result):
        assert path.stat().st_size > 0
