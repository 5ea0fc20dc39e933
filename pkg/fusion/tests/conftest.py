import json
import subprocess
import sys
from pathlib import Path

import pytest

BEAMSIM = [sys.executable, "-m", "beamsim.cli"]


def run_beamsim(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(BEAMSIM + list(args), capture_output=True, text=True)


@pytest.fixture(scope="session")
def scenes_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("scenes")
    proc = run_beamsim("generate", "--preset", "u2-desk", "--trials", "16",
                       "--seed", "21", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def heldout_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("held")
    proc = run_beamsim("generate", "--preset", "u2-desk", "--trials", "4",
                       "--seed", "909", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    return out


def load_scenarios(path: Path) -> list[dict]:
    return [json.loads(p.read_text()) for p in sorted(path.glob("scenario_*.json"))]
