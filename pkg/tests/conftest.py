from pathlib import Path

import pytest

from cabletracer.world import WorldScenario, load_scenario

REPO_ROOT = Path(__file__).resolve().parent.parent
GOLDEN_SCENARIO_PATH = REPO_ROOT / "scenarios" / "golden.toml"
GOLDEN_SCRIPT_PATH = Path(__file__).resolve().parent / "data" / "golden_script.txt"


@pytest.fixture(scope="session")
def golden_text() -> str:
    return GOLDEN_SCENARIO_PATH.read_text()


@pytest.fixture()
def golden_scenario(golden_text) -> WorldScenario:
    return load_scenario(golden_text)


@pytest.fixture(scope="session")
def golden_script() -> str:
    return GOLDEN_SCRIPT_PATH.read_text()
