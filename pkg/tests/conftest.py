import json
from pathlib import Path

import pytest

from capmatch.aas import parse_environment
from capmatch.manifest import parse_manifest
from capmatch.ontology import builtin_process_ontology, merge_stack

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def stack():
    return merge_stack(builtin_process_ontology())


@pytest.fixture(scope="session")
def painting_env():
    return parse_environment((FIXTURES / "modules" / "painting-environment.json").read_text())


@pytest.fixture(scope="session")
def distilling_env():
    return parse_environment((FIXTURES / "modules" / "distilling-environment.json").read_text())


@pytest.fixture(scope="session")
def batch_env():
    return parse_environment((FIXTURES / "modules" / "batch-environment.json").read_text())


@pytest.fixture(scope="session")
def painting_manifest():
    return parse_manifest((FIXTURES / "modules" / "painting-manifest.json").read_text())


def load_fixture_json(relative: str) -> dict:
    return json.loads((FIXTURES / relative).read_text())
