import json
from pathlib import Path

import pytest

from tanglekit.presentation import Presentation

ROOT = Path(__file__).resolve().parent.parent
PRESENTATIONS = ROOT / "presentations"

# built-ins whose adjacency the oracle module knows
ORACLE_KINDS = ["ray", "double_ray", "dominated_ray", "star_omega", "spider_omega", "comb", "grid",
                "binary_tree", "theta_omega"]
BUILTINS = sorted(f.stem for f in PRESENTATIONS.glob("*.json"))


def load(name):
    return Presentation.load(PRESENTATIONS / f"{name}.json")


def term(name):
    return json.loads((PRESENTATIONS / f"{name}.json").read_text())


@pytest.fixture
def pres():
    return load


# one line per acceptance criterion, shown after the run even when output is captured
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
