import json

import pytest

from mukstab.main import main
from mukstab.toric.equivint import moment_cache
from mukstab.toric.plfunction import PLFunction


@pytest.fixture(autouse=True)
def clear_moment_cache():
    moment_cache.clear()
    yield
    moment_cache.clear()


@pytest.fixture
def step():
    """``max(0, x - 1/2)`` on the line."""
    return PLFunction.from_pieces([([0], 0), ([1], '-1/2')])


@pytest.fixture
def run_cli(capsys):
    def run(*argv: str) -> tuple[int, dict]:
        code = main(list(argv))
        out = capsys.readouterr().out
        return code, json.loads(out) if out.strip() else {}

    return run
