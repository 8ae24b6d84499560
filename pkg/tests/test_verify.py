import pytest

from mukstab.commands.verify import SUITES, run_suite
from mukstab.main import EXIT_OK, main
from mukstab.toric.equivint import moment_cache


@pytest.mark.parametrize('name', list(SUITES))
def test_suite_passes(name):
    result = run_suite(name)
    assert result.name == name
    assert result.checks
    failed = [check.name for check in result.checks if not check.passed]
    assert result.passed, failed


def test_verify_output_is_reproducible(capsys):
    outputs = []
    for _ in range(2):
        moment_cache.clear()
        assert main(['verify', '--suite', 'oracle']) == EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert outputs[0]
    assert outputs[0] == outputs[1]
