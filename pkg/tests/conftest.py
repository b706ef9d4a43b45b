import hypothesis
import pytest

from drlroute.generator import GenSpec, generate

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running training checks")


@pytest.fixture(scope="session")
def fig4_problem():
    """8x8x2, 50 two-pin nets, normal capacity 3."""
    return generate(GenSpec(width=8, height=8, net_count=50, max_pins_per_net=2, normal_capacity=3, seed=7))[0]


@pytest.fixture(scope="session")
def small_problem():
    return generate(GenSpec(width=6, height=6, net_count=10, max_pins_per_net=4, normal_capacity=2, seed=3))[0]


_verdicts: list[str] = []


@pytest.fixture(scope="session")
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _verdicts.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_verdicts, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
