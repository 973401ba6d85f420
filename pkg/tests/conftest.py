import pytest

from exthl.dynamics.state import ParticleParams

_ACCEPTANCE: list[str] = []


@pytest.fixture
def params():
    return ParticleParams()


@pytest.fixture
def acceptance(capsys):
    """Record one PASS/FAIL line per acceptance criterion (also echoed live)."""

    def record(number: int, title: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
