import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    # keep null-distribution files out of the user's cache
    mp = pytest.MonkeyPatch()
    mp.setenv("BPLOT_CACHE_DIR", str(tmp_path_factory.mktemp("bplot-cache")))
    mp.delenv("SOURCE_DATE_EPOCH", raising=False)
    yield
    mp.undo()


@pytest.fixture
def toy():
    from bplot import build_two_sample

    return build_two_sample([0.1, 0.4], [0.2, 0.3])


@pytest.fixture(scope="session")
def verdict():
    """Record one PASS/FAIL line; the lines are repeated in the terminal summary."""

    def record(label: str, ok: bool, detail: str = "", info: bool = False) -> bool:
        tag = "INFO" if info else ("PASS" if ok else "FAIL")
        line = f"{tag}  {label}" + (f"  [{detail}]" if detail else "")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
