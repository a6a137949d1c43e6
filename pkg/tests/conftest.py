import pytest

from sdsim import RngPolicy, build_frs_model, compile_model, simulate


@pytest.fixture(scope="session")
def frs_spec():
    return build_frs_model()


@pytest.fixture(scope="session")
def frs(frs_spec):
    return compile_model(frs_spec)


@pytest.fixture(scope="session")
def noise_off_run(frs):
    return simulate(frs, RngPolicy.noise_off())


@pytest.fixture(scope="session")
def seed1_run(frs):
    return simulate(frs, RngPolicy(global_seed=1))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
