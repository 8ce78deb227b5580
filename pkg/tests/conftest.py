import pytest

from hypersync.datasets import load_example

HYPERGRAPH_FIXTURES = [
    "fig1_left", "fig1_right", "fig2", "fig5_left", "fig5_right", "fig6",
    "fig7_left", "fig7_right", "fig8", "fig9", "fig10",
]


@pytest.fixture(scope="session")
def docs():
    return {name: load_example(name) for name in HYPERGRAPH_FIXTURES + ["replicator_pairwise", "replicator_triplet", "replicator_kh"]}


@pytest.fixture(scope="session")
def graphs(docs):
    return {name: docs[name].hypergraph() for name in HYPERGRAPH_FIXTURES}


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[key])
