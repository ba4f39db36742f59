from __future__ import annotations

import pytest

from chronogram.ingest import (bundled_fixture_path, bundled_stopwords,
                               filter_corpus, load_records)
from chronogram.simnet import build_slice_graph, target_distances
from chronogram.windowing import (EmptyWindow, build_incidence,
                                  empty_incidence, windows_for)


@pytest.fixture(scope="session")
def stopwords():
    return bundled_stopwords()


@pytest.fixture(scope="session")
def fixture_corpus():
    records = load_records(bundled_fixture_path())
    return filter_corpus(records, (), (1950, 2009), source="bundled fixture")


@pytest.fixture(scope="session")
def fixture_windows(fixture_corpus):
    return windows_for(fixture_corpus, 1950, 5)


@pytest.fixture(scope="session")
def fixture_matrices(fixture_corpus, fixture_windows, stopwords):
    matrices = []
    for window in fixture_windows:
        try:
            matrices.append(build_incidence(fixture_corpus, window, stopwords))
        except EmptyWindow:
            matrices.append(empty_incidence(window))
    return matrices


@pytest.fixture(scope="session")
def fixture_graphs(fixture_matrices):
    return [build_slice_graph(m, 0.2) for m in fixture_matrices]


@pytest.fixture(scope="session")
def fixture_tables(fixture_graphs):
    return [target_distances(g) for g in fixture_graphs]


@pytest.fixture(scope="session")
def mpl_warm():
    # figure rendering is part of the pipeline; importing the backend and
    # rendering one throwaway figure keeps interpreter-level import and
    # font-cache cost out of the timed runs
    import io

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots()
    ax.plot([0, 1], [0, 1])
    ax.set_title("warmup")
    fig.savefig(io.BytesIO(), format="png")
    plt.close(fig)
