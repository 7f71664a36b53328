import pytest

from qusc import YoungDiagram, build_scattering

STANDARD_ROWS = [(2, 1, 1), (3, 2, 1), (2, 2, 1, 1)]


@pytest.fixture(scope="session")
def diagrams():
    return {rows: YoungDiagram.from_rows(rows) for rows in STANDARD_ROWS}


@pytest.fixture(scope="session")
def scatterings(diagrams):
    """All (rows, levels) scatterings used across the suite, built once."""
    out = {}
    for rows, lam in diagrams.items():
        for levels in (0, 1, 2):
            out[rows, levels] = build_scattering(lam, levels)
    return out
