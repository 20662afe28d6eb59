import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DOCS = Path(__file__).parent.parent / "docs"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def tfim3():
    from kronsim.hamspec import parse_hamiltonian_file

    return parse_hamiltonian_file(DOCS / "tfim3.ham")


@pytest.fixture
def td_pair():
    from kronsim.hamspec import parse_hamiltonian_file

    return parse_hamiltonian_file(DOCS / "commuting_td.ham")
