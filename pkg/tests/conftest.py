import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

ARC_M = 400
ARC_WIDTH = 10
ARC_SEED = 7
ARC_K = 10
ARC_SIGMA = 1.0


@pytest.fixture(scope="session")
def arc_points():
    from semaps import make_arc
    return make_arc(ARC_M, ARC_WIDTH, noise=0.0, seed=ARC_SEED)


@pytest.fixture(scope="session")
def arc_graph(arc_points):
    from semaps import build_graph
    return build_graph(arc_points, ARC_K, ARC_SIGMA)


@pytest.fixture(scope="session")
def data_dir():
    if not (DATA_DIR / "uci").exists():
        pytest.fail("data/uci is missing; see data/README.md for provenance")
    return DATA_DIR


@pytest.fixture(scope="session")
def manifest(data_dir):
    from semaps import load_manifest
    return load_manifest(data_dir / "manifest.json")
