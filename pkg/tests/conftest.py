import pytest

from coamoeba_atlas import topology
from coamoeba_atlas.plane import DEFAULT_CONFIG


@pytest.fixture(scope="session")
def cfg():
    return DEFAULT_CONFIG


@pytest.fixture(scope="session")
def loci(cfg):
    return topology.trace_coincidence_loci(cfg)


@pytest.fixture(scope="session")
def scan(cfg, loci):
    return topology.triple_coincidence_scan(cfg, loci=loci)
