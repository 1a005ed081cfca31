import pytest

from clusterforge import data_path
from clusterforge.graph import load_configs
from clusterforge.pool import CandidatePool, apply_constraint, define_metric, delete, select_best

BLADE_FILES = ["hp.xml", "intel-xeon-2600.xml", "hp-blade-memory.xml", "hp-network.xml", "hp-bl460c_gen8.xml"]
RACK_FILES = ["rackmount.xml", "intel-xeon-2600.xml", "hp-blade-memory.xml", "hp-network.xml", "rackmount-1u.xml"]


def db(*names):
    return [data_path("db", n) for n in names]


def best_node(files=BLADE_FILES):
    pool = CandidatePool(tuple(load_configs(db(*files))))
    pool = apply_constraint(pool, "'InfiniBand' in network_tech")
    pool = define_metric(pool, "r = node_cost / node_peak_performance")
    return delete(select_best(pool, "r")).configurations[0]


@pytest.fixture(scope="session")
def blade_node():
    return best_node()


@pytest.fixture(scope="session")
def switches():
    return load_configs(db("switches.xml"))


@pytest.fixture(scope="session")
def ups_units():
    return load_configs(db("ups.xml"))


# acceptance criteria verdicts, printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
