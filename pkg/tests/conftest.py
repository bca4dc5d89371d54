import pytest

from tdesrec.fixtures import (
    SMALL_FACTORY_EXPECTED_PATH,
    SMALL_FACTORY_RECONFIG_EVENT,
    SMALL_FACTORY_WARMUP,
    small_factory,
)
from tdesrec.synthesis import mode_timed_graph, synthesize_tcrs


@pytest.fixture(scope="session")
def factory_model():
    return small_factory()


@pytest.fixture(scope="session")
def factory_ttg(factory_model):
    m = factory_model
    return mode_timed_graph([m.atgs["M1"], m.atgs["M2"]], m.atgs["R"], m.events)


@pytest.fixture(scope="session")
def factory_supervisor(factory_model):
    m = factory_model
    return synthesize_tcrs([m.atgs["M1"], m.atgs["M2"]], m.atgs["R"],
                           m.specs["SPEC"], m.events,
                           reconfig_events=[SMALL_FACTORY_RECONFIG_EVENT])


@pytest.fixture(scope="session")
def factory_problem(factory_supervisor):
    from tdesrec.solver import ReconfigProblem

    sup = factory_supervisor
    q_s = sup.automaton.run(SMALL_FACTORY_WARMUP)
    q_r = sup.automaton.run(SMALL_FACTORY_EXPECTED_PATH, start=q_s)
    assert q_s is not None and q_r is not None
    return ReconfigProblem(sup, q_s, q_r, SMALL_FACTORY_RECONFIG_EVENT)
