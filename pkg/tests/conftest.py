import pytest

from phgkit.config import RunConfig
from phgkit.grading import Weights
from phgkit.symbols import expr as ex
from phgkit.symbols.grids import EvaluationGrid


@pytest.fixture(scope="session")
def cfg():
    return RunConfig()


@pytest.fixture(scope="session")
def w11():
    return Weights((1, 1))


@pytest.fixture(scope="session")
def w21():
    return Weights((2, 1))


@pytest.fixture(scope="session")
def grid11(w11, cfg):
    return EvaluationGrid(weights=w11, r0=cfg.r0, L=cfg.shells, seed=cfg.seed)


@pytest.fixture(scope="session")
def grid11_ext(w11, cfg):
    return EvaluationGrid(weights=w11.extended(), r0=cfg.r0, L=cfg.shells,
                          seed=cfg.seed)


@pytest.fixture(scope="session")
def sig2():
    return ex.Signature(0, 2, False)


@pytest.fixture(scope="session")
def sig2t():
    return ex.Signature(0, 2, True)
