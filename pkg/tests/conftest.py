import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyhedge.dual import run_dual  # noqa: E402
from polyhedge.geometry import Polyhedron  # noqa: E402
from polyhedge.lvop import LvopProblem  # noqa: E402
from polyhedge.market import KornMullerParams, build_korn_muller, exchange_option_payoff  # noqa: E402
from polyhedge.primal import ask_price, bid_price, run_primal  # noqa: E402
from polyhedge.rnpricing import rn_price  # noqa: E402
from polyhedge.strategy import PathSpec, run_strategy  # noqa: E402
from golden import STRATEGY_PATH  # noqa: E402


@pytest.fixture(scope="session")
def small_lvop():
    """Two objectives, two variables, ordering cone cone{(-3,1),(1,2)}, weight (0,1)."""
    return LvopProblem(
        P=[[1, -1], [1, 1]],
        B=[[2, 1], [1, 2], [1, 0], [0, 1]],
        b=[6, 6, 0, 0],
        C=Polyhedron.cone([(-3, 1), (1, 2)], 2),
        c=[0, 1],
    )


@pytest.fixture(scope="session")
def km():
    return build_korn_muller(KornMullerParams.reference_example())


@pytest.fixture(scope="session")
def xi_ask(km):
    return exchange_option_payoff(km, "ask")


@pytest.fixture(scope="session")
def xi_mid(km):
    return exchange_option_payoff(km, "mid")


@pytest.fixture(scope="session")
def primal_ask(km, xi_ask):
    return run_primal(km, xi_ask)


@pytest.fixture(scope="session")
def primal_mid(km, xi_mid):
    return run_primal(km, xi_mid)


@pytest.fixture(scope="session")
def dual_ask(km, xi_ask):
    return run_dual(km, xi_ask)


@pytest.fixture(scope="session")
def dual_mid(km, xi_mid):
    return run_dual(km, xi_mid)


@pytest.fixture(scope="session")
def rn_ask(km, xi_ask):
    return {i: rn_price(km, xi_ask, i) for i in (1, 2, 3)}


@pytest.fixture(scope="session")
def bond_bid(km, xi_ask):
    return bid_price(km, xi_ask, 3)


@pytest.fixture(scope="session")
def path_strategy(km, xi_ask, primal_ask):
    y0 = (0, 0, ask_price(primal_ask, 3))
    return run_strategy(km, xi_ask, y0, PathSpec.from_indices(STRATEGY_PATH), primal_ask)
