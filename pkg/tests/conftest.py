import pytest

from freebound import DualUtilityFamily, ModelParams, derive_params
from freebound.boundary import GcaBoundary
from freebound.dualvalue import DualValueEvaluator
from freebound.primal import PrimalSolver

# baseline parameter set used throughout the comparison tables
TABLE1 = dict(mu=0.1, r=0.05, sigma=0.3, beta=0.1, T=1.0, K=1.0)


@pytest.fixture(scope="session")
def params():
    return ModelParams(**TABLE1)


@pytest.fixture(scope="session")
def derived(params):
    return derive_params(params)


@pytest.fixture(scope="session")
def power():
    return DualUtilityFamily.power(0.5, K=1.0)


@pytest.fixture(scope="session")
def non_hara():
    return DualUtilityFamily.non_hara(K=1.0)


@pytest.fixture(scope="session")
def boundary_power(params, power):
    return GcaBoundary.build(params, power)


@pytest.fixture(scope="session")
def boundary_non_hara(params, non_hara):
    return GcaBoundary.build(params, non_hara)


@pytest.fixture(scope="session")
def evaluator_power(boundary_power):
    return DualValueEvaluator.for_boundary(boundary_power)


@pytest.fixture(scope="session")
def evaluator_non_hara(boundary_non_hara):
    return DualValueEvaluator.for_boundary(boundary_non_hara)


@pytest.fixture(scope="session")
def solver_power(params, power, boundary_power, evaluator_power):
    return PrimalSolver(params, power, boundary=boundary_power, evaluator=evaluator_power)


@pytest.fixture(scope="session")
def solver_non_hara(params, non_hara, boundary_non_hara, evaluator_non_hara):
    return PrimalSolver(
        params, non_hara, boundary=boundary_non_hara, evaluator=evaluator_non_hara
    )
