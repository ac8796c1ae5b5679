import pytest

import drsplit as ds
from drsplit.experiment import derive_seeds


@pytest.fixture(scope="session")
def exp1_instance():
    return ds.build_instance(ds.EXP1, seed=derive_seeds(0, 1)[0])


@pytest.fixture(scope="session")
def exp2_instance():
    return ds.build_instance(ds.EXP2, seed=derive_seeds(0, 1)[0])


@pytest.fixture(scope="session")
def exp1_problem(exp1_instance):
    return exp1_instance.problem()


@pytest.fixture(scope="session")
def exp2_problem(exp2_instance):
    return exp2_instance.problem()
