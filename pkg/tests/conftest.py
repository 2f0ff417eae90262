import pytest

from spacingbound import PotentialSpec, build_potential

# parameter sets used across the suite
STANDARD = {
    "zero": {},
    "exponential": {"c": 4.0, "lam": 1.0},
    "power": {"c": 1.0, "gamma": 0.5},
    "wigner_von_neumann": {"c": 2.0, "omega": 2.0, "gamma": 1.0},
    "step_sequence": {"c": 1.0, "eta": 0.5},
    "bump_train": {"bumps": [[0.0, 1.0, 1.0], [4.0, 5.0, -2.0], [16.0, 17.5, 1.0]]},
    "random_decaying": {"c": 1.0, "eta": 0.5, "seed": 7},
}


def make(family, **params):
    return build_potential(PotentialSpec(family, params or STANDARD[family]))


@pytest.fixture(params=sorted(STANDARD))
def any_potential(request):
    return make(request.param)
