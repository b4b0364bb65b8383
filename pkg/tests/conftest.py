import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci", max_examples=60, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("dev", max_examples=25, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def pytest_addoption(parser):
    parser.addoption(
        "--seed",
        action="store",
        default="0,1,2",
        help="comma-separated seeds for randomized property tests",
    )


def pytest_generate_tests(metafunc):
    if "seed" in metafunc.fixturenames:
        seeds = [int(s) for s in metafunc.config.getoption("--seed").split(",") if s.strip()]
        metafunc.parametrize("seed", seeds)
