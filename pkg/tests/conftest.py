"""
Pytest configuration and shared fixtures for the transshipment optimizer tests.
"""

import numpy as np
import pytest

from tools.evolve import SpeaParams
from tools.experiment_config import ExperimentSpec, preset_system
from tools.model import DemandSpec, LocationParams, SystemConfig


def make_system(holding, shortage, tau, lead, means=None, std_devs=None, period_duration=None):
    """Build an n-location system from per-location lists and full matrices."""
    n = len(holding)
    means = means if means is not None else [100.0] * n
    std_devs = std_devs if std_devs is not None else [20.0] * n
    locations = tuple(
        LocationParams(
            holding_cost=h,
            shortage_cost=p,
            demand=DemandSpec(mean=m, std_dev=s),
        )
        for h, p, m, s in zip(holding, shortage, means, std_devs)
    )
    return SystemConfig(
        locations=locations,
        transship_cost=np.asarray(tau, dtype=float),
        lead_time=np.asarray(lead, dtype=float),
        period_duration=period_duration,
    )


@pytest.fixture
def table1_config():
    """Two symmetric locations: h=3, p=2, tau=0.5, L=5, N(100, 20)."""
    return preset_system("table1")


@pytest.fixture
def deterministic_config():
    """table1 costs with degenerate demand of exactly 100 per location."""
    return make_system(
        holding=[3.0, 3.0],
        shortage=[2.0, 2.0],
        tau=[[0.0, 0.5], [0.5, 0.0]],
        lead=[[0.0, 5.0], [5.0, 0.0]],
        std_devs=[0.0, 0.0],
    )


@pytest.fixture
def three_location_config():
    """Asymmetric three-location system."""
    return make_system(
        holding=[3.0, 1.0, 2.0],
        shortage=[2.0, 4.0, 3.0],
        tau=[[0.0, 0.5, 1.0], [0.7, 0.0, 0.4], [1.2, 0.3, 0.0]],
        lead=[[0.0, 5.0, 2.0], [4.0, 0.0, 3.0], [6.0, 1.0, 0.0]],
        means=[100.0, 80.0, 120.0],
        std_devs=[20.0, 30.0, 10.0],
    )


@pytest.fixture
def small_params():
    """SPEA2 parameters small enough for unit tests."""
    return SpeaParams(population_size=20, archive_size=10, generations=4, seed=7)


@pytest.fixture
def small_spec(table1_config, small_params, tmp_path):
    """C/F experiment on table1 writing into a temporary directory."""
    return ExperimentSpec(
        system=table1_config,
        spea=small_params,
        objectives=("cost", "fill"),
        N=50,
        scenario_seed=42,
        output_dir=tmp_path / "out",
        name="table1",
    )
