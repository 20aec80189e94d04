import pytest
import os
import sys

# Quadrature results must be recomputed in tests, never replayed from disk
os.environ["RGBOSE_CACHE_ENABLED"] = "false"

# Add the src directory to the path so pytest can import the package
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))


@pytest.fixture
def params3d():
    from rgbose.lab.model import ModelParams
    return ModelParams(lam=0.05, rho0=1.0, R0=1.0, vhat0=1.0, d=3, gamma=2.0, cutoff="sharp")


@pytest.fixture
def params2d():
    from rgbose.lab.model import ModelParams
    return ModelParams(lam=0.05, rho0=1.0, R0=1.0, vhat0=1.0, d=2, gamma=2.0, cutoff="sharp")
