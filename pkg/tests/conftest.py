"""
Shared pytest fixtures.
"""

import pytest

from dlog_simulator.kernel.schemas import ProblemInstance
from dlog_simulator.quadrature.integrate import QuadratureConfig
from dlog_simulator.rng import make_rng

# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def small_instance() -> ProblemInstance:
    """m=4, ell=2, r=13, d=5: 2^(m+ell) = 64."""
    return ProblemInstance(m=4, ell=2, r=13, d=5)


@pytest.fixture
def oracle_instance() -> ProblemInstance:
    """m=8, ell=2, r=251, d=101: largest instance of the fast oracle checks."""
    return ProblemInstance(m=8, ell=2, r=251, d=101)


@pytest.fixture
def cfg() -> QuadratureConfig:
    """Lighter precision than the 192-bit default; ample for 1e-9 checks."""
    return QuadratureConfig(precision_bits=128)


@pytest.fixture
def rng():
    return make_rng(1)
