import pytest

from hopegraphene.conductivity import GrapheneParams
from hopegraphene.units import THZ, UM, PhysicalConfig, Polarization


@pytest.fixture
def tm_config():
    """Two dielectrics eps 3 over 4, 8 um period, normal incidence at 2 THz."""
    return PhysicalConfig(eps_u=3.0, eps_w=4.0, d=8 * UM, theta=0.0, f=2 * THZ, polarization=Polarization.TM)


@pytest.fixture
def te_config(tm_config):
    return PhysicalConfig(3.0, 4.0, 8 * UM, 0.0, 2 * THZ, Polarization.TE)


@pytest.fixture
def graphene():
    return GrapheneParams.from_units(0.4, 3.7)
