import pytest

from ncdef.massey import compute_hull
from ncdef.presets import RunOptions, load_preset
from ncdef.yoneda import ExtBasis, ExtComputer


@pytest.fixture(scope="session")
def weyl():
    return load_preset("weyl2-simple4")


@pytest.fixture(scope="session")
def weyl_computer(weyl):
    return ExtComputer(weyl.bundle, degree_bound=4)


@pytest.fixture(scope="session")
def weyl_computed_basis(weyl, weyl_computer):
    basis = ExtBasis.computed(weyl_computer)
    basis.certify(weyl_computer)
    return basis


@pytest.fixture(scope="session")
def weyl_state(weyl):
    return compute_hull(weyl.preset_basis, RunOptions())


@pytest.fixture(scope="session")
def poly1():
    return load_preset("poly1-point")


@pytest.fixture(scope="session")
def poly1_state(poly1):
    return compute_hull(poly1.preset_basis,
                        RunOptions(max_order=6, stop_on_stabilized=False))
