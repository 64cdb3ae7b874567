"""Shared fixtures.

The expensive artifacts (fine meshes, their energies) are session scoped so
the acceptance module and the unit modules reuse one computation.
"""

import pytest

import cobsig as cs


@pytest.fixture(scope="session")
def square8():
    return cs.gen_square(8)


@pytest.fixture(scope="session")
def square16():
    return cs.gen_square(16)


@pytest.fixture(scope="session")
def square32():
    return cs.gen_square(32)


@pytest.fixture(scope="session")
def square64():
    return cs.gen_square(64)


@pytest.fixture(scope="session")
def shell16():
    return cs.gen_annular_shell(1.0, 1.2, 1.0, 16)


@pytest.fixture(scope="session")
def shell32():
    return cs.gen_annular_shell(1.0, 1.2, 1.0, 32)


@pytest.fixture(scope="session")
def square_oracle():
    return cs.grid_oracle("square", {}, 1024)


@pytest.fixture(scope="session")
def shell_oracle():
    return cs.grid_oracle("annular_shell",
                          {"r0": 1.0, "r1": 1.2, "height": 1.0}, 512)
