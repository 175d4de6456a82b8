import numpy as np
import pytest

from girthlab import EmbeddedSphere, make_ellipsoid, make_power_mean


@pytest.fixture(scope="session")
def euclid():
    return make_ellipsoid(np.eye(3), label="euclid")


@pytest.fixture(scope="session")
def aniso_ellipsoid():
    # axes (1, 0.8, 0.6)
    return make_ellipsoid(np.diag([1.0, 1.0 / 0.64, 1.0 / 0.36]), label="e-086")


@pytest.fixture(scope="session")
def tilted_ellipsoid():
    R = _rotation(0.4, 0.9)
    A = R @ np.diag([0.8, 1.6, 2.5]) @ R.T
    return make_ellipsoid(A, label="e-tilt")


@pytest.fixture(scope="session")
def pm_body():
    mats = [np.diag([1.0, 2.0, 0.5]), np.eye(3)]
    return make_power_mean(mats, 4, label="pm4")


@pytest.fixture(scope="session")
def pm_body6():
    R = _rotation(0.7, 0.2)
    mats = [np.eye(3), R @ np.diag([2.2, 0.6, 1.1]) @ R.T]
    return make_power_mean(mats, 6, label="pm6")


@pytest.fixture(scope="session")
def round_sphere(euclid):
    return EmbeddedSphere(euclid, euclid)


def _rotation(a, b):
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    Rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    Rx = np.array([[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]])
    return Rz @ Rx
