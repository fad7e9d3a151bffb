import numpy as np
import pytest

from svkbest.data import Dataset
from svkbest.kernels import KernelSpec


@pytest.fixture
def linear():
    return KernelSpec("linear")


@pytest.fixture
def two_point():
    """Symmetric pair with closed-form optimum alpha=(1/2,1/2), f=1/2, b=0."""
    return Dataset(np.array([[-1.0, 0.0], [1.0, 0.0]]), np.array([-1, 1]))


def make_blobs(n, seed, sep=3.0, d=2):
    """Two Gaussian classes, shuffled; mostly separable at sep=3."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    half = n // 2
    Xp = rng.normal(loc=[+sep / 2] * d, scale=1.0, size=(half, d))
    Xn = rng.normal(loc=[-sep / 2] * d, scale=1.0, size=(n - half, d))
    X = np.vstack([Xp, Xn])
    y = np.array([1] * half + [-1] * (n - half))
    order = rng.permutation(n)
    return Dataset(X[order], y[order])


def make_two_group_population(n, seed, flip_noise=0.15):
    """Synthetic population with a binary group column z correlated with y.

    Columns: x1, x2 continuous, z in {-1,+1}. Labels follow the group's
    cluster except for a noisy fraction, so rows with y != z exist.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = np.where(rng.uniform(size=n) < 0.5, 1, -1)
    centers = np.where(z == 1, 1.0, -1.0)
    X = np.column_stack([
        rng.normal(loc=centers, scale=1.0),
        rng.normal(loc=0.5 * centers, scale=1.0),
        z.astype(float),
    ])
    y = z.copy()
    noisy = rng.uniform(size=n) < flip_noise
    y[noisy] = -y[noisy]
    return Dataset(X, y, feature_names=("x1", "x2", "z"))
