import numpy as np
import pytest

from svkbest.data import Dataset
from svkbest.errors import DataError
from svkbest.kernels import KernelSpec, gram, kernel_eval, kernel_matrix


class TestEval:
    def test_linear_dot(self):
        assert kernel_eval(KernelSpec("linear"), [1, 2], [3, -1]) == 1.0

    def test_rbf_identity(self):
        assert kernel_eval(KernelSpec("rbf", gamma=0.7), [1.5, -2.0], [1.5, -2.0]) == 1.0

    def test_polynomial(self):
        spec = KernelSpec("polynomial", degree=2, coef0=1.0)
        assert kernel_eval(spec, [1, 0], [1, 0]) == 4.0

    def test_dimension_mismatch(self):
        with pytest.raises(DataError, match="dimension"):
            kernel_eval(KernelSpec("linear"), [1, 2], [1, 2, 3])

    def test_linear_equals_degree_one_poly(self):
        rng = np.random.default_rng(0)
        lin = KernelSpec("linear")
        poly = KernelSpec("polynomial", degree=1, coef0=0.0)
        for _ in range(20):
            a, b = rng.normal(size=3), rng.normal(size=3)
            assert kernel_eval(lin, a, b) == kernel_eval(poly, a, b)


class TestGram:
    def test_orthonormal_rows(self):
        ds = Dataset(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([1, -1]))
        assert gram(KernelSpec("linear"), ds).values.tolist() == [[1.0, 0.0], [0.0, 1.0]]

    def test_opposite_rows(self):
        ds = Dataset(np.array([[-1.0, 0.0], [1.0, 0.0]]), np.array([-1, 1]))
        assert gram(KernelSpec("linear"), ds).values.tolist() == [[1.0, -1.0], [-1.0, 1.0]]

    def test_rbf_diagonal_exactly_one(self):
        rng = np.random.default_rng(1)
        ds = Dataset(rng.normal(size=(8, 3)), np.where(rng.uniform(size=8) < 0.5, 1, -1))
        G = gram(KernelSpec("rbf", gamma=0.3), ds).values
        assert np.all(np.diag(G) == 1.0)

    def test_bitwise_symmetry(self):
        rng = np.random.default_rng(2)
        ds = Dataset(rng.normal(size=(17, 4)), np.where(rng.uniform(size=17) < 0.5, 1, -1))
        for spec in (KernelSpec("linear"), KernelSpec("rbf", gamma=0.5),
                     KernelSpec("polynomial", degree=3, coef0=1.0)):
            G = gram(spec, ds).values
            assert np.array_equal(G, G.T)

    def test_positive_semidefinite_small(self):
        rng = np.random.default_rng(3)
        for trial in range(10):
            n = int(rng.integers(2, 33))
            ds = Dataset(rng.normal(size=(n, 3)), np.where(rng.uniform(size=n) < 0.5, 1, -1))
            for spec in (KernelSpec("linear"), KernelSpec("rbf", gamma=1.0)):
                eig = np.linalg.eigvalsh(gram(spec, ds).values)
                assert eig[0] >= -1e-8 * max(eig[-1], 1e-30)

    def test_matches_pairwise_eval(self):
        rng = np.random.default_rng(4)
        ds = Dataset(rng.normal(size=(5, 2)), np.where(rng.uniform(size=5) < 0.5, 1, -1))
        spec = KernelSpec("rbf", gamma=0.2)
        G = gram(spec, ds).values
        for i in range(5):
            for j in range(i, 5):
                assert G[i, j] == pytest.approx(kernel_eval(spec, ds.X[i], ds.X[j]), abs=1e-15)


class TestKernelSpecJson:
    def test_round_trips(self):
        for doc in ({"kind": "linear"},
                    {"kind": "rbf", "gamma": 0.1},
                    {"kind": "polynomial", "degree": 3, "coef0": 1.0}):
            spec = KernelSpec.from_json(doc)
            assert spec.to_json_dict() == doc

    def test_validation(self):
        with pytest.raises(DataError):
            KernelSpec.from_json({"kind": "rbf"})
        with pytest.raises(DataError):
            KernelSpec.from_json({"kind": "polynomial", "degree": 0})
        with pytest.raises(DataError):
            KernelSpec.from_json({"kind": "warp"})
        with pytest.raises(DataError):
            KernelSpec.from_json({"kind": "linear", "gamma": 1.0})
        with pytest.raises(DataError):
            KernelSpec.from_json('{"kind": "linear", "extra": 1}')

    def test_cross_matrix_shape(self):
        A = np.zeros((3, 2))
        B = np.ones((4, 2))
        assert kernel_matrix(KernelSpec("linear"), A, B).shape == (3, 4)
