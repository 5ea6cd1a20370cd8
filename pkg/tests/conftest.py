import numpy as np
import pytest

from contact_gabor import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger numba compilation once so timed acceptance tests measure math,
    # not JIT latency
    nodes = np.zeros((2, 1))
    _kernels.phase_scan(nodes, np.zeros(2, dtype=complex), np.ones((2, 1)))
    _kernels.shift_matrix(nodes, np.eye(1), np.ones(1), np.zeros((2, 1)),
                          np.zeros((2, 1)))
    _kernels.bargmann_sums(nodes, np.zeros(2, dtype=complex), np.eye(1),
                           np.zeros((2, 1)), np.zeros((2, 1)))
