import os
import subprocess
import sys

import numpy as np
import pytest

from gauss_sep import _core_py, kernels
from oracles import brute_force_gaussian

try:
    from gauss_sep import _core
except ImportError:  # pragma: no cover - depends on the build
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled extension not built")

POINTS = [
    (0.0, 0.0),
    (1.0, 0.5),
    (0.5, 0.8 * np.exp(0.7j)),
    (0.2, 0.6j),
    (1.0, np.sqrt(2.0)),
    (1.0, 1.0),
    (-0.3, 0.1),
    (2.0, -1.3 + 0.4j),
]


@pytest.mark.parametrize("n, m", POINTS)
def test_fallback_matches_brute_force(n, m):
    N = 12
    np.testing.assert_allclose(_core_py.gaussian_fock_matrix(n, complex(m), N), brute_force_gaussian(n, m, N), atol=1e-13)


@needs_core
@pytest.mark.parametrize("n, m", POINTS)
def test_compiled_matches_fallback(n, m):
    for N in (2, 7, 25):
        a = _core.gaussian_fock_matrix(n, complex(m), N)
        b = _core_py.gaussian_fock_matrix(n, complex(m), N)
        np.testing.assert_allclose(a, b, atol=1e-15)


@needs_core
def test_compiled_classify_grid_matches_fallback():
    rng = np.random.default_rng(3)
    n = rng.uniform(-1, 3, 5000)
    mabs = rng.uniform(0, 3, 5000)
    # put some points exactly on the boundaries
    n[:100] = mabs[:100]
    mabs[100:200] = np.sqrt(np.abs(n[100:200] * (n[100:200] + 1)))
    mabs[200:300] = n[200:300] + 0.5
    for a, b in zip(_core.classify_grid(n, mabs, 1e-9), _core_py.classify_grid(n, mabs, 1e-9)):
        np.testing.assert_array_equal(a, b)


def test_classify_grid_codes():
    region, margin, pure, pb = kernels.classify_grid([1.0, 0.5, 0.2, 0.1], [0.5, 0.8, 0.6, 0.8], 1e-9)
    assert list(region) == [3, 2, 1, 0]
    np.testing.assert_allclose(margin, [0.5, -0.3, 0.24 - 0.36, -0.2])
    assert not pure.any() and not pb.any()


def test_matrix_is_hermitian_and_sector_diagonal():
    N = 10
    G = kernels.gaussian_fock_matrix(0.7, 0.3 - 0.4j, N)
    np.testing.assert_allclose(G, G.conj().T, atol=0)
    j, k = np.divmod(np.arange(N * N), N)
    d = j - k
    assert np.all(G[d[:, None] != d[None, :]] == 0)


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("GAUSS_SEP_PURE_PYTHON", None)
    else:
        env["GAUSS_SEP_PURE_PYTHON"] = env_value
    out = subprocess.run(
        [sys.executable, "-c", "import gauss_sep; print(gauss_sep.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return out.stdout.strip()


def test_env_forces_fallback():
    assert _backend_in_subprocess("1") == "python"


@needs_core
def test_default_backend_is_compiled():
    assert _backend_in_subprocess(None) == "cython"
