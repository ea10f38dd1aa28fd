import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gauss_sep import fock, werner
from gauss_sep.covariance import GaussianParams
from gauss_sep.errors import DomainError, InvalidArgumentError, NotPRepresentableError

P = GaussianParams


def _gaussian_density(cov, x):
    inv = np.linalg.inv(cov)
    return math.exp(-0.5 * x @ inv @ x) / ((2 * math.pi) ** 2 * math.sqrt(np.linalg.det(cov)))


def test_p_function_thermal():
    # product of thermal P-functions exp(-|a|^2/n)/(pi n)
    n = 0.7
    for a, b in [(0, 0), (0.3, -0.2j), (1 + 1j, 0.5)]:
        ref = math.exp(-(abs(a) ** 2 + abs(b) ** 2) / n) / (math.pi * n) ** 2
        assert werner.p_function_value(P(n, 0), a, b) == pytest.approx(ref, rel=1e-12)


def test_p_function_is_density_of_p_covariance():
    params = P(1, 0.3 + 0.4j)
    cov = werner.p_covariance(params)
    for a, b in [(0, 0), (0.4, 0.1 - 0.3j), (-1j, 0.8)]:
        x = np.array([a.real if isinstance(a, complex) else a, complex(a).imag, complex(b).real, complex(b).imag])
        assert werner.p_function_value(params, a, b) == pytest.approx(_gaussian_density(cov, x), rel=1e-10)
    assert werner.p_function_value(P(1, 0.5), 0, 0) == pytest.approx(1 / (math.pi**2 * 0.75))


def test_p_covariance_moments():
    cov = werner.p_covariance(P(1, 0.3 + 0.4j))
    assert cov[0, 0] + cov[1, 1] == pytest.approx(1.0)
    # E[alpha beta] = -m, matching <ab> = -m
    e_ab = (cov[0, 2] - cov[1, 3]) + 1j * (cov[0, 3] + cov[1, 2])
    assert e_ab == pytest.approx(-(0.3 + 0.4j))


def test_p_function_boundary_rejected():
    with pytest.raises(NotPRepresentableError):
        werner.p_function_value(P(1, 1), 0, 0)
    with pytest.raises(NotPRepresentableError):
        werner.p_function_value(P(0.5, 0.8), 0, 0)


def test_vacuum_single_component():
    comps = werner.decompose(P(0, 0), 7)
    assert len(comps) == 1
    assert comps[0] == werner.WernerComponent(1.0, 0j, 0j)


def test_thermal_components_symmetric():
    comps = werner.decompose(P(1, 0), 7)
    assert len(comps) == 7**4
    table = {}
    for c in comps:
        key = tuple(np.round([c.alpha.real, c.alpha.imag, c.beta.real, c.beta.imag], 10))
        table[key] = c.weight
    for key, w in table.items():
        for axis in range(4):
            flipped = list(key)
            flipped[axis] = -flipped[axis] + 0.0
            assert table[tuple(flipped)] == pytest.approx(w, rel=1e-10)


@pytest.mark.parametrize("params", [P(1, 0.5), P(0.8, 0.3j), P(0.6, 0.6)])
def test_weights_positive_normalised(params):
    comps = werner.decompose(params, 5)
    w = np.array([c.weight for c in comps])
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(1.0, abs=1e-10)


def test_boundary_uses_single_nodes_on_degenerate_axes():
    comps = werner.decompose(P(0.6, 0.6), 5)
    assert len(comps) == 5**2
    # on n = |m| the support is alpha = -beta*
    for c in comps:
        assert c.alpha == pytest.approx(-np.conj(c.beta), abs=1e-12)


def test_near_boundary_rejected():
    with pytest.raises(DomainError):
        werner.decompose(P(0.6, 0.6 - 1e-7), 5)


def test_nodes_validation():
    for bad in (2, 3.5, True):
        with pytest.raises(InvalidArgumentError):
            werner.decompose(P(1, 0.5), bad)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2), st.floats(0.01, 1), st.floats(0, 2 * math.pi))
def test_entangled_always_rejected(n, excess, phi):
    params = P.from_polar(n, n + excess, phi)
    with pytest.raises(NotPRepresentableError) as exc:
        werner.decompose(params, 5)
    assert exc.value.inequality == "n >= |m|"


def test_coherent_vectors():
    N = 30
    v = werner.coherent_vector(0.8 - 0.3j, N)
    j = np.arange(N)
    ref = np.exp(-abs(0.8 - 0.3j) ** 2 / 2) * (0.8 - 0.3j) ** j / np.sqrt([float(math.factorial(k)) for k in j])
    np.testing.assert_allclose(v, ref, atol=1e-15)
    np.testing.assert_array_equal(werner.coherent_vector(0, 5), [1, 0, 0, 0, 0])


def test_reconstruct_coherent_product_purity():
    rho = werner.reconstruct_fock([werner.WernerComponent(1.0, 1.0, 0)], 35)
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_reconstruct_rejects_bad_weights():
    with pytest.raises(InvalidArgumentError):
        werner.reconstruct_fock([], 5)
    with pytest.raises(InvalidArgumentError):
        werner.reconstruct_fock([werner.WernerComponent(-0.1, 0, 0)], 5)


def test_trace_distance_cutoff_mismatch():
    a = fock.build_gaussian_fock(P(0, 0), cutoff=4)
    b = fock.build_gaussian_fock(P(0, 0), cutoff=5)
    with pytest.raises(InvalidArgumentError):
        werner.trace_distance(a, b)


@pytest.mark.slow
def test_convergence_monotone():
    params = P(0.8, 0.3)
    ref = fock.build_gaussian_fock(params, cutoff=35, strict=False)
    dists = [
        werner.trace_distance(werner.reconstruct_fock(werner.decompose(params, M), 35), ref)
        for M in (5, 7, 9, 11)
    ]
    assert all(b <= a + 1e-6 for a, b in zip(dists, dists[1:])), dists
    assert dists[-1] <= 1e-3


def test_reconstruction_moments():
    params = P(1, 0.5j)
    report = werner.decomposition_report(params, 9, 35)
    rec = werner.reconstruct_fock(report.components, 35)
    n_a, n_b, m_out = fock.moments(rec)
    assert n_a == pytest.approx(1, abs=0.05)
    assert n_b == pytest.approx(1, abs=0.05)
    assert abs(m_out - 0.5j) < 0.05
    assert report.trace_distance <= 1e-3
    np.testing.assert_allclose(sorted(report.p_eigenvalues), [2 / 3, 2 / 3, 2, 2])


def test_json_round_trip():
    comps = werner.decompose(P(1, 0.5 - 0.2j), 3)
    text = werner.components_to_json(comps)
    rows = json.loads(text)
    assert set(rows[0]) == {"weight", "alpha_re", "alpha_im", "beta_re", "beta_im"}
    assert werner.components_from_json(text) == comps
