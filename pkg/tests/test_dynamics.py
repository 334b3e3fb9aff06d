import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onticsim import (
    THETA0,
    QubitOnticState,
    evolve_bloch,
    non_markov_witness,
    random_bloch,
    rotation_about_y,
    spherical_rates,
    to_spherical,
)
from onticsim.geometry import SphericalAngles, from_spherical


def test_rotation_identity_and_quarter_turn():
    np.testing.assert_allclose(rotation_about_y(0.0), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(
        evolve_bloch((0.0, 0.0, 1.0), math.pi / 2.0), [1.0, 0.0, 0.0], atol=1e-15
    )


def test_rotation_inverse(rng):
    for _ in range(200):
        v = random_bloch(rng)
        t = rng.uniform(-10.0, 10.0)
        np.testing.assert_allclose(evolve_bloch(evolve_bloch(v, t), -t), v, atol=1e-12)


def test_norm_preservation(rng):
    for _ in range(10**4):
        v = random_bloch(rng)
        t = rng.uniform(-10.0, 10.0)
        assert abs(np.linalg.norm(evolve_bloch(v, t)) - 1.0) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    s=st.floats(min_value=-5.0, max_value=5.0),
    t=st.floats(min_value=-5.0, max_value=5.0),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_flow_composition(s, t, seed):
    v = random_bloch(np.random.default_rng(seed))
    np.testing.assert_allclose(
        evolve_bloch(evolve_bloch(v, s), t), evolve_bloch(v, s + t), atol=1e-12
    )


def test_spherical_rates_examples():
    dphi, dtheta = spherical_rates(SphericalAngles(math.pi / 2.0, 0.0))
    assert dphi == pytest.approx(0.0, abs=1e-15)
    assert dtheta == 1.0
    dphi, dtheta = spherical_rates(SphericalAngles(0.5, math.pi / 2.0))
    assert dphi == pytest.approx(-1.0 / math.tan(0.5), abs=1e-12)
    assert dtheta == pytest.approx(0.0, abs=1e-15)


def test_spherical_rates_pole_error():
    with pytest.raises(ValueError):
        spherical_rates(SphericalAngles(0.0, 1.0))
    with pytest.raises(ValueError):
        spherical_rates(SphericalAngles(math.pi, 0.0))


def test_rates_match_finite_differences(rng):
    # away from the poles; the truncation term grows like cot(theta)^2
    dt = 1e-4
    for _ in range(300):
        theta = rng.uniform(0.3, math.pi - 0.3)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        v = from_spherical(SphericalAngles(theta, phi))
        _, dtheta = spherical_rates(SphericalAngles(theta, phi))
        fwd = to_spherical(evolve_bloch(v, dt)).theta
        bwd = to_spherical(evolve_bloch(v, -dt)).theta
        assert (fwd - bwd) / (2.0 * dt) == pytest.approx(dtheta, abs=1e-7)


def test_azimuth_rate_matches_finite_differences(rng):
    dt = 1e-6
    for _ in range(200):
        theta = rng.uniform(0.3, math.pi - 0.3)
        phi = rng.uniform(0.5, 2.0 * math.pi - 0.5)
        v = from_spherical(SphericalAngles(theta, phi))
        dphi, _ = spherical_rates(SphericalAngles(theta, phi))
        fwd = to_spherical(evolve_bloch(v, dt)).phi
        bwd = to_spherical(evolve_bloch(v, -dt)).phi
        assert (fwd - bwd) / (2.0 * dt) == pytest.approx(dphi, abs=1e-5)


def test_witness_reference_configuration():
    report = non_markov_witness(0.5, 0.0, math.pi / 2.0)
    assert report.rate_a == pytest.approx(1.0, abs=1e-12)
    assert report.rate_b == pytest.approx(0.0, abs=1e-12)
    assert report.discrepancy == pytest.approx(1.0, abs=1e-12)
    assert report.ontic_x == 0.5


def test_witness_shares_zenith_branch_state():
    report = non_markov_witness(0.5, 0.3, 2.0)
    state_a = QubitOnticState(to_spherical(np.array(report.v_a)).theta, 1)
    state_b = QubitOnticState(to_spherical(np.array(report.v_b)).theta, 1)
    assert state_a.n == state_b.n == 1
    # identical up to last-place rounding of the zenith reconstruction
    assert state_a.x == pytest.approx(state_b.x, abs=1e-15)
    assert state_a.x == pytest.approx(report.ontic_x, abs=1e-15)


def test_witness_preconditions():
    with pytest.raises(ValueError):
        non_markov_witness(0.5, 1.0, -1.0)  # equal cosines
    with pytest.raises(ValueError):
        non_markov_witness(0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        non_markov_witness(THETA0 + 0.01, 0.0, 1.0)
    with pytest.raises(ValueError):
        non_markov_witness(0.0, 0.0, 1.0)


def test_witness_matches_finite_differences():
    report = non_markov_witness(0.4, 0.7, 2.5)
    dt = 1e-6
    for v, rate in ((report.v_a, report.rate_a), (report.v_b, report.rate_b)):
        arr = np.array(v)
        fwd = to_spherical(evolve_bloch(arr, dt)).theta
        bwd = to_spherical(evolve_bloch(arr, -dt)).theta
        assert (fwd - bwd) / (2.0 * dt) == pytest.approx(rate, abs=1e-5)
