import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onticsim import (
    THETA0,
    OutOfConeError,
    QubitOnticState,
    born_probability_qubit,
    conditional_probability,
    conditional_probability_unchecked,
    exact_event_probability,
    positivity_minimum_n0,
    random_bloch,
    sample_ontic,
    sweep_positivity,
    to_spherical,
)
from onticsim.geometry import from_spherical, SphericalAngles


def test_theta0_value():
    assert THETA0 == pytest.approx(0.9272952180016123, abs=1e-15)
    # the defining algebra is exact in floats
    assert math.cos(THETA0) == 0.6
    assert math.sin(THETA0) == 0.8


def test_ontic_state_validation():
    QubitOnticState(0.0, 0)
    QubitOnticState(math.pi, 1)
    with pytest.raises(ValueError):
        QubitOnticState(0.0, 2)
    with pytest.raises(ValueError):
        QubitOnticState(2.0 * math.pi, 0)
    with pytest.raises(ValueError):
        QubitOnticState(math.pi + 0.1, 1)
    with pytest.raises(ValueError):
        QubitOnticState(-0.1, 1)


def test_sample_ontic_pole_always_zenith_branch(rng):
    for _ in range(100):
        s = sample_ontic((0.0, 0.0, 1.0), rng)
        assert s == QubitOnticState(0.0, 1)


def test_sample_ontic_branch_frequency():
    # theta = 30 degrees: P(n=0) = sin(theta) = 1/2
    rng = np.random.default_rng(3)
    v = from_spherical(SphericalAngles(math.pi / 6, 1.0))
    draws = [sample_ontic(v, rng) for _ in range(10**6)]
    freq = sum(1 for s in draws if s.n == 0) / len(draws)
    assert abs(freq - 0.5) < 0.0025
    assert all(s.x == 1.0 for s in draws if s.n == 0)
    theta = to_spherical(v).theta
    assert all(s.x == theta for s in draws if s.n == 1)


def test_sample_ontic_rejects_out_of_cone(rng):
    v = from_spherical(SphericalAngles(THETA0 + 0.01, 0.3))
    with pytest.raises(OutOfConeError):
        sample_ontic(v, rng)


def test_conditional_probability_aligned_cases():
    assert conditional_probability((1.0, 0.0, 0.0), QubitOnticState(0.0, 0)) == 1.0
    assert conditional_probability((0.0, 0.0, 1.0), QubitOnticState(0.0, 1)) == 1.0


def test_conditional_probability_gates_cone_boundary():
    z = (0.0, 0.0, 1.0)
    with pytest.raises(OutOfConeError):
        conditional_probability(z, QubitOnticState(THETA0, 1))
    # the raw evaluator exposes the boundary zero instead
    assert abs(conditional_probability_unchecked(z, QubitOnticState(THETA0, 1))) < 1e-12
    assert conditional_probability_unchecked(z, QubitOnticState(THETA0 + 0.05, 1)) < 0.0


def test_unchecked_denominator_guard():
    with pytest.raises(ValueError):
        conditional_probability_unchecked((0.0, 0.0, 1.0), QubitOnticState(math.pi / 2, 1))


def test_azimuth_branch_ignores_cone():
    # n = 0 is defined for every azimuth; no gate applies
    p = conditional_probability((0.0, 1.0, 0.0), QubitOnticState(3.0, 0))
    assert 0.0 <= p <= 1.0


@settings(max_examples=300, deadline=None)
@given(
    x=st.floats(min_value=0.0, max_value=THETA0 - 1e-9),
    n=st.integers(min_value=0, max_value=1),
    wz=st.floats(min_value=-1.0, max_value=1.0),
    wphi=st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True),
)
def test_complement_rule(x, n, wz, wphi):
    s = math.sqrt(max(0.0, 1.0 - wz * wz))
    w = np.array([s * math.cos(wphi), s * math.sin(wphi), wz])
    w /= np.linalg.norm(w)
    state = QubitOnticState(x, n)
    total = conditional_probability(w, state) + conditional_probability(-w, state)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_exact_event_probability_examples(rng):
    z = np.array([0.0, 0.0, 1.0])
    assert exact_event_probability(z, z) == pytest.approx(1.0, abs=1e-15)
    v = from_spherical(SphericalAngles(math.pi / 4, math.radians(10.0)))
    for _ in range(200):
        w = random_bloch(rng)
        assert exact_event_probability(v, w) == pytest.approx(
            born_probability_qubit(v, w), abs=1e-12
        )


def test_exact_event_probability_rejects_boundary():
    with pytest.raises(OutOfConeError):
        exact_event_probability(np.array([0.8, 0.0, 0.6]), np.array([0.0, 0.0, 1.0]))


@settings(max_examples=300, deadline=None)
@given(
    vtheta=st.floats(min_value=0.0, max_value=THETA0, exclude_max=True),
    vphi=st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True),
    wtheta=st.floats(min_value=0.0, max_value=math.pi),
    wphi=st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True),
)
def test_born_identity_property(vtheta, vphi, wtheta, wphi):
    v = from_spherical(SphericalAngles(vtheta, vphi))
    w = from_spherical(SphericalAngles(wtheta, wphi))
    assert exact_event_probability(v, w) == pytest.approx(
        born_probability_qubit(v, w), abs=1e-12
    )


def test_positivity_minimum_values():
    assert positivity_minimum_n0(0.0) == 0.0
    assert positivity_minimum_n0(1.0) == 1.0
    assert positivity_minimum_n0(0.6) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(ValueError):
        positivity_minimum_n0(1.5)


def test_positivity_minimum_matches_grid(rng):
    # scan the azimuth branch at fixed w_z >= 0 and compare with the
    # closed form; southern events go through the complement rule, whose
    # folded minimum is 0 rather than this expression
    for _ in range(20):
        wz = rng.uniform(0.0, 1.0)
        s = math.sqrt(1.0 - wz * wz)
        w = np.array([s, 0.0, wz])
        values = [
            conditional_probability_unchecked(w, QubitOnticState(x, 0))
            for x in np.linspace(0.0, 2.0 * math.pi, 2001)[:-1]
        ]
        assert min(values) == pytest.approx(positivity_minimum_n0(wz), abs=1e-6)


def test_sweep_bounds_small_grid():
    rep = sweep_positivity(0.01, 500)
    assert rep.min_value >= -1e-12
    assert rep.max_value <= 1.0 + 1e-12
    assert rep.n_evaluations > 0


def test_sweep_detects_negative_beyond_cone():
    rep = sweep_positivity(
        1e-3,
        1,
        events=[(0.0, 0.0, 1.0)],
        x_range_n1=(THETA0 + 1e-6, THETA0 + 0.1),
    )
    assert rep.min_value < 0.0
    assert rep.min_n == 1


def test_sweep_azimuth_branch_attains_one():
    # alignment (cos x, sin x) with (w_x, w_y) at x = 0 gives exactly 1
    rep = sweep_positivity(0.01, 1, events=[(1.0, 0.0, 0.0)])
    assert abs(rep.max_value - 1.0) <= 1e-9
    assert rep.max_n == 0


def test_sweep_rejects_bad_step():
    with pytest.raises(ValueError):
        sweep_positivity(0.0, 10)
