"""Rotation dynamics on the sphere and a non-Markovianity witness.

A rigid rotation of the Bloch sphere about the y-axis induces, in
spherical coordinates, the flow

    d(phi)/dt = -cot(theta) * sin(phi)
    d(theta)/dt = cos(phi)

Two preparations that share a zenith but differ in azimuth are
indistinguishable on the zenith branch of the compressed qubit model
(their n = 1 ontic states coincide), yet their zeniths evolve at
different rates. The ontic trajectory therefore cannot be generated by
the ontic state alone: the dynamics remembers the preparation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cone import THETA0
from .geometry import SphericalAngles, as_bloch, from_spherical, to_spherical

__all__ = [
    "rotation_about_y",
    "evolve_bloch",
    "spherical_rates",
    "WitnessReport",
    "non_markov_witness",
]

_POLE_RATE_EPS = 1e-12


def rotation_about_y(t: float) -> np.ndarray:
    """Rotation matrix by angle t about the y-axis."""
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def evolve_bloch(v, t: float) -> np.ndarray:
    """Rotate the state v by angle t about the y-axis."""
    return rotation_about_y(t) @ as_bloch(v)


def spherical_rates(angles: SphericalAngles) -> tuple[float, float]:
    """Instantaneous (d(phi)/dt, d(theta)/dt) under the y-axis rotation."""
    theta, phi = angles
    sin_theta = math.sin(theta)
    if sin_theta <= _POLE_RATE_EPS:
        raise ValueError(f"azimuth rate undefined at the pole, sin(theta) = {sin_theta!r}")
    return (-math.cos(theta) / sin_theta * math.sin(phi), math.cos(phi))


@dataclass(frozen=True)
class WitnessReport:
    """Two same-zenith preparations with distinct zenith velocities."""

    theta: float
    phi_a: float
    phi_b: float
    v_a: tuple[float, float, float]
    v_b: tuple[float, float, float]
    ontic_x: float
    rate_a: float
    rate_b: float
    discrepancy: float


def non_markov_witness(theta: float, phi_a: float, phi_b: float) -> WitnessReport:
    """Exhibit the memory effect at a shared zenith.

    Preparations (theta, phi_a) and (theta, phi_b) produce the identical
    zenith-branch ontic state, yet d(theta)/dt differs between them, so
    no update rule depending on the ontic state alone can track both.
    Requires a zenith strictly inside the validity cone and azimuths
    with distinct cosines.
    """
    if not 0.0 < theta < THETA0:
        raise ValueError(f"zenith must lie strictly inside (0, {THETA0!r}), got {theta!r}")
    if (phi_a - phi_b) % (2.0 * math.pi) == 0.0:
        raise ValueError("azimuths must differ")
    if math.cos(phi_a) == math.cos(phi_b):
        raise ValueError("azimuths with equal cosines give equal zenith rates")
    v_a = from_spherical(SphericalAngles(theta, phi_a))
    v_b = from_spherical(SphericalAngles(theta, phi_b))
    rate_a = spherical_rates(to_spherical(v_a))[1]
    rate_b = spherical_rates(to_spherical(v_b))[1]
    return WitnessReport(
        theta=theta,
        phi_a=phi_a,
        phi_b=phi_b,
        v_a=tuple(float(c) for c in v_a),
        v_b=tuple(float(c) for c in v_b),
        ontic_x=theta,
        rate_a=rate_a,
        rate_b=rate_b,
        discrepancy=abs(rate_a - rate_b),
    )
