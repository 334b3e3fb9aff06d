"""Bloch-sphere and amplitude-vector primitives.

Unit 3-vectors double as qubit pure states and projective measurement
events; N-level pure states are unit-norm complex amplitude vectors.
These functions are the quantum-mechanical reference layer: the Born
probabilities computed here serve as the independent oracle that the
hidden-variable models elsewhere in the package are checked against.

All randomness flows through an explicit ``numpy.random.Generator`` so
seeded runs reproduce bit for bit.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "SphericalAngles",
    "as_bloch",
    "as_amplitudes",
    "to_spherical",
    "from_spherical",
    "born_probability_qubit",
    "born_probability_ndim",
    "random_bloch",
    "random_amplitudes",
    "fibonacci_sphere",
]

UNIT_NORM_ATOL = 1e-12

# Below this value of sin(theta) the azimuth is ill-defined; phi is pinned
# to 0 so conversions stay total.
POLE_SIN_EPS = 1e-14

TWO_PI = 2.0 * math.pi


class SphericalAngles(NamedTuple):
    """Zenith/azimuth pair: theta in [0, pi], phi in [0, 2*pi)."""

    theta: float
    phi: float


def as_bloch(v) -> np.ndarray:
    """Validate and return a unit 3-vector as a float64 array."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"Bloch vector must have shape (3,), got {arr.shape}")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_NORM_ATOL:
        raise ValueError(f"Bloch vector must be unit norm, got |v| = {norm!r}")
    return arr


def as_amplitudes(psi) -> np.ndarray:
    """Validate and return a unit-norm complex amplitude vector (N >= 2)."""
    arr = np.asarray(psi, dtype=complex)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("amplitude vector must be one-dimensional with N >= 2")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_NORM_ATOL:
        raise ValueError(f"amplitude vector must be unit norm, got |psi| = {norm!r}")
    return arr


def to_spherical(v) -> SphericalAngles:
    """Zenith and azimuth of a unit vector.

    At the poles (sin(theta) below ``POLE_SIN_EPS``) the azimuth is set
    to 0 by convention.
    """
    arr = as_bloch(v)
    # atan2(hypot, vz) keeps full precision near the poles, where
    # acos(vz) would lose the zenith to rounding of vz toward +-1.
    rho = math.hypot(float(arr[0]), float(arr[1]))
    theta = math.atan2(rho, float(arr[2]))
    if rho < POLE_SIN_EPS:
        return SphericalAngles(theta, 0.0)
    phi = math.atan2(float(arr[1]), float(arr[0]))
    if phi < 0.0:
        phi += TWO_PI
    if phi >= TWO_PI:  # tiny negative azimuths round up to 2*pi
        phi = 0.0
    return SphericalAngles(theta, phi)


def from_spherical(angles: SphericalAngles) -> np.ndarray:
    """Unit vector with the given zenith and azimuth."""
    theta, phi = angles
    sin_theta = math.sin(theta)
    return np.array(
        [sin_theta * math.cos(phi), sin_theta * math.sin(phi), math.cos(theta)]
    )


def born_probability_qubit(v, w) -> float:
    """Quantum probability (1 + v.w) / 2 of the event w given the state v."""
    dot = float(np.dot(as_bloch(v), as_bloch(w)))
    return min(1.0, max(0.0, 0.5 * (1.0 + dot)))


def born_probability_ndim(psi, phi) -> float:
    """Quantum probability |<phi|psi>|^2 for N-level states."""
    psi_arr = as_amplitudes(psi)
    phi_arr = as_amplitudes(phi)
    if psi_arr.shape != phi_arr.shape:
        raise ValueError(
            f"dimension mismatch: {psi_arr.shape[0]} vs {phi_arr.shape[0]}"
        )
    overlap = complex(np.vdot(phi_arr, psi_arr))
    return overlap.real**2 + overlap.imag**2


def random_bloch(rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform unit vector: v_z uniform in [-1, 1], azimuth uniform.

    Exactly two uniform draws are consumed per call, in this order, so
    seeded streams are stable across releases.
    """
    vz = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, TWO_PI)
    s = math.sqrt(max(0.0, 1.0 - vz * vz))
    return np.array([s * math.cos(phi), s * math.sin(phi), vz])


def random_amplitudes(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform N-level pure state via normalized complex Gaussians.

    Draws the real block then the imaginary block, which fixes the
    stream layout for reproducibility.
    """
    if dim < 2:
        raise ValueError(f"need at least two amplitudes, got dim = {dim}")
    while True:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        norm = float(np.linalg.norm(z))
        if norm > 1e-12:  # astronomically unlikely to loop
            return z / norm


def fibonacci_sphere(count: int) -> np.ndarray:
    """Deterministic, roughly equidistributed unit vectors (golden-angle spiral).

    Used as the seed-free event grid for positivity sweeps.
    """
    if count < 1:
        raise ValueError("need at least one point")
    i = np.arange(count, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / count
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack((s * np.cos(phi), s * np.sin(phi), z))
