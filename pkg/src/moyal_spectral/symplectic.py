"""Rotations and translations of states, orbit bounds and the DFR quantum length."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AccuracyWarning,
    InvalidParameterError,
    PreconditionFailedError,
    SingularParameterError,
    TruncationOverflowError,
)
from .fock import DEFAULT_PAD, make_number, momentum, position
from .states import TAIL_ERROR, TAIL_WARN, MixedState, evaluate, overlap, translate_state

J_R = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class EuclideanGenerator:
    """x -> S x + kappa with S traceless (an sp(2, R) element)."""

    S: np.ndarray
    kappa: np.ndarray = None

    def __post_init__(self):
        s = np.array(self.S, dtype=float)
        if s.shape != (2, 2) or not np.all(np.isfinite(s)):
            raise InvalidParameterError("S must be a finite real 2x2 matrix")
        if abs(np.trace(s)) > 1e-12:
            raise InvalidParameterError(f"S must be traceless, trace = {np.trace(s):.3g}")
        k = np.zeros(2) if self.kappa is None else np.array(self.kappa, dtype=float).ravel()
        if k.shape != (2,):
            raise InvalidParameterError("kappa must be a real 2-vector")
        s.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "kappa", k)

    @property
    def is_rotation(self):
        return bool(np.allclose(self.S, -self.S.T, rtol=0, atol=1e-12))


def rotation_matrix(t):
    """R(t) = [[cos t, sin t], [-sin t, cos t]]; on z = x1 + i x2 it is z -> e^{-it} z."""
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [-s, c]])


def as_vector(kappa):
    if np.iscomplexobj(kappa) or np.isscalar(kappa):
        k = complex(kappa)
        return np.array([k.real, k.imag])
    return np.asarray(kappa, dtype=float).ravel()


def rotate_state(phi, t):
    """psi -> exp(-i t n / theta) psi on every component.

    The number operator is theta diag(m), so the phase on level m is
    e^{-i t m}; a coherent vector with label kappa goes to label e^{-it} kappa.
    """
    if t == 0:
        return phi
    ph = np.exp(-1j * t * np.arange(phi.dim))
    return MixedState(phi.weights, tuple(ph * v for v in phi.vectors), phi.theta)


def is_rotation_invariant(phi, samples=7, tol=1e-8):
    ts = np.linspace(0, 2 * np.pi, samples + 1)[1:]
    return all(overlap(rotate_state(phi, t), phi) >= 1 - tol for t in ts)


def chord_distance(phi_invariant, S, kappa):
    """|S kappa - kappa| for a rotation S acting on a rotation-invariant state.

    With phi = ground this is the distance between phi_kappa and its image
    under S; coherent labels enter as kappa_plane = sqrt2 * kappa.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2, 2) or not np.allclose(S.T @ S, np.eye(2), atol=1e-12) or np.linalg.det(S) < 0:
        raise InvalidParameterError("S must be a 2x2 rotation matrix")
    if not is_rotation_invariant(phi_invariant):
        raise PreconditionFailedError("base state is not rotation invariant")
    k = as_vector(kappa)
    return float(np.linalg.norm(S @ k - k))


def arc_radius(phi_base, kappa, generator=None):
    """sqrt(phi_kappa(x1^2 + x2^2)) = sqrt(2 phi_kappa(n + theta/2)).

    phi_kappa is phi_base translated by the plane vector kappa.  For a
    rotation-invariant base this equals sqrt(|kappa|^2 + theta + 2 phi_base(n)).
    """
    if generator is not None and not generator.is_rotation:
        raise NotImplementedError("only rotation orbits are supported")
    k = as_vector(kappa)
    moved = translate_state(phi_base, complex(k[0], k[1]))
    n = make_number(phi_base.dim, phi_base.theta)
    val = 2 * (evaluate(moved, n).real + phi_base.theta / 2)
    return math.sqrt(max(val, 0.0))


def arc_length_bound(phi_base, kappa, tau, generator=None):
    """Length of the rotation orbit of phi_kappa over [0, tau]."""
    if tau == 0:
        return 0.0
    return abs(tau) * arc_radius(phi_base, kappa, generator)


def _check_edge(phi, pad):
    tail = max(float(np.sum(np.abs(v[-pad:]) ** 2)) for v in phi.vectors)
    if tail >= TAIL_ERROR:
        raise TruncationOverflowError(f"state has weight {tail:.3g} on the last {pad} levels")
    if tail >= TAIL_WARN:
        warnings.warn(f"state weight {tail:.3g} near the truncation edge", AccuracyWarning, stacklevel=3)


def quantum_length_squared(phi, phit, pad=DEFAULT_PAD):
    """(phi x phi~)(sum_mu (q_mu x 1 - 1 x q_mu)^2), from first and second moments."""
    if phi.dim != phit.dim or phi.theta != phit.theta:
        raise InvalidParameterError("states must share dim and theta")
    _check_edge(phi, pad)
    _check_edge(phit, pad)
    total = 0.0
    for x in (position(phi.dim, phi.theta), momentum(phi.dim, phi.theta)):
        x2 = x @ x
        total += (evaluate(phi, x2) + evaluate(phit, x2)).real
        total -= 2 * evaluate(phi, x).real * evaluate(phit, x).real
    return float(total)


def lambda_from_state(phi):
    return quantum_length_squared(phi, phi) ** -0.5


def homothety_distance(d, omega):
    if omega == 1:
        raise SingularParameterError("omega = 1 makes the rescaled Dirac operator vanish")
    return d / abs(1 - omega)
