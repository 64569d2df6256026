"""States as finite convex combinations of vector states."""

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .elements import MoyalElement, check_kappa, displacement_unitary
from .errors import (
    AccuracyWarning,
    InvalidInputError,
    InvalidPairError,
    InvalidParameterError,
    TruncationOverflowError,
)
from .fock import DEFAULT_PAD, FockOperator

TAIL_ERROR = 1e-4
TAIL_WARN = 1e-10


@dataclass(frozen=True, eq=False)
class MixedState:
    """phi(a) = sum_i w_i <psi_i, a psi_i>."""

    weights: tuple
    vectors: tuple
    theta: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        vecs = [np.array(v, dtype=complex).ravel() for v in self.vectors]
        if len(w) == 0 or len(w) != len(vecs):
            raise InvalidInputError("need one weight per component vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)) or abs(w.sum() - 1) > 1e-12:
            raise InvalidInputError(f"weights must be non-negative and sum to 1, got {w}")
        dims = {len(v) for v in vecs}
        if len(dims) != 1 or dims.pop() < 1:
            raise InvalidInputError("component vectors must share a positive length")
        for v in vecs:
            if not np.all(np.isfinite(v)) or abs(np.linalg.norm(v) - 1) > 1e-12:
                raise InvalidInputError("component vectors must have unit norm")
            v.setflags(write=False)
        if not (np.isfinite(self.theta) and self.theta > 0):
            raise InvalidParameterError("theta must be positive")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "vectors", tuple(vecs))
        object.__setattr__(self, "theta", float(self.theta))

    @classmethod
    def pure(cls, vector, theta=1.0):
        v = np.asarray(vector, dtype=complex)
        return cls((1.0,), (v / np.linalg.norm(v),), theta)

    @classmethod
    def from_vectors(cls, vectors, weights=None, theta=1.0):
        """Build a state, normalizing both the vectors and the weights."""
        vecs = [np.asarray(v, dtype=complex) for v in vectors]
        vecs = [v / np.linalg.norm(v) for v in vecs]
        if weights is None:
            weights = np.ones(len(vecs))
        w = np.asarray(weights, dtype=float)
        return cls(tuple(w / w.sum()), tuple(vecs), theta)

    @property
    def dim(self):
        return len(self.vectors[0])

    @property
    def components(self):
        return list(zip(self.weights, self.vectors))

    def density_matrix(self):
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        for w, v in self.components:
            rho += w * np.outer(v, v.conj())
        return rho

    def to_dict(self):
        return {
            "theta": self.theta,
            "components": [
                {"weight": w, "re": v.real.tolist(), "im": v.imag.tolist()}
                for w, v in self.components
            ],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, data):
        try:
            comps = data["components"]
            weights = [float(c["weight"]) for c in comps]
            vectors = [np.asarray(c["re"], float) + 1j * np.asarray(c.get("im", np.zeros(len(c["re"]))), float) for c in comps]
            theta = float(data.get("theta", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed state description: {exc}") from exc
        return cls(tuple(weights), tuple(vectors), theta)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _check_tail(tail, what):
    if tail >= TAIL_ERROR:
        raise TruncationOverflowError(f"{what}: dropped tail mass {tail:.3g} >= {TAIL_ERROR:g}")
    if tail >= TAIL_WARN:
        warnings.warn(f"{what}: dropped tail mass {tail:.3g}", AccuracyWarning, stacklevel=3)


def coherent_tail_mass(kappa, dim, theta=1.0):
    """Weight of the exact coherent vector on levels >= dim (a Poisson tail)."""
    mu = abs(kappa) ** 2 / theta
    if mu == 0:
        return 0.0
    return float(gammainc(dim, mu))


def coherent_vector(kappa, dim, theta=1.0):
    """Unnormalized closed-form coefficients c_m = e^{-|k|^2/2t} k^m / sqrt(m! t^m)."""
    m = np.arange(dim)
    r = abs(kappa)
    if r == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1
        return out
    logmag = -(r**2) / (2 * theta) + m * np.log(r) - 0.5 * (gammaln(m + 1) + m * np.log(theta))
    return np.exp(logmag) * np.exp(1j * m * np.angle(kappa))


def coherent_state(kappa, dim, theta=1.0):
    """Eigenvector of the annihilation operator with eigenvalue kappa."""
    kappa = complex(kappa)
    check_kappa(kappa, dim, theta)
    _check_tail(coherent_tail_mass(kappa, dim, theta), f"coherent state kappa={kappa}")
    return MixedState.pure(coherent_vector(kappa, dim, theta), theta)


def eigenstate(n, dim, theta=1.0, pad=DEFAULT_PAD):
    if int(n) != n or not 0 <= n < dim - pad:
        raise InvalidParameterError(f"level {n} out of range for dim {dim} with pad {pad}")
    v = np.zeros(dim, dtype=complex)
    v[int(n)] = 1
    return MixedState.pure(v, theta)


def ground_state(dim, theta=1.0):
    v = np.zeros(dim, dtype=complex)
    v[0] = 1
    return MixedState.pure(v, theta)


def mixture(states, weights):
    """Convex combination of states that share dim and theta."""
    w = np.asarray(weights, dtype=float)
    if len(states) != len(w) or np.any(w < 0):
        raise InvalidInputError("need one non-negative weight per state")
    w = w / w.sum()
    dims = {(s.dim, s.theta) for s in states}
    if len(dims) != 1:
        raise InvalidPairError("states must share dim and theta")
    ws, vs = [], []
    for wi, s in zip(w, states):
        for wj, v in s.components:
            if wi * wj > 0:
                ws.append(wi * wj)
                vs.append(v)
    ws = np.asarray(ws)
    return MixedState(tuple(ws / ws.sum()), tuple(vs), states[0].theta)


def extended_dim(dim):
    return dim + max(16, dim // 2)


def translate_vector(psi, kappa, theta=1.0):
    """u_kappa^* psi, computed with headroom and cut back to len(psi).

    Returns the truncated (renormalized) vector and the dropped tail mass.
    """
    k = len(psi)
    big = extended_dim(k)
    ext = np.zeros(big, dtype=complex)
    ext[:k] = psi
    u = displacement_unitary(kappa, big, theta).entries
    out = u.conj().T @ ext
    tail = float(np.sum(np.abs(out[k:]) ** 2))
    head = out[:k]
    return head / np.linalg.norm(head), tail


def translate_state(phi, kappa):
    """The translated state phi o alpha_kappa."""
    kappa = complex(kappa)
    if kappa == 0:
        return phi
    check_kappa(kappa, phi.dim, phi.theta)
    vecs = []
    worst = 0.0
    for _, v in phi.components:
        nv, tail = translate_vector(v, kappa, phi.theta)
        worst = max(worst, tail)
        vecs.append(nv)
    _check_tail(worst, f"translation by kappa={kappa}")
    return MixedState(phi.weights, tuple(vecs), phi.theta)


def _matrix_of(f, phi):
    if isinstance(f, MoyalElement):
        op, lam = f.op, f.unit_part
    elif isinstance(f, FockOperator):
        op, lam = f, 0.0
    else:
        raise InvalidPairError("expected a MoyalElement or FockOperator")
    if op.dim != phi.dim or op.theta != phi.theta:
        raise InvalidPairError(
            f"state (dim={phi.dim}, theta={phi.theta}) vs element (dim={op.dim}, theta={op.theta})"
        )
    return op.entries, lam


def evaluate(phi, f):
    a, lam = _matrix_of(f, phi)
    val = 0j
    for w, v in phi.components:
        val += w * np.vdot(v, a @ v)
    return complex(val + lam)


def overlap(phi, psi):
    """Smallest |<psi_i, psi'_i>| over matching components (phase-blind)."""
    if phi.dim != psi.dim or len(phi.vectors) != len(psi.vectors):
        raise InvalidPairError("states have different shapes")
    return min(abs(np.vdot(u, v)) for u, v in zip(phi.vectors, psi.vectors))
