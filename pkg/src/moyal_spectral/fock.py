"""Truncated harmonic-oscillator operators.

Everything here works on dense complex matrices indexed by oscillator
levels 0..N-1.  Each matrix carries the deformation parameter theta, and
binary operations refuse to combine operators with different theta or size.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, InvalidPairError, InvalidParameterError

DEFAULT_PAD = 4


def _check_theta(theta):
    if not (np.isfinite(theta) and theta > 0):
        raise InvalidParameterError(f"theta must be positive, got {theta!r}")


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense operator on the first ``dim`` oscillator levels.

    Parameters
    ----------
    entries : array_like, shape (N, N)
        Matrix elements <m|F|n>.
    theta : float
        Deformation parameter (units of length squared).
    """

    entries: np.ndarray
    theta: float = 1.0

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("operator entries must be finite")
        _check_theta(self.theta)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def dim(self):
        return self.entries.shape[0]

    def _other(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        if other.dim != self.dim or other.theta != self.theta:
            raise InvalidPairError(
                f"cannot combine (dim={self.dim}, theta={self.theta}) with "
                f"(dim={other.dim}, theta={other.theta})"
            )
        return other.entries

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FockOperator(self.entries + b, self.theta)

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FockOperator(self.entries - b, self.theta)

    def __matmul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FockOperator(self.entries @ b, self.theta)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return FockOperator(c * self.entries, self.theta)

    __rmul__ = __mul__

    def __neg__(self):
        return FockOperator(-self.entries, self.theta)

    def adjoint(self):
        return FockOperator(self.entries.conj().T, self.theta)

    def is_hermitian(self, tol=1e-12):
        return bool(np.allclose(self.entries, self.entries.conj().T, rtol=0, atol=tol))

    def embed(self, dim):
        """Zero-pad (or refuse to cut) to a larger storage dimension."""
        if dim < self.dim:
            raise InvalidParameterError(f"cannot embed dim {self.dim} into {dim}")
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.entries
        return FockOperator(out, self.theta)

    def block(self, k):
        """Leading k x k block as a new operator."""
        return FockOperator(self.entries[:k, :k], self.theta)


@dataclass(frozen=True)
class TruncationPolicy:
    """Elements live at ``store_dim``; commutators are taken at ``store_dim + pad``."""

    store_dim: int = 128
    pad: int = DEFAULT_PAD

    def __post_init__(self):
        if int(self.store_dim) != self.store_dim or self.store_dim < 2:
            raise InvalidParameterError(f"store_dim must be an integer >= 2, got {self.store_dim!r}")
        if int(self.pad) != self.pad or self.pad < 2:
            # c(beta) has a second off-diagonal; pad < 2 clips it
            raise InvalidParameterError(f"pad must be an integer >= 2, got {self.pad!r}")

    @property
    def work_dim(self):
        return self.store_dim + self.pad


def ladder(dim, theta=1.0):
    """Raw annihilation matrix with <m-1|a|m> = sqrt(theta m)."""
    return np.diag(np.sqrt(theta * np.arange(1, dim)).astype(complex), 1)


def make_annihilation(dim, theta=1.0):
    if int(dim) != dim or dim < 2:
        raise InvalidParameterError(f"dim must be an integer >= 2, got {dim!r}")
    _check_theta(theta)
    return FockOperator(ladder(int(dim), theta), theta)


def make_creation(dim, theta=1.0):
    return make_annihilation(dim, theta).adjoint()


def make_number(dim, theta=1.0):
    """theta * diag(0, 1, ..., dim-1), computed as creation @ annihilation."""
    a = make_annihilation(dim, theta)
    return a.adjoint() @ a


def identity(dim, theta=1.0):
    _check_theta(theta)
    return FockOperator(np.eye(dim, dtype=complex), theta)


def position(dim, theta=1.0):
    """x1 = (a + a*)/sqrt(2)."""
    a = make_annihilation(dim, theta)
    return (a + a.adjoint()) * (1 / np.sqrt(2))


def momentum(dim, theta=1.0):
    """x2 = i(a* - a)/sqrt(2)."""
    a = make_annihilation(dim, theta)
    return (a.adjoint() - a) * (1j / np.sqrt(2))


def commutator(A, B):
    return A @ B - B @ A


def ladder_commutators(F, pad=DEFAULT_PAD):
    """Return ([a, F], [a*, F]) as arrays of size dim+pad.

    F is zero-padded first.  For an operator supported on the leading
    dim x dim block this reproduces the commutators with the untruncated
    ladder operators exactly, since both are supported on dim+1 levels.
    """
    ent = F.entries if isinstance(F, FockOperator) else np.asarray(F, dtype=complex)
    theta = F.theta if isinstance(F, FockOperator) else 1.0
    k = ent.shape[0]
    n = k + pad
    big = np.zeros((n, n), dtype=complex)
    big[:k, :k] = ent
    a = ladder(n, theta)
    ad = a.conj().T
    return a @ big - big @ a, ad @ big - big @ ad


def _as_array(F):
    return F.entries if isinstance(F, FockOperator) else np.asarray(F)


def operator_norm(F, method="eigh", rtol=1e-10, maxiter=10000):
    """Largest singular value.

    The default takes the top eigenvalue of F*F.  ``method="power"`` runs
    power iteration on F*F until the Rayleigh quotient changes by less than
    ``rtol`` (relative); it falls back to the dense path if it stalls.
    """
    a = _as_array(F)
    if a.size == 0:
        return 0.0
    if method == "power":
        val = _power_norm(a, rtol, maxiter)
        if val is not None:
            return val
    elif method != "eigh":
        raise InvalidParameterError(f"unknown norm method {method!r}")
    g = a.conj().T @ a
    top = scipy.linalg.eigvalsh(g, subset_by_index=[g.shape[0] - 1, g.shape[0] - 1])[0]
    return float(np.sqrt(max(top, 0.0)))


def _power_norm(a, rtol, maxiter):
    rng = np.random.default_rng(0)
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(maxiter):
        w = a.conj().T @ (a @ v)
        lam = np.linalg.norm(w)
        if lam == 0:
            return 0.0
        v = w / lam
        if abs(lam - prev) <= rtol * lam:
            return float(np.sqrt(lam))
        prev = lam
    return None


def matrix_exponential(F):
    """exp(F).

    Hermitian and anti-Hermitian inputs go through an eigendecomposition,
    which keeps exp of an anti-Hermitian matrix unitary to rounding.  Other
    inputs use scipy's scaling-and-squaring Pade routine.
    """
    a = _as_array(F)
    theta = F.theta if isinstance(F, FockOperator) else 1.0
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix_exponential: non-finite entries")
    a = np.asarray(a, dtype=complex)
    scale = max(np.abs(a).max(), 1.0)
    tol = 1e-14 * scale
    if np.allclose(a, a.conj().T, rtol=0, atol=tol):
        w, v = np.linalg.eigh((a + a.conj().T) / 2)
        out = (v * np.exp(w)) @ v.conj().T
    elif np.allclose(a, -a.conj().T, rtol=0, atol=tol):
        h = (a - a.conj().T) / 2j
        w, v = np.linalg.eigh(h)
        out = (v * np.exp(1j * w)) @ v.conj().T
    else:
        out = scipy.linalg.expm(a)
    return FockOperator(out, theta)
