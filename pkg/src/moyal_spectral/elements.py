"""Moyal algebra elements in the operator picture.

An element is stored as its Schroedinger-representation matrix together
with a scalar unit part, so the same type covers the unitized algebra.
In this picture the star product is matrix multiplication and the
matrix-basis coefficients are sqrt(2 pi theta) times the entries.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, InvalidPairError, InvalidParameterError
from .fock import (
    DEFAULT_PAD,
    FockOperator,
    ladder,
    ladder_commutators,
    matrix_exponential,
)


@dataclass(frozen=True, eq=False)
class MoyalElement:
    op: FockOperator
    unit_part: complex = 0.0

    def __post_init__(self):
        if not isinstance(self.op, FockOperator):
            raise InvalidParameterError("op must be a FockOperator")
        lam = complex(self.unit_part)
        if not np.isfinite(lam):
            raise InvalidParameterError("unit_part must be finite")
        object.__setattr__(self, "unit_part", lam)

    @classmethod
    def from_matrix(cls, entries, theta=1.0, unit_part=0.0):
        return cls(FockOperator(entries, theta), unit_part)

    @property
    def dim(self):
        return self.op.dim

    @property
    def theta(self):
        return self.op.theta

    @property
    def entries(self):
        return self.op.entries

    def is_hermitian(self, tol=1e-12):
        return self.op.is_hermitian(tol) and abs(self.unit_part.imag) <= tol

    def full_matrix(self):
        """op + unit_part * identity."""
        return self.op.entries + self.unit_part * np.eye(self.dim)

    def adjoint(self):
        return MoyalElement(self.op.adjoint(), self.unit_part.conjugate())

    def _check(self, other):
        if not isinstance(other, MoyalElement):
            raise InvalidPairError("expected a MoyalElement")
        if other.dim != self.dim or other.theta != self.theta:
            raise InvalidPairError(
                f"element mismatch: (dim={self.dim}, theta={self.theta}) vs "
                f"(dim={other.dim}, theta={other.theta})"
            )

    def __add__(self, other):
        self._check(other)
        return MoyalElement(self.op + other.op, self.unit_part + other.unit_part)

    def __sub__(self, other):
        self._check(other)
        return MoyalElement(self.op - other.op, self.unit_part - other.unit_part)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return MoyalElement(self.op * c, self.unit_part * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def frobenius_norm(self):
        return float(np.linalg.norm(self.op.entries))


def zero_element(dim, theta=1.0):
    return MoyalElement(FockOperator(np.zeros((dim, dim)), theta))


def unit_element(dim, theta=1.0, lam=1.0):
    """The constant lam in the unitized algebra (zero operator part)."""
    return MoyalElement(FockOperator(np.zeros((dim, dim)), theta), lam)


def matrix_basis(m, n, dim, theta=1.0):
    """Image of h_mn: |m><n| / sqrt(2 pi theta)."""
    if not (0 <= m < dim and 0 <= n < dim):
        raise InvalidParameterError(f"levels ({m}, {n}) outside dim {dim}")
    e = np.zeros((dim, dim), dtype=complex)
    e[m, n] = 1 / np.sqrt(2 * np.pi * theta)
    return MoyalElement(FockOperator(e, theta))


def coefficients(f):
    """Coefficients of f in the h_mn basis."""
    return np.sqrt(2 * np.pi * f.theta) * f.op.entries


def from_coefficients(coeff, theta=1.0, unit_part=0.0):
    return MoyalElement.from_matrix(np.asarray(coeff) / np.sqrt(2 * np.pi * theta), theta, unit_part)


def star_product(f, g):
    """(f + lam)(g + mu) = fg + lam g + mu f + lam mu."""
    f._check(g)
    op = f.op @ g.op + g.op * f.unit_part + f.op * g.unit_part
    return MoyalElement(op, f.unit_part * g.unit_part)


def derivative(f, which, pad=DEFAULT_PAD):
    """Partial derivative d (``which="d"``) or d-bar (``which="dbar"``).

    The commutator is taken on the padded operator and read back on the
    leading dim x dim block.  Constants are killed.
    """
    ca, cad = ladder_commutators(f.op, pad)
    k = f.dim
    if which in ("d", "del", "∂"):
        out = -cad[:k, :k] / f.theta
    elif which in ("dbar", "delbar", "∂̄"):
        out = ca[:k, :k] / f.theta
    else:
        raise InvalidParameterError(f"which must be 'd' or 'dbar', got {which!r}")
    return MoyalElement(FockOperator(out, f.theta))


def kappa_safety_bound(dim, theta=1.0):
    """Largest |kappa| considered safe at storage dimension dim."""
    return 0.5 * np.sqrt(theta * dim)


def check_kappa(kappa, dim, theta=1.0, stacklevel=3):
    bound = kappa_safety_bound(dim, theta)
    if abs(kappa) > bound:
        warnings.warn(
            f"|kappa|={abs(kappa):.4g} exceeds the safety bound {bound:.4g} at dim {dim}",
            AccuracyWarning,
            stacklevel=stacklevel,
        )


def displacement_generator(kappa, dim, theta=1.0):
    """(conj(kappa) a - kappa a*) / (theta sqrt 2), anti-Hermitian."""
    a = ladder(dim, theta)
    return (np.conj(kappa) * a - kappa * a.conj().T) / (theta * np.sqrt(2))


def displacement_unitary(kappa, dim, theta=1.0):
    """Truncated translation unitary u_kappa, exactly unitary at every dim."""
    return matrix_exponential(FockOperator(displacement_generator(kappa, dim, theta), theta))


def translate_element(f, kappa):
    """Adjoint action of u_kappa on the operator part; the unit part is untouched."""
    if kappa == 0:
        return f
    check_kappa(kappa, f.dim, f.theta)
    u = displacement_unitary(kappa, f.dim, f.theta)
    return MoyalElement(u @ f.op @ u.adjoint(), f.unit_part)
