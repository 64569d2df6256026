"""Lipschitz seminorms for the Moyal triple and for its doubled version."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .elements import MoyalElement
from .errors import InvalidPairError, InvalidParameterError
from .fock import DEFAULT_PAD, ladder_commutators, operator_norm

BALL_TOL = 1e-8


def _commutators(f, pad, interior):
    ca, cad = ladder_commutators(f.op, pad)
    if interior:
        # drop the boundary level where a truncated operator is not honest
        k = f.dim - 1
        ca, cad = ca[:k, :k], cad[:k, :k]
    return ca, cad


def lipschitz_seminorm(f, pad=DEFAULT_PAD, interior=False, method="eigh"):
    """(sqrt 2 / theta) max(||[a, F]||, ||[a*, F]||); the unit part drops out.

    By default the norm is taken over the whole padded commutator, which for
    an operator stored at dim K coincides with the commutator against the
    untruncated ladder operators.  ``interior=True`` reads only the leading
    (K-1) x (K-1) block instead; use it for truncations of unbounded
    elements such as the coordinates themselves.
    """
    ca, cad = _commutators(f, pad, interior)
    n1 = operator_norm(ca, method)
    n2 = operator_norm(cad, method)
    return np.sqrt(2) / f.theta * max(n1, n2)


def dirac_commutator(f, pad=DEFAULT_PAD):
    """Spinor matrix [D, pi(f)] = -i sqrt2 [[0, X], [Y, 0]] of size 2(K+pad).

    X = pi(dbar f) = [a, F]/theta and Y = pi(d f) = -[a*, F]/theta.
    """
    ca, cad = ladder_commutators(f.op, pad)
    x = ca / f.theta
    y = -cad / f.theta
    n = x.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = x
    out[n:, :n] = y
    return -1j * np.sqrt(2) * out


@dataclass(frozen=True, eq=False)
class DoubleElement:
    """a' = (f, g) on the two sheets, with internal Dirac parameter Lambda."""

    first: MoyalElement
    second: MoyalElement
    lambda_param: float

    def __post_init__(self):
        self.first._check(self.second)
        if not (np.isfinite(self.lambda_param) and self.lambda_param > 0):
            raise InvalidParameterError(f"Lambda must be positive, got {self.lambda_param!r}")
        object.__setattr__(self, "lambda_param", float(self.lambda_param))

    @property
    def dim(self):
        return self.first.dim

    @property
    def theta(self):
        return self.first.theta

    def is_hermitian(self, tol=1e-12):
        return self.first.is_hermitian(tol) and self.second.is_hermitian(tol)

    def scaled(self, c):
        return DoubleElement(self.first * c, self.second * c, self.lambda_param)

    def frobenius_norm(self):
        return float(np.hypot(self.first.frobenius_norm(), self.second.frobenius_norm()))


def _difference_block(a, n):
    """pi(g - f) + (lam~ - lam) on the padded space of size n."""
    k = a.dim
    m = np.zeros((n, n), dtype=complex)
    m[:k, :k] = a.second.op.entries - a.first.op.entries
    m += (a.second.unit_part - a.first.unit_part) * np.eye(n)
    return m


def double_commutator(a, pad=DEFAULT_PAD):
    """[D', pi'(a')] as a 4(K+pad) square matrix.

    Layout is sheet-major: [[ [D,f], Lam Gam M ], [ -Lam Gam M, [D,g] ]],
    M = pi(g - f) + (lam~ - lam), Gam = diag(1, -1) on the spinor index.
    """
    if not isinstance(a, DoubleElement):
        raise InvalidPairError("expected a DoubleElement")
    df = dirac_commutator(a.first, pad)
    dg = dirac_commutator(a.second, pad)
    n = df.shape[0] // 2
    m = _difference_block(a, n)
    gm = np.zeros((2 * n, 2 * n), dtype=complex)
    gm[:n, :n] = m
    gm[n:, n:] = -m
    lam = a.lambda_param
    out = np.zeros((4 * n, 4 * n), dtype=complex)
    out[: 2 * n, : 2 * n] = df
    out[2 * n :, 2 * n :] = dg
    out[: 2 * n, 2 * n :] = lam * gm
    out[2 * n :, : 2 * n] = -lam * gm
    return out


def double_lipschitz_norm(a, pad=DEFAULT_PAD):
    return operator_norm(double_commutator(a, pad))


class BlockValues(NamedTuple):
    first: float
    second: float
    asserted: bool


def double_block_inequalities(a, pad=DEFAULT_PAD):
    """Block norms ||L(df)* L(df) + (Lam^2/2) M* M|| for each sheet.

    Each value is the larger of the d and d-bar versions.  When a' lies in
    the Lipschitz ball both must be <= 1/2; ``asserted`` is False when the
    ball precondition fails, in which case no bound is claimed.
    """
    inside = double_lipschitz_norm(a, pad) <= 1 + BALL_TOL
    lam2 = a.lambda_param**2
    vals = []
    for part in (a.first, a.second):
        ca, cad = ladder_commutators(part.op, pad)
        n = ca.shape[0]
        m = _difference_block(a, n)
        mm = 0.5 * lam2 * (m.conj().T @ m)
        best = 0.0
        for c in (cad, ca):
            y = c / part.theta
            best = max(best, operator_norm(y.conj().T @ y + mm))
        vals.append(best)
    return BlockValues(vals[0], vals[1], bool(inside))
