"""Explicit witnesses: the damped coordinate f_beta and the Pythagoras element.

f_beta is the position-like element (e^{-i Xi} a e^{-beta n} + h.c.)/sqrt2.
Its commutator with the annihilation operator, c(beta), is a banded matrix
with entries on the diagonal and on the second superdiagonal; Schur's test
on the absolute row and column sums certifies that its norm stays below 1
for beta up to beta_1.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .elements import MoyalElement, unit_element
from .errors import InsufficientTruncationError, InvalidParameterError, InvalidWitnessError
from .fock import DEFAULT_PAD, FockOperator, ladder, operator_norm
from .lipschitz import BALL_TOL, DoubleElement, lipschitz_seminorm


def profile_element(weights, xi=0.0, dim=None, theta=1.0):
    """(e^{-i xi} a diag(g) + h.c.)/sqrt2 with g_{m+1} = weights[m].

    ``weights`` has one entry per link (m, m+1); f_beta is the special case
    weights[m] = exp(-beta (m+1)).
    """
    w = np.asarray(weights, dtype=float)
    if dim is None:
        dim = len(w) + 1
    if len(w) != dim - 1:
        raise InvalidParameterError(f"need {dim - 1} link weights, got {len(w)}")
    g = np.concatenate(([0.0], w))
    ab = np.exp(-1j * xi) * ladder(dim, theta) * g[None, :]
    return MoyalElement(FockOperator((ab + ab.conj().T) / np.sqrt(2), theta))


def f_beta_weights(beta, dim):
    return np.exp(-beta * np.arange(1, dim))


def f_beta(beta, xi=0.0, dim=128, theta=1.0):
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta!r}")
    return profile_element(f_beta_weights(beta, dim), xi, dim, theta)


def c_beta_entries(beta, n):
    """Closed-form (lambda_{n,n}, lambda_{n-2,n}) for integer array n (theta = 1)."""
    n = np.asarray(n, dtype=float)
    eb = math.exp(-beta)
    diag = (eb - (1 - eb) * n) * np.exp(-beta * n)
    off = -math.exp(beta) * (1 - eb) * np.sqrt(np.maximum(n * (n - 1), 0)) * np.exp(-beta * n)
    return diag, off


def c_beta_matrix(beta, dim):
    """c(beta) = [a, a_beta + a_beta*] on the first dim levels, theta = 1."""
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta!r}")
    n = np.arange(dim)
    diag, off = c_beta_entries(beta, n)
    c = np.diag(diag).astype(complex)
    c += np.diag(off[2:], 2)
    return FockOperator(c, 1.0)


def schur_sums(beta, dim):
    """Absolute column sums |l_{n-2,n}|+|l_{n,n}| and row sums |l_{n,n}|+|l_{n,n+2}|, n < dim."""
    n = np.arange(dim + 2)
    diag, off = np.abs(c_beta_entries(beta, n))
    cols = off[:dim] + diag[:dim]
    rows = diag[:dim] + off[2 : dim + 2]
    return rows, cols


def schur_tail_bound(beta, n):
    """Bound on any row or column sum at level >= n, valid once n > 2/beta + 2."""
    eb = math.exp(-beta)
    return ((1 - eb) * (n + (n + 2) * eb + n / eb) + eb) * math.exp(-beta * n)


@dataclass(frozen=True)
class SchurCertificate:
    beta: float
    dim: int
    row_sup: float
    col_sup: float
    schur_bound: float
    exact_norm: float

    @property
    def bound(self):
        return min(self.schur_bound, self.exact_norm)

    @property
    def certified_by(self):
        return "schur" if self.schur_bound <= self.exact_norm else "exact"

    @property
    def in_ball(self):
        return bool(self.schur_bound <= 1 + 1e-10 and self.exact_norm <= 1 + 1e-10)

    def as_row(self):
        return {
            "beta": self.beta,
            "row_sup": self.row_sup,
            "col_sup": self.col_sup,
            "schur_bound": self.schur_bound,
            "exact_norm": self.exact_norm,
            "in_ball": self.in_ball,
        }


def min_dim_for_beta(beta):
    """Smallest dim with dim > 2/beta + 2."""
    return int(math.floor(2 / beta + 2)) + 1


def schur_certificate(beta, dim):
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta!r}")
    if dim <= 2 / beta + 2:
        raise InsufficientTruncationError(
            f"dim={dim} too small for beta={beta}: need dim > {2 / beta + 2:.3f}"
        )
    rows, cols = schur_sums(beta, dim)
    tail = schur_tail_bound(beta, dim)
    row_sup = max(float(rows.max()), tail)
    col_sup = max(float(cols.max()), tail)
    exact = operator_norm(c_beta_matrix(beta, dim))
    return SchurCertificate(float(beta), int(dim), row_sup, col_sup, math.sqrt(row_sup * col_sup), exact)


def lambert_w(x, tol=1e-14, maxiter=50):
    """Principal branch W0(x) for real x >= -1/e by Newton iteration."""
    x = float(x)
    if x < -1 / math.e:
        raise InvalidParameterError(f"W0 is not real below -1/e, got {x}")
    if x == 0:
        return 0.0
    # x*e sits on the principal branch near -1/e; log-loglog is better for large x
    w = x * math.e if x <= math.e else math.log(x) - math.log(math.log(x))
    for _ in range(maxiter):
        ew = math.exp(w)
        r = w * ew - x
        if abs(r) <= tol * max(1.0, abs(x)):
            return w
        d = ew * (w + 1)
        if d == 0:
            break
        w -= r / d
    r = w * math.exp(w) - x
    if abs(r) > 1e3 * tol * max(1.0, abs(x)):
        raise ArithmeticError(f"Lambert W did not converge at x={x} (residual {r:.2e})")
    return w


class Thresholds(NamedTuple):
    beta0: float
    beta1: float
    beta2: float
    gamma: float


def beta_thresholds():
    beta0 = math.log((1 + math.sqrt(5)) / 2)
    beta1 = math.log((math.sqrt(1 + 4 * math.e) - 1) / 2)
    beta2 = 2 + lambert_w(-2 * math.exp(-2))
    return Thresholds(beta0, beta1, beta2, min(beta1, beta2))


BETA1 = beta_thresholds().beta1


def default_beta_grid(dim, top=None):
    """top, top/2, top/4, ... while dim > 2/beta + 2 still holds."""
    beta = BETA1 if top is None else float(top)
    out = []
    while dim > 2 / beta + 2:
        out.append(beta)
        beta /= 2
    return out


def geometric_betas(lo, hi, n):
    return list(np.geomspace(lo, hi, n))


def schur_scan(betas, dim=None):
    """One certificate per beta; dim defaults to the smallest admissible size, at least 64."""
    out = []
    for b in betas:
        d = max(dim or 0, 64, min_dim_for_beta(b))
        out.append(schur_certificate(b, d))
    return out


class PythagorasWitness(NamedTuple):
    element: DoubleElement
    lambda_max: float
    scale: float
    value: float


def pythagoras_parameters(d1, lam):
    """lambda_max, the scale factor for f1, and the value sqrt(d1^2 + Lam^-2)."""
    if not lam > 0:
        raise InvalidParameterError(f"Lambda must be positive, got {lam!r}")
    if not d1 >= 0:
        raise InvalidParameterError(f"d1 must be non-negative, got {d1!r}")
    root = math.sqrt(lam**2 * d1**2 + 1)
    return 1 / (lam * root), lam * d1 / root, math.sqrt(d1**2 + lam**-2)


def pythagoras_witness(d1, lam, f1, pad=DEFAULT_PAD):
    """b = (f, f + lambda_max) with f = (Lam d1 / sqrt(Lam^2 d1^2 + 1)) f1.

    f1 should satisfy phi~(f1) - phi(f1) = d1 for the pair (phi on sheet 1,
    phi~ on sheet 2); then phi^1(b) - phi~^2(b) = -sqrt(d1^2 + Lam^-2).
    """
    if lipschitz_seminorm(f1, pad) > 1 + BALL_TOL:
        raise InvalidWitnessError("f1 is outside the Lipschitz ball")
    lmax, scale, value = pythagoras_parameters(d1, lam)
    f = f1 * scale
    g = f + unit_element(f.dim, f.theta, lmax)
    return PythagorasWitness(DoubleElement(f, g, lam), lmax, scale, value)
