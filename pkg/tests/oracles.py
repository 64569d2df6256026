"""Reference constructions built from numpy/scipy directly.

Nothing here imports the package, so tests can compare the two.
"""

import math

import numpy as np
import scipy.linalg
import scipy.special


def ladder(dim, theta=1.0):
    a = np.zeros((dim, dim), dtype=complex)
    for m in range(1, dim):
        a[m - 1, m] = math.sqrt(theta * m)
    return a


def spectral_norm(x):
    return float(np.linalg.svd(np.asarray(x), compute_uv=False)[0])


def padded(F, pad):
    k = F.shape[0]
    out = np.zeros((k + pad, k + pad), dtype=complex)
    out[:k, :k] = F
    return out


def lipschitz(F, theta=1.0, pad=4):
    """(sqrt2/theta) max(||[a, F]||, ||[a*, F]||) with F zero-padded."""
    big = padded(np.asarray(F, dtype=complex), pad)
    a = ladder(big.shape[0], theta)
    ad = a.conj().T
    return math.sqrt(2) / theta * max(spectral_norm(a @ big - big @ a), spectral_norm(ad @ big - big @ ad))


def coherent(kappa, dim, theta=1.0):
    """c_m by the recursion c_m = c_{m-1} kappa / sqrt(m theta), renormalized."""
    c = np.zeros(dim, dtype=complex)
    c[0] = math.exp(-abs(kappa) ** 2 / (2 * theta))
    for m in range(1, dim):
        c[m] = c[m - 1] * kappa / math.sqrt(m * theta)
    return c / np.linalg.norm(c)


def displacement(kappa, dim, theta=1.0):
    """u_kappa = exp((conj(kappa) a - kappa a*) / (theta sqrt2)) by scipy's expm."""
    a = ladder(dim, theta)
    return scipy.linalg.expm((np.conj(kappa) * a - kappa * a.conj().T) / (theta * math.sqrt(2)))


def c_beta_dense(beta, dim, extra=8):
    """[a, a_beta + a_beta*] with a_beta = a exp(-beta n), from matrix products."""
    n = dim + extra
    a = ladder(n)
    ab = a @ np.diag(np.exp(-beta * np.arange(n)))
    h = ab + ab.conj().T
    return (a @ h - h @ a)[:dim, :dim]


def lambert_w0(x):
    return float(np.real(scipy.special.lambertw(x, 0)))


def double_commutator(f_op, f_unit, g_op, g_unit, lam, theta=1.0, pad=4):
    """[D', pi'(a')] assembled with Kronecker products, sheet index outermost."""
    k = f_op.shape[0]
    n = k + pad

    def dirac(F):
        big = padded(F, pad)
        a = ladder(n, theta)
        x = (a @ big - big @ a) / theta
        y = -(a.conj().T @ big - big @ a.conj().T) / theta
        s_plus = np.array([[0, 1], [0, 0]])
        s_minus = np.array([[0, 0], [1, 0]])
        return -1j * math.sqrt(2) * (np.kron(s_plus, x) + np.kron(s_minus, y))

    m = padded(g_op - f_op, pad) + (g_unit - f_unit) * np.eye(n)
    gamma = np.diag([1.0, -1.0])
    e11 = np.diag([1.0, 0.0])
    e22 = np.diag([0.0, 1.0])
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return (np.kron(e11, dirac(f_op)) + np.kron(e22, dirac(g_op))
            + lam * np.kron(j, np.kron(gamma, m)))


def quantum_length_tensor(rho, rho_t, theta=1.0):
    """(rho x rho~)(sum_mu (q_mu x 1 - 1 x q_mu)^2) on the tensor product space."""
    k = rho.shape[0]
    a = ladder(k, theta)
    x1 = (a + a.conj().T) / math.sqrt(2)
    x2 = 1j * (a.conj().T - a) / math.sqrt(2)
    eye = np.eye(k)
    total = 0.0
    joint = np.kron(rho, rho_t)
    for x in (x1, x2):
        d = np.kron(x, eye) - np.kron(eye, x)
        total += np.real(np.trace(joint @ (d @ d)))
    return float(total)


def eigenstate_distance(m, n, theta=1.0):
    """sqrt(theta/2) sum_{k=m+1}^{n} 1/sqrt(k): the best gap over functions of the number operator."""
    lo, hi = sorted((m, n))
    return math.sqrt(theta / 2) * sum(1 / math.sqrt(k) for k in range(lo + 1, hi + 1))


def local_hermitian(dim, rng, support=8):
    """Random Hermitian matrix living on the first ``support`` levels."""
    z = rng.standard_normal((support, support)) + 1j * rng.standard_normal((support, support))
    out = np.zeros((dim, dim), dtype=complex)
    out[:support, :support] = (z + z.conj().T) / 2
    return out


def local_matrix(dim, rng, support=8):
    z = rng.standard_normal((support, support)) + 1j * rng.standard_normal((support, support))
    out = np.zeros((dim, dim), dtype=complex)
    out[:support, :support] = z
    return out
