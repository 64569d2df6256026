"""Numerical kernels for maximizing tr(D F) / L(F) over Hermitian F.

D is the difference of two density matrices, so tr(D F) is the gap
phi~(F) - phi(F).  L(F) = (sqrt2/theta) ||[a, F]|| for Hermitian F.  The
spectral norm is replaced by a log-sum-exp smoothing of the eigenvalues of
C^H C (C = [a, F]), which upper-bounds ||C||^2 and converges to it as mu->0,
so every smoothed objective value underestimates the true ratio.

Two parametrizations are provided.  Real link weights on the first
off-diagonal (the family containing f_beta) give two small bidiagonal
blocks, cheap enough for Newton's method with the exact Hessian.  Full
Hermitian matrices use L-BFGS, with a plain normalized subgradient method
kept as an alternative.
"""

import numpy as np
import scipy.linalg
import scipy.optimize

from .fock import ladder

SQRT2 = np.sqrt(2.0)


class AscentResult:
    __slots__ = ("x", "ratio", "iterations", "converged")

    def __init__(self, x, ratio, iterations, converged):
        self.x = x
        self.ratio = ratio
        self.iterations = iterations
        self.converged = converged


def _soft_top(evals, mu):
    """mu log sum exp(evals/mu) and its softmax weights."""
    top = evals.max()
    z = np.exp((evals - top) / mu)
    s = z.sum()
    return top + mu * np.log(s), z / s


# -- link-weight family ------------------------------------------------------


class LinkProblem:
    """F = (e^{-i xi} a diag(0, w) + h.c.)/sqrt2 with real link weights w."""

    def __init__(self, D, theta, xi, pad):
        k = D.shape[0]
        self.k = k
        self.n = k + pad
        self.theta = theta
        self.amp = np.sqrt(theta * np.arange(1, k)) / SQRT2
        self.dvec = 2 * self.amp * np.real(np.exp(-1j * xi) * np.diag(D, -1))
        self.a = np.sqrt(theta * np.arange(1, self.n))  # a[i] = <i|a|i+1>

    def commutator_bands(self, w):
        """Diagonal and second superdiagonal of [a, F] for real F (xi = 0)."""
        n, a = self.n, self.a
        e = np.zeros(n - 1)
        e[: self.k - 1] = self.amp * w
        d0 = np.zeros(n)
        d0[:-1] += a * e
        d0[1:] -= a * e
        d2 = a[:-1] * e[1:] - e[:-1] * a[1:]
        return d0, d2

    def _blocks(self, d0, d2):
        # [a, F] only couples levels of equal parity: split into two bidiagonals
        out = []
        for p in (0, 1):
            diag = d0[p::2]
            sup = d2[p::2][: len(diag) - 1]
            out.append((diag, sup))
        return out

    def norm_sq(self, w):
        d0, d2 = self.commutator_bands(w)
        best = 0.0
        for diag, sup in self._blocks(d0, d2):
            b = np.diag(diag) + np.diag(sup, 1)
            best = max(best, scipy.linalg.svdvals(b)[0] ** 2)
        return best

    def lipschitz(self, w):
        return SQRT2 / self.theta * np.sqrt(self.norm_sq(w))

    def _jacobian_blocks(self):
        """Per parity block, the two rows of each bidiagonal touched by a weight.

        Weight k enters each block through at most two rows; returns, per
        block, (rows, diag coefficients, superdiag coefficients) with shape
        (2, k-1) each, unused slots carrying zero coefficients.
        """
        k1 = self.k - 1
        eye = np.eye(k1)
        e = np.zeros((self.n - 1, k1))
        e[:k1] = self.amp[:, None] * eye
        a = self.a[:, None]
        j0 = np.zeros((self.n, k1))
        j0[:-1] += a * e
        j0[1:] -= a * e
        j2 = a[:-1] * e[1:] - e[:-1] * a[1:]
        out = []
        for p in (0, 1):
            c = j0[p::2]
            m = c.shape[0]
            sp = np.zeros_like(c)
            sp[: m - 1] = j2[p::2][: m - 1]
            r1 = np.argmax(np.abs(c), axis=0)
            r2 = np.argmax(np.abs(sp), axis=0)
            cols = np.arange(k1)
            second = (r2 != r1) & (np.abs(sp[r2, cols]) > 0)
            rows = np.stack([r1, r2])
            cd = np.stack([c[r1, cols], np.where(second, c[r2, cols], 0.0)])
            cs = np.stack([sp[r1, cols], np.where(second, sp[r2, cols], 0.0)])
            out.append((m, rows, cd, cs))
        return out

    def _spectra(self, w):
        d0, d2 = self.commutator_bands(w)
        out = []
        for diag, sup in self._blocks(d0, d2):
            b = np.diag(diag) + np.diag(sup, 1)
            lam, v = np.linalg.eigh(b.T @ b)
            out.append((b, lam, v))
        return out

    def smoothed_newton(self, w, mu, jac, hess=True):
        """Smoothed ||C||^2 with its gradient and Hessian in w.

        The Hessian of mu log tr exp(X/mu) at X = B^T B is the divided
        difference form sum_ij G_ij Y_ij^2 - (p.diag Y)^2/mu plus the
        curvature of X in B; only eigenvalues with weight above 1e-18
        contribute to G.
        """
        spec = self._spectra(w)
        lam_all = np.concatenate([s[1] for s in spec])
        val, p_all = _soft_top(lam_all, mu)
        if not hess:
            return val
        nv = len(w)
        g = np.zeros(nv)
        h = np.zeros((nv, nv))
        off = 0
        for (b, lam, v), (m, rows, cd, cs) in zip(spec, jac):
            p = p_all[off : off + m]
            off += m
            act = np.flatnonzero(p > 1e-18)
            pa = p[act]
            wv = b @ v
            vs = np.vstack([v[1:], np.zeros((1, m))])
            tr = cd[:, :, None] * v[rows] + cs[:, :, None] * vs[rows]  # rows of dB_k V
            wr = wv[rows]
            # rows `act` of Y_k = (dB_k V)^T B V + (B V)^T dB_k V
            y = np.einsum("ska,skj->kaj", tr[:, :, act], wr)
            y += np.einsum("ska,skj->kaj", wr[:, :, act], tr)
            dy = y[:, np.arange(len(act)), act]
            g += dy @ pa
            x = np.abs(lam[act][:, None] - lam[None, :]) / mu
            safe = np.where(x > 0, x, 1.0)
            gam = np.maximum(pa[:, None], p[None, :]) * np.where(x > 0, -np.expm1(-x) / safe, 1.0) / mu
            twice = np.full(m, 2.0)
            twice[act] = 1.0
            yf = y.reshape(nv, -1)
            h += (yf * (gam * twice[None, :]).ravel()) @ yf.T
            full = np.zeros((nv, m, len(act)))
            for slot in (0, 1):
                np.add.at(full, (np.arange(nv), rows[slot]), tr[slot][:, act])
            tp = (full * np.sqrt(pa)).reshape(nv, -1)
            h += 2 * tp @ tp.T
        h -= np.outer(g, g) / mu
        return val, g, h

    def solve(self, w0, mus, max_iter, tol):
        """Damped Newton on min smoothed ||C||^2 subject to dvec . w = 1.

        The smoothed objective is convex in w, so each level converges
        from any start; mu is relative to ||C||^2 at the start of a level.
        """
        w = np.asarray(w0, dtype=float).copy()
        gap = self.dvec @ w
        if not gap > 0:
            if gap == 0:
                return AscentResult(w / max(self.lipschitz(w), 1e-300), 0.0, 0, False)
            w, gap = -w, -gap
        w = w / gap
        jac = self._jacobian_blocks()
        nv = len(w)
        kkt = np.zeros((nv + 1, nv + 1))
        kkt[:nv, nv] = kkt[nv, :nv] = self.dvec
        its = 0
        conv = True
        for rel in mus:
            mu = rel * self.norm_sq(w)
            for it in range(max_iter):
                val, g, h = self.smoothed_newton(w, mu, jac)
                kkt[:nv, :nv] = h + 1e-15 * np.trace(h) * np.eye(nv)
                step = np.linalg.solve(kkt, np.concatenate([-g, [0.0]]))[:nv]
                dec = -g @ step
                its += 1
                if dec <= tol * val:
                    break
                t = 1.0
                while t > 1e-12:
                    if self.smoothed_newton(w + t * step, mu, jac, hess=False) <= val - 0.25 * t * dec:
                        break
                    t *= 0.5
                else:
                    break
                w = w + t * step
            else:
                conv = False
        w = w / self.lipschitz(w)
        return AscentResult(w, float(self.dvec @ w), its, conv)


# -- full Hermitian family ---------------------------------------------------


class HermitianProblem:
    def __init__(self, D, theta, pad):
        self.D = np.asarray(D, dtype=complex)
        self.k = self.D.shape[0]
        self.n = self.k + pad
        self.theta = theta
        self.a = ladder(self.n, theta)

    def unpack(self, x):
        k = self.k
        r = x[: k * k].reshape(k, k)
        i = x[k * k :].reshape(k, k)
        return (r + r.T) / 2 + 0.5j * (i - i.T)

    def pack(self, F):
        return np.concatenate([F.real.ravel(), F.imag.ravel()])

    def commutator(self, F):
        k, n = self.k, self.n
        big = np.zeros((n, n), dtype=complex)
        big[:k, :k] = F
        return self.a @ big - big @ self.a

    def lipschitz(self, F):
        c = self.commutator(F)
        return SQRT2 / self.theta * scipy.linalg.svdvals(c)[0]

    def gap(self, F):
        return float(np.real(np.sum(self.D.T * F)))

    def smoothed(self, F, mu):
        c = self.commutator(F)
        ev, v = np.linalg.eigh(c.conj().T @ c)
        val, p = _soft_top(ev, mu)
        gc = 2 * c @ ((v * p) @ v.conj().T)
        ah = self.a.conj().T
        gf = (ah @ gc - gc @ ah)[: self.k, : self.k]
        return val, gf

    def _grad_params(self, G):
        gr = (G.real + G.real.T) / 2
        gi = (G.imag - G.imag.T) / 2
        return np.concatenate([gr.ravel(), gi.ravel()])

    def ascend(self, F0, mus, max_iter, tol):
        x = self.pack(F0 / max(self.lipschitz(F0), 1e-300))
        c = SQRT2 / self.theta
        its = 0
        conv = True
        for rel in mus:
            mu = rel * (self.theta * self.lipschitz(self.unpack(x)) / SQRT2) ** 2

            def fun(x):
                F = self.unpack(x)
                s2, gs = self.smoothed(F, mu)
                s = np.sqrt(s2)
                lval = c * s
                d = self.gap(F)
                gl = c * gs / (2 * s)
                g = (self.D * lval - d * gl) / lval**2
                return -d / lval, -self._grad_params(g)

            res = scipy.optimize.minimize(
                fun, x, jac=True, method="L-BFGS-B",
                options={"maxiter": max_iter, "ftol": tol, "gtol": 1e-12},
            )
            its += res.nit
            conv = conv and res.nit < max_iter
            F = self.unpack(res.x)
            x = self.pack(F / self.lipschitz(F))
        F = self.unpack(x)
        F = F / self.lipschitz(F)
        return AscentResult(F, self.gap(F), its, conv)

    def subgradient(self, F0, max_iter, step, tol, patience=50):
        """Normalized subgradient steps on the ratio, renormalizing to L = 1."""
        c = SQRT2 / self.theta
        F = F0 / self.lipschitz(F0)
        best_F, best = F, self.gap(F)
        stale = 0
        its = 0
        for k in range(max_iter):
            its = k + 1
            cm = self.commutator(F)
            u, s, vh = np.linalg.svd(cm)
            lval = c * s[0]
            gc = np.outer(u[:, 0], vh[0].conj())
            ah = self.a.conj().T
            gf = (ah @ gc - gc @ ah)[: self.k, : self.k]
            gf = (gf + gf.conj().T) / 2
            d = self.gap(F)
            g = (self.D * lval - d * c * gf) / lval**2
            g = (g + g.conj().T) / 2
            gn = np.linalg.norm(g)
            if gn == 0:
                break
            F = F + step / np.sqrt(k + 1) * np.linalg.norm(F) * g / gn
            F = F / self.lipschitz(F)
            val = self.gap(F)
            if val > best + tol * max(abs(best), 1.0):
                best, best_F, stale = val, F, 0
            else:
                stale += 1
                if stale >= patience:
                    break
        return AscentResult(best_F, best, its, its < max_iter)
