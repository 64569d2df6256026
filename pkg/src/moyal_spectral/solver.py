"""Certified estimates of the spectral distance.

Lower bounds always come from a stored witness that is re-checked to lie in
the Lipschitz ball; upper bounds are only ever closed forms (translations,
the doubled space) and never numerical.  Truncation shrinks the ball, so a
numerical maximum over truncated elements can only underestimate.
"""

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ascent import HermitianProblem, LinkProblem
from .elements import MoyalElement, zero_element
from .errors import (
    InconsistentEstimateError,
    InvalidPairError,
    InvalidParameterError,
    TruncationOverflowError,
)
from .fock import DEFAULT_PAD, FockOperator, ladder
from .lipschitz import BALL_TOL, DoubleElement, double_lipschitz_norm, lipschitz_seminorm
from .optimal import default_beta_grid, f_beta_weights, profile_element, pythagoras_witness
from .states import evaluate, overlap, translate_state

UPPER_TOL = 1e-7


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the ascent.

    ``mus`` are the relative smoothing levels visited in turn; ``restarts``
    counts Hermitian ascent starts (the best structured witness plus
    Gaussian random Hermitian seeds).  Random seeds get ``screen_iter``
    steps at the coarsest smoothing; the best of them is polished through
    the remaining levels only if it comes within 1% of the structured
    witness.  The structured seed gets ``polish_iter`` steps at the finest
    level.  ``max_iter`` caps each Hermitian level.

    The link-weight family is solved by Newton's method over the levels
    ``link_mus`` with at most ``link_iter`` steps each, stopping when the
    Newton decrement falls below ``link_tol`` relative to the objective.
    """

    pad: int = DEFAULT_PAD
    restarts: int = 8
    max_iter: int = 2000
    stall_tol: float = 1e-9
    method: str = "smooth"
    step: float = 0.05
    seed: int = 0
    workers: int = 1
    refine: bool = True
    polish: bool = True
    screen_iter: int = 150
    polish_iter: int = 300
    mus: tuple = (1e-2, 1e-3, 1e-4, 1e-5)
    beta_grid: tuple = None
    link_mus: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9)
    link_iter: int = 100
    link_tol: float = 1e-13

    def __post_init__(self):
        if self.pad < 2:
            raise InvalidParameterError("pad must be >= 2")
        if self.restarts < 0 or self.max_iter < 1:
            raise InvalidParameterError("restarts must be >= 0 and max_iter >= 1")
        if self.method not in ("smooth", "subgradient"):
            raise InvalidParameterError(f"unknown method {self.method!r}")


@dataclass(frozen=True, eq=False)
class DistanceEstimate:
    lower: float
    upper: float
    witness: object
    dim: int
    beta: float = None
    iterations: int = 0
    restarts: int = 0
    source: str = ""
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.lower > self.upper + UPPER_TOL:
            raise InconsistentEstimateError(
                f"lower bound {self.lower!r} exceeds upper bound {self.upper!r}"
            )

    @property
    def gap(self):
        return self.upper - self.lower

    @property
    def witness_ref(self):
        h = hashlib.sha256()
        parts = [self.witness] if isinstance(self.witness, MoyalElement) else [
            self.witness.first, self.witness.second]
        for p in parts:
            h.update(np.ascontiguousarray(p.op.entries).tobytes())
            h.update(repr(p.unit_part).encode())
        if isinstance(self.witness, DoubleElement):
            h.update(repr(self.witness.lambda_param).encode())
        return h.hexdigest()[:16]

    def to_dict(self):
        fin = math.isfinite(self.upper)
        return {
            "lower": self.lower,
            "upper": self.upper if fin else None,
            "gap": self.gap if fin else None,
            "beta": self.beta,
            "dim": self.dim,
            "iterations": self.iterations,
            "witness_ref": self.witness_ref,
        }


def _check_states(phi, phit):
    if phi.dim != phit.dim or phi.theta != phit.theta:
        raise InvalidPairError(
            f"states differ in shape: (dim={phi.dim}, theta={phi.theta}) vs "
            f"(dim={phit.dim}, theta={phit.theta})"
        )


def difference(phi, phit, f):
    """phi~(f) - phi(f); real for Hermitian f."""
    return evaluate(phit, f) - evaluate(phi, f)


def candidate_lower_bound(phi, phit, f, pad=DEFAULT_PAD):
    """|phi(f) - phi~(f)| / max(L(f), 1)."""
    _check_states(phi, phit)
    lip = lipschitz_seminorm(f, pad)
    diff = abs(difference(phi, phit, f))
    if lip <= 1e-14:
        if diff > 1e-10:
            raise InconsistentEstimateError(
                f"element with vanishing seminorm separates the states by {diff:.3g}"
            )
        return 0.0
    return diff / max(lip, 1.0)


def certify(phi, phit, f, pad=DEFAULT_PAD):
    """Rescale f to unit seminorm and orient it so phi~(w) - phi(w) >= 0.

    Returns (lower, w); lower = |phi~(w) - phi(w)| / max(L(w), 1), with
    L(w) recomputed after scaling.
    """
    lip = lipschitz_seminorm(f, pad)
    if lip <= 1e-14:
        return 0.0, zero_element(f.dim, f.theta)
    w = f * (1 / lip)
    w = MoyalElement(FockOperator((w.op.entries + w.op.entries.conj().T) / 2, w.theta))
    d = difference(phi, phit, w).real
    if d < 0:
        w = -w
    return candidate_lower_bound(phi, phit, w, pad), w


def _best(cands):
    """Largest value; ties (within 1e-12) go to the smallest Frobenius norm."""
    top = max(c[0] for c in cands)
    close = [c for c in cands if c[0] >= top - 1e-12]
    return min(close, key=lambda c: c[1].frobenius_norm())


def _link_phase(D, theta):
    """Arg and size of phi~(a) - phi(a) = tr(D a); for phi~ = phi_kappa it is kappa/sqrt2."""
    z = np.sum(np.diag(D, -1) * np.sqrt(theta * np.arange(1, D.shape[0])))
    return float(np.angle(z)), abs(z)


def _link_solve(D, theta, xi, seed_beta, opts):
    """Link weights maximizing the gap over the ball, started from f_beta."""
    dim = D.shape[0]
    lp = LinkProblem(D, theta, xi, opts.pad)
    seed = f_beta_weights(seed_beta, dim)
    start = lp.dvec @ seed / lp.lipschitz(seed)
    res = lp.solve(seed, opts.link_mus, opts.link_iter, opts.link_tol)
    if res.ratio >= start:
        return res.x, res.iterations
    return seed / lp.lipschitz(seed), res.iterations


def _structured(phi, phit, D, xi, opts):
    """f_beta sweep at phase xi, then the best link-weight profile."""
    dim, theta = phi.dim, phi.theta
    grid = opts.beta_grid or default_beta_grid(dim)
    cands = []
    for b in grid:
        if dim <= 2 / b + 2:
            continue
        f = profile_element(f_beta_weights(b, dim), xi, dim, theta)
        val, w = certify(phi, phit, f, opts.pad)
        cands.append((val, w, b, 0, "f_beta"))
    its = 0
    if opts.refine and cands:
        seed_beta = _best(cands)[2]
        x, its = _link_solve(D, theta, xi, seed_beta, opts)
        val, w = certify(phi, phit, profile_element(x, xi, dim, theta), opts.pad)
        cands.append((val, w, seed_beta, its, "profile"))
    return cands, its


def translation_distance(phi, kappa, opts=None):
    """Estimate d(phi, phi_kappa); the exact value is |kappa|."""
    opts = opts or SolverOptions()
    kappa = complex(kappa)
    if kappa == 0:
        return DistanceEstimate(0.0, 0.0, zero_element(phi.dim, phi.theta), phi.dim, source="exact")
    phit = translate_state(phi, kappa)
    D = phit.density_matrix() - phi.density_matrix()
    cands, its = _structured(phi, phit, D, float(np.angle(kappa)), opts)
    if not cands:
        raise InvalidParameterError(f"no usable beta for dim {phi.dim}")
    val, w, beta, _, src = _best(cands)
    if val > abs(kappa) + UPPER_TOL:
        raise InconsistentEstimateError(
            f"lower bound {val!r} exceeds |kappa| = {abs(kappa)!r}; truncation artifact"
        )
    return DistanceEstimate(val, abs(kappa), w, phi.dim, beta, its, 0, src)


def _random_hermitian(k, rng):
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return (z + z.conj().T) / 2


def radial_candidate(D, theta, pad=DEFAULT_PAD):
    """Best function of the number operator, g(n), for the gap tr(D g).

    [a, g(n)] is a weighted shift with entries sqrt(theta(m+1)) (g_{m+1} - g_m),
    so the ball constraint is |g_{m+1} - g_m| <= sqrt(theta / (2(m+1))),
    with g vanishing beyond the stored levels.  The gap is
    sum_m (g_{m+1} - g_m) T_m with T_m = sum_{j>m} D_jj, so the optimum
    saturates every step with the sign of T_m.
    """
    k = D.shape[0]
    d = np.real(np.diag(D))
    tail = np.cumsum(d[::-1])[::-1]
    t = np.append(tail[1:], 0.0)
    steps = np.sign(t) * np.sqrt(theta / (2 * np.arange(1, k + 1)))
    g = np.concatenate(([0.0], np.cumsum(steps)))
    g = g - g[k]
    return MoyalElement(FockOperator(np.diag(g[:k]).astype(complex), theta))


def maximize_distance(phi, phit, opts=None):
    """Lower bound on d(phi, phi~) by ascent over Hermitian truncated elements.

    Structured candidates come first: the f_beta sweep and a link-weight
    ascent (phase taken from the first-moment difference) and the best
    function of the number operator.  The best of these seeds the Hermitian
    ascent, so the result never falls below it.  upper is +inf except when
    the states coincide.
    """
    opts = opts or SolverOptions()
    _check_states(phi, phit)
    dim, theta = phi.dim, phi.theta
    D = phit.density_matrix() - phi.density_matrix()
    if np.abs(D).max() < 1e-13:
        return DistanceEstimate(0.0, 0.0, zero_element(dim, theta), dim, source="exact")

    xi, size = _link_phase(D, theta)
    cands, its = [], 0
    if size > 1e-12:
        cands, its = _structured(phi, phit, D, xi, opts)
    if np.abs(np.diag(D)).max() > 1e-13:
        val, w = certify(phi, phit, radial_candidate(D, theta, opts.pad), opts.pad)
        cands.append((val, w, None, 0, "radial"))
    if not cands:
        cands.append((*certify(phi, phit, MoyalElement(FockOperator(D, theta)), opts.pad),
                      None, 0, "density"))

    runs = []
    if opts.polish and opts.restarts > 0:
        hp = HermitianProblem(D, theta, opts.pad)
        top = _best(cands)
        seeds = [top[1].op.entries]
        for i in range(opts.restarts - 1):
            seeds.append(_random_hermitian(dim, np.random.default_rng([opts.seed, i])))

        def run(idx):
            if opts.method == "subgradient":
                cap = opts.polish_iter if idx == 0 else opts.screen_iter
                return hp.subgradient(seeds[idx], cap, opts.step, opts.stall_tol)
            if idx == 0:
                return hp.ascend(seeds[0], opts.mus[-1:], opts.polish_iter, opts.stall_tol)
            return hp.ascend(seeds[idx], opts.mus[:1], opts.screen_iter, opts.stall_tol)

        if opts.workers > 1:
            with ThreadPoolExecutor(opts.workers) as ex:
                runs = list(ex.map(run, range(len(seeds))))
        else:
            runs = [run(i) for i in range(len(seeds))]
        its += sum(r.iterations for r in runs)
        if len(runs) > 1 and opts.method == "smooth" and len(opts.mus) > 1:
            j = 1 + int(np.argmax([r.ratio for r in runs[1:]]))
            if runs[j].ratio >= 0.99 * top[0]:
                more = hp.ascend(runs[j].x, opts.mus[1:], opts.polish_iter, opts.stall_tol)
                its += more.iterations
                runs[j] = more
    for r in runs:
        val, w = certify(phi, phit, MoyalElement(FockOperator(r.x, theta)), opts.pad)
        cands.append((val, w, None, r.iterations, "ascent"))

    val, w, beta, _, src = _best(cands)
    notes = ()
    if runs and not runs[0].converged:
        notes = ("iteration cap reached",)
    return DistanceEstimate(val, math.inf, w, dim, beta, its, len(runs), src, notes)


def detect_translation(phi, phit, tol=1e-10):
    """kappa with phit = phi_kappa, or None.

    The candidate comes from first moments: phi_kappa(a) - phi(a) = kappa/sqrt2.
    """
    _check_states(phi, phit)
    if phi.weights != phit.weights:
        return None
    a = FockOperator(ladder(phi.dim, phi.theta), phi.theta)
    kappa = np.sqrt(2) * difference(phi, phit, a)
    if abs(kappa) < 1e-14:
        return None
    try:
        moved = translate_state(phi, kappa)
    except TruncationOverflowError:
        return None
    if overlap(moved, phit) >= 1 - tol:
        return complex(kappa)
    return None


def _double_value(phi, i, phit, j, b, pad):
    """|phi(b_i) - phi~(b_j)| / max(norm, 1), b_1 and b_2 being the two parts."""
    parts = {1: b.first, 2: b.second}
    norm = double_lipschitz_norm(b, pad)
    val = abs(evaluate(phi, parts[i]) - evaluate(phit, parts[j]))
    return val / max(norm, 1.0), norm


def double_distance(phi, i, phit, j, lam, kappa_hint=None, opts=None, d1_upper=None):
    """Estimate the distance between phi on sheet i and phi~ on sheet j.

    Sheets are 1 and 2 with internal Dirac parameter ``lam``.  For states on
    different sheets the lower bound is the Pythagoras witness built on the
    best single-sheet witness.  The upper bound is sqrt(|kappa|^2 + lam^-2)
    for translated pairs, 1/lam for equal states, and otherwise
    sqrt2 sqrt(d1_upper^2 + lam^-2) when ``d1_upper`` is supplied.
    """
    opts = opts or SolverOptions()
    if i not in (1, 2) or j not in (1, 2):
        raise InvalidParameterError("sheets must be 1 or 2")
    if not (lam > 0 and math.isfinite(lam)):
        raise InvalidParameterError(f"Lambda must be positive, got {lam!r}")
    _check_states(phi, phit)
    dim, theta = phi.dim, phi.theta

    kappa = kappa_hint
    same = np.abs(phit.density_matrix() - phi.density_matrix()).max() < 1e-13
    if kappa is None and not same:
        kappa = detect_translation(phi, phit)

    if same:
        single = DistanceEstimate(0.0, 0.0, zero_element(dim, theta), dim, source="exact")
    elif kappa is not None:
        single = translation_distance(phi, kappa, opts)
    else:
        single = maximize_distance(phi, phit, opts)
        if d1_upper is not None:
            single = DistanceEstimate(single.lower, d1_upper, single.witness, dim,
                                      single.beta, single.iterations, single.restarts,
                                      single.source, single.notes)

    if i == j:
        w = single.witness
        b = DoubleElement(w, w, lam)
        return DistanceEstimate(single.lower, single.upper, b, dim, single.beta,
                                single.iterations, single.restarts, single.source, single.notes)

    pw = pythagoras_witness(single.lower, lam, single.witness, opts.pad)
    b = pw.element
    if i == 2:
        b = DoubleElement(b.second, b.first, lam)
    val, _ = _double_value(phi, i, phit, j, b, opts.pad)
    if same:
        upper = 1 / lam
    elif kappa is not None:
        upper = math.sqrt(abs(kappa) ** 2 + lam**-2)
    elif math.isfinite(single.upper):
        upper = math.sqrt(2) * math.sqrt(single.upper**2 + lam**-2)
    else:
        upper = math.inf
    return DistanceEstimate(val, upper, b, dim, single.beta, single.iterations,
                            single.restarts, "pythagoras", single.notes)


def witness_is_feasible(estimate, pad=DEFAULT_PAD, tol=BALL_TOL):
    w = estimate.witness
    if isinstance(w, DoubleElement):
        return double_lipschitz_norm(w, pad) <= 1 + tol
    return lipschitz_seminorm(w, pad) <= 1 + tol
