"""Numerical probes of the inequality machinery.

Weak-type distribution profiles (superlevel sets for the classical
regime, sublevel sets for the reversed one), discrete Young and
conversed-Young convolution checks, partitions of unity with the
sum-of-p-th-powers normalization, the localized almost-sharp inequality,
commutator bounds, and the Euler-Lagrange constancy certificate.
"""

import csv

import numpy as np
from dataclasses import dataclass

from . import kernel as kernel_mod
from .functional import as_values, lp_functional

# logarithmic threshold grids resolve the level-set transitions
LAMBDA_GRID_SIZE = 64
# near-neighbor count for the discrete Lipschitz constant
LIPSCHITZ_NEIGHBORS = 8


def conjugate_exponent(n, alpha, p):
    """q with 1/q = 1/p - alpha/n (negative in the reversed regime)."""
    inv = 1.0 / p - alpha / n
    if inv == 0.0:
        raise ValueError("exponent relation degenerates: 1/p equals alpha/n")
    return 1.0 / inv


def _lp_signed(values, weights, p):
    """(sum w |u|^p)^(1/p) for any nonzero real p; p < 0 needs u > 0."""
    v = np.abs(np.asarray(values, dtype=float))
    if p < 0.0 and np.any(v == 0.0):
        raise ValueError("negative exponents need strictly positive values")
    return float((weights @ v ** p) ** (1.0 / p))


@dataclass
class WeakTypeProfile:
    lambdas: np.ndarray
    measures: np.ndarray
    normalized: np.ndarray
    sup_constant: float
    q: float
    reversed_regime: bool


def weak_type_profile(K, m, f, p, reversed_regime=False, grid_size=LAMBDA_GRID_SIZE):
    """Distribution profile of the operator image over a threshold grid.

    Classical: measure(lambda) = volume of {|I f| > lambda}; reversed:
    volume of {|I f| < lambda}.  Each measure is normalized against the
    weak-type bound, lambda^q * measure / ||f||_p^q, and the grid sup is
    reported as the empirical constant.
    """
    fv = as_values(f)
    if reversed_regime and np.any(fv < 0.0):
        raise ValueError("reversed weak-type profile requires f >= 0")
    n = m.dim
    q = conjugate_exponent(n, K.spec.alpha, p)
    norm = lp_functional(np.abs(fv), m, p)
    image = np.abs(K.values @ (m.weights * fv))
    top = image.max()
    if norm == 0.0 or top == 0.0:
        if reversed_regime:
            raise ValueError("reversed profile needs a nonzero density")
        lam = np.array([1.0])
        meas = np.array([0.0])
        return WeakTypeProfile(lam, meas, np.array([0.0]), 0.0, q, False)
    low = image[image > 0.0].min()
    lam = np.geomspace(low, top, grid_size)
    if reversed_regime:
        measures = np.array([m.weights[image < t].sum() for t in lam])
    else:
        measures = np.array([m.weights[image > t].sum() for t in lam])
    normalized = lam ** q * measures / norm ** q
    return WeakTypeProfile(lam, measures, normalized, float(normalized.max()),
                           q, reversed_regime)


def profile_to_csv(profile, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "measure", "normalized"])
        for lam, meas, norm in zip(profile.lambdas, profile.measures,
                                   profile.normalized):
            writer.writerow([format(lam, ".17g"), format(meas, ".17g"),
                             format(norm, ".17g")])


@dataclass
class YoungCheck:
    lhs: float
    rhs: float
    constant: float
    holds: bool


def young_check(m, g, h, p, q, r, reversed_regime=False):
    """Discrete convolution inequality with a radial kernel profile.

    Computes g*h(x) = sum_j g_j h(d(x, x_j)) w_j and compares
    ||g*h||_r against ||g||_q ||h||_p under 1 + 1/r = 1/q + 1/p.
    Classical: p, q, r in (1, inf) and the ratio lhs/rhs is the
    empirical constant of the upper bound.  Conversed: p in (0,1),
    q, r < 0 and the same ratio is the empirical lower-bound constant.
    The profile norm ||h||_p is taken at a fixed base node; on the
    homogeneous models (torus, uniform circle) it is center independent.
    """
    if abs((1.0 + 1.0 / r) - (1.0 / q + 1.0 / p)) > 1e-12:
        raise ValueError("exponents must satisfy 1 + 1/r = 1/q + 1/p")
    if reversed_regime:
        if not (0.0 < p < 1.0 and q < 0.0 and r < 0.0):
            raise ValueError("conversed check needs p in (0,1) and q, r < 0")
    else:
        if not (p > 1.0 and q > 1.0 and r > 1.0):
            raise ValueError("classical check needs p, q, r in (1, inf)")
    gv = as_values(g)
    hvals = h(m.distances)
    conv = hvals @ (m.weights * gv)
    lhs = _lp_signed(conv, m.weights, r)
    h_norm = _lp_signed(h(m.distances[0]), m.weights, p)
    g_norm = _lp_signed(gv, m.weights, q)
    rhs = g_norm * h_norm
    constant = lhs / rhs if rhs > 0.0 else np.inf
    holds = np.isfinite(constant) and (constant > 0.0 if reversed_regime else True)
    return YoungCheck(lhs=lhs, rhs=rhs, constant=float(constant), holds=bool(holds))


@dataclass
class PartitionOfUnity:
    """Bump functions eta_i with sum_i eta_i^p = 1 at every node."""

    etas: np.ndarray     # (k, N)
    p: float
    caps: list           # (center node, radius) pairs


def build_partition(m, caps, p):
    """Cosine-taper bumps on metric caps, normalized so sum eta^p = 1.

    Every node must lie strictly inside at least one cap.
    """
    phis = []
    for center, radius in caps:
        d = m.distances[int(center)]
        phi = np.where(d < radius, np.cos(0.5 * np.pi * np.minimum(d / radius, 1.0)) ** 2, 0.0)
        phis.append(phi)
    phis = np.asarray(phis)
    total = (phis ** p).sum(axis=0)
    uncovered = np.nonzero(total <= 0.0)[0]
    if uncovered.size:
        raise ValueError(f"nodes not covered by any cap: {uncovered[:8].tolist()}")
    etas = phis / total ** (1.0 / p)
    return PartitionOfUnity(etas=etas, p=p, caps=list(caps))


def epsilon_level_check(m, partition, f_samples, alpha, p, epsilon=0.1,
                        flat_constant=None):
    """Localized almost-sharp bound

        ||I_a f||_q^p <= (N + eps)^p ||f||_p^p + C(eps) ||I_{a+1} f||_q^p

    evaluated on each sample.  Returns the flat-constant estimate N, the
    minimal C(eps) making the bound hold across all samples, and whether
    every sample admits a finite constant.  N is exact (closed form) at
    the critical exponent and a cached patch estimate otherwise.
    """
    from .analytic import flat_quotient_constant

    n = m.dim
    if not 0.0 < alpha < n:
        raise ValueError("the localized bound needs alpha in (0, n)")
    if alpha + 1.0 == n:
        raise ValueError("alpha + 1 hits the dimension; choose a different alpha")
    q = conjugate_exponent(n, alpha, p)
    if q <= 0.0:
        raise ValueError("need q > 0, i.e. p < n/alpha")
    if flat_constant is None:
        flat_constant = flat_quotient_constant(n, alpha, p)
    K_a = kernel_mod.assemble(m, kernel_mod.KernelSpec(alpha=alpha))
    K_a1 = kernel_mod.assemble(m, kernel_mod.KernelSpec(alpha=alpha + 1.0))
    need = 0.0
    all_hold = True
    for f in f_samples:
        fv = as_values(f)
        lhs = lp_functional(np.abs(K_a.values @ (m.weights * fv)), m, q) ** p
        main = (flat_constant + epsilon) ** p * lp_functional(np.abs(fv), m, p) ** p
        rest = lp_functional(np.abs(K_a1.values @ (m.weights * fv)), m, q) ** p
        excess = lhs - main
        if excess > 0.0:
            if rest > 0.0:
                need = max(need, excess / rest)
            else:
                all_hold = False
    return flat_constant, need, all_hold


def discrete_lipschitz(m, eta, neighbors=LIPSCHITZ_NEIGHBORS):
    """Max difference quotient of eta over each node's nearest neighbors.

    An underestimate of the true Lipschitz constant, which makes the
    commutator ratio conservative.
    """
    eta = as_values(eta)
    d = m.distances
    best = 0.0
    k = min(neighbors + 1, m.node_count)
    idx = np.argpartition(d, k - 1, axis=1)[:, :k]
    for i in range(m.node_count):
        js = idx[i][idx[i] != i]
        dij = d[i, js]
        good = dij > 0.0
        if good.any():
            best = max(best, float((np.abs(eta[js] - eta[i])[good] / dij[good]).max()))
    return best


def commutator_norm(m, K_alpha, K_alpha_plus_1, f, eta, q):
    """Commutator of multiplication by eta with the integral operator.

    lhs = ||eta (I_a f) - I_a (eta f)||_q; the bound is
    rhs = Lip(eta) * ||I_{a+1} f||_q with the discrete Lipschitz
    constant.  Returns (lhs, rhs).
    """
    fv = as_values(f)
    ev = as_values(eta)
    w = m.weights
    comm = ev * (K_alpha.values @ (w * fv)) - K_alpha.values @ (w * ev * fv)
    lhs = lp_functional(np.abs(comm), m, q)
    lip = discrete_lipschitz(m, ev)
    rhs = lip * lp_functional(np.abs(K_alpha_plus_1.values @ (w * fv)), m, q)
    return lhs, rhs


def el_constancy(result, K, m, p):
    """Coefficient of variation of (K_w f*)_i / (f*_i)^(p-1) over nodes.

    A small value certifies that the converged extremal solves the
    discrete Euler-Lagrange equation with a constant multiplier, i.e.
    constant generalized curvature.
    """
    if not result.converged:
        raise ValueError("el_constancy requires a converged result")
    f = as_values(result.extremal)
    ratio = (K.values @ (m.weights * f)) / f ** (p - 1.0)
    return float(np.std(ratio) / np.mean(ratio))
