"""Iterative solvers for the extremal quotient values.

The primary iteration is the Euler-Lagrange fixed-point map

    f  <-  (K_w f)^(1/(p-1)),   then normalize ||f||_p = 1,

which preserves positivity structurally.  Whenever a fixed-point step
would move the objective the wrong way, the solver falls back to a
projected gradient step with backtracking, so accepted iterates are
monotone in J.  A subcritical continuation in p with warm starts tracks
the concentration of the extremals.
"""

import numpy as np
from dataclasses import dataclass, field

from . import functional
from .functional import as_values

# slack for the monotonicity test on accepted iterates
_MONOTONE_SLACK = 1e-12
_BACKTRACK_STEPS = 60


@dataclass
class QuotientResult:
    """Converged (or best-effort) extremal of the quotient."""

    value: float
    extremal: np.ndarray
    residual: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    floor_fraction: float = 0.0

    def to_json(self, include_extremal=False, include_history=False):
        doc = {
            "value": self.value,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
        }
        if include_extremal:
            doc["extremal"] = self.extremal.tolist()
        if include_history:
            doc["history"] = list(self.history)
        return doc


@dataclass
class ContinuationEntry:
    p: float
    value: float
    concentration: float
    iterations: int
    converged: bool
    extremal_summary: dict


@dataclass
class ContinuationTrace:
    """Per-p record along the subcritical path, p ascending."""

    entries: list = field(default_factory=list)


def initial_density(m, kind="constant", center=0, width=None, rng=None):
    """Standard initial densities: constant, bubble-seeded, or random."""
    n_nodes = m.node_count
    if kind == "constant":
        return np.ones(n_nodes)
    if kind == "bubble":
        if width is None:
            width = 0.25 * m.diameter
        d = m.distances[center]
        return (width / (width ** 2 + d ** 2)) ** ((m.dim + 1.0) / 2.0)
    if kind == "random":
        rng = np.random.default_rng(rng)
        return rng.uniform(0.1, 1.0, n_nodes)
    raise ValueError(f"unknown init kind {kind!r}")


def _normalize(f, w, p):
    return f / (w @ f ** p) ** (1.0 / p)


def _solve(setup, m, init, tol, max_iter, minimize):
    w = m.weights
    K = setup.K.values
    p = setup.p
    sign = -1.0 if minimize else 1.0
    expo = 1.0 / (p - 1.0)

    # iterates stay normalized to ||f||_p = 1, so J(f) = (w f) . K(w f)
    f = _normalize(as_values(init).copy(), w, p)
    g = K @ (w * f)
    j = float((w * f) @ g)
    history = [j]
    floor_hits = 0.0
    residual = np.inf

    for it in range(1, max_iter + 1):
        if minimize:
            floor = functional.DEFAULT_FLOOR * g.max()
            floor_hits = max(floor_hits, float(np.mean(g < floor)))
            base = np.maximum(g, floor)
        else:
            base = np.maximum(g, 0.0)
        cand = _normalize(base ** expo, w, p)
        g_cand = K @ (w * cand)
        jc = float((w * cand) @ g_cand)

        if sign * (jc - j) < -_MONOTONE_SLACK * abs(j):
            # fixed-point step regressed: projected gradient with backtracking
            d = sign * 2.0 * w * (g - j * f ** (p - 1.0))
            step = 0.5 * f.max() / (np.abs(d).max() + 1e-300)
            cand = None
            for _ in range(_BACKTRACK_STEPS):
                trial = np.maximum(f + step * d, 0.0)
                if trial.max() > 0.0:
                    if minimize:
                        trial = functional.floor_density(trial)
                    trial = _normalize(trial, w, p)
                    g_trial = K @ (w * trial)
                    jt = float((w * trial) @ g_trial)
                    if sign * (jt - j) > 0.0:
                        cand, g_cand, jc = trial, g_trial, jt
                        break
                step *= 0.5
            if cand is None:
                # stationary: no admissible step improves the objective
                return QuotientResult(j, f, 0.0, it, True, history, floor_hits)

        residual = float(np.abs(cand - f).max())
        f, g, j = cand, g_cand, jc
        history.append(j)
        if residual <= tol:
            return QuotientResult(j, f, residual, it, True, history, floor_hits)

    return QuotientResult(j, f, residual, max_iter, False, history, floor_hits)


def maximize_quotient(setup, m, init=None, tol=1e-9, max_iter=5000):
    """Supremum of J for alpha < n, p > 1 (classical regime)."""
    if setup.regime != "maximize":
        raise ValueError("setup regime must be 'maximize'")
    if init is None:
        init = initial_density(m)
    v = as_values(init)
    if np.any(v < 0.0) or v.max() == 0.0:
        raise ValueError("init must be nonnegative and not identically zero")
    return _solve(setup, m, v, tol, max_iter, minimize=False)


def minimize_quotient(setup, m, init=None, tol=1e-9, max_iter=5000):
    """Infimum of J for alpha > n, p in (0, 1) (reversed regime)."""
    if setup.regime != "minimize":
        raise ValueError("setup regime must be 'minimize'")
    if init is None:
        init = initial_density(m)
    v = as_values(init)
    if np.any(v <= 0.0):
        raise ValueError("init must be strictly positive in the minimize regime")
    return _solve(setup, m, v, tol, max_iter, minimize=True)


def multi_start(setup, m, inits, tol=1e-9, max_iter=5000):
    """Run the regime's solver from several initial densities and keep the
    best converged value.  The quotient is not concave, so distinct starts
    may reach distinct critical points; exhaustiveness is not claimed."""
    run = maximize_quotient if setup.regime == "maximize" else minimize_quotient
    sign = 1.0 if setup.regime == "maximize" else -1.0
    best = None
    for init in inits:
        res = run(setup, m, init=init, tol=tol, max_iter=max_iter)
        if best is None or sign * (res.value - best.value) > 0.0:
            best = res
    return best


def concentration_metric(f, m, r, p):
    """Largest fraction of p-mass inside any metric ball of radius r.

    Values near 1 signal single-point concentration; values bounded away
    from 1 at two separated centers signal a spread-out extremal.  Ties
    between centers break to the lowest node index.
    """
    if r <= 0.0:
        raise ValueError("radius must be positive")
    v = as_values(f)
    mass = m.weights * v ** p
    total = mass.sum()
    if total <= 0.0:
        raise ValueError("density carries no p-mass")
    ball = (m.distances < r) @ mass
    return float(ball.max() / total)


def continuation(setup, m, p_list, tol=1e-9, max_iter=5000, radius=None):
    """Subcritical path: minimize at each p, warm-started from the last extremal.

    ``p_list`` must be strictly ascending and stay below the critical
    exponent 2n/(n+alpha).  Solver failures are recorded per entry and
    the path continues.
    """
    if setup.regime != "minimize":
        raise ValueError("continuation runs in the minimize regime")
    ps = [float(p) for p in p_list]
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise ValueError("p_list must be strictly ascending")
    critical = setup.critical_p
    if ps and ps[-1] >= critical:
        raise ValueError(f"p_list must stay below the critical exponent {critical}")
    if radius is None:
        radius = 0.25 * m.diameter

    trace = ContinuationTrace()
    warm = initial_density(m)
    for p in ps:
        sub = setup_with_p(setup, p)
        res = minimize_quotient(sub, m, init=warm, tol=tol, max_iter=max_iter)
        conc = concentration_metric(res.extremal, m, radius, p)
        peak = int(np.argmax(res.extremal))
        trace.entries.append(ContinuationEntry(
            p=p, value=res.value, concentration=conc,
            iterations=res.iterations, converged=res.converged,
            extremal_summary={
                "min": float(res.extremal.min()),
                "max": float(res.extremal.max()),
                "peak_node": peak,
            },
        ))
        if res.converged:
            warm = res.extremal
    return trace


def setup_with_p(setup, p):
    """Same kernel and regime, different exponent."""
    from .functional import QuotientSetup

    return QuotientSetup(K=setup.K, p=p, regime=setup.regime)
