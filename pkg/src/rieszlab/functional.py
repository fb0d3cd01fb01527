"""Energy quotient machinery: L^p functionals, bilinear energy, gradient.

The quotient J(f) = B(f, f) / ||f||_p^2 with B the kernel bilinear form
is the object optimized throughout.  For p < 1 the L^p expression is not
a norm (the triangle inequality fails) but the same formula applies; all
functions below use (sum_i w_i f_i^p)^(1/p) verbatim.
"""

import numpy as np
from dataclasses import dataclass

# relative floor applied to densities before f^(p-1) when p < 1
DEFAULT_FLOOR = 1e-12


@dataclass(frozen=True)
class Density:
    """Nonnegative nodal function together with its manifold."""

    values: np.ndarray
    manifold: object = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if np.any(self.values < 0.0):
            raise ValueError("density values must be nonnegative")


def as_values(f):
    """Accept a Density or a plain array."""
    return np.asarray(getattr(f, "values", f), dtype=float)


def floor_density(f, rel=DEFAULT_FLOOR):
    """Clip a density away from zero at a relative floor (for p < 1)."""
    v = as_values(f)
    top = v.max()
    if top <= 0.0:
        raise ValueError("cannot floor an identically zero density")
    return np.maximum(v, rel * top)


@dataclass(frozen=True)
class QuotientSetup:
    """Kernel, exponent p and optimization direction for the quotient."""

    K: object  # KernelMatrix
    p: float
    regime: str  # "maximize" (alpha < n) or "minimize" (alpha > n)

    def __post_init__(self):
        if self.regime not in ("maximize", "minimize"):
            raise ValueError(f"unknown regime {self.regime!r}")
        n = self.K.manifold.dim
        alpha = self.K.spec.alpha
        if self.regime == "maximize":
            if not alpha < n:
                raise ValueError("maximize regime requires alpha < n")
            if not self.p > 1.0:
                raise ValueError("maximize regime requires p > 1")
        else:
            if not alpha > n:
                raise ValueError("minimize regime requires alpha > n")
            if not 0.0 < self.p < 1.0:
                raise ValueError("minimize regime requires p in (0, 1)")

    @property
    def critical_p(self):
        n = self.K.manifold.dim
        return 2.0 * n / (n + self.K.spec.alpha)


def lp_functional(f, m, p):
    """(sum_i w_i f_i^p)^(1/p); for p < 1 the same formula, not a norm."""
    if p <= 0.0:
        raise ValueError("p must be positive")
    v = as_values(f)
    if np.any(v < 0.0):
        raise ValueError("lp_functional requires nonnegative entries")
    return float((m.weights @ v ** p) ** (1.0 / p))


def bilinear(K, m, f, g):
    """Double sum  sum_ij w_i w_j f_i k(d_ij) g_j,  symmetric in (f, g)."""
    fv, gv = as_values(f), as_values(g)
    if fv.shape != (m.node_count,) or gv.shape != (m.node_count,):
        raise ValueError("density shape does not match the manifold")
    return float((m.weights * fv) @ K.values @ (m.weights * gv))


def quotient(setup, m, f):
    """J(f) = B(f, f) / ||f||_p^2.  Homogeneous of degree zero."""
    v = as_values(f)
    norm = lp_functional(v, m, setup.p)
    if norm == 0.0:
        raise ValueError("quotient of the zero density is undefined")
    return bilinear(setup.K, m, v, v) / norm ** 2


def gradient(setup, m, f):
    """Euclidean gradient of J at f, entrywise.

    grad_i J = [2 w_i (K_w f)_i - J(f) * 2 ||f||_p^(2-p) w_i f_i^(p-1)]
               / ||f||_p^2,   with (K_w f)_i = sum_j k_ij w_j f_j.
    """
    p = setup.p
    v = as_values(f)
    if p < 1.0 and np.any(v <= 0.0):
        raise ValueError("gradient with p < 1 requires strictly positive entries")
    w = m.weights
    kwf = setup.K.values @ (w * v)
    norm = lp_functional(v, m, p)
    if norm == 0.0:
        raise ValueError("gradient of the zero density is undefined")
    j = (w * v) @ kwf / norm ** 2
    return (2.0 * w * kwf - j * 2.0 * norm ** (2.0 - p) * w * v ** (p - 1.0)) / norm ** 2
