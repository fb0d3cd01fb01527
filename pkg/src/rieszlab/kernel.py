"""Pairwise kernel matrices for the power-law integral operators.

Three kernels are supported on a discretized manifold with distances d:

* ``riesz``           k(d) = d^(alpha-n)
* ``green-sphere``    k(d) = d_chordal^(alpha-n), the zero-mass Green
                      kernel on round spheres (leading coefficient 1)
* ``green-synthetic`` k(d) = (d^(2-n) + A)^((alpha-n)/(2-n)), a model
                      Green kernel with mass constant A >= 0 on
                      Euclidean patches, n >= 3

For alpha < n the singular diagonal is replaced by the exact integral of
the kernel over the ball of volume w_i around the node, so that
values[i][i] * w_i equals the self-cell contribution at leading order.
For alpha > n the kernel extends continuously by zero at the diagonal.
"""

import math

import numpy as np
from dataclasses import dataclass
from scipy.spatial.distance import cdist

from .geometry import QuadratureManifold, unit_ball_volume

KERNEL_MODES = ("riesz", "green-sphere", "green-synthetic")

# dense-storage cap; override per call for larger experiments
DEFAULT_NODE_BUDGET = 16384


@dataclass(frozen=True)
class KernelSpec:
    """Kernel parameters: exponent alpha, kernel family, mass constant."""

    alpha: float
    mode: str = "riesz"
    mass_A: float = 0.0
    delta0: float = math.inf

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.mode not in KERNEL_MODES:
            raise ValueError(f"unknown kernel mode {self.mode!r}")
        if self.mass_A < 0.0:
            raise ValueError("mass constant must be nonnegative")
        if self.delta0 <= 0.0:
            raise ValueError("delta0 must be positive")


@dataclass(frozen=True)
class KernelMatrix:
    """Pure kernel samples k(d_ij), no quadrature weights folded in."""

    values: np.ndarray
    spec: KernelSpec
    manifold: QuadratureManifold

    def __post_init__(self):
        self.values.setflags(write=False)


def _ball_averaged_diagonal(spec, n, weights):
    """values[i][i] such that values[i][i]*w_i = integral of k over the
    ball of volume w_i centered at the node (alpha < n only)."""
    wn = unit_ball_volume(n)
    r = (weights / wn) ** (1.0 / n)
    alpha = spec.alpha
    if spec.mode in ("riesz", "green-sphere"):
        return (n * wn * r ** alpha / alpha) / weights
    # green-synthetic: k(s) s^(n-1) = s^(alpha-1) (1 + A s^(n-2))^e with
    # e = (alpha-n)/(2-n); substitute u = s^alpha to remove the
    # endpoint singularity, then fixed Gauss-Legendre is accurate.
    e = (alpha - n) / (2.0 - n)
    x, wx = np.polynomial.legendre.leggauss(64)
    upper = r ** alpha
    u = 0.5 * upper[:, None] * (x[None, :] + 1.0)
    du = 0.5 * upper[:, None] * wx[None, :]
    g = (1.0 + spec.mass_A * u ** ((n - 2.0) / alpha)) ** e
    integral = (g * du).sum(axis=1) / alpha
    return n * wn * integral / weights


def assemble(m, spec, node_budget=DEFAULT_NODE_BUDGET):
    """Sample the kernel pairwise on a manifold and regularize the diagonal."""
    n = m.dim
    if spec.alpha == n:
        raise ValueError(f"alpha = {spec.alpha} equals the manifold dimension")
    if m.node_count > node_budget:
        raise ValueError(f"{m.node_count} nodes exceed the dense-storage budget {node_budget}")
    if spec.mode == "green-sphere":
        if not m.kind.startswith("sphere"):
            raise ValueError("green-sphere kernel requires a sphere manifold")
        dist = cdist(m.nodes, m.nodes)  # chordal regardless of stored metric
        dist = np.triu(dist, 1)
        dist = dist + dist.T
    else:
        dist = m.distances
    if spec.mode == "green-synthetic":
        if m.kind != "euclidean-patch":
            raise ValueError("green-synthetic kernel requires a euclidean-patch manifold")
        if n < 3:
            raise ValueError("green-synthetic kernel needs n >= 3")
        if math.isfinite(spec.delta0) and m.diameter > spec.delta0:
            raise ValueError("manifold diameter exceeds the declared expansion radius delta0")

    safe = np.where(dist > 0.0, dist, 1.0)
    if spec.mode == "green-synthetic":
        values = (safe ** (2.0 - n) + spec.mass_A) ** ((spec.alpha - n) / (2.0 - n))
    else:
        values = safe ** (spec.alpha - n)

    if spec.alpha > n:
        diag = np.zeros(m.node_count)
    else:
        diag = _ball_averaged_diagonal(spec, n, m.weights)
    values[dist == 0.0] = 0.0
    np.fill_diagonal(values, diag)
    return KernelMatrix(values, spec, m)


def apply(K, m, f):
    """Integral operator at the nodes: (I f)_i = sum_j k(d_ij) w_j f_j."""
    f = np.asarray(getattr(f, "values", f), dtype=float)
    if m is not K.manifold and m.node_count != K.manifold.node_count:
        raise ValueError("manifold does not match the assembled kernel")
    if f.shape != (m.node_count,):
        raise ValueError(f"density shape {f.shape} does not match {m.node_count} nodes")
    if K.spec.alpha > m.dim and np.any(f < 0.0):
        raise ValueError("alpha > n regime requires a nonnegative density")
    return K.values @ (m.weights * f)
