"""Quadrature discretizations of model manifolds.

Each manifold is a finite node set with positive quadrature weights and a
dense pairwise distance matrix.  Supported models: round spheres S^1, S^2,
S^3 (geodesic or chordal distance), flat tori, and Euclidean balls.
Constructions are deterministic; the resulting objects are immutable and
safe to share across threads.
"""

import json
import math

import numpy as np
from dataclasses import dataclass
from scipy.spatial.distance import cdist

SPHERE_KINDS = ("sphere-geodesic", "sphere-chordal")
ALL_KINDS = SPHERE_KINDS + ("flat-torus", "euclidean-patch")

# surface measure of the unit sphere S^n
SPHERE_SURFACE = {1: 2.0 * math.pi, 2: 4.0 * math.pi, 3: 2.0 * math.pi ** 2}

# golden ratio (S^2 lattice) and plastic number (S^3 lattice)
_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
_PLASTIC = 1.32471795724474602596


def unit_ball_volume(n):
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class QuadratureManifold:
    """Discretized compact manifold: nodes, weights, pairwise distances.

    ``nodes`` are embedding coordinates (R^{n+1} for spheres, R^n
    otherwise), ``weights`` carry units of n-volume, and ``distances`` is
    the exact model metric sampled pairwise (symmetric, zero diagonal).
    """

    dim: int
    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    distances: np.ndarray
    total_volume: float

    @property
    def node_count(self):
        return int(self.weights.size)

    @property
    def diameter(self):
        return float(self.distances.max())

    def __post_init__(self):
        for arr in (self.nodes, self.weights, self.distances):
            arr.setflags(write=False)


def _symmetrize(d):
    # exact symmetry and zero diagonal, independent of BLAS details
    out = np.triu(d, 1)
    out = out + out.T
    return out


def _finalize(dim, kind, nodes, weights, distances, total_volume):
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    distances = np.ascontiguousarray(distances, dtype=float)
    if np.any(weights <= 0.0):
        raise ValueError("quadrature weights must be strictly positive")
    return QuadratureManifold(dim, kind, nodes, weights, distances, float(total_volume))


def sphere_nodes(n, n_nodes):
    """Quasi-uniform deterministic node set on the unit sphere S^n."""
    if n == 1:
        t = 2.0 * math.pi * np.arange(n_nodes) / n_nodes
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if n == 2:
        # Fibonacci lattice: equal-area latitudes, golden-angle longitudes
        i = np.arange(n_nodes)
        z = 1.0 - (2.0 * i + 1.0) / n_nodes
        theta = 2.0 * math.pi * i / _GOLDEN
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    if n == 3:
        # Kronecker lattice in [0,1)^3 pushed through equal-measure
        # Hopf-style coordinates: sin^2(eta) uniform, angles uniform.
        i = np.arange(n_nodes)[:, None]
        alphas = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC ** 2, 1.0 / _PLASTIC ** 3])
        u = np.mod(0.5 + i * alphas[None, :], 1.0)
        eta = np.arcsin(np.sqrt(u[:, 0]))
        t1 = 2.0 * math.pi * u[:, 1]
        t2 = 2.0 * math.pi * u[:, 2]
        se, ce = np.sin(eta), np.cos(eta)
        return np.stack([se * np.cos(t1), se * np.sin(t1),
                         ce * np.cos(t2), ce * np.sin(t2)], axis=1)
    raise ValueError(f"unsupported sphere dimension n={n} (need 1, 2 or 3)")


def build_sphere(n, n_nodes, mode="geodesic"):
    """Equal-weight quasi-uniform quadrature on the unit sphere S^n.

    ``mode`` selects the stored pairwise distance: ``geodesic`` is the
    arc length arccos(x.y), ``chordal`` the straight-line distance in the
    embedding R^{n+1}.
    """
    if n not in (1, 2, 3):
        raise ValueError(f"unsupported sphere dimension n={n}")
    if n_nodes < 4:
        raise ValueError(f"need at least 4 nodes, got {n_nodes}")
    if mode not in ("geodesic", "chordal"):
        raise ValueError(f"unknown sphere mode {mode!r}")
    nodes = sphere_nodes(n, n_nodes)
    area = SPHERE_SURFACE[n]
    weights = np.full(n_nodes, area / n_nodes)
    if mode == "geodesic":
        gram = np.clip(nodes @ nodes.T, -1.0, 1.0)
        dist = _symmetrize(np.arccos(gram))
    else:
        dist = _symmetrize(cdist(nodes, nodes))
    return _finalize(n, f"sphere-{mode}", nodes, weights, dist, area)


def torus_distances(coords, side):
    """Flat-torus distance: per-axis nearest periodic translate."""
    d2 = np.zeros((coords.shape[0], coords.shape[0]))
    for a in range(coords.shape[1]):
        da = np.abs(coords[:, a][:, None] - coords[:, a][None, :])
        da = np.minimum(da, side - da)
        d2 += da * da
    return _symmetrize(np.sqrt(d2))


def build_flat_torus(n, side, per_axis, max_nodes=16384):
    """Uniform grid on the flat torus (R/(side Z))^n with cell weights."""
    if n < 1 or per_axis < 2 or side <= 0.0:
        raise ValueError("need n >= 1, per_axis >= 2, side > 0")
    n_nodes = per_axis ** n
    if n_nodes > max_nodes:
        raise ValueError(f"per_axis^n = {n_nodes} exceeds node budget {max_nodes}")
    h = side / per_axis
    axes = [h * np.arange(per_axis)] * n
    grid = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([g.ravel() for g in grid], axis=1)
    weights = np.full(n_nodes, h ** n)
    dist = torus_distances(coords, side)
    return _finalize(n, "flat-torus", coords, weights, dist, side ** n)


def _patch_layout(n, n_nodes):
    # balance radial vs angular spacing for the product rule
    if n == 2:
        n_r = max(2, round(math.sqrt(n_nodes / math.pi)))
        n_ang = max(4, round(n_nodes / n_r))
    else:
        n_r = max(2, round((n_nodes / math.pi) ** (1.0 / 3.0)))
        n_ang = max(8, round(n_nodes / n_r))
    return n_r, n_ang


def build_euclidean_patch(n, radius, n_nodes):
    """Quadrature on the ball B_radius in R^n with Euclidean distances.

    n=1 uses Gauss-Legendre on [-radius, radius]; n=2,3 use a
    Gauss-Legendre radial rule times an equal-weight angular lattice.
    The weight sum reproduces the ball volume to machine precision, and
    the actual node count may differ slightly from the request for n>1
    (product-rule rounding).
    """
    if n not in (1, 2, 3):
        raise ValueError(f"unsupported patch dimension n={n}")
    if radius <= 0.0 or n_nodes < 4:
        raise ValueError("need radius > 0 and at least 4 nodes")
    if n == 1:
        x, wx = np.polynomial.legendre.leggauss(n_nodes)
        nodes = (radius * x)[:, None]
        weights = radius * wx
        dist = _symmetrize(cdist(nodes, nodes))
        return _finalize(1, "euclidean-patch", nodes, weights, dist, 2.0 * radius)
    n_r, n_ang = _patch_layout(n, n_nodes)
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * wx
    if n == 2:
        t = 2.0 * math.pi * np.arange(n_ang) / n_ang
        dirs = np.stack([np.cos(t), np.sin(t)], axis=1)
        w_ang = np.full(n_ang, 2.0 * math.pi / n_ang)
    else:
        dirs = sphere_nodes(2, n_ang)
        w_ang = np.full(n_ang, 4.0 * math.pi / n_ang)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    weights = ((wr * r ** (n - 1))[:, None] * w_ang[None, :]).reshape(-1)
    dist = _symmetrize(cdist(nodes, nodes))
    return _finalize(n, "euclidean-patch", nodes, weights, dist,
                     unit_ball_volume(n) * radius ** n)


def rescale(m, c):
    """Dilate a manifold by c > 0: distances scale by c, weights by c^n."""
    if c <= 0.0:
        raise ValueError("scale factor must be positive")
    return _finalize(m.dim, m.kind, m.nodes * c, m.weights * c ** m.dim,
                     m.distances * c, m.total_volume * c ** m.dim)


def manifold_to_json(m):
    """JSON document {dim, kind, nodes, weights}; distances are recomputed on load."""
    return {
        "dim": m.dim,
        "kind": m.kind,
        "nodes": m.nodes.tolist(),
        "weights": m.weights.tolist(),
    }


def manifold_from_json(doc):
    dim = int(doc["dim"])
    kind = doc["kind"]
    nodes = np.asarray(doc["nodes"], dtype=float)
    weights = np.asarray(doc["weights"], dtype=float)
    volume = float(weights.sum())
    if kind not in ALL_KINDS:
        raise ValueError(f"unknown manifold kind {kind!r}")
    if kind == "sphere-geodesic":
        radius = float(np.linalg.norm(nodes[0]))
        unit = nodes / radius
        gram = np.clip(unit @ unit.T, -1.0, 1.0)
        dist = _symmetrize(radius * np.arccos(gram))
    elif kind == "sphere-chordal" or kind == "euclidean-patch":
        dist = _symmetrize(cdist(nodes, nodes))
    else:  # flat-torus: side recovered from the cell volume
        side = volume ** (1.0 / dim)
        dist = torus_distances(nodes, side)
    return _finalize(dim, kind, nodes, weights, dist, volume)


def save_manifold(m, path):
    with open(path, "w") as fh:
        json.dump(manifold_to_json(m), fh)


def load_manifold(path):
    with open(path) as fh:
        return manifold_from_json(json.load(fh))
