"""Self-check suites behind the command-line ``verify`` gate.

Each suite runs a fixed-seed batch of identity, stability or scaling
checks and reports one pass/fail line per check.  Suites are sized to
finish in seconds on a laptop core.
"""

import numpy as np
from dataclasses import dataclass

from . import analytic, diagnostics, geometry, kernel, optimize
from .functional import QuotientSetup, bilinear, gradient, lp_functional, quotient


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def _check(name, value, tolerance, detail="", lower=None):
    if lower is not None:
        passed = value >= lower
    else:
        passed = value <= tolerance
    return CheckResult(name=name, passed=bool(passed), value=float(value),
                       tolerance=float(tolerance), detail=detail)


def _fd_gradient(setup, m, f, step=1e-5):
    g = np.empty_like(f)
    for i in range(f.size):
        up = f.copy(); up[i] += step
        dn = f.copy(); dn[i] -= step
        g[i] = (quotient(setup, m, up) - quotient(setup, m, dn)) / (2.0 * step)
    return g


def suite_identities(seed=0):
    rng = np.random.default_rng(seed)
    checks = []

    torus = geometry.build_flat_torus(1, 1.0, 24)
    K = kernel.assemble(torus, kernel.KernelSpec(alpha=0.5))
    setup = QuotientSetup(K, 1.5, "maximize")
    f = rng.uniform(0.2, 1.0, torus.node_count)

    j1 = quotient(setup, torus, f)
    j2 = quotient(setup, torus, 3.7 * f)
    checks.append(_check("quotient homogeneity J(cf) = J(f)",
                         abs(j2 - j1) / abs(j1), 1e-12))

    g = rng.uniform(0.2, 1.0, torus.node_count)
    b1 = bilinear(K, torus, f, g)
    b2 = bilinear(K, torus, g, f)
    checks.append(_check("bilinear symmetry", abs(b1 - b2) / abs(b1), 1e-12))

    lhs = (torus.weights * g) @ (K.values @ (torus.weights * f))
    rhs = (torus.weights * f) @ (K.values @ (torus.weights * g))
    checks.append(_check("weighted self-adjointness", abs(lhs - rhs) / abs(lhs), 1e-12))

    grad_err = 0.0
    for _ in range(5):
        u = rng.uniform(0.2, 1.0, torus.node_count)
        ga = gradient(setup, torus, u)
        gf = _fd_gradient(setup, torus, u)
        grad_err = max(grad_err, float(np.max(np.abs(ga - gf) / (1.0 + np.abs(gf)))))
    checks.append(_check("gradient vs finite differences", grad_err, 1e-6))

    for mode in ("geodesic", "chordal"):
        circle = geometry.build_sphere(1, 256, mode)
        Kc = kernel.assemble(circle, kernel.KernelSpec(alpha=0.5))
        image = kernel.apply(Kc, circle, np.ones(circle.node_count))
        spread = (image.max() - image.min()) / image.mean()
        checks.append(_check(f"constant image spread on circle ({mode})", spread, 1e-6))

    sphere = geometry.build_sphere(2, 400, "chordal")
    centers = [int(np.argmax(sphere.nodes @ e)) for e in
               [np.array(v, float) for v in
                [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]]]
    caps = [(c, 2.6) for c in centers]
    part = diagnostics.build_partition(sphere, caps, 1.5)
    defect = float(np.max(np.abs((part.etas ** 1.5).sum(axis=0) - 1.0)))
    checks.append(_check("partition normalization defect", defect, 1e-10))

    q = diagnostics.conjugate_exponent(2, 0.8, 10.0 / 7.0)
    Ka = kernel.assemble(sphere, kernel.KernelSpec(alpha=0.8))
    Kb = kernel.assemble(sphere, kernel.KernelSpec(alpha=1.8))
    fr = rng.uniform(0.0, 1.0, sphere.node_count)
    lhs, _ = diagnostics.commutator_norm(sphere, Ka, Kb, fr, np.full(sphere.node_count, 0.7), q)
    checks.append(_check("commutator vanishes for constant eta", lhs, 1e-12))

    circle = geometry.build_sphere(1, 400, "chordal")
    Kr = kernel.assemble(circle, kernel.KernelSpec(alpha=2.0))
    setup_r = QuotientSetup(Kr, 2.0 / 3.0, "minimize")
    res = optimize.minimize_quotient(setup_r, circle)
    cv = diagnostics.el_constancy(res, Kr, circle, 2.0 / 3.0)
    checks.append(_check("Euler-Lagrange constancy on round circle", cv, 1e-6))

    return checks


def _sup_constants(n_list, build, alpha, p, reversed_regime, seed, samples=50):
    rng = np.random.default_rng(seed)
    sups = []
    for n_nodes in n_list:
        m = build(n_nodes)
        K = kernel.assemble(m, kernel.KernelSpec(alpha=alpha))
        sup = 0.0
        for _ in range(samples):
            f = rng.uniform(0.0, 1.0, m.node_count)
            prof = diagnostics.weak_type_profile(K, m, f, p, reversed_regime)
            sup = max(sup, prof.sup_constant)
        sups.append(sup)
    return np.asarray(sups)


def suite_weaktype(seed=0, n_list=(500, 1000, 2000)):
    checks = []
    sups = _sup_constants(n_list, lambda N: geometry.build_sphere(2, N, "chordal"),
                          alpha=1.0, p=4.0 / 3.0, reversed_regime=False, seed=seed)
    slope = analytic.fit_power_law(n_list, sups).exponent
    checks.append(_check("classical weak-type sup stability (log-log slope)",
                         abs(slope), 0.1, detail=f"sups={sups.round(4).tolist()}"))

    sups_r = _sup_constants(n_list, lambda N: geometry.build_sphere(1, N, "chordal"),
                            alpha=2.0, p=2.0 / 3.0, reversed_regime=True, seed=seed + 1)
    slope_r = analytic.fit_power_law(n_list, sups_r).exponent
    checks.append(_check("reversed weak-type sup stability (log-log slope)",
                         abs(slope_r), 0.1, detail=f"sups={sups_r.round(4).tolist()}"))

    m = geometry.build_sphere(2, 500, "chordal")
    K = kernel.assemble(m, kernel.KernelSpec(alpha=1.0))
    prof = diagnostics.weak_type_profile(K, m, np.ones(m.node_count), 4.0 / 3.0)
    mono = float(np.max(np.diff(prof.measures)))
    checks.append(_check("classical measures nonincreasing in lambda", mono, 0.0))
    return checks


def suite_epsilon(seed=0):
    rng = np.random.default_rng(seed)
    checks = []
    alpha, n = 0.5, 1
    p = 2.0 * n / (n + alpha)  # critical: flat constant has a closed form
    for n_nodes in (300, 600):
        circle = geometry.build_sphere(1, n_nodes, "geodesic")
        caps = [(0, 2.0), (n_nodes // 2, 2.0)]
        part = diagnostics.build_partition(circle, caps, p)
        samples = [np.ones(n_nodes)] + [rng.uniform(0.0, 1.0, n_nodes) for _ in range(20)]
        n_est, c_eps, all_hold = diagnostics.epsilon_level_check(
            circle, part, samples, alpha, p, epsilon=0.1)
        checks.append(_check(f"localized bound holds (N={n_nodes})",
                             0.0 if all_hold else 1.0, 0.5,
                             detail=f"N_est={n_est:.6f} C_eps={c_eps:.6f}"))
        checks.append(_check(f"empirical C(eps) finite (N={n_nodes})",
                             0.0 if np.isfinite(c_eps) else 1.0, 0.5,
                             detail=f"C_eps={c_eps:.6f}"))
    return checks


def suite_young(seed=0):
    rng = np.random.default_rng(seed)
    torus = geometry.build_flat_torus(1, 1.0, 64)
    checks = []

    ratios = []
    for _ in range(30):
        coeffs = rng.uniform(0.2, 1.0, 3)
        g = rng.uniform(0.1, 1.0, torus.node_count)
        h = lambda d, c=coeffs: c[0] + c[1] * np.exp(-4.0 * d) + c[2] * d
        out = diagnostics.young_check(torus, g, h, p=1.5, q=1.5, r=3.0)
        ratios.append(out.constant)
    ratios = np.asarray(ratios)
    checks.append(_check("classical convolution constants bounded",
                         float(ratios.max()), 10.0,
                         detail=f"max={ratios.max():.4f} min={ratios.min():.4f}"))

    ratios_r = []
    for _ in range(30):
        coeffs = rng.uniform(0.2, 1.0, 3)
        g = rng.uniform(0.1, 1.0, torus.node_count)
        h = lambda d, c=coeffs: c[0] + c[1] * np.exp(-4.0 * d) + c[2] * d
        out = diagnostics.young_check(torus, g, h, p=0.5, q=-0.5, r=-1.0,
                                      reversed_regime=True)
        ratios_r.append(out.constant)
    ratios_r = np.asarray(ratios_r)
    checks.append(_check("conversed convolution constants uniformly positive",
                         float(ratios_r.min()), 0.0,
                         lower=1e-6, detail=f"min={ratios_r.min():.4f}"))
    return checks


def suite_bubbles(seed=0):
    checks = []
    n, alpha = 2, 1.0

    errs = []
    for n_nodes in (1250, 5000):
        patch = geometry.build_euclidean_patch(n, 16.0, n_nodes)
        K = kernel.assemble(patch, kernel.KernelSpec(alpha=alpha))
        b = analytic.BubbleParams(epsilon=1.0, center=np.zeros(n), n=n, alpha=alpha)
        f = analytic.bubble_eval(b, patch.nodes)
        image = kernel.apply(K, patch, f)
        target = analytic.funk_hecke_image(b, patch.nodes)
        interior = (patch.nodes ** 2).sum(axis=1) <= 4.0 ** 2
        errs.append(float(np.max(np.abs(image[interior] - target[interior])
                                 / target[interior])))
    checks.append(_check("bubble image matches closed form (fine level)", errs[-1], 0.08,
                         detail=f"errors={[f'{e:.2e}' for e in errs]}"))
    checks.append(_check("bubble image error halves at 4x nodes",
                         errs[1] / errs[0], 0.65,
                         detail=f"ratio={errs[1] / errs[0]:.3f}"))

    ratios = (4.0, 8.0, 16.0, 32.0)
    for nn in (2, 3):
        one = analytic.measure_truncation_term_one(nn, min(1.0, nn - 1.0), ratios)
        fit = analytic.fit_power_law(ratios, one)
        checks.append(_check(f"truncation term I slope is -n (n={nn})",
                             abs(fit.exponent + nn) / nn, 0.10,
                             detail=f"slope={fit.exponent:.3f}"))
    a2 = 1.0
    two = analytic.measure_truncation_term_two(2, a2, ratios)
    fit2 = analytic.fit_power_law(ratios, two)
    checks.append(_check("truncation term II slope is -(n+alpha)",
                         abs(fit2.exponent + 2 + a2) / (2 + a2), 0.15,
                         detail=f"slope={fit2.exponent:.3f}"))

    lambdas = [1.0 / 8.0, 1.0 / 12.0, 1.0 / 16.0, 1.0 / 24.0]
    for a3 in (1.0, 4.0):
        fit3 = analytic.fit_mass_term(3, a3, 1.0, lambdas, n_nodes=1500)
        checks.append(_check(f"curvature term slope is n-2 (alpha={a3})",
                             abs(fit3.exponent - 1.0), 0.10,
                             detail=f"slope={fit3.exponent:.3f}"))
    return checks


SUITES = {
    "identities": suite_identities,
    "weaktype": suite_weaktype,
    "epsilon": suite_epsilon,
    "young": suite_young,
    "bubbles": suite_bubbles,
}


def run_suite(name, seed=0):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed=seed)
