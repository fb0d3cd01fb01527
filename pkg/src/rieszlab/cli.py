"""Reproducible experiment runner.

Subcommands
    constant       estimate the extremal quotient on a configured manifold
                   and compare against the sharp sphere constant
    continuation   subcritical path in p with warm starts (minimize regime)
    verify         run a named self-check suite with fixed seeds

One experiment per process.  Reports are JSON with every number rendered
at 17 significant digits, so identical config + seed gives byte-identical
output.  Exit codes: 0 success, 1 config error, 2 non-convergence,
3 verification failure.  With --plots, each report path also renders the
matching figure next to its delimited output.
"""

import argparse
import json
import math
import os
import sys


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# canonical JSON: 17 significant digits, sorted keys, trailing newline


def _render(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{pad}  {json.dumps(str(k))}: {_render(v, indent + 1)}'
                for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{pad}  {_render(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        if math.isnan(obj):
            return "NaN"
        if math.isinf(obj):
            return "Infinity" if obj > 0 else "-Infinity"
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def write_report(doc, path):
    with open(path, "w") as fh:
        fh.write(_render(doc))
        fh.write("\n")


def _fmt(x):
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# config handling


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")


def _section(cfg, name, required=True):
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"config is missing the {name!r} section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    return sec


def _build_manifold(spec):
    from . import geometry

    kind = spec.get("kind")
    try:
        if kind == "sphere":
            return geometry.build_sphere(int(spec["n"]), int(spec["N"]),
                                         spec.get("mode", "geodesic"))
        if kind == "torus":
            return geometry.build_flat_torus(int(spec["n"]), float(spec["L"]),
                                             int(spec["per_axis"]))
        if kind == "patch":
            return geometry.build_euclidean_patch(int(spec["n"]), float(spec["delta"]),
                                                  int(spec["N"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid manifold spec: {exc}")
    raise ConfigError(f"unknown manifold kind {kind!r} (sphere, torus or patch)")


def _build_kernel(manifold, spec):
    from . import kernel

    try:
        ks = kernel.KernelSpec(
            alpha=float(spec["alpha"]),
            mode=spec.get("mode", "riesz"),
            mass_A=float(spec.get("A", 0.0)),
            delta0=float(spec.get("delta0", math.inf)),
        )
        return kernel.assemble(manifold, ks)
    except KeyError as exc:
        raise ConfigError(f"kernel spec is missing {exc}")
    except ValueError as exc:
        if float(spec.get("alpha", -1.0)) == manifold.dim:
            raise ConfigError("alpha equals dimension")
        raise ConfigError(f"invalid kernel spec: {exc}")


def _make_setup(K, solver_spec):
    from .functional import QuotientSetup

    regime = solver_spec.get("regime")
    if regime not in ("maximize", "minimize"):
        raise ConfigError(f"solver regime must be maximize or minimize, got {regime!r}")
    n = K.manifold.dim
    p = solver_spec.get("p")
    if p is None:
        p = 2.0 * n / (n + K.spec.alpha)
    try:
        return QuotientSetup(K=K, p=float(p), regime=regime)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _initial(manifold, solver_spec, seed):
    from .optimize import initial_density

    init = solver_spec.get("init", "constant")
    if init == "random" and seed is None:
        raise ConfigError("random init requires a seed")
    try:
        return initial_density(manifold, kind=init, rng=seed)
    except ValueError as exc:
        raise ConfigError(str(exc))


# ---------------------------------------------------------------------------
# subcommands


def cmd_constant(cfg, out_dir, seed, plots):
    from . import analytic
    from .optimize import maximize_quotient, minimize_quotient

    manifold = _build_manifold(_section(cfg, "manifold"))
    K = _build_kernel(manifold, _section(cfg, "kernel"))
    solver_spec = _section(cfg, "solver")
    setup = _make_setup(K, solver_spec)
    init = _initial(manifold, solver_spec, seed)
    tol = float(solver_spec.get("tol", 1e-9))
    max_iter = int(solver_spec.get("max_iter", 5000))

    run = maximize_quotient if setup.regime == "maximize" else minimize_quotient
    result = run(setup, manifold, init=init, tol=tol, max_iter=max_iter)

    reference = analytic.sharp_constant_sphere(manifold.dim, K.spec.alpha).value
    outputs = _section(cfg, "outputs", required=False)
    report = {
        "command": "constant",
        "seed": seed,
        "manifold": {
            "kind": manifold.kind,
            "dim": manifold.dim,
            "node_count": manifold.node_count,
            "total_volume": manifold.total_volume,
        },
        "kernel": {
            "alpha": K.spec.alpha,
            "mode": K.spec.mode,
            "mass_A": K.spec.mass_A,
        },
        "p": setup.p,
        "regime": setup.regime,
        "Y_estimate": result.value,
        "sharp_constant_reference": reference,
        "relative_gap": (result.value - reference) / reference,
        "solver": result.to_json(
            include_extremal=bool(outputs.get("include_extremal", False)),
            include_history=bool(outputs.get("include_history", False)),
        ),
    }
    write_report(report, os.path.join(out_dir, "report.json"))
    if plots:
        from . import figures
        figures.save_convergence_figure(result.history, reference,
                                        os.path.join(out_dir, "convergence.png"))
    return 0 if result.converged else 2


def cmd_continuation(cfg, out_dir, seed, plots):
    import csv

    from . import analytic
    from .optimize import continuation

    manifold = _build_manifold(_section(cfg, "manifold"))
    K = _build_kernel(manifold, _section(cfg, "kernel"))
    solver_spec = _section(cfg, "solver")
    p_list = solver_spec.get("p_list")
    if not p_list:
        raise ConfigError("continuation requires a nonempty solver.p_list")
    setup = _make_setup(K, dict(solver_spec, p=p_list[0]))
    tol = float(solver_spec.get("tol", 1e-9))
    max_iter = int(solver_spec.get("max_iter", 5000))

    try:
        trace = continuation(setup, manifold, p_list, tol=tol, max_iter=max_iter)
    except ValueError as exc:
        raise ConfigError(str(exc))

    trace_path = os.path.join(out_dir, "trace.csv")
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "Y", "concentration", "iterations", "converged"])
        for e in trace.entries:
            writer.writerow([_fmt(e.p), _fmt(e.value), _fmt(e.concentration),
                             e.iterations, e.converged])

    reference = analytic.sharp_constant_sphere(manifold.dim, K.spec.alpha).value
    report = {
        "command": "continuation",
        "seed": seed,
        "critical_p": setup.critical_p,
        "sharp_constant_reference": reference,
        "entries": [
            {
                "p": e.p,
                "Y": e.value,
                "concentration": e.concentration,
                "iterations": e.iterations,
                "converged": e.converged,
                "extremal_summary": e.extremal_summary,
            }
            for e in trace.entries
        ],
    }
    write_report(report, os.path.join(out_dir, "report.json"))
    if plots:
        from . import figures
        figures.save_continuation_figure(
            [e.p for e in trace.entries],
            [e.value for e in trace.entries],
            [e.concentration for e in trace.entries],
            reference, os.path.join(out_dir, "trace.png"))
    return 0 if all(e.converged for e in trace.entries) else 2


def cmd_verify(suite, out_dir, seed, plots):
    import csv

    from .verify import run_suite

    try:
        checks = run_suite(suite, seed=seed if seed is not None else 0)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]))

    all_pass = all(c.passed for c in checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: value={c.value:.6g} tolerance={c.tolerance:.6g}"
              + (f" ({c.detail})" if c.detail else ""))

    with open(os.path.join(out_dir, "checks.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "passed", "value", "tolerance", "detail"])
        for c in checks:
            writer.writerow([c.name, c.passed, _fmt(c.value), _fmt(c.tolerance), c.detail])

    report = {
        "command": "verify",
        "suite": suite,
        "seed": seed if seed is not None else 0,
        "all_pass": all_pass,
        "checks": [
            {"name": c.name, "passed": c.passed, "value": c.value,
             "tolerance": c.tolerance, "detail": c.detail}
            for c in checks
        ],
    }
    write_report(report, os.path.join(out_dir, "report.json"))

    if suite == "weaktype":
        # export one example profile next to the checks
        import numpy as np
        from . import diagnostics, geometry, kernel

        m = geometry.build_sphere(2, 500, "chordal")
        Kx = kernel.assemble(m, kernel.KernelSpec(alpha=1.0))
        rng = np.random.default_rng(seed if seed is not None else 0)
        prof = diagnostics.weak_type_profile(Kx, m, rng.uniform(0.0, 1.0, m.node_count),
                                             4.0 / 3.0)
        diagnostics.profile_to_csv(prof, os.path.join(out_dir, "profile.csv"))
        if plots:
            from . import figures
            figures.save_profile_figure(prof, os.path.join(out_dir, "profile.png"))

    return 0 if all_pass else 3


# ---------------------------------------------------------------------------


def _parser():
    parser = argparse.ArgumentParser(
        prog="rieszlab",
        description="extremal quotient experiments for power-law integral operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("constant", True), ("continuation", True),
                               ("verify", False)):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True, help="JSON experiment config")
        else:
            p.add_argument("--suite", required=True,
                           help="identities | weaktype | epsilon | young | bubbles")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="overrides config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="BLAS/OpenMP thread cap")
        p.add_argument("--plots", action="store_true",
                       help="render figures next to the delimited output")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    try:
        os.makedirs(args.out, exist_ok=True)
        if args.command == "verify":
            return cmd_verify(args.suite, args.out, args.seed, args.plots)
        cfg = _load_config(args.config)
        seed = args.seed
        if seed is None:
            seed = _section(cfg, "solver", required=False).get("seed")
        if args.command == "constant":
            return cmd_constant(cfg, args.out, seed, args.plots)
        return cmd_continuation(cfg, args.out, seed, args.plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
