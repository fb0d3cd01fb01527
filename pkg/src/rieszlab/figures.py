"""Figure rendering for the experiment reports.

Every report path that writes delimited output can also render the
matching matplotlib figure next to it.  All functions write to files
(Agg backend) and return the path; nothing is shown interactively.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (6.0, 4.0)
_DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_convergence_figure(history, reference, path, title="quotient convergence"):
    """Objective value per accepted iterate, with the reference constant."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(np.arange(len(history)), history, lw=1.2, label="J along iterates")
    if reference is not None:
        ax.axhline(reference, color="crimson", ls="--", lw=1.0,
                   label="sphere constant")
    ax.set_xlabel("accepted iteration")
    ax.set_ylabel("quotient value")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    return _finish(fig, path)


def save_continuation_figure(ps, values, concentrations, reference, path):
    """Subcritical path: quotient value and concentration against p."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    ax1.plot(ps, values, "o-", lw=1.2)
    if reference is not None:
        ax1.axhline(reference, color="crimson", ls="--", lw=1.0,
                    label="sphere constant")
        ax1.legend(loc="best", fontsize=8)
    ax1.set_ylabel("quotient value")
    ax2.plot(ps, concentrations, "s-", color="darkgreen", lw=1.2)
    ax2.set_ylim(0.0, 1.05)
    ax2.set_xlabel("subcritical exponent p")
    ax2.set_ylabel("concentration")
    ax1.set_title("subcritical continuation")
    return _finish(fig, path)


def save_profile_figure(profile, path):
    """Weak-type distribution profile and its normalized constant."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    ax1.loglog(profile.lambdas, np.maximum(profile.measures, 1e-300), lw=1.2)
    ax1.set_ylabel("level-set measure")
    kind = "sublevel" if profile.reversed_regime else "superlevel"
    ax1.set_title(f"weak-type profile ({kind} sets, q={profile.q:.3g})")
    ax2.semilogx(profile.lambdas, profile.normalized, lw=1.2, color="darkorange")
    ax2.axhline(profile.sup_constant, color="gray", ls=":", lw=1.0)
    ax2.set_xlabel("threshold")
    ax2.set_ylabel("normalized")
    return _finish(fig, path)


def save_powerlaw_figure(x, y, fit, expected_exponent, path, title="scaling fit"):
    """Measured values against the fitted and expected power laws."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.loglog(x, y, "o", label="measured")
    xs = np.geomspace(x.min(), x.max(), 64)
    ax.loglog(xs, fit.amplitude * xs ** fit.exponent, "-", lw=1.0,
              label=f"fit slope {fit.exponent:.3f}")
    ref = y[0] * (xs / x[0]) ** expected_exponent
    ax.loglog(xs, ref, "--", lw=1.0, color="gray",
              label=f"expected slope {expected_exponent:.3f}")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    return _finish(fig, path)
