"""Figure rendering for report tables.

Each CLI command gets one or two summary figures written next to its CSV
tables.  Rendering is headless (Agg) and driven purely by the table rows, so
figures stay in sync with the delimited output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FIG_KW = {"figsize": (6.4, 4.2), "dpi": 130}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_bounds(rows, out_dir: Path) -> list:
    """Scatter of bound LHS vs RHS per map (log-log); the diagonal is the
    failure boundary."""
    by_map = {}
    for r in rows:
        by_map.setdefault(r[0], []).append((float(r[3]), float(r[4])))
    fig, ax = plt.subplots(**FIG_KW)
    for label, pts in sorted(by_map.items()):
        arr = np.asarray(pts)
        ax.loglog(arr[:, 1], np.maximum(arr[:, 0], 1e-300), ".", ms=2, label=label)
    lim = ax.get_xlim()
    ax.loglog(lim, lim, "k--", lw=0.8, label="lhs = rhs")
    ax.set_xlabel("bound (rhs)")
    ax.set_ylabel("observed (lhs)")
    ax.set_title("distortion bounds: observed vs bound")
    ax.legend(fontsize=7, markerscale=3)
    return [_save(fig, out_dir / "bounds_scatter.png")]


def plot_modulus(rows, out_dir: Path) -> list:
    """Relative error of the discrete modulus against the closed form."""
    fig, ax = plt.subplots(**FIG_KW)
    labels = [f"{r[0]}\n{r[1]}" for r in rows]
    rel = [abs(float(r[3]) - float(r[2])) / float(r[2]) for r in rows]
    ax.bar(range(len(rel)), rel, color="tab:blue")
    ax.set_xticks(range(len(rel)), labels, fontsize=7)
    ax.set_ylabel("relative error")
    ax.set_title("discrete vs closed-form modulus")
    ax.axhline(0.02, color="k", ls="--", lw=0.8)
    return [_save(fig, out_dir / "modulus_error.png")]


def plot_means(profile_rows, fmo_rows, out_dir: Path) -> list:
    figs = []
    by_map = {}
    for r in profile_rows:
        by_map.setdefault(r[0], []).append((float(r[1]), float(r[2])))
    fig, ax = plt.subplots(**FIG_KW)
    for label, pts in sorted(by_map.items()):
        arr = np.asarray(sorted(pts))
        ax.semilogx(arr[:, 0], arr[:, 1], label=label)
    ax.set_xlabel("radius r")
    ax.set_ylabel("circle mean of distortion")
    ax.set_title("radial mean profiles")
    ax.legend(fontsize=8)
    figs.append(_save(fig, out_dir / "means_profiles.png"))

    by_map = {}
    for r in fmo_rows:
        by_map.setdefault(r[0], []).append((float(r[1]), float(r[2])))
    fig, ax = plt.subplots(**FIG_KW)
    for label, pts in sorted(by_map.items()):
        arr = np.asarray(sorted(pts, reverse=True))
        ax.semilogx(arr[:, 0], arr[:, 1], marker="o", ms=3, label=label)
    ax.invert_xaxis()
    ax.set_xlabel("disk radius eps")
    ax.set_ylabel("mean oscillation")
    ax.set_title("disk-mean oscillation at 0")
    ax.legend(fontsize=8)
    figs.append(_save(fig, out_dir / "means_oscillation.png"))
    return figs


def plot_phi(rows, out_dir: Path) -> list:
    """Verdict matrix: one row per (phi, p), one column per condition."""
    keys = sorted({(r[0], float(r[1])) for r in rows})
    conds = sorted({r[2] for r in rows})
    code = {"divergent": 1.0, "inconclusive": 0.5, "convergent": 0.0}
    mat = np.full((len(keys), len(conds)), np.nan)
    for r in rows:
        mat[keys.index((r[0], float(r[1]))), conds.index(r[2])] = code.get(r[3], np.nan)
    fig, ax = plt.subplots(**FIG_KW)
    im = ax.imshow(mat, cmap="RdYlGn_r", vmin=0, vmax=1, aspect="auto")
    ax.set_xticks(range(len(conds)), conds, rotation=30, fontsize=7, ha="right")
    ax.set_yticks(range(len(keys)), [f"{n}, p={p:g}" for n, p in keys], fontsize=7)
    ax.set_title("tail-condition verdicts (green=convergent, red=divergent)")
    fig.colorbar(im, ax=ax, shrink=0.8)
    return [_save(fig, out_dir / "phi_matrix.png")]


def plot_equicontinuity(rows, out_dir: Path) -> list:
    """delta(eps) curves per family member; missing delta plotted at 0."""
    by_member = {}
    for r in rows:
        by_member.setdefault(r[1], []).append((float(r[2]), r[3]))
    fig, ax = plt.subplots(**FIG_KW)
    for label, pts in sorted(by_member.items()):
        pts = sorted(pts)
        eps = [p[0] for p in pts]
        deltas = [float(p[1]) if p[1] not in ("", "none", None) else np.nan for p in pts]
        ax.loglog(eps, deltas, marker="o", ms=3, label=label)
    ax.set_xlabel("target eps")
    ax.set_ylabel("largest admissible delta")
    ax.set_title("empirical moduli of continuity at 0")
    ax.legend(fontsize=6)
    return [_save(fig, out_dir / "equicontinuity_deltas.png")]


def plot_necessity(rows, out_dir: Path) -> list:
    """Image radius of |z| = 2^-m per member: the non-collapsing gap."""
    fig, ax = plt.subplots(**FIG_KW)
    ms = [int(r[0]) for r in rows]
    gaps = [float(r[3]) for r in rows]
    budgets = [float(r[1]) for r in rows]
    ax2 = ax.twinx()
    ax.semilogy(ms, gaps, "o-", color="tab:red", label="chordal gap at 2^-m")
    ax2.plot(ms, budgets, "s--", color="tab:blue", label="weighted budget")
    ax.set_xlabel("member m")
    ax.set_ylabel("gap h(f(2^-m), 0)", color="tab:red")
    ax2.set_ylabel("budget integral", color="tab:blue")
    ax.set_title("budget-respecting family with a persistent gap")
    return [_save(fig, out_dir / "necessity_family.png")]
