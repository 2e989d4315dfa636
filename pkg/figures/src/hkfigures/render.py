"""Renderers: one figure kind per function, consuming only the CSV schema.

Rendering is read-only over its inputs and carries no timestamps, so a
rerun over identical CSVs produces an identical canvas.
"""

import math

import matplotlib

matplotlib.use("Agg")
# content-derived SVG ids and no timestamps: identical inputs, identical bytes
matplotlib.rcParams["svg.hashsalt"] = "hkfigures"

import matplotlib.pyplot as plt
import numpy as np

from .csvio import read_table

_SCHEME_STYLE = {
    "husimi": {"color": "tab:red", "marker": "o"},
    "sqrt-husimi": {"color": "tab:blue", "marker": "s"},
}


def _group_rows(table, keys):
    """Row indices grouped by the tuple of the given (string) columns."""
    cols = [table.column(k, numeric=False) for k in keys]
    groups = {}
    for i in range(len(table.rows)):
        key = tuple(c[i] for c in cols)
        groups.setdefault(key, []).append(i)
    return groups


def _fit_line(n, err):
    """Least-squares c N^-s through positive (n, err) points."""
    n = np.asarray(n, dtype=float)
    err = np.asarray(err, dtype=float)
    keep = (n > 0) & (err > 0)
    if keep.sum() < 3:
        return None
    slope, intercept = np.polyfit(np.log(n[keep]), np.log(err[keep]), 1)
    return math.exp(intercept), -slope


def render_loglog_convergence(spec):
    table = read_table(spec.input_csv[0])
    table.require(["scheme", "N"])
    y_col = spec.options.get("y_col")
    if y_col is None:
        y_col = "l2_error" if "l2_error" in table.columns else "error_n_vs_2n"
    table.require([y_col])
    group_keys = ["scheme"]
    if "checkpoint_steps" in table.columns:
        group_keys.insert(0, "checkpoint_steps")

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    n_all = table.column("N")
    y_all = table.column(y_col)
    has_fit_cols = "fit_c" in table.columns and "fit_s" in table.columns
    for key, idx in sorted(_group_rows(table, group_keys).items()):
        scheme = key[-1]
        label = " ".join(str(k) for k in key)
        n = [n_all[i] for i in idx]
        y = [y_all[i] for i in idx]
        style = _SCHEME_STYLE.get(scheme, {})
        ax.loglog(n, y, linestyle="-", label=label, **style)
        if has_fit_cols:
            c = table.column("fit_c")[idx[0]]
            s = table.column("fit_s")[idx[0]]
            fit = None if c is None else (c, s)
        else:
            fit = _fit_line(n, y)
        if fit is not None:
            c, s = fit
            ax.loglog(n, c * np.asarray(n, dtype=float) ** (-s), linestyle="--",
                      color=style.get("color"), alpha=0.7,
                      label="fit %s: %.2f N^-%.2f" % (label, c, s))
    if "analytic_prediction" in table.columns:
        analytic = table.column("analytic_prediction")
        pairs = sorted({(n_all[i], analytic[i]) for i in range(len(n_all))
                        if analytic[i] is not None})
        if pairs:
            ax.loglog([p[0] for p in pairs], [p[1] for p in pairs],
                      linestyle=":", color="black", label="analytic")
    ax.set_xlabel("N")
    ax.set_ylabel(y_col)
    ax.set_title(spec.options.get("title", "convergence"))
    ax.legend(fontsize=7)
    return fig


def render_time_series(spec):
    table = read_table(spec.input_csv[0])
    table.require(["t", "scheme", "error_single_run", "s_k"])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    t_all = table.column("t")
    sk_all = table.column("s_k")
    single_all = table.column("error_single_run")
    for (scheme,), idx in sorted(_group_rows(table, ["scheme"]).items()):
        style = _SCHEME_STYLE.get(scheme, {})
        color = style.get("color")
        ax.plot([t_all[i] for i in idx], [sk_all[i] for i in idx],
                color=color, label="%s S_K" % scheme)
        ax.plot([t_all[i] for i in idx], [single_all[i] ** 2 for i in idx],
                color=color, alpha=0.35, linewidth=0.8,
                label="%s single run" % scheme)
    if "analytic_prediction" in table.columns:
        analytic = table.column("analytic_prediction")
        pairs = [(t_all[i], analytic[i] ** 2) for i in range(len(t_all))
                 if analytic[i] is not None]
        pairs.sort()
        if pairs:
            ax.plot([p[0] for p in pairs], [p[1] for p in pairs], ":",
                    color="black", label="analytic V(t)/N")
    ax.set_yscale("log")
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel("mean squared error")
    ax.set_title(spec.options.get("title", "sampling error over time"))
    ax.legend(fontsize=7)
    return fig


def render_density(spec):
    table = read_table(spec.input_csv[0])
    table.require(["x", "density_reference", "density_husimi",
                   "density_sqrt_husimi", "abs_err_husimi",
                   "abs_err_sqrt_husimi"])
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.5, 6.0), sharex=True)
    x = table.column("x")
    top.plot(x, table.column("density_reference"), "k-", label="reference")
    top.plot(x, table.column("density_husimi"), color="tab:red",
             linewidth=0.9, label="husimi")
    top.plot(x, table.column("density_sqrt_husimi"), color="tab:blue",
             linewidth=0.9, label="sqrt-husimi")
    top.set_ylabel("|psi(x)|^2")
    top.legend(fontsize=7)
    bottom.plot(x, table.column("abs_err_husimi"), color="tab:red",
                linewidth=0.9, label="husimi")
    bottom.plot(x, table.column("abs_err_sqrt_husimi"), color="tab:blue",
                linewidth=0.9, label="sqrt-husimi")
    bottom.set_xlabel("x (a.u.)")
    bottom.set_ylabel("absolute error")
    bottom.legend(fontsize=7)
    if "x_range" in spec.options:
        top.set_xlim(spec.options["x_range"])
    fig.suptitle(spec.options.get("title", "position densities"))
    return fig


def render_spectrum(spec):
    table = read_table(spec.input_csv[0])
    table.require(["energy", "intensity_hk", "intensity_reference"])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    e = table.column("energy")
    ax.plot(e, table.column("intensity_reference"), "k-", linewidth=0.9,
            label="reference")
    ax.plot(e, table.column("intensity_hk"), color="tab:blue", linewidth=0.9,
            label="herman-kluk")
    ax.set_xlabel("energy (a.u.)")
    ax.set_ylabel("intensity")
    if "x_range" in spec.options:
        ax.set_xlim(spec.options["x_range"])
    ax.set_title(spec.options.get("title", "spectrum"))
    ax.legend(fontsize=7)
    return fig


def render_dim_sweep(spec):
    table = read_table(spec.input_csv[0])
    table.require(["D", "scheme", "error"])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    d_all = table.column("D")
    err_all = table.column("error")
    for (scheme,), idx in sorted(_group_rows(table, ["scheme"]).items()):
        style = _SCHEME_STYLE.get(scheme, {})
        ax.semilogy([d_all[i] for i in idx], [err_all[i] for i in idx],
                    linestyle="-", label=scheme, **style)
    if "analytic_prediction" in table.columns:
        analytic = table.column("analytic_prediction")
        pairs = sorted({(d_all[i], analytic[i]) for i in range(len(d_all))
                        if analytic[i] is not None})
        if pairs:
            ax.semilogy([p[0] for p in pairs], [p[1] for p in pairs], ":",
                        color="black", label="analytic")
    ax.set_xlabel("dimension D")
    ax.set_ylabel("L2 error")
    ax.set_title(spec.options.get("title", "error vs dimension"))
    ax.legend(fontsize=7)
    return fig


_RENDERERS = {
    "loglog_convergence": render_loglog_convergence,
    "time_series": render_time_series,
    "density": render_density,
    "spectrum": render_spectrum,
    "dim_sweep": render_dim_sweep,
}


def render(spec, save=True):
    """Render the figure described by spec; returns the matplotlib Figure.

    When save is true the canvas is written to spec.output (PNG or SVG by
    extension) without embedded timestamps.
    """
    fig = _RENDERERS[spec.kind](spec)
    if save:
        metadata = {"Date": None} if spec.output.endswith(".svg") else None
        fig.savefig(spec.output, dpi=150, metadata=metadata)
    return fig
