"""Figure emission: overhead path, health trace, and residual/threshold
charts with alarm shading, written as self-contained SVG files."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _alarm_spans(t, flags):
    """Contiguous [t0, t1] intervals where the alarm flag is set."""
    spans = []
    start = None
    for ti, flag in zip(t, flags):
        if flag and start is None:
            start = ti
        elif not flag and start is not None:
            spans.append((start, ti))
            start = None
    if start is not None:
        spans.append((start, t[-1]))
    return spans


def plot_path(log, path, waypoints=None, acceptance_radius=None):
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.plot(log.column("plant_x"), log.column("plant_y"), label="plant", lw=1.2)
    ax.plot(log.column("obs_x"), log.column("obs_y"), label="observer",
            lw=1.2, ls="--")
    if waypoints:
        xs = [wp[0] for wp in waypoints]
        ys = [wp[1] for wp in waypoints]
        ax.plot(xs, ys, "k^", ms=7, label="waypoints")
        if acceptance_radius:
            for wx, wy in waypoints:
                ax.add_patch(plt.Circle((wx, wy), acceptance_radius,
                                        fill=False, ec="gray", ls=":"))
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_health(log, path, t_inject=None):
    t = log.column("t")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, log.column("h_raw"), color="0.7", lw=0.8, label="raw health")
    ax.plot(t, log.column("h"), color="C0", lw=1.4, label="filtered health")
    if t_inject is not None:
        ax.axvline(t_inject, color="r", ls=":", lw=1.0, label="fault injection")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("health [-]")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


_CHANNEL_COLUMNS = {
    "heading": ("r_psi", "thr_psi_adaptive", "thr_psi_static", "alarm_psi", "rad"),
    "velocity": ("r_v", "thr_v_adaptive", "thr_v_static", "alarm_v", "m/s"),
}


def plot_residual(log, channel, path, t_inject=None):
    res_col, adp_col, sta_col, alarm_col, unit = _CHANNEL_COLUMNS[channel]
    t = log.column("t")
    adaptive = log.column(adp_col)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, log.column(res_col), color="C0", lw=1.0,
            label=f"{channel} residual")
    ax.plot(t, adaptive, color="C1", lw=1.2, label="adaptive threshold")
    ax.plot(t, [-v for v in adaptive], color="C1", lw=1.2)
    static = log.column(sta_col)
    ax.plot(t, static, color="C2", lw=1.0, ls="--", label="static threshold")
    ax.plot(t, [-v for v in static], color="C2", lw=1.0, ls="--")
    for t0, t1 in _alarm_spans(t, log.column(alarm_col)):
        ax.axvspan(t0, t1, color="red", alpha=0.15, lw=0)
    if t_inject is not None:
        ax.axvline(t_inject, color="r", ls=":", lw=1.0)
    ax.set_xlabel("time [s]")
    ax.set_ylabel(f"{channel} residual [{unit}]")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def emit_plots(log, summary, outdir, cfg=None):
    """Render the standard figure set for a run; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    waypoints = cfg.mission["waypoints"] if cfg is not None else None
    radius = cfg.mission["acceptance_radius"] if cfg is not None else None
    t_inject = summary.t_inject if summary is not None else None
    written = []
    target = os.path.join(outdir, "path.svg")
    plot_path(log, target, waypoints, radius)
    written.append(target)
    target = os.path.join(outdir, "health.svg")
    plot_health(log, target, t_inject)
    written.append(target)
    for channel in ("heading", "velocity"):
        target = os.path.join(outdir, f"residual_{channel}.svg")
        plot_residual(log, channel, target, t_inject)
        written.append(target)
    return written
