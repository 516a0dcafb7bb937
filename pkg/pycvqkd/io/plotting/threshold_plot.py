import logging

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

log = logging.getLogger(__name__)

# column -> (legend label, dash pattern)
CURVE_STYLES = {
    "eta_clone": ("cloning", "-."),
    "eta_anticlone": ("anticloning", ":"),
    "eta_bma": ("Bell measurement", "--"),
    "eta_opt": ("optimal Gaussian", "-"),
    "eta_intercept_resend": ("intercept-resend", (0, (1, 3, 6, 3, 1, 6))),
}


def draw_threshold_curves(ax, deltas, columns, **kwargs):
    """
    Draw the threshold curves on an axis, excess noise
    horizontal and transmission vertical. Each line carries
    its column name as gid. A single delta is drawn as
    a marker so the series stays visible.

    :param ax: matplotlib axis
    :param deltas: delta values
    :param columns: dict of column name -> thresholds
    :returns:
    :rtype:

    """

    deltas = np.asarray(deltas)

    marker = "o" if deltas.shape[0] == 1 else None

    for name, values in columns.items():

        label, linestyle = CURVE_STYLES[name]

        # unreachable (infinite) thresholds leave a gap
        values = np.asarray(values, dtype=np.float64)
        values = np.where(np.isfinite(values), values, np.nan)

        ax.plot(
            deltas,
            values,
            linestyle=linestyle,
            marker=marker,
            label=label,
            gid=name,
            **kwargs,
        )

    ax.set_xlabel(r"excess noise $\delta$ (shot-noise units)")
    ax.set_ylabel(r"line transmission $\eta$ threshold")

    ax.legend(loc="upper left")


def render_threshold_svg(curve, file_name):
    """
    Write a self-contained SVG of a ThresholdCurve. Text is
    kept as text and no timestamp is embedded, so the same
    curve gives the same file.

    :param curve: ThresholdCurve
    :param file_name: output path
    :returns:
    :rtype:

    """

    with rc_context({"svg.fonttype": "none", "svg.hashsalt": "pycvqkd"}):

        fig = Figure(figsize=(6.0, 4.5))

        ax = fig.add_subplot(111)

        curve.display(ax=ax, color="k", linewidth=1.2)

        ax.set_title(f"$V_A$ = {curve.v_a:g}")

        fig.savefig(file_name, format="svg", metadata={"Date": None})

    log.info(f"wrote {curve.n_rows}-row threshold plot to {file_name}")
