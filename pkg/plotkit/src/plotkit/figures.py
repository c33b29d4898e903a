"""Figure rendering from erlab result CSVs.

Each figure kind reads a documented CSV contract and plots only the columns
it names; nothing is recomputed.  Rendering is deterministic: fixed style,
fixed hash salt, no timestamps, so equal input bytes give equal output
bytes (the golden-file tests rely on this).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIGURE_KINDS = ("risk_vs_n", "gap_vs_grid", "residual_decay", "vc_chain")

# columns each kind consumes, in plotting order
REQUIRED_COLUMNS = {
    "risk_vs_n": ("n", "mc_excess_rls", "mc_excess_ps", "bound_thm10", "bound_thm7"),
    "gap_vs_grid": ("grid_points", "lp_value", "fp_value", "fp_gap"),
    "residual_decay": ("n", "lemma2_residual", "lower_rate_bound"),
    "vc_chain": ("n", "cmi_test", "cmi_yn_over_n", "sauer_bound"),
}

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.fonttype": "none",
    "svg.hashsalt": "plotkit",
    "path.simplify": False,
}


class PlotError(Exception):
    pass


class MissingColumnError(PlotError):
    def __init__(self, column: str, path: str):
        self.column = column
        super().__init__(f"missing column '{column}' in {path}")


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    kind: str
    output: str
    logx: bool = False
    logy: bool = False

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise PlotError(f"unknown figure kind '{self.kind}'")


def read_columns(path: str, names) -> dict[str, list[float]]:
    """The named CSV columns as float lists; header-only files give empty lists."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in names:
            if name not in header:
                raise MissingColumnError(name, path)
        cols: dict[str, list[float]] = {name: [] for name in names}
        for row in reader:
            for name in names:
                try:
                    cols[name].append(float(row[name]))
                except (TypeError, ValueError) as exc:
                    raise PlotError(
                        f"column '{name}' in {path} has a non-numeric entry: {row[name]!r}"
                    ) from exc
    return cols


def _apply_axes_flags(ax, spec: FigureSpec) -> None:
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")


def _plot_risk_vs_n(ax, cols, spec):
    n = cols["n"]
    ax.plot(n, cols["mc_excess_rls"], "o-", color="#1f77b4", label="rls excess (MC)", zorder=2)
    ax.plot(n, cols["mc_excess_ps"], "s-", color="#2ca02c", label="ps excess (MC)", zorder=2)
    # bounds drawn above the estimates
    ax.plot(n, cols["bound_thm10"], "--", color="#d62728", label="thm10 bound", zorder=3)
    ax.plot(n, cols["bound_thm7"], ":", color="#9467bd", label="thm7 bound", zorder=3)
    ax.set_xlabel("n")
    ax.set_ylabel("excess risk")
    ax.set_title("excess risk and information bounds")
    ax.legend()


def _plot_gap_vs_grid(ax, cols, spec):
    g = cols["grid_points"]
    ax.plot(g, cols["lp_value"], "o-", color="#1f77b4", label="LP value", zorder=2)
    ax.plot(g, cols["fp_value"], "s--", color="#2ca02c", label="fictitious play", zorder=2)
    ax.plot(g, cols["fp_gap"], "^-", color="#d62728", label="fp certificate gap", zorder=2)
    ax.set_xlabel("grid points")
    ax.set_ylabel("value / gap")
    ax.set_title("game value under grid refinement")
    ax.legend()


def _plot_residual_decay(ax, cols, spec):
    n = cols["n"]
    ax.plot(n, cols["lemma2_residual"], "o-", color="#1f77b4", label="expansion residual", zorder=2)
    ax.plot(n, cols["lower_rate_bound"], "s--", color="#d62728", label="lower rate", zorder=2)
    ax.set_xlabel("n")
    ax.set_ylabel("nats / risk")
    ax.set_title("residual decay and the lower rate")
    ax.legend()


def _plot_vc_chain(ax, cols, spec):
    names = REQUIRED_COLUMNS["vc_chain"]
    ax.set_axis_off()
    ax.set_title("threshold-class information chain")
    header = ["n", "cmi_test", "cmi_yn / n", "sauer bound"]
    rows = len(cols["n"])
    cells = [
        [f"{cols[name][i]:.6g}" for name in names]
        for i in range(rows)
    ]
    if rows == 0:
        cells = [["" for _ in names]]
    table = ax.table(cellText=cells, colLabels=header, loc="center", cellLoc="right")
    table.auto_set_font_size(False)
    table.set_fontsize(9)
    table.scale(1.0, 1.3)


_RENDERERS = {
    "risk_vs_n": _plot_risk_vs_n,
    "gap_vs_grid": _plot_gap_vs_grid,
    "residual_decay": _plot_residual_decay,
    "vc_chain": _plot_vc_chain,
}


def render(spec: FigureSpec) -> str:
    """Render the figure and return the output path."""
    cols = read_columns(spec.input_csv, REQUIRED_COLUMNS[spec.kind])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _RENDERERS[spec.kind](ax, cols, spec)
            if spec.kind != "vc_chain":
                _apply_axes_flags(ax, spec)
            fig.savefig(spec.output, metadata=_output_metadata(spec.output))
        finally:
            plt.close(fig)
    return spec.output


def _output_metadata(path: str) -> dict | None:
    # strip the timestamp so output bytes depend only on input bytes
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".png"):
        return {"Software": None}
    return None
