"""Figure output for experiment rows."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from facelim.experiments import BitStatsRow, ExperimentRow  # noqa: E402

# reproducible, self-contained SVG: glyphs as paths, fixed ids, no timestamp
STYLE = {
    "svg.fonttype": "path",
    "svg.hashsalt": "facelim",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
}


def _x(row: ExperimentRow | BitStatsRow) -> float:
    if isinstance(row, ExperimentRow):
        return row.log2_combinations
    return float(row.list_length - 1)


def _y(row: ExperimentRow | BitStatsRow) -> float:
    return row.ratio if isinstance(row, ExperimentRow) else row.observed_ratio


def emit_plot(
    rows: Sequence[ExperimentRow | BitStatsRow],
    path: str | Path,
    bit_rows: Sequence[BitStatsRow] | None = None,
) -> Path:
    """Plot the observed prime ratio against ``log2(combinations)``.

    Baseline curves ``1/ln(2**g)`` and ``1/ln(2**h)`` are drawn when bit
    statistics are available, either as ``rows`` themselves or as ``bit_rows``.
    The format follows the file suffix (SVG when there is none).
    """
    if len(rows) < 2:
        raise ValueError("need at least two rows to draw a curve")
    if bit_rows is None and all(isinstance(r, BitStatsRow) for r in rows):
        bit_rows = rows  # type: ignore[assignment]
    path = Path(path)
    fmt = path.suffix.lstrip(".") or "svg"

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot([_x(r) for r in rows], [_y(r) for r in rows], "o-", label="observed P/C")
        if bit_rows:
            xs = [_x(r) for r in bit_rows]
            ax.plot(xs, [r.baseline_min for r in bit_rows], "s--", label=r"$1/\ln(2^h)$")
            ax.plot(xs, [r.baseline_max for r in bit_rows], "^--", label=r"$1/\ln(2^g)$")
        ax.set_xlabel(r"$\log_2$(combinations)")
        ax.set_ylabel("fraction prime")
        ax.set_title("Prime probability distribution")
        ax.set_ylim(bottom=0)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
        plt.close(fig)
    return path
