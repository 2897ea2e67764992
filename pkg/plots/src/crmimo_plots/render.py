"""Render sweep-summary CSVs as one-line-per-solver figures with error bars.

Consumes only the documented summary schema
(sweep_var,sweep_value,solver,mean_admitted,stderr) and performs no
statistics of its own. Output is a vector image, byte-stable across runs
for identical input.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = ("sweep_var", "sweep_value", "solver", "mean_admitted", "stderr")

SOLVER_STYLES = {
    "equal_power": {"marker": "^", "linestyle": ":", "color": "tab:red"},
    "equal_rate": {"marker": "s", "linestyle": "--", "color": "tab:green"},
    "ilp": {"marker": "o", "linestyle": "-", "color": "tab:blue"},
}

X_LABELS = {
    "K": "Total SU UEs in the network, K",
    "M_b": "BS antennas, M_b",
    "P0_dbm": "Total power budget, P0 (dBm)",
    "I0_dbm": "Interference threshold, I0 (dBm)",
    "R0": "Minimum rate, R0 (bps/Hz)",
}

# stable ids and searchable text keep repeated renders byte-identical and
# testable
_STABLE_RC = {"svg.hashsalt": "crmimo-plots", "svg.fonttype": "none"}


class RenderError(ValueError):
    """Unusable summary input (missing column, empty table, wrong variable)."""


@dataclass
class FigureSpec:
    summary_csv: str
    x_var: str
    out_path: str
    x_label: str = ""
    title: str = ""
    solver_styles: dict = field(default_factory=lambda: SOLVER_STYLES)


@dataclass
class RenderInfo:
    out_path: str
    solvers: tuple
    points_per_solver: int


def read_summary(path, x_var):
    """Rows of (x, solver, mean, stderr) for the requested sweep variable."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise RenderError(f"cannot read summary CSV {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise RenderError(f"summary CSV is missing column {column!r}")
        rows = list(reader)
    if not rows:
        raise RenderError(f"summary CSV {path} has no data rows")
    seen_vars = sorted({r["sweep_var"] for r in rows})
    if x_var not in seen_vars:
        raise RenderError(
            f"x variable {x_var!r} not present in summary (found {seen_vars})"
        )
    out = []
    for r in rows:
        if r["sweep_var"] != x_var:
            continue
        out.append(
            (float(r["sweep_value"]), r["solver"],
             float(r["mean_admitted"]), float(r["stderr"]))
        )
    return out


def render(spec: FigureSpec) -> RenderInfo:
    """Write the figure for one sweep; returns what was drawn."""
    rows = read_summary(spec.summary_csv, spec.x_var)
    solvers = sorted({solver for _, solver, _, _ in rows},
                     key=lambda s: list(SOLVER_STYLES).index(s) if s in SOLVER_STYLES else 99)

    with plt.rc_context(_STABLE_RC):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        points = 0
        for solver in solvers:
            cell = sorted(
                (x, mean, err) for x, s, mean, err in rows if s == solver
            )
            xs = [c[0] for c in cell]
            means = [c[1] for c in cell]
            errs = [c[2] for c in cell]
            style = spec.solver_styles.get(solver, {})
            ax.errorbar(xs, means, yerr=errs, label=solver, capsize=3, **style)
            points = len(xs)
        ax.set_xlabel(spec.x_label or X_LABELS.get(spec.x_var, spec.x_var))
        ax.set_ylabel("Mean admitted SU UEs")
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(spec.out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return RenderInfo(
        out_path=str(Path(spec.out_path)), solvers=tuple(solvers),
        points_per_solver=points,
    )
