"""The five figure kinds.

Each kind has a prepare step mapping CSV rows to plain data series
(pure, deterministic, easy to test) and a shared draw step that hands
the series to matplotlib. Nothing here computes new quantities; every
plotted number is taken from the file, at most divided by n for the
collapse axis.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import NoDataError, Row, read_rows

KINDS = (
    "delta-reupload",
    "bond-profile",
    "ltilde-scaling",
    "speed-collapse",
    "expressibility",
)

# Rows that lost more singular-value weight than this are drawn with a
# separate marker so unconverged points stand out.
FLAG_DISCARDED = 1e-6


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    in_path: str
    out_path: str
    n: tuple[int, ...] | None = None
    topology: str | None = None


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    yerr: np.ndarray | None = None
    flagged: np.ndarray | None = None
    role: str = "data"  # data | reference | fit
    linestyle: str = "--"  # used for reference lines only


def _pick(rows: list[Row], metric: str, n=None) -> list[Row]:
    out = [r for r in rows if r.metric == metric]
    if n is not None:
        out = [r for r in out if r.n in n]
    return out


def _data_series(group: list[Row], label: str, x_key) -> Series:
    group = sorted(group, key=x_key)
    return Series(
        label=label,
        x=np.array([x_key(r) for r in group], dtype=float),
        y=np.array([r.mean for r in group]),
        yerr=np.array([r.stderr for r in group]),
        flagged=np.array([r.max_discarded > FLAG_DISCARDED for r in group]),
    )


def _no_data(spec: FigureSpec, what: str):
    raise NoDataError(
        f"{spec.in_path}: no {what} rows"
        + (f" for n in {sorted(spec.n)}" if spec.n else "")
    )


def _prepare_delta_reupload(rows, spec):
    picked = _pick(rows, "delta_s_bar", spec.n)
    series = [
        _data_series(
            [r for r in picked if r.n == n], f"n = {n}", lambda r: r.L
        )
        for n in sorted({r.n for r in picked})
    ]
    if not series:
        _no_data(spec, "delta_s_bar")
    return series


def _prepare_bond_profile(rows, spec):
    picked = _pick(rows, "bond_entropy", spec.n)
    ns = sorted({r.n for r in picked})
    if not ns:
        _no_data(spec, "bond_entropy")
    multi = len(ns) > 1
    series = []
    for n in ns:
        for layers in sorted({r.L for r in picked if r.n == n}):
            group = [r for r in picked if r.n == n and r.L == layers]
            label = f"n = {n}, L = {layers}" if multi else f"L = {layers}"
            series.append(_data_series(group, label, lambda r: r.bond))
    for n in ns:
        haar = _pick(rows, "haar_entropy", (n,))
        if haar:
            ref = _data_series(haar, f"Haar n = {n}" if multi else "Haar",
                               lambda r: r.bond)
            ref.role, ref.linestyle = "reference", "--"
            series.append(ref)
        bound = _pick(rows, "entropy_bound", (n,))
        if bound:
            ref = _data_series(bound, f"bound n = {n}" if multi else "bound",
                               lambda r: r.bond)
            ref.role, ref.linestyle = "reference", ":"
            series.append(ref)
    return series


def _prepare_ltilde(rows, spec):
    picked = [r for r in _pick(rows, "l_tilde", spec.n)
              if math.isfinite(r.mean)]
    if not picked:
        _no_data(spec, "finite l_tilde")
    return [_data_series(picked, spec.topology or "half-Haar depth",
                         lambda r: r.n)]


def _prepare_speed_collapse(rows, spec):
    picked = _pick(rows, "s_tilde", spec.n)
    ns = sorted({r.n for r in picked})
    if not ns:
        _no_data(spec, "s_tilde")
    series = []
    x_max = 0.0
    for n in ns:
        s = _data_series([r for r in picked if r.n == n], f"n = {n}",
                         lambda r: r.L / r.n)
        x_max = max(x_max, float(s.x.max()))
        series.append(s)
    # overlay the pooled fit (the n = 0 summary row) when it converged
    pooled = [r for r in rows if r.metric == "v_s" and r.n == 0
              and math.isfinite(r.mean)]
    if pooled:
        v = pooled[0].mean
        grid = np.linspace(0.0, x_max, 50)
        series.append(Series(label=f"fit: v = {v:.3g}", x=grid, y=v * grid,
                             role="fit"))
    return series


def _prepare_expressibility(rows, spec):
    picked = _pick(rows, "expressibility", spec.n)
    series = [
        _data_series(
            [r for r in picked if r.n == n], f"n = {n}", lambda r: r.L
        )
        for n in sorted({r.n for r in picked})
    ]
    if not series:
        _no_data(spec, "expressibility")
    return series


_PREPARE = {
    "delta-reupload": _prepare_delta_reupload,
    "bond-profile": _prepare_bond_profile,
    "ltilde-scaling": _prepare_ltilde,
    "speed-collapse": _prepare_speed_collapse,
    "expressibility": _prepare_expressibility,
}

_AXES = {
    "delta-reupload": ("layers L", "central-bond entropy contrast", False),
    "bond-profile": ("bond", "entanglement entropy", False),
    "ltilde-scaling": ("qubits n", "layers to half the Haar entanglement", False),
    "speed-collapse": ("L / n", "normalized peak entropy", False),
    "expressibility": ("layers L", "KL divergence from Haar fidelities", True),
}


def prepare(spec: FigureSpec) -> list[Series]:
    """Read the CSV and turn it into the figure's data series."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind {spec.kind!r}")
    return _PREPARE[spec.kind](read_rows(spec.in_path), spec)


def render(spec: FigureSpec) -> str:
    """Draw the figure and write it to spec.out_path. The extension
    picks the image format; without one the file is written as SVG."""
    series = prepare(spec)
    xlabel, ylabel, logy = _AXES[spec.kind]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        flagged_labeled = False
        for s in series:
            if s.role == "data":
                ax.errorbar(s.x, s.y, yerr=s.yerr, fmt="o-", ms=4, lw=1.2,
                            capsize=2, label=s.label)
                if s.flagged is not None and s.flagged.any():
                    mask = s.flagged
                    ax.plot(s.x[mask], s.y[mask], "x", ms=9, mew=1.8,
                            color="crimson",
                            label="_nolegend_" if flagged_labeled
                            else "unconverged")
                    flagged_labeled = True
            elif s.role == "reference":
                ax.plot(s.x, s.y, linestyle=s.linestyle, color="black",
                        lw=1.0, label=s.label)
            else:
                ax.plot(s.x, s.y, "-", color="black", lw=1.0, label=s.label)
        if spec.kind == "delta-reupload":
            ax.axhline(0.0, color="gray", lw=0.6)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        title = spec.kind
        if spec.topology:
            title = f"{title} ({spec.topology} topology)"
        ax.set_title(title)
        ax.legend(fontsize="small")
        fig.tight_layout()
        ext = os.path.splitext(spec.out_path)[1].lstrip(".").lower()
        fig.savefig(spec.out_path, format=ext or "svg")
    finally:
        plt.close(fig)
    return spec.out_path
