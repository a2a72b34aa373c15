"""Render zxwave CSV artifacts into the three standard panels.

A pure view over the simulation outputs: nothing is recomputed here. Panels:

- ``ber-a``: semilog BER vs SNR for the two oversampling factors.
- ``ber-b``: semilog BER vs SNR for one configuration overlaid with the
  bundled literature reference curves.
- ``psd-c``: normalized analytic and empirical PSD overlay.

Rendering is deterministic: no timestamps enter the output metadata.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "zxplots"   # deterministic SVG ids

import matplotlib.pyplot as plt

PANELS = ("ber-a", "ber-b", "psd-c")

BER_SCHEMA = ("snr_db", "ber")
PSD_SCHEMA = ("f_t", "analytic_db", "empirical_db")

#: legend labels for the bundled reference files
REFERENCE_LABELS = {
    "reference_ber_mrx2_proposed.csv": "waveform design m_rx=2 (reference)",
    "reference_ber_mrx3_proposed.csv": "waveform design m_rx=3 (reference)",
    "reference_ber_mrx3_mmddt.csv": "MMDDT precoding (reference)",
    "reference_ber_mrx3_zx_random.csv": "ZX transceiver, random mapping (reference)",
    "reference_ber_mrx3_zx_golay.csv": "ZX transceiver, Golay mapping (reference)",
}

SNR_RANGE = (-10.0, 30.0)
BER_RANGE = (1e-4, 1.0)


class SchemaError(Exception):
    """Input CSV does not match the expected column layout."""


@dataclass(frozen=True)
class FigureSpec:
    panel: str
    inputs: tuple
    output: str
    reference_dir: str | None = None
    labels: tuple = field(default=None)

    def __post_init__(self):
        if self.panel not in PANELS:
            raise SchemaError(f"unknown panel {self.panel!r}; choose from {PANELS}")
        if not self.inputs:
            raise SchemaError("at least one --input CSV is required")


def read_columns(path, required):
    """Load required columns from a CSV; complain precisely when absent."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {', '.join(missing)} "
                f"(found: {', '.join(header) or 'nothing'})")
        rows = [[float(row[col]) for col in required] for row in reader]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    columns = list(zip(*rows))
    return {col: list(vals) for col, vals in zip(required, columns)}


def _label_for(path):
    name = os.path.basename(path)
    return REFERENCE_LABELS.get(name, os.path.splitext(name)[0])


def _new_axes():
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.grid(True, which="both", alpha=0.4)
    return fig, ax


def _ber_axes(ax):
    ax.set_yscale("log")
    ax.set_xlim(*SNR_RANGE)
    ax.set_ylim(*BER_RANGE)
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("BER")


def _plot_ber(ax, path, label, style=None):
    data = read_columns(path, BER_SCHEMA)
    kwargs = dict(style or {})
    ax.plot(data["snr_db"], data["ber"], label=label, **kwargs)


def _render_ber_a(spec, ax):
    for i, path in enumerate(spec.inputs):
        label = spec.labels[i] if spec.labels and i < len(spec.labels) else _label_for(path)
        _plot_ber(ax, path, label, {"marker": "o", "markersize": 3})
    _ber_axes(ax)


def _render_ber_b(spec, ax):
    for i, path in enumerate(spec.inputs):
        label = spec.labels[i] if spec.labels and i < len(spec.labels) else "simulated"
        _plot_ber(ax, path, label, {"marker": "o", "markersize": 3, "zorder": 5})
    if spec.reference_dir:
        names = sorted(n for n in os.listdir(spec.reference_dir)
                       if n.endswith(".csv") and "mrx2" not in n)
        for name in names:
            _plot_ber(ax, os.path.join(spec.reference_dir, name),
                      _label_for(name), {"linestyle": "--", "linewidth": 1.0})
    _ber_axes(ax)


def _render_psd_c(spec, ax):
    data = read_columns(spec.inputs[0], PSD_SCHEMA)
    ax.plot(data["f_t"], data["analytic_db"], label="analytic", linewidth=1.4)
    ax.plot(data["f_t"], data["empirical_db"], label="empirical",
            linewidth=0.9, alpha=0.8)
    ax.set_xlim(-3.0, 3.0)
    ax.set_ylim(-60.0, 5.0)
    ax.set_xlabel("f T")
    ax.set_ylabel("normalized PSD [dB]")


def render(spec: FigureSpec) -> str:
    """Draw the requested panel; returns the output path.

    Raises SchemaError before anything is written if an input is unusable.
    """
    fig, ax = _new_axes()
    try:
        if spec.panel == "ber-a":
            _render_ber_a(spec, ax)
        elif spec.panel == "ber-b":
            _render_ber_b(spec, ax)
        else:
            _render_psd_c(spec, ax)
        ax.legend(fontsize=7, loc="lower left")
        fig.tight_layout()
        metadata = {"Date": None} if spec.output.endswith(".svg") else {}
        fig.savefig(spec.output, dpi=150, metadata=metadata)
    finally:
        plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zxplots", description="Render zxwave CSV outputs into figures")
    parser.add_argument("--panel", required=True, choices=PANELS)
    parser.add_argument("--input", action="append", default=[],
                        help="input CSV (repeatable)")
    parser.add_argument("--label", action="append", default=[],
                        help="legend label per --input (optional, repeatable)")
    parser.add_argument("--reference-dir",
                        help="directory with reference curve CSVs (ber-b)")
    parser.add_argument("--output", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(panel=args.panel, inputs=tuple(args.input),
                          output=args.output,
                          reference_dir=args.reference_dir,
                          labels=tuple(args.label) or None)
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"zxplots: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
