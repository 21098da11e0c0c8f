"""Figure rendering for experiment CSV tables.

Kept separate from the runners so headless CSV-only use never imports
matplotlib.  Each function takes the row dicts produced by
:mod:`mixrelay.experiments` and writes one PNG.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_MARKERS = ["o", "s", "^", "d", "v", "*", "x", "+"]


def _series(rows, key):
    order = []
    for row in rows:
        if row[key] not in order:
            order.append(row[key])
    return order


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_rate_vs_m(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    styles = {"mc": dict(linestyle="none"), "exact": dict(linestyle="-"),
              "approx": dict(linestyle="--")}
    for i, bits in enumerate(_series(rows, "bits")):
        for source, style in styles.items():
            pts = [(r["m"], r["sum_rate"]) for r in rows
                   if r["bits"] == bits and r["source"] == source]
            if not pts:
                continue
            label = f"b={bits} {source}" if source != "exact" else f"b={bits}"
            ax.plot(*zip(*pts), marker=_MARKERS[i % len(_MARKERS)],
                    color=f"C{i}", markerfacecolor="none", label=label, **style)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("relay antenna pairs M")
    ax.set_ylabel("sum rate (bit/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_power_scaling(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, kappa in enumerate(_series(rows, "kappa")):
        sub = [r for r in rows if r["kappa"] == kappa]
        ax.plot([r["m"] for r in sub], [r["exact"] for r in sub],
                marker=_MARKERS[i % len(_MARKERS)], color=f"C{i}",
                markerfacecolor="none", label=f"kappa={kappa}")
        ax.plot([r["m"] for r in sub], [r["limit"] for r in sub],
                linestyle=":", color=f"C{i}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("relay antenna pairs M (power scaled as E/M)")
    ax.set_ylabel("sum rate (bit/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_allocate(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, scheme in enumerate(_series(rows, "scheme")):
        sub = [r for r in rows if r["scheme"] == scheme]
        ax.plot([r["m"] for r in sub], [r["sum_rate"] for r in sub],
                marker=_MARKERS[i % len(_MARKERS)], color=f"C{i}",
                markerfacecolor="none", label=scheme)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("relay antenna pairs M")
    ax.set_ylabel("sum rate (bit/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_energy(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, kappa in enumerate(_series(rows, "kappa")):
        sub = [r for r in rows if r["kappa"] == kappa]
        ax.plot([r["b_low"] for r in sub],
                [r["ee_bits_per_joule"] / 1e6 for r in sub],
                marker=_MARKERS[i % len(_MARKERS)], color=f"C{i}",
                markerfacecolor="none", label=f"kappa={kappa}")
    ax.set_xlabel("low-resolution converter bits")
    ax.set_ylabel("energy efficiency (Mbit/J)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, path)
