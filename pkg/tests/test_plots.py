"""Figure rendering writes valid PNG files from synthetic row tables."""

import pytest

from mixrelay import plots

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _check_png(path):
    data = path.read_bytes()
    assert data[:8] == PNG_MAGIC
    assert len(data) > 1000


def test_plot_rate_vs_m(tmp_path):
    rows = []
    for m in (32, 64):
        for bits in ("1", "inf"):
            for source, val in (("mc", 1.0), ("exact", 1.02), ("approx", 1.01)):
                rows.append({"m": m, "bits": bits, "source": source,
                             "sum_rate": val * m / 32})
    out = tmp_path / "rate.png"
    plots.plot_rate_vs_m(rows, out)
    _check_png(out)


def test_plot_power_scaling(tmp_path):
    rows = [{"m": m, "kappa": kap, "exact": 1.0 + m / 100, "approx": 1.0,
             "limit": 2.0} for kap in (0.0, 1.0) for m in (16, 64)]
    out = tmp_path / "scaling.png"
    plots.plot_power_scaling(rows, out)
    _check_png(out)


def test_plot_allocate(tmp_path):
    rows = [{"m": m, "scheme": s, "sum_rate": r}
            for m in (32, 128)
            for s, r in (("uniform", 1.0), ("optimized", 1.3))]
    out = tmp_path / "alloc.png"
    plots.plot_allocate(rows, out)
    _check_png(out)


def test_plot_energy(tmp_path):
    rows = [{"b_low": b, "kappa": kap, "ee_bits_per_joule": 1e6 * b}
            for kap in (0.0, 0.5) for b in (1, 2, 3)]
    out = tmp_path / "energy.png"
    plots.plot_energy(rows, out)
    _check_png(out)


def test_missing_source_series_is_skipped(tmp_path):
    rows = [{"m": 32, "bits": "2", "source": "exact", "sum_rate": 1.0},
            {"m": 64, "bits": "2", "source": "exact", "sum_rate": 1.5}]
    out = tmp_path / "sparse.png"
    plots.plot_rate_vs_m(rows, out)
    _check_png(out)
