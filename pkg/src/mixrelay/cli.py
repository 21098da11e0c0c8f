"""Command-line experiment harness.

Every subcommand writes a CSV whose first line is a ``#`` comment with the
full configuration (including the master seed), so a run can be replayed
from its output alone.  Powers are taken in dB on the command line and
converted once, here; library code works in linear units throughout.
Unless ``--no-plot`` is given, a PNG rendering of the table is written
next to the CSV.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

from . import experiments, validate
from .alloc import trace_to_csv


def db_to_lin(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_bits_list(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(math.inf if tok in ("inf", "infinite") else float(tok))
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_csv(path, fieldnames, rows, config: dict) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            items = " ".join(f"{k}={v}" for k, v in config.items())
            fh.write(f"# mixrelay {items}\n")
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _fmt(v) for k, v in row.items()})
    except OSError as exc:
        raise SystemExit(f"cannot write {path}: {exc}") from exc


def _render(plot_fn_name: str, rows, csv_path) -> Path:
    from . import plots

    png = Path(csv_path).with_suffix(".png")
    getattr(plots, plot_fn_name)(rows, png)
    return png


def _add_common(parser, default_out):
    parser.add_argument("--seed", type=int, default=1,
                        help="master seed (default 1)")
    parser.add_argument("--out", default=default_out,
                        help=f"output CSV path (default {default_out})")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip writing the PNG next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixrelay",
        description="Mixed-resolution relay array: rate, scaling, power "
                    "allocation, and energy-efficiency experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate-vs-m", help="sum rate against array size")
    p.add_argument("--m-list", type=_parse_int_list, default=[64, 128, 256, 512])
    p.add_argument("--bits", type=_parse_bits_list, default=[1.0, 2.0, 3.0, math.inf],
                   help="comma list of resolutions; 'inf' allowed")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--ps-db", type=float, default=10.0)
    p.add_argument("--pr-db", type=float, default=10.0)
    p.add_argument("--trials", type=int, default=2000)
    _add_common(p, "rate_vs_m.csv")

    p = sub.add_parser("power-scaling", help="rate under p = E/M scaling")
    p.add_argument("--m-list", type=_parse_int_list,
                   default=[256, 1024, 4096, 16384])
    p.add_argument("--kappa-list", type=_parse_float_list,
                   default=[0.0, 0.5, 1.0])
    p.add_argument("--bits", type=float, default=2.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--es-db", type=float, default=10.0)
    p.add_argument("--er-db", type=float, default=10.0)
    _add_common(p, "power_scaling.csv")

    p = sub.add_parser("allocate", help="uniform vs optimized power split")
    p.add_argument("--m-list", type=_parse_int_list, default=[64, 128, 256])
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--bits", type=float, default=2.0)
    p.add_argument("--budget-db", type=float, default=10.0)
    p.add_argument("--theta", type=float, default=1.1)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--trace-out", default=None,
                   help="optional CSV with per-iteration optimizer state")
    _add_common(p, "allocate.csv")

    p = sub.add_parser("energy", help="energy-efficiency sweep over bits")
    p.add_argument("--bits-list", type=_parse_int_list,
                   default=list(range(1, 13)))
    p.add_argument("--kappa-list", type=_parse_float_list,
                   default=[0.0, 0.5, 1.0])
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--ps-db", type=float, default=10.0)
    p.add_argument("--pr-db", type=float, default=10.0)
    _add_common(p, "energy.csv")

    p = sub.add_parser("validate", help="run the Monte Carlo self-checks")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None,
                   help="optional path for the pass/fail report")
    return parser


def _cmd_rate_vs_m(args) -> int:
    fields, rows = experiments.run_rate_vs_m(
        args.m_list, args.bits, k=args.k, kappa=args.kappa,
        p_s=db_to_lin(args.ps_db), p_r=db_to_lin(args.pr_db),
        trials=args.trials, seed=args.seed)
    config = {"command": "rate-vs-m", "m_list": args.m_list,
              "bits": [experiments.bits_label(b) for b in args.bits],
              "k": args.k, "kappa": args.kappa, "ps_db": args.ps_db,
              "pr_db": args.pr_db, "trials": args.trials, "seed": args.seed}
    write_csv(args.out, fields, rows, config)
    print(f"wrote {args.out} ({len(rows)} rows)")
    if not args.no_plot:
        print(f"wrote {_render('plot_rate_vs_m', rows, args.out)}")
    return 0


def _cmd_power_scaling(args) -> int:
    fields, rows = experiments.run_power_scaling(
        args.m_list, args.kappa_list, k=args.k, bits=args.bits,
        e_s=db_to_lin(args.es_db), e_r=db_to_lin(args.er_db), seed=args.seed)
    config = {"command": "power-scaling", "m_list": args.m_list,
              "kappa_list": args.kappa_list, "bits": args.bits, "k": args.k,
              "es_db": args.es_db, "er_db": args.er_db, "seed": args.seed}
    write_csv(args.out, fields, rows, config)
    print(f"wrote {args.out} ({len(rows)} rows)")
    if not args.no_plot:
        print(f"wrote {_render('plot_power_scaling', rows, args.out)}")
    return 0


def _cmd_allocate(args) -> int:
    fields, rows, traces = experiments.run_allocate(
        args.m_list, k=args.k, kappa=args.kappa, bits=args.bits,
        p_total=db_to_lin(args.budget_db), theta=args.theta, eps=args.eps,
        max_iter=args.max_iter, seed=args.seed)
    config = {"command": "allocate", "m_list": args.m_list, "k": args.k,
              "kappa": args.kappa, "bits": args.bits,
              "budget_db": args.budget_db, "theta": args.theta,
              "eps": args.eps, "max_iter": args.max_iter, "seed": args.seed}
    write_csv(args.out, fields, rows, config)
    print(f"wrote {args.out} ({len(rows)} rows)")
    if args.trace_out:
        for i, (m, res) in enumerate(sorted(traces.items())):
            path = Path(args.trace_out)
            if len(traces) > 1:
                path = path.with_name(f"{path.stem}_m{m}{path.suffix}")
            trace_to_csv(res, path, extra={"m": m})
            print(f"wrote {path}")
    if not args.no_plot:
        print(f"wrote {_render('plot_allocate', rows, args.out)}")
    return 0


def _cmd_energy(args) -> int:
    fields, rows = experiments.run_energy(
        args.bits_list, args.kappa_list, m=args.m, k=args.k,
        p_s=db_to_lin(args.ps_db), p_r=db_to_lin(args.pr_db), seed=args.seed)
    config = {"command": "energy", "bits_list": args.bits_list,
              "kappa_list": args.kappa_list, "m": args.m, "k": args.k,
              "ps_db": args.ps_db, "pr_db": args.pr_db, "seed": args.seed}
    write_csv(args.out, fields, rows, config)
    print(f"wrote {args.out} ({len(rows)} rows)")
    for kappa, bits in experiments.best_bits_per_kappa(rows).items():
        print(f"best resolution at kappa={kappa:g}: b={bits}")
    if not args.no_plot:
        print(f"wrote {_render('plot_energy', rows, args.out)}")
    return 0


def _cmd_validate(args) -> int:
    results = validate.run_all(seed=args.seed)
    report = validate.format_report(results)
    print(report)
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    return 0 if all(r.passed for r in results) else 1


_DISPATCH = {
    "rate-vs-m": _cmd_rate_vs_m,
    "power-scaling": _cmd_power_scaling,
    "allocate": _cmd_allocate,
    "energy": _cmd_energy,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _DISPATCH[args.command](args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
