"""Command-line batch runner.

    hardyx run CONFIG [--override-hypothesis] [--out DIR] [--seed N]
    hardyx export-family CONFIG --out DIR [--seed N]
    hardyx inspect FILE.gfn1

Exit codes: 0 success, 1 error, 2 hypothesis violated (no override).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gfn1
from .experiments import ConfigError, load_config, run_experiment
from .grid import discrete_lp_norm

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESIS = 2


def _err(msg: str) -> None:
    print(f"hardyx: error: {msg}", file=sys.stderr)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.seed)
    out = Path(args.out) if args.out else Path(cfg.raw.get("output", {}).get("dir", "."))
    res = run_experiment(cfg, args.override_hypothesis)
    stem = cfg.raw.get("output", {}).get("stem", cfg.id)
    csv_path, summary_path = out / f"{stem}.csv", out / f"{stem}.summary.json"
    _write(csv_path, res.to_csv())
    _write(summary_path, json.dumps(res.summary, indent=2, sort_keys=True) + "\n")
    if res.violated and not args.override_hypothesis:
        bad = "; ".join(h.description for h in res.validity.violated())
        print(f"hypothesis violated ({res.validity.theorem}): {bad}", file=sys.stderr)
        print(f"wrote {summary_path}")
        return EXIT_HYPOTHESIS
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    return EXIT_OK


def cmd_export_family(args) -> int:
    cfg = load_config(args.config, args.seed)
    g = cfg.grid()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(cfg.family(g)):
        path = gfn1.export_field(f, out / f"member_{i:03d}.gfn1")
        print(path)
    return EXIT_OK


def cmd_inspect(args) -> int:
    f = gfn1.import_field(args.file)
    g = f.grid
    info = {"n": g.n, "N": g.N, "L": g.L, "kind": "complex" if f.is_complex else "real",
            "L2": discrete_lp_norm(f, 2), "max": discrete_lp_norm(f, float("inf"))}
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardyx", description="Hardy-space norm experiments on periodic grids.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--override-hypothesis", action="store_true",
                     help="run even when the hypothesis check fails")
    run.add_argument("--out", help="output directory (default: config output.dir or .)")
    run.add_argument("--seed", type=int, help="seed override (unsigned 64-bit)")
    run.set_defaults(func=cmd_run)

    ex = sub.add_parser("export-family", help="write the configured family as GFN1 files")
    ex.add_argument("config")
    ex.add_argument("--out", required=True)
    ex.add_argument("--seed", type=int)
    ex.set_defaults(func=cmd_export_family)

    ins = sub.add_parser("inspect", help="print header and norms of a GFN1 file")
    ins.add_argument("file")
    ins.set_defaults(func=cmd_inspect)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _err(f"config: {exc}")
    except gfn1.GFN1Error as exc:
        _err(f"grid file: {exc}")
    except OSError as exc:
        _err(f"I/O: {exc}")
    except ValueError as exc:
        _err(str(exc))
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
