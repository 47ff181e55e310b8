"""Command-line entry point: ``cdcat {run,sweep,schedules}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .runner import (
    OUTPUTS,
    RunConfig,
    StageError,
    export_schedules,
    run_single,
    run_sweep,
)

log = logging.getLogger("cdcat")

# flag name -> RunConfig field
_OVERRIDES = {
    "N": "N",
    "J": "J",
    "tf": "t_f",
    "steps": "steps",
    "cd": "cd_mode",
    "horizon_factor": "horizon_factor",
    "samples": "sample_count",
    "order": "order",
    "outputs": "outputs",
}


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    common.add_argument("--N", type=int)
    common.add_argument("--J", type=float)
    common.add_argument("--tf", type=float, help="ramp duration t_f")
    common.add_argument("--steps", type=int, help="integration steps over the ramp")
    common.add_argument("--cd", choices=["off", "on", "after-critical"])
    common.add_argument("--horizon-factor", type=float, help="freeze until horizon_factor * t_f")
    common.add_argument("--samples", type=int, help="trace samples over the ramp")
    common.add_argument("--order", type=int, choices=[2, 4])
    common.add_argument("--outputs", type=_str_list, help=f"comma list from {','.join(OUTPUTS)}")
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="cdcat",
        description="Counter-diabatic cat-state generation in a bosonic Josephson junction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single ramp with diagnostics")

    sw = sub.add_parser("sweep", parents=[common], help="final diagnostics over t_f or N")
    axis = sw.add_mutually_exclusive_group()
    axis.add_argument("--tf-list", type=_float_list)
    axis.add_argument("--N-list", type=_int_list)
    sw.add_argument("--cd-modes", type=_str_list)
    sw.add_argument("--jobs", type=int)

    sc = sub.add_parser("schedules", parents=[common], help="export the control schedules")
    sc.add_argument("--N-list", type=_int_list)
    sc.add_argument("--grid", type=int)
    return parser


def _load(args) -> tuple[RunConfig, dict]:
    data = json.loads(args.config.read_text()) if args.config else {}
    extra = {k: data.pop(k) for k in ("sweep", "schedules") if k in data}
    for flag, name in _OVERRIDES.items():
        val = getattr(args, flag, None)
        if val is not None:
            data[name] = val
    return RunConfig.from_dict(data), extra


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, extra = _load(args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"cdcat: config failed: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            res = run_single(cfg, args.out_dir)
            print(json.dumps({k: v for k, v in res.summary().items() if k != "config"},
                             sort_keys=True))
            return 0 if res.ok else 1

        if args.command == "sweep":
            opts = extra.get("sweep", {})
            if args.N_list is not None:
                axis, values = "N", args.N_list
            elif args.tf_list is not None:
                axis, values = "t_f", args.tf_list
            else:
                axis, values = opts.get("axis", "t_f"), opts.get("values", [])
            cd_modes = args.cd_modes if args.cd_modes is not None else opts.get("cd_modes", ["on", "off"])
            jobs = args.jobs or opts.get("jobs", 1)
            rows = run_sweep(cfg, axis, values, cd_modes, args.out_dir / "sweep.csv", jobs=jobs)
            bad = [r for r in rows if r[-1] != "ok"]
            for r in bad:
                print(f"cdcat: row {axis}={r[0] if axis == 'N' else r[1]} cd={r[2]}: {r[-1]}",
                      file=sys.stderr)
            return 0 if not bad else 1

        opts = extra.get("schedules", {})
        Ns = args.N_list or opts.get("N_list") or [100, 500, 1000]
        grid = args.grid or opts.get("grid", 1001)
        export_schedules(cfg, grid, Ns, args.out_dir / "schedules.csv")
        return 0
    except StageError as exc:
        print(f"cdcat: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"cdcat: invalid request: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
