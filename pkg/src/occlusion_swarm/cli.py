"""Command-line entry point: ``swarm-sim {fill,transport,batch,render,validate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, ScenarioConfig, dump_config, load_config, parse_override

log = logging.getLogger("occlusion_swarm")

EXIT_OK, EXIT_USAGE, EXIT_GOAL_MISSED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is reserved for missed goals here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_seeds(text: str) -> list[int]:
    """``"1..20"`` (inclusive), ``"3,5,8"`` or a mix such as ``"1..3,10"``."""
    seeds: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            if ".." in chunk:
                lo, hi = (int(x) for x in chunk.split("..", 1))
                if hi < lo:
                    raise UsageError(f"empty seed range {chunk!r}")
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(chunk))
        except ValueError as exc:
            raise UsageError(f"bad seed list {text!r}") from exc
    if not seeds:
        raise UsageError("seed list is empty")
    return seeds


def parse_sweep(text: str) -> tuple[str, list]:
    key, _, raw = text.partition("=")
    if not key or not raw:
        raise UsageError(f"--sweep expects key=v1,v2,..., got {text!r}")
    values = [parse_override(f"{key}={v}")[1] for v in raw.split(",")]
    return key.strip(), values


def _load(args) -> ScenarioConfig:
    overrides = dict(parse_override(s) for s in args.set or [])
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return load_config(args.config, overrides)


def _add_config_args(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--config", required=True, help="scenario YAML file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="dotted override, e.g. controller.k_wall=10 (repeatable)")
    if seed:
        p.add_argument("--seed", type=int, help="overrides the file and SWARM_SIM_SEED")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="swarm-sim", description="Occlusion-based transport and concave-filling simulator.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("fill", "transport"):
        sp = sub.add_parser(name, help=f"run one {name} trial and write logs")
        _add_config_args(sp)
        sp.add_argument("--out", default="runs", help="log directory (default: runs/<name>-seed<seed>)")
        sp.add_argument("--render", action="store_true", help="also write trial.svg")

    bp = sub.add_parser("batch", help="run a seed list, optionally over a parameter sweep")
    _add_config_args(bp, seed=False)
    bp.add_argument("--seeds", default="0..9", help="e.g. 1..20 or 1,4,9")
    bp.add_argument("--sweep", metavar="KEY=V1,V2", help="one batch per value")
    bp.add_argument("--jobs", type=int, default=1)
    bp.add_argument("--out", default="runs", help="directory for report.json")
    bp.add_argument("--log", action="store_true", help="write per-trial logs too")

    rp = sub.add_parser("render", help="render a trial log to SVG")
    rp.add_argument("log_dir")
    rp.add_argument("--out", help="SVG path (default: <log_dir>/trial.svg)")

    vp = sub.add_parser("validate", help="check a config and print the merged result")
    _add_config_args(vp)
    return p


def _trial_dir(args, cfg: ScenarioConfig) -> Path:
    return Path(args.out) / f"{cfg.name}-seed{cfg.seed}"


def cmd_trial(args) -> int:
    from .harness import run_trial
    from .logs import render_svg, write_trial_logs

    cfg = _load(args)
    want = "Fill" if args.command == "fill" else "Transport"
    if cfg.experiment != want:
        raise UsageError(f"{args.config} is a {cfg.experiment} scenario; use the "
                         f"'{cfg.experiment.lower()}' command")
    log.info("running %s seed %d", cfg.name, cfg.seed)
    result = run_trial(cfg)
    out = write_trial_logs(result, cfg, _trial_dir(args, cfg))
    if args.render:
        render_svg(out)
    print(f"{cfg.name} seed={cfg.seed} outcome={result.outcome} steps={result.steps_used} logs={out}")
    return EXIT_OK if result.success else EXIT_GOAL_MISSED


def cmd_batch(args) -> int:
    from .harness import run_batch
    from .logs import atomic_write, write_trial_logs
    from .config import apply_overrides

    cfg = _load(args)
    seeds = parse_seeds(args.seeds)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    sweep = parse_sweep(args.sweep) if args.sweep else None
    points = [(None, cfg)] if sweep is None else [
        (v, apply_overrides(cfg, {sweep[0]: v}).validate()) for v in sweep[1]]

    out = Path(args.out)
    reports, all_ok = [], True
    for value, c in points:
        rep = run_batch(c, seeds, jobs=args.jobs, record=args.log)
        d = rep.to_dict()
        if sweep is not None:
            d["sweep"] = {"key": sweep[0], "value": value}
        reports.append(d)
        all_ok &= all(t.success for t in rep.trials)
        if args.log:
            tag = "" if sweep is None else f"{sweep[0]}={value}/"
            for t in rep.trials:
                write_trial_logs(t, apply_overrides(c, {"seed": t.seed}), out / f"{tag}{c.name}-seed{t.seed}")
        label = "" if sweep is None else f" {sweep[0]}={value}"
        print(f"{c.name}{label}: success {rep.success_rate:.2f} over {len(seeds)} seeds, "
              f"steps {rep.steps_mean:.1f} ± {rep.steps_std:.1f}, "
              f"final deficiency {rep.final_deficiency_mean:.4f}")
    doc = reports[0] if sweep is None else {"sweep": sweep[0], "points": reports}
    atomic_write(out / "report.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all_ok else EXIT_GOAL_MISSED


def cmd_render(args) -> int:
    from .logs import render_svg

    try:
        path = render_svg(args.log_dir, args.out)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    print(path)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args)
    sys.stdout.write(dump_config(cfg))
    return EXIT_OK


COMMANDS = {"fill": cmd_trial, "transport": cmd_trial, "batch": cmd_batch,
            "render": cmd_render, "validate": cmd_validate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"swarm-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
