"""
Command-line entry point.

    spinforge ate|pite|postselect|scaling|spectrum [--config FILE] [--flag value ...]
    spinforge sweep CONFIG ... [--grid key=v1,v2 ...] [--workers K] [--out-dir DIR]

Flags override config-file values.  Every CSV starts with ``#`` metadata
lines holding the package version, a config hash and the full config, so a
run can be reproduced from its own output (see ``read_config_header``).
Exit codes: 0 ok, 2 bad configuration, 3 numerical contract, 4 empty sector.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

from . import __version__
from .config import RunConfig
from .errors import ConfigurationError, SpinforgeError
from . import experiments as ex

log = logging.getLogger("spinforge")

INDEX_COLUMNS = ("run", "experiment", "output", "status", "exit_code", "config_hash", "message")


def _flag(name: str) -> str:
    return "--" + name.lower().replace("_", "-")


def _add_config_flags(p: argparse.ArgumentParser, experiment: str) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("-v", "--verbose", action="store_true")
    for f in fields(RunConfig):
        if f.name == "experiment":
            continue
        flag = _flag(f.name)
        if experiment == "scaling" and f.name == "n_list":
            flag = "--n"
        elif experiment == "scaling" and f.name == "n":
            continue
        if f.type in ("bool", bool):
            p.add_argument(flag, dest=f.name, action="store_const", const="true", default=None)
        else:
            p.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinforge", description="spin-adapted ground-state preparation experiments")
    parser.add_argument("--version", action="version", version=f"spinforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ate", "pite", "postselect", "scaling", "spectrum"):
        _add_config_flags(sub.add_parser(name), name)
    sw = sub.add_parser("sweep", help="run many configs, optionally in parallel")
    sw.add_argument("configs", nargs="*", help="config files")
    sw.add_argument("--base-config", help="config the --grid values are applied to")
    sw.add_argument("--grid", action="append", default=[], metavar="KEY=V1,V2",
                    help="cartesian product over values (repeatable)")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out-dir", default="sweep_out")
    sw.add_argument("--index", default=None, help="index CSV (default OUT_DIR/index.csv)")
    sw.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(experiment=args.command)
    if args.config:
        cfg = RunConfig.from_text(Path(args.config).read_text(encoding="utf-8"), cfg)
        cfg = cfg.replace(experiment=args.command)
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)
                 if getattr(args, f.name, None) is not None and f.name != "experiment"}
    return cfg.with_strings(overrides)


def header_lines(cfg: RunConfig, metadata: dict | None = None) -> list[str]:
    lines = [f"spinforge {__version__}", f"config_hash {cfg.digest()}"]
    lines += [f"config {line}" for line in cfg.to_text().splitlines()]
    lines += [f"meta {k} = {v}" for k, v in (metadata or {}).items()]
    return lines


def read_config_header(path) -> RunConfig:
    """Rebuild the RunConfig stored in an output file's metadata block."""
    body = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# config "):
            body.append(line[len("# config "):])
    if not body:
        raise ConfigurationError(f"{path} has no config header")
    return RunConfig.from_text("\n".join(body))


def _open_out(path: str):
    if not path:
        return _Stdout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def run(cfg: RunConfig) -> int:
    """Execute one configured experiment and write its artifacts."""
    if cfg.experiment in ("ate", "pite"):
        pb = ex.build_problem(cfg)
        if cfg.dump_hamiltonian:
            Path(cfg.dump_hamiltonian).write_text(pb.H_problem.to_text(), encoding="utf-8")
        rec = ex.run_ate(cfg, pb) if cfg.experiment == "ate" else ex.run_pite(cfg, pb)
        with _open_out(cfg.output) as fh:
            rec.write_csv(fh, header_lines(cfg, rec.metadata))
        if cfg.dump_state:
            rec.final_state.to_csv(cfg.dump_state)
        final = rec.final
        _say(f"final energy_problem={final['energy_problem']:.10g} s2={final['s2']:.10g} "
             f"sz={final['sz']:.10g} fidelity={final['fidelity']:.6g}")
    elif cfg.experiment == "postselect":
        res = ex.run_postselect(cfg)
        if cfg.output:
            res.state.to_csv(cfg.output)
        print(f"theta_opt={res.plan.theta_opt!r}")
        print(f"predicted_probability={res.plan.expected_weight!r}")
        print(f"realized_probability={res.probability!r}")
        print(f"leakage={res.leakage!r}")
        print(f"method={res.method}")
    elif cfg.experiment == "scaling":
        rec = ex.run_scaling(cfg)
        with _open_out(cfg.output) as fh:
            rec.write_csv(fh, header_lines(cfg))
        if cfg.output:
            with open(Path(cfg.output).with_suffix(".json"), "w", encoding="utf-8") as fh:
                rec.write_json(fh)
        else:
            _say(json.dumps(rec.fit_summary()))
    elif cfg.experiment == "spectrum":
        levels = ex.run_spectrum(cfg)
        with _open_out(cfg.output) as fh:
            for line in header_lines(cfg):
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "energy", "degeneracy", "s2", "s"])
            for i, lv in enumerate(levels):
                w.writerow([i, repr(lv.energy), lv.degeneracy, repr(lv.s2), f"{lv.spin:.6f}"])
    return 0


# -- sweeps ----------------------------------------------------------------


def _sweep_worker(text: str) -> tuple[str, int, str]:
    cfg = RunConfig.from_text(text)
    try:
        return "ok", run(cfg), ""
    except SpinforgeError as exc:
        return "failed", exc.exit_code, f"{type(exc).__name__}: {exc}"


def grid_configs(base: RunConfig, grid: list[str]) -> list[RunConfig]:
    axes = []
    for item in grid:
        key, _, values = item.partition("=")
        if not values:
            raise ConfigurationError(f"grid entry {item!r} should look like key=v1,v2")
        axes.append([(key.strip(), v.strip()) for v in values.split(",")])
    return [base.with_strings(dict(combo)) for combo in itertools.product(*axes)] if axes else []


def sweep(configs: list[RunConfig], workers: int = 1, out_dir="sweep_out", index_path=None) -> int:
    out_dir = Path(out_dir)
    planned = []
    for i, cfg in enumerate(configs):
        if not cfg.output and cfg.experiment != "postselect":
            cfg = cfg.replace(output=str(out_dir / f"run_{i:03d}_{cfg.experiment}.csv"))
        planned.append(cfg)
    outputs = [c.output for c in planned if c.output]
    if len(set(outputs)) != len(outputs):
        raise ConfigurationError("sweep runs share an output path")
    texts = [c.to_text() for c in planned]
    if workers > 1 and len(texts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, texts))
    else:
        results = [_sweep_worker(t) for t in texts]
    index_path = Path(index_path) if index_path else out_dir / "index.csv"
    index_path.parent.mkdir(parents=True, exist_ok=True)
    with open(index_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INDEX_COLUMNS)
        for i, (cfg, (status, code, msg)) in enumerate(zip(planned, results)):
            w.writerow([i, cfg.experiment, cfg.output, status, code, cfg.digest(), msg])
    failed = sum(status != "ok" for status, _, _ in results)
    if failed:
        _say(f"{failed} of {len(results)} runs failed; see {index_path}")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "sweep":
            cfgs = [RunConfig.from_text(Path(p).read_text(encoding="utf-8")) for p in args.configs]
            if args.grid:
                base = RunConfig.from_text(Path(args.base_config).read_text(encoding="utf-8")) \
                    if args.base_config else RunConfig()
                cfgs += grid_configs(base, args.grid)
            return sweep(cfgs, args.workers, args.out_dir, args.index)
        return run(config_from_args(args))
    except SpinforgeError as exc:
        _say(f"spinforge: error exit={exc.exit_code} kind={type(exc).__name__} message={exc}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
