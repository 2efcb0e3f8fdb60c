"""Shared helpers for the experiment scripts."""
import argparse
from pathlib import Path

from spinforge.cli import sweep


def parser(doc: str, default_out: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--out", default=default_out, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    return p


def run_all(configs, args) -> int:
    out = Path(args.out)
    named = [c.replace(output=str(out / name)) for name, c in configs]
    return sweep(named, workers=args.workers, out_dir=out)
