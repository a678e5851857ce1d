"""Command-line entry point: ``latticecollapse verify|table|sample``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import functionals as F
from .config import ConfigError, RunConfig, load_config
from .export import table_csv, table_json, write_atomic
from .kernel import BACKEND
from .sampler import CollapseSampler, ZeroMeasureError, frequency_summary, summary_csv
from .verify import report, run_suite

log = logging.getLogger("latticecollapse")


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    runs = []
    ok = True
    t0 = time.perf_counter()
    for X in cfg.X:
        model = cfg.model(X)
        results = run_suite(model, cfg.extent, tolerance=cfg.tolerance, seed=cfg.seed)
        rep = report(results, X=X)
        ok &= rep["passed"]
        runs.append(rep)
        log.info("X=%g: %s", X, "pass" if rep["passed"] else "FAIL")
    doc = {
        "config": cfg.to_dict(),
        "backend": BACKEND,
        "passed": ok,
        "seconds": time.perf_counter() - t0,
        "runs": runs,
    }
    return doc, 0 if ok else 1


def _assert_table(M: np.ndarray, tol: float) -> None:
    herm = float(np.max(np.abs(M - M.conj().T)))
    total = complex(M.sum())
    if herm > tol:
        raise AssertionError(f"table is not Hermitian (max deviation {herm:.3e})")
    if abs(total - 1.0) > tol:
        raise AssertionError(f"table entries sum to {total}, not 1")


def cmd_table(cfg: RunConfig, out: Path) -> list[Path]:
    written = []
    n = cfg.extent
    for X in cfg.X:
        model = cfg.model(X)
        M = F.table(model, cfg.functional, n)
        _assert_table(M, max(cfg.tolerance, 1e-10))
        labels = F.table_labels(cfg.functional, n)
        stem = f"table_{cfg.functional}_n{n}" + (f"_X{X:g}" if len(cfg.X) > 1 else "")
        written.append(write_atomic(out / f"{stem}.csv", table_csv(M, labels)))
        written.append(write_atomic(out / f"{stem}.json", table_json(M, labels, n)))
        meta = {"functional": cfg.functional, "extent": n, "X": X, "config": cfg.to_dict()}
        written.append(write_atomic(out / f"{stem}.meta.json", json.dumps(meta, indent=2) + "\n"))
    return written


def cmd_sample(cfg: RunConfig, out: Path) -> list[Path]:
    written = []
    for X in cfg.X:
        model = cfg.model(X)
        sampler = CollapseSampler(model)
        records = list(sampler.ensemble(cfg.steps, cfg.count, cfg.sample_seed, cfg.keep_state))
        suffix = f"_X{X:g}" if len(cfg.X) > 1 else ""
        lines = "".join(r.to_json() + "\n" for r in records)
        written.append(write_atomic(out / f"trajectories{suffix}.jsonl", lines))
        rows = frequency_summary(model, cfg.steps, records)
        written.append(write_atomic(out / f"frequencies{suffix}.csv", summary_csv(rows)))
    return written


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--tolerance", type=float, help="check tolerance (default 1e-10)")
    common.add_argument("--out", metavar="DIR", help="output directory (default ./out)")
    common.add_argument("--X", type=float, action="append", help="coupling; repeat for a grid")
    common.add_argument("--extent", type=int, help="time extent n")
    common.add_argument("--seed", type=int, help="seed for random unitaries")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="latticecollapse", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the property suite, print a JSON report")
    t = sub.add_parser("table", parents=[common], help="write a decoherence table as CSV and JSON")
    t.add_argument("--functional", choices=F.FUNCTIONALS)
    s = sub.add_parser("sample", parents=[common], help="sample collapse-model trajectories")
    s.add_argument("--steps", type=int)
    s.add_argument("--count", type=int)
    s.add_argument("--sample-seed", type=int, dest="sample_seed")
    s.add_argument("--no-state", action="store_false", dest="keep_state", default=None,
                   help="omit conditioned states from the trajectory records")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {
        "tolerance": args.tolerance,
        "out": args.out,
        "X": args.X if args.X is None or len(args.X) > 1 else args.X[0],
        "extent": args.extent,
        "seed": args.seed,
        "functional": getattr(args, "functional", None),
        "steps": getattr(args, "steps", None),
        "count": getattr(args, "count", None),
        "sample_seed": getattr(args, "sample_seed", None),
        "keep_state": getattr(args, "keep_state", None),
    }
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out)

    try:
        if args.command == "verify":
            doc, code = cmd_verify(cfg)
            text = json.dumps(doc, indent=2) + "\n"
            write_atomic(out / "verify_report.json", text)
            sys.stdout.write(text)
            return code
        if args.command == "table":
            paths = cmd_table(cfg, out)
        else:
            paths = cmd_sample(cfg, out)
    except (MemoryError, F.ExtentError, ZeroMeasureError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
