"""Command-line interface: ``qhdc {reason,classify,resources,sweep,selftest,replay}``.

Exit codes: 0 success, 1 negative result (wrong analogy answer, failed
self-test), 2 usage, 3 I/O or file format, 4 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import (
    CancellationError,
    DegenerateVectorError,
    FormatError,
    InsufficientDataError,
    InvalidArgumentError,
    ResourceLimitError,
    UndefinedSimilarityError,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3, 4
SCHEMA_VERSION = 1
DATA_ENV = "QHDC_DATA_DIR"
IMAGE_NAMES = ("mnist36-images-idx3-ubyte.gz", "t10k-images-idx3-ubyte.gz", "t10k-images-idx3-ubyte")
LABEL_NAMES = ("mnist36-labels-idx1-ubyte.gz", "t10k-labels-idx1-ubyte.gz", "t10k-labels-idx1-ubyte")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _pow2(dim: int) -> bool:
    return dim >= 2 and dim & (dim - 1) == 0


def parse_range(text: str) -> list[int]:
    """``4..7``, ``4-7``, ``4,5,7`` or ``6``."""
    try:
        for sep in ("..", "-"):
            if sep in text:
                lo, hi = (int(x) for x in text.split(sep))
                if hi < lo:
                    raise ValueError
                return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use e.g. 4..7 or 4,5,6") from None


def data_dirs() -> list[Path]:
    dirs = []
    if os.environ.get(DATA_ENV):
        dirs.append(Path(os.environ[DATA_ENV]))
    dirs.append(Path.cwd() / "data")
    dirs.append(Path(__file__).resolve().parents[2] / "data")
    return dirs


def find_mnist() -> tuple[Path, Path] | None:
    for d in data_dirs():
        for img, lbl in zip(IMAGE_NAMES, LABEL_NAMES):
            if (d / img).is_file() and (d / lbl).is_file():
                return d / img, d / lbl
    return None


def envelope(command: str, config: dict, result) -> dict:
    return {
        "schema": f"qhdc.{command}/{SCHEMA_VERSION}",
        "command": command,
        "version": __version__,
        "config": config,
        "result": result,
    }


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _table(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[_fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    line = lambda vals: "  ".join(v.rjust(w) for v, w in zip(vals, widths))
    return "\n".join([line(cols), line(["-" * w for w in widths])] + [line(r) for r in cells]) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit(doc: dict, rows: list[dict], fmt: str, out=None, extra: str = "") -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    elif fmt == "csv":
        out.write(_csv(rows))
    else:
        out.write(_table(rows))
        if extra:
            out.write(extra + "\n")


# --------------------------------------------------------------------------
# commands


def cmd_reason(args) -> int:
    from .tasks.reasoning import ANSWER, ReasoningProblem, reasoning_query_classical, reasoning_query_quantum

    if args.mode == "quantum":
        if not _pow2(args.dim):
            raise UsageError(f"--dim must be a power of two in quantum mode, got {args.dim}")
        if args.bundle != "raw":
            raise UsageError("quantum mode bundles coherently; --bundle sign applies to classical mode only")
    elif args.shots:
        raise UsageError("--shots applies to quantum mode only")
    if args.dim < 1:
        raise UsageError("--dim must be positive")
    config = {"dim": args.dim, "seed": args.seed, "mode": args.mode, "bundle": args.bundle, "shots": args.shots}
    problem = ReasoningProblem.generate(args.dim, args.seed)
    if args.mode == "classical":
        rep = reasoning_query_classical(problem, args.bundle)
    else:
        rep = reasoning_query_quantum(problem, shots=args.shots, rng=args.seed)
    result = rep.to_dict()
    rows = [{"entity": e, "similarity": s} for e, s in rep.similarities.items()]
    diag = rep.diagnostics
    extra = f"answer: {rep.answer}"
    if diag:
        extra += f"\nalpha {diag['alpha']:.6g}  rounds {diag['rounds']}  success {diag['success_probability']:.6g}"
    emit(envelope("reason", config, result), rows, args.out, extra=extra)
    return EXIT_OK if rep.answer == ANSWER else EXIT_FAIL


def _load_dataset(args):
    from .tasks.data import load_mnist, synthetic_dataset

    if args.data == "synthetic":
        return synthetic_dataset(args.seed, args.per_class, args.noise), {"per_class": args.per_class, "noise": args.noise}
    if args.images or args.labels:
        if not (args.images and args.labels):
            raise UsageError("give both --images and --labels")
        paths = (Path(args.images), Path(args.labels))
    else:
        paths = find_mnist()
        if paths is None:
            raise FileNotFoundError(
                f"no MNIST IDX files found in {[str(d) for d in data_dirs()]}; pass --images/--labels or set {DATA_ENV}"
            )
    ds = load_mnist(*paths).filter((3, 6))
    return ds, {"images": str(paths[0]), "labels": str(paths[1])}


def cmd_classify(args) -> int:
    from .tasks.classify import EvalConfig, TrainConfig, cross_validate, train
    from .tasks.data import preprocess

    if args.mode != "classical" and not _pow2(args.dim):
        raise UsageError(f"--dim must be a power of two in {args.mode} mode, got {args.dim}")
    if args.mode == "quantum-sampled" and args.shots < 1:
        raise UsageError("quantum-sampled mode needs --shots >= 1")
    if args.mode != "quantum-sampled" and args.shots:
        raise UsageError("--shots applies to quantum-sampled mode only")
    ds, source = _load_dataset(args)
    X, y = preprocess(ds)
    cfg = EvalConfig(
        dim=args.dim, mode=args.mode, shots=args.shots, folds=args.folds, train_size=args.train_size,
        test_size=args.test_size, retrain_epochs=args.retrain_epochs, seed=args.seed,
    )
    report = cross_validate(X, y, cfg, workers=args.workers)
    config = {"data": args.data, **source, **cfg.to_dict()}
    result = report.to_dict(timings=not args.no_timings)
    if args.save_model:
        model = train(X, y, TrainConfig(args.dim, args.seed, cfg.train_config.mode, args.retrain_epochs))
        Path(args.save_model).write_text(model.dumps())
        config["save_model"] = args.save_model
    rows = [{
        "mode": report.mode,
        "f1_mean": report.f1_mean,
        "f1_std": report.f1_std,
        "auc": report.auc,
        "n_test": report.n_test,
        "max_std_error": report.max_std_error,
    }]
    c = report.confusion
    extra = f"confusion (rows true {report.classes}, cols predicted): {c[0]} {c[1]}"
    emit(envelope("classify", config, result), rows, args.out, extra=extra)
    return EXIT_OK


def cmd_resources(args) -> int:
    from .synth.resources import ResourceCounter
    from .synth.scaling import scaling_row

    config = {
        "qubits": args.qubits, "samples": args.samples, "features": args.features, "mode": args.mode,
        "rounds": args.rounds if args.mode == "probabilistic" else 0, "seed": args.seed, "threshold": args.threshold,
    }
    counter = ResourceCounter()
    rows = [
        scaling_row(n, args.mode, args.samples, args.features, args.rounds, args.seed, args.threshold, counter).to_dict()
        for n in args.qubits
    ]
    emit(envelope("resources", config, rows), rows, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .tasks.classify import dimensionality_sweep
    from .tasks.data import preprocess

    bad = [d for d in args.dims if not _pow2(d)]
    if bad:
        raise UsageError(f"sweep dimensions must be powers of two, got {bad}")
    ds, source = _load_dataset(args)
    X, y = preprocess(ds)
    rows = [r.to_dict() for r in dimensionality_sweep(X, y, args.dims, args.seed, args.train_size, args.test_size, workers=args.workers)]
    config = {"data": args.data, **source, "dims": args.dims, "seed": args.seed, "train_size": args.train_size, "test_size": args.test_size}
    emit(envelope("sweep", config, rows), rows, args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(seed=args.seed, s0_sign=args.s0_sign)
    ok = all(r.passed for r in results)
    config = {"seed": args.seed, "s0_sign": args.s0_sign}
    doc = envelope("selftest", config, {"passed": ok, "checks": [r.to_dict() for r in results]})
    if args.out == "json":
        emit(doc, [], "json")
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<24} {r.detail}  ({r.seconds:.2f}s)")
        failed = [r.name for r in results if not r.passed]
        print("selftest passed" if ok else f"selftest FAILED: {', '.join(failed)}")
    return EXIT_OK if ok else EXIT_FAIL


REPLAY_FLAGS = {
    "reason": ["dim", "seed", "mode", "bundle", "shots"],
    "classify": ["data", "images", "labels", "per_class", "noise", "dim", "mode", "shots", "folds", "train_size",
                 "test_size", "retrain_epochs", "seed"],
    "resources": ["qubits", "samples", "features", "mode", "rounds", "seed", "threshold"],
    "sweep": ["data", "images", "labels", "per_class", "noise", "dims", "seed", "train_size", "test_size"],
    "selftest": ["seed", "s0_sign"],
}


def replay_argv(doc: dict) -> list[str]:
    """Command line that reproduces a JSON report from its embedded config."""
    cmd = doc.get("command")
    if cmd not in REPLAY_FLAGS:
        raise FormatError(f"report has no replayable command ({cmd!r})")
    cfg = doc["config"]
    argv = [cmd]
    for key in REPLAY_FLAGS[cmd]:
        if key not in cfg or cfg[key] is None:
            continue
        if cmd == "resources" and key == "rounds" and cfg.get("mode") != "probabilistic":
            continue
        flag = "--" + key.replace("_", "-")
        val = cfg[key]
        if isinstance(val, list):
            argv += [flag, ",".join(str(v) for v in val)]
        else:
            argv += [flag, str(val)]
    return argv + ["--out", "json"]


def cmd_replay(args) -> int:
    try:
        doc = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{args.report}: not JSON ({exc})") from exc
    argv = replay_argv(doc)
    if doc["command"] == "classify":
        argv.append("--no-timings")
    return main(argv)


# --------------------------------------------------------------------------
# parser


def _add_out(p: argparse.ArgumentParser, default: str = "table") -> None:
    p.add_argument("--out", choices=("json", "csv", "table"), default=default, help="output format")


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", choices=("mnist", "synthetic"), default="mnist")
    p.add_argument("--images", help="IDX image file (plain or .gz)")
    p.add_argument("--labels", help="IDX label file (plain or .gz)")
    p.add_argument("--per-class", type=int, default=250, help="synthetic samples per class")
    p.add_argument("--noise", type=float, default=0.15, help="synthetic pixel noise")
    p.add_argument("--workers", type=int, default=1, help="parallel workers (output is order-independent)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhdc", description="Hyperdimensional computing with a gate-level quantum simulator.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reason", help="the dollar-of-Mexico analogy")
    p.add_argument("--dim", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("classical", "quantum"), default="classical")
    p.add_argument("--bundle", choices=("raw", "sign"), default="raw")
    p.add_argument("--shots", type=int, default=0, help="0 = exact amplitudes")
    _add_out(p)
    p.set_defaults(func=cmd_reason)

    p = sub.add_parser("classify", help="3-vs-6 cross-validated classification")
    _add_data(p)
    p.add_argument("--dim", type=int, default=10_000)
    p.add_argument("--mode", choices=("classical", "quantum-exact", "quantum-sampled"), default="classical")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--train-size", type=int, default=100)
    p.add_argument("--test-size", type=int, default=50)
    p.add_argument("--retrain-epochs", type=int, default=None, help="default 10 classical, 0 quantum")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-model", help="write the model trained on all data as JSON")
    p.add_argument("--no-timings", action="store_true", help="omit wall times (for byte-stable reports)")
    _add_out(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("resources", help="lowered depth and CNOT count of class-prototype circuits")
    p.add_argument("--qubits", type=parse_range, default=parse_range("4..7"))
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--features", type=int, default=16)
    p.add_argument("--mode", choices=("flat", "probabilistic"), default="flat")
    p.add_argument("--rounds", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=int, default=100_000, help="flag rows deeper than this as infeasible")
    _add_out(p)
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("sweep", help="F1 and Hadamard-test depth across dimensions")
    _add_data(p)
    p.add_argument("--dims", type=parse_range, default=[16, 32, 64, 128, 256])
    p.add_argument("--train-size", type=int, default=100)
    p.add_argument("--test-size", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="fast invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s0-sign", type=float, default=-1.0, help=argparse.SUPPRESS)  # fault injection
    _add_out(p)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("replay", help="re-run the config embedded in a JSON report")
    p.add_argument("report")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("seed", "shots", "samples", "features", "rounds", "folds", "train_size", "test_size", "workers"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            parser.error(f"--{name.replace('_', '-')} must be non-negative")
    try:
        return args.func(args)
    except (InsufficientDataError, DegenerateVectorError, CancellationError, UndefinedSimilarityError) as exc:
        print(f"qhdc: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, InvalidArgumentError, ResourceLimitError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qhdc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FormatError) as exc:
        print(f"qhdc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
