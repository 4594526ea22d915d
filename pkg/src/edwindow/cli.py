"""Command-line front end.

``edwindow estimate`` reads one integer per line (or a CSV column), feeds the
sliding-window estimator and prints a record every ``--every`` arrivals.
``edwindow generate`` writes a synthetic stream; ``estimate --generate`` uses
one in place of an input file.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from collections import deque
from typing import Iterable, Iterator, List, Optional, Tuple

from .core import ConfigError
from .estimator import EdEstimator
from .oracle import exact_ed

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PARSE = 0, 1, 2, 3
PATTERNS = ("sorted", "reversed", "uniform", "reorder")


class UsageError(Exception):
    pass


def generate(pattern: str, n: int, seed: int = 0, reorder_p: float = 0.0,
             reorder_d: int = 0, alphabet: Optional[int] = None) -> List[int]:
    """Synthetic workload.

    ``reorder`` emits ``1..n`` with each element independently delayed by
    1..d positions with probability ``p``, which mimics packets overtaken
    in flight.
    """
    if n < 0:
        raise UsageError(f"--n must be >= 0, got {n}")
    rng = random.Random(seed)
    if pattern == "sorted":
        return list(range(1, n + 1))
    if pattern == "reversed":
        return list(range(n, 0, -1))
    if pattern in ("uniform", "uniform-random"):
        top = alphabet or max(n, 1)
        return [rng.randint(1, top) for _ in range(n)]
    if pattern == "reorder":
        if not 0 <= reorder_p <= 1:
            raise UsageError(f"--reorder-p must be in [0, 1], got {reorder_p}")
        if reorder_d < 0:
            raise UsageError(f"--reorder-d must be >= 0, got {reorder_d}")
        keys = []
        for x in range(1, n + 1):
            delay = 0
            if reorder_d and rng.random() < reorder_p:
                delay = rng.randint(1, reorder_d)
            keys.append((x + delay, x))
        keys.sort()
        return [x for _, x in keys]
    raise UsageError(f"unknown pattern {pattern!r}; choose from {', '.join(PATTERNS)}")


def _parse_lines(lines: Iterable[str], column: Optional[str]) -> Iterator[Tuple[int, Optional[int], str]]:
    """Yield ``(line_number, value or None, raw)`` for each non-blank input row."""
    if column is None:
        for lineno, raw in enumerate(lines, 1):
            text = raw.strip()
            if not text:
                continue
            yield lineno, _to_value(text), text
        return
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or column not in reader.fieldnames:
        raise UsageError(f"CSV input has no column {column!r}")
    for row in reader:
        text = (row.get(column) or "").strip()
        yield reader.line_num, _to_value(text), text


def _to_value(text: str) -> Optional[int]:
    try:
        v = int(text)
    except ValueError:
        return None
    return v if v >= 1 else None


def run_estimate(values: Iterable[Tuple[int, Optional[int], str]], w: int, epsilon: float,
                 every: int, fmt: str, oracle: bool, out, err, max_errors: Optional[int] = None) -> int:
    est = EdEstimator(w, epsilon)
    window: deque = deque(maxlen=w)
    writer = None
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        header = ["i", "ed_hat", "lower_bound_claim"] + (["ed_exact"] if oracle else []) + ["w", "epsilon"]
        writer.writerow(header)
    failures = 0
    for lineno, value, raw in values:
        if value is None:
            failures += 1
            err.write(json.dumps({"error": "not a positive integer", "line": lineno, "text": raw}) + "\n")
            if max_errors is not None and failures > max_errors:
                err.write(json.dumps({"parse_failures": failures, "aborted": True}) + "\n")
                return EXIT_PARSE
            continue
        est.push(value)
        if oracle:
            window.append(value)
        i = est.current_index
        if i % every:
            continue
        e = est.query()
        record = {"i": i, "ed_hat": e.value, "lower_bound_claim": e.lower_bound_claim}
        if oracle:
            record["ed_exact"] = exact_ed(list(window))
        record["w"] = w
        record["epsilon"] = epsilon
        if writer is None:
            out.write(json.dumps(record) + "\n")
        else:
            writer.writerow(list(record.values()))
    if failures:
        err.write(json.dumps({"parse_failures": failures}) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edwindow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add_gen_args(sp, required):
        sp.add_argument("--generate", metavar="PATTERN", choices=PATTERNS + ("uniform-random",),
                        required=required, help="synthetic pattern: " + ", ".join(PATTERNS))
        sp.add_argument("--n", type=int, default=1000, help="generated stream length")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--reorder-p", type=float, default=0.0)
        sp.add_argument("--reorder-d", type=int, default=0)
        sp.add_argument("--alphabet", type=int, default=None, help="value range for uniform")

    est = sub.add_parser("estimate", help="stream values through the estimator")
    est.add_argument("input", nargs="?", default=None, help="input file ('-' or omitted: stdin)")
    est.add_argument("--window", type=int, required=True)
    est.add_argument("--epsilon", type=float, default=0.5)
    est.add_argument("--every", type=int, default=1, help="emit a record every N arrivals")
    est.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    est.add_argument("--oracle", action="store_true", help="also report the exact edit distance")
    est.add_argument("--column", default=None, help="read values from this CSV column")
    est.add_argument("--max-errors", type=int, default=None,
                     help="abort with exit code 3 after this many malformed rows")
    add_gen_args(est, required=False)

    gen = sub.add_parser("generate", help="write a synthetic stream, one value per line")
    add_gen_args(gen, required=True)
    return p


def main(argv: Optional[List[str]] = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "generate":
            for v in generate(args.generate, args.n, args.seed, args.reorder_p, args.reorder_d, args.alphabet):
                stdout.write(f"{v}\n")
            return EXIT_OK
        if args.every < 1:
            raise UsageError("--every must be >= 1")
        if args.generate and args.input is not None:
            raise UsageError("--generate and an input file are mutually exclusive")
        if args.generate:
            vals = generate(args.generate, args.n, args.seed, args.reorder_p, args.reorder_d, args.alphabet)
            rows = ((t, v, str(v)) for t, v in enumerate(vals, 1))
            return run_estimate(rows, args.window, args.epsilon, args.every, args.format,
                                args.oracle, stdout, stderr, args.max_errors)
        if args.input in (None, "-"):
            return run_estimate(_parse_lines(stdin, args.column), args.window, args.epsilon,
                                args.every, args.format, args.oracle, stdout, stderr, args.max_errors)
        try:
            fh = open(args.input, newline="")
        except OSError as exc:
            stderr.write(f"edwindow: cannot read {args.input}: {exc.strerror}\n")
            return EXIT_IO
        with fh:
            return run_estimate(_parse_lines(fh, args.column), args.window, args.epsilon,
                                args.every, args.format, args.oracle, stdout, stderr, args.max_errors)
    except (UsageError, ConfigError) as exc:
        stderr.write(f"edwindow: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        stderr.write(f"edwindow: I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
