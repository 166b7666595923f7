"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 domain error (bad data, missing
seed, unsupported input), 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .baselines import BaselineConfig
from .classify import UNCLASSIFIED
from .errors import StanceError
from .evaluate import (
    HASHTAG,
    USER,
    GoldenSet,
    derive_golden_hashtags,
    evaluate,
    evolve,
    read_golden,
    score,
    time_method,
    write_composition,
)
from .graph import build_sharing_graph, write_graph
from .ingest import SeedSet, aggregate, parse_posts, read_triples, write_posts
from .pipeline import LRM, METHODS, LRMConfig, prepare, run_method
from .synth import PRESETS, generate, shifted
from .walk import WalkConfig, all_similarities

log = logging.getLogger("stancewalk")

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 64
DAY = 24 * 3600


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", type=Path, help="posts (JSON lines) or user,hashtag,count triples")
    p.add_argument("--format", choices=["auto", "jsonl", "triples"], default="auto")
    p.add_argument("--seeds", type=_csv_list, help="comma-separated seed hashtags, one per class")
    p.add_argument("--class-names", type=_csv_list, default=None)
    p.add_argument("--strict", action="store_true", help="fail on the first malformed line")
    p.add_argument("--no-filter", action="store_true", help="skip low-engagement filtering")
    p.add_argument("--rho", type=int, default=10)
    p.add_argument("--dampening", choices=["incident", "seed_edges", "none"], default="incident")
    p.add_argument("--no-blocking", action="store_true")
    p.add_argument("--intensity", choices=["one_minus_entropy", "entropy"], default="one_minus_entropy")
    p.add_argument("--rng-seed", type=int, default=0, help="RDM generator seed")
    p.add_argument("--lpm-max-iterations", type=int, default=1000)
    p.add_argument("--lpm-tolerance", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stancewalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("classify", "eval", "evolve", "bench"):
        sp_ = sub.add_parser(name)
        sp_.add_argument("--config", type=Path, help="JSON file with default option values")
        _add_corpus_args(sp_)

    c = sub.choices["classify"]
    c.add_argument("--method", choices=METHODS, default=LRM)
    c.add_argument("--out", type=Path, required=False)
    c.add_argument("--dump-graph", action="store_true")
    c.add_argument("--dump-similarities", action="store_true")

    e = sub.choices["eval"]
    e.add_argument("--golden", type=Path)
    e.add_argument("--assignments", type=Path, help="directory written by 'classify'")
    e.add_argument("--compare", type=_csv_list, default=None, help="methods to run and score")
    e.add_argument("--derive-hashtags", action="store_true",
                   help="derive golden hashtags from golden users' sharing")
    e.add_argument("--out", type=Path)

    v = sub.choices["evolve"]
    v.add_argument("--method", choices=METHODS, default=LRM)
    v.add_argument("--window-days", type=float, default=7.0)
    v.add_argument("--origin", default="0", help="ISO date (UTC) or epoch seconds")
    v.add_argument("--include-unclassified", action="store_true")
    v.add_argument("--out", type=Path)

    b = sub.choices["bench"]
    b.add_argument("--methods", type=_csv_list, default=[LRM])
    b.add_argument("--repeat", type=int, default=3)
    b.add_argument("--out", type=Path)

    s = sub.add_parser("synth")
    s.add_argument("--preset", choices=sorted(PRESETS), default="reference")
    s.add_argument("--rng-seed", type=int, default=None)
    s.add_argument("--out", type=Path, required=False)
    return parser


def parse_args(argv):
    """Parse twice so that values from ``--config`` act as defaults that
    explicit flags override."""
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path is not None:
        try:
            cfg = json.loads(Path(cfg_path).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad config file {cfg_path}: {exc}") from exc
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        defaults = {}
        for key, val in cfg.items():
            dest = key.replace("-", "_")
            if dest not in known:
                raise UsageError(f"unknown key in config file: {key!r}")
            if isinstance(val, str) and known[dest].type is not None:
                val = known[dest].type(val)
            defaults[dest] = Path(val) if known[dest].type is Path else val
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _seedset(args) -> SeedSet:
    if not args.seeds:
        raise UsageError("--seeds is required")
    try:
        return SeedSet(tuple(args.seeds), tuple(args.class_names) if args.class_names else None)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load(args):
    """Returns ``(records or None, matrix or None)``."""
    if args.input is None:
        raise UsageError("--input is required")
    fmt = args.format
    if fmt == "auto":
        fmt = "triples" if args.input.suffix.lower() in (".csv", ".tsv", ".triples") else "jsonl"
    with open(args.input, encoding="utf-8") as f:
        if fmt == "triples":
            return None, read_triples(f, strict=args.strict)
        records, diags = parse_posts(f, strict=args.strict)
    for d in diags:
        log.warning("%s:%d: skipped malformed line: %s", args.input, d.line, d.message)
    return records, None


def _configs(args):
    lrm = LRMConfig(
        WalkConfig(args.rho, args.dampening, not args.no_blocking), args.intensity
    )
    base = BaselineConfig(args.rng_seed, args.rho, args.lpm_max_iterations, args.lpm_tolerance)
    return lrm, base


def _manifest(args, command: str, extra: dict | None = None) -> dict:
    lrm, base = _configs(args)
    seeds = _seedset(args)
    man = {
        "tool": "stancewalk",
        "version": __version__,
        "command": command,
        "input": {"path": str(args.input), "sha256": sha256_file(args.input)},
        "seeds": list(seeds.seeds),
        "class_names": list(seeds.class_names),
        "filter": not args.no_filter,
        "config": {
            "rho": lrm.walk.rho,
            "dampening": lrm.walk.dampening,
            "block_other_seeds": lrm.walk.block_other_seeds,
            "intensity": lrm.intensity,
            "rng_seed": base.rng_seed,
            "lpm_max_iterations": base.max_iterations,
            "lpm_tolerance": base.tolerance,
        },
    }
    man.update(extra or {})
    return man


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_classify(args) -> int:
    seeds = _seedset(args)
    records, matrix = _load(args)
    lrm, base = _configs(args)
    matrix = prepare(records, seeds, matrix, filter=not args.no_filter)
    result = run_method(args.method, matrix, seeds, records, lrm, base, workers=args.threads)

    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "hashtags.csv", "w", newline="", encoding="utf-8") as f:
        result.write_hashtags(f)
    with open(out / "users.csv", "w", newline="", encoding="utf-8") as f:
        result.write_users(f)
    written = ["hashtags.csv", "users.csv"]
    if args.dump_graph:
        with open(out / "graph.csv", "w", newline="", encoding="utf-8") as f:
            write_graph(build_sharing_graph(matrix), f)
        written.append("graph.csv")
    if args.dump_similarities and args.method == LRM:
        sims = all_similarities(build_sharing_graph(matrix), seeds, lrm.walk, workers=args.threads)
        with open(out / "similarities.csv", "w", newline="", encoding="utf-8") as f:
            sims.write(f)
        written.append("similarities.csv")
    man = _manifest(args, "classify", {
        "method": args.method,
        "outputs": {name: sha256_file(out / name) for name in written},
    })
    _write_json(out / "manifest.json", man)
    print(f"classified {matrix.m} hashtags and {matrix.n} users into {out}")
    return EXIT_OK


def _read_assignments(directory: Path, class_names) -> tuple[dict, dict, tuple]:
    man_path = directory / "manifest.json"
    if man_path.exists():
        class_names = tuple(json.loads(man_path.read_text())["class_names"])
    index = {name: c for c, name in enumerate(class_names)}

    def read(name, key):
        labels = {}
        with open(directory / name, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                cls = row["class"]
                if cls != "unclassified" and cls not in index:
                    raise StanceError(f"{name}: unknown class {cls!r}")
                labels[row[key]] = index.get(cls, UNCLASSIFIED)
        return labels

    return read("users.csv", "user"), read("hashtags.csv", "hashtag"), tuple(class_names)


def _report_rows(method, reports, class_names):
    row = {"method": method}
    for kind in (USER, HASHTAG):
        rep = reports.get(kind)
        row[f"{kind}_macro_f1"] = "" if rep is None else f"{rep.macro_f1:.6f}"
        for name in class_names:
            row[f"{kind}_f1_{name}"] = "" if rep is None else f"{rep.per_class_f1[name]:.6f}"
    return row


def cmd_eval(args) -> int:
    if args.golden is None:
        raise UsageError("--golden is required")
    with open(args.golden, encoding="utf-8") as f:
        golden = read_golden(f)

    rows = []
    if args.assignments is not None:
        names = args.class_names or list(golden.users or golden.hashtags)
        users, tags, names = _read_assignments(args.assignments, names)
        reports = {}
        if any(golden.users.values()):
            reports[USER] = score(users, golden.users, names)
        if any(golden.hashtags.values()):
            reports[HASHTAG] = score(tags, golden.hashtags, names)
        rows.append(_report_rows("assignments", reports, names))
        _warn_dropped(reports)
    else:
        seeds = _seedset(args)
        records, matrix = _load(args)
        lrm, base = _configs(args)
        raw = matrix if matrix is not None else aggregate(records)
        matrix = prepare(None, seeds, raw, filter=not args.no_filter)
        if args.derive_hashtags:
            golden = GoldenSet(golden.users, derive_golden_hashtags(raw, golden.users))
        methods = args.compare or [LRM]
        bad = [m for m in methods if m not in METHODS]
        if bad:
            raise UsageError(f"unknown method(s): {', '.join(bad)}")
        for method in methods:
            result = run_method(method, matrix, seeds, records, lrm, base, workers=args.threads)
            reports = evaluate(result, golden)
            _warn_dropped(reports)
            rows.append(_report_rows(method, reports, seeds.class_names))

    for row in rows:
        for kind in (USER, HASHTAG):
            if row[f"{kind}_macro_f1"]:
                print(f"{row['method']} {kind} macro-F1 = {float(row[f'{kind}_macro_f1']):.4f}")
    if args.out is not None:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            w = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return EXIT_OK


def _warn_dropped(reports) -> None:
    for kind, rep in reports.items():
        if rep.dropped:
            shown = ", ".join(rep.dropped[:20]) + (" ..." if len(rep.dropped) > 20 else "")
            log.warning("golden %ss not in evaluated data (dropped): %s", kind, shown)


def _origin_seconds(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    try:
        d = dt.datetime.fromisoformat(text)
    except ValueError as exc:
        raise UsageError(f"bad --origin {text!r}") from exc
    if d.tzinfo is None:
        d = d.replace(tzinfo=dt.timezone.utc)
    return d.timestamp()


def cmd_evolve(args) -> int:
    seeds = _seedset(args)
    records, matrix = _load(args)
    if records is None:
        raise StanceError("evolution needs timestamped post records, not aggregated triples")
    lrm, base = _configs(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = evolve(
            records, seeds, args.window_days * DAY, _origin_seconds(args.origin), args.method,
            include_unclassified=args.include_unclassified, filter=not args.no_filter,
            lrm_config=lrm, baseline_config=base, workers=args.threads,
        )
    for w in caught:
        log.warning("%s", w.message)
    if args.out is not None:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            write_composition(rows, f)
    else:
        write_composition(rows, sys.stdout)
    return EXIT_OK


def cmd_bench(args) -> int:
    seeds = _seedset(args)
    records, matrix = _load(args)
    lrm, base = _configs(args)
    rows = []
    for method in args.methods:
        if method not in METHODS:
            raise UsageError(f"unknown method {method!r}")
        secs = time_method(method, seeds, records, matrix, args.repeat,
                           lrm_config=lrm, baseline_config=base, workers=args.threads)
        rows.append((method, secs))
        print(f"{method}: {secs:.4f} s (mean of {args.repeat})")
    if args.out is not None:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["method", "runtime_seconds", "repeat"])
            for method, secs in rows:
                w.writerow([method, f"{secs:.6f}", args.repeat])
    return EXIT_OK


def cmd_synth(args) -> int:
    config = PRESETS[args.preset]
    if args.rng_seed is not None:
        config = shifted(config, rng_seed=args.rng_seed)
    records, golden, seeds = generate(config)
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "posts.jsonl", "w", encoding="utf-8") as f:
        write_posts(records, f)
    with open(out / "golden.csv", "w", newline="", encoding="utf-8") as f:
        golden.write(f)
    _write_json(out / "config.json", {
        "seeds": ",".join(seeds.seeds), "class_names": ",".join(seeds.class_names),
    })
    _write_json(out / "manifest.json", {
        "tool": "stancewalk", "version": __version__, "command": "synth",
        "preset": args.preset, "rng_seed": config.rng_seed,
        "outputs": {n: sha256_file(out / n) for n in ("posts.jsonl", "golden.csv")},
    })
    print(f"wrote {len(records)} posts to {out / 'posts.jsonl'}; seeds: {','.join(seeds.seeds)}")
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "eval": cmd_eval,
    "evolve": cmd_evolve,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"stancewalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"stancewalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StanceError as exc:
        print(f"stancewalk: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"stancewalk: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
