"""Command-line front end.

    rpcscreen screen   --x X.csv (--y Y.csv | --y-col NAME|IDX) --method rpc --lambda rpc1 --k 50
    rpcscreen simulate --plan table1_extrcor.json --out-dir results/
    rpcscreen compare  --x X.csv --y Y.csv --k 50

Exit codes: 0 ok, 2 usage, 3 I/O, 4 data validation, 5 numeric failure.
Errors print one line to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .bench import BenchmarkPlan, emit_table, run_plan, summaries_to_json
from .dataio import read_csv_matrix
from .errors import InputFileError, InvalidArgumentError, RpcScreenError
from .screening import (
    Method,
    StandardizedData,
    lambda_presets,
    resolve_lambda,
    screen,
    select_top_k,
    standardize,
    union_submodels,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpcscreen", description="Ridge partial correlation screening.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("screen", help="screen predictors of a CSV dataset")
    p.add_argument("--x", required=True, help="CSV predictor matrix, rows = observations")
    ysrc = p.add_mutually_exclusive_group(required=True)
    ysrc.add_argument("--y", help="single-column CSV response")
    ysrc.add_argument("--y-col", help="response column of --x, by header name or 0-based index")
    p.add_argument("--method", default="rpc", choices=["rpc", "holp", "sis", "fr"])
    p.add_argument("--lambda", dest="lam", default="rpc1",
                   help="positive float or preset rpc1|rpc2|rpc3 (default rpc1)")
    p.add_argument("--k", type=_positive_int, help="submodel size (default n)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--manifest", help="run manifest path (default <out>.manifest.json)")
    p.add_argument("--threads", type=_positive_int)

    p = sub.add_parser("simulate", help="run a Monte-Carlo benchmark plan")
    p.add_argument("--plan", required=True, help="plan JSON path or bundled plan name")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--threads", type=_positive_int)
    p.add_argument("--seed", type=int, help="override the plan's base seed")
    p.add_argument("--replications", type=_positive_int, help="override the replication count")

    p = sub.add_parser("compare", help="compare RPC presets, URPC, HOLP and SIS on one dataset")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--k", type=_positive_int, help="submodel size (default n)")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.add_argument("--threads", type=_positive_int)
    return parser


def _load_xy(x_path: str, y_path: str | None, y_col: str | None):
    table = read_csv_matrix(x_path)
    x, names = table.values, table.names
    if y_col is not None:
        j = table.column(y_col)
        y = x[:, j]
        x = np.delete(x, j, axis=1)
        if names is not None:
            names = names[:j] + names[j + 1:]
    else:
        yt = read_csv_matrix(y_path)
        if yt.values.shape[1] != 1:
            raise InvalidArgumentError(f"{y_path} must have exactly one column")
        y = yt.values[:, 0]
        if y.shape[0] != x.shape[0]:
            raise InvalidArgumentError(
                f"{y_path} has {y.shape[0]} rows but {x_path} has {x.shape[0]}"
            )
    if x.shape[1] < 1:
        raise InvalidArgumentError("no predictor columns left")
    return x, y, names


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot write {path}: {exc.strerror or exc}") from None


def _default_k(data: StandardizedData, k: int | None) -> int:
    k = min(data.n, data.p) if k is None else k
    if k > data.p:
        raise InvalidArgumentError(f"k={k} exceeds the number of predictors p={data.p}")
    return k


def cmd_screen(args) -> int:
    x, y, names = _load_xy(args.x, args.y, args.y_col)
    data = standardize(x, y)
    k = _default_k(data, args.k)
    method = Method(args.method.upper())
    lam = None
    if method in (Method.RPC, Method.HOLP):
        lam = resolve_lambda(args.lam, data.n, data.p)
    t0 = time.perf_counter()
    result = screen(data, method, k, lam)
    elapsed = time.perf_counter() - t0

    records = []
    for rank, idx in enumerate(result.selected, start=1):
        s = float(result.scores[idx])
        records.append({
            "rank": rank,
            "index": int(idx),
            "name": names[idx] if names is not None else "",
            "score": s,
            "abs_score": abs(s),
        })
    if args.format == "json":
        text = json.dumps({
            "method": method.value, "lambda": lam, "k": k, "n": data.n, "p": data.p,
            "selected": records,
        }, indent=2) + "\n"
    else:
        lines = ["rank,index,name,score,abs_score"]
        for r in records:
            name = r["name"]
            if any(ch in name for ch in ',"\n'):
                name = '"' + name.replace('"', '""') + '"'
            lines.append(f"{r['rank']},{r['index']},{name},{r['score']!r},{r['abs_score']!r}")
        text = "\n".join(lines) + "\n"
    _write(args.out, text)

    manifest_path = args.manifest or (f"{args.out}.manifest.json" if args.out else None)
    if manifest_path:
        manifest = {
            "n": data.n, "p": data.p, "method": method.value, "lambda": lam, "k": k,
            "elapsed_seconds": elapsed, "backend": _backend.backend_name(),
            "threads": _backend.get_num_threads(), "x": args.x, "y": args.y or args.y_col,
        }
        _write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def _locate_plan(name: str) -> str:
    path = Path(name)
    if path.exists():
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputFileError(f"cannot read {path}: {exc.strerror or exc}") from None
    bundled = resources.files("rpcscreen").joinpath("plans", path.name)
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise InputFileError(f"cannot read {name}: no such file or bundled plan")


def cmd_simulate(args) -> int:
    plan = BenchmarkPlan.from_json(_locate_plan(args.plan))
    if args.seed is not None:
        plan = plan.with_seed(args.seed)
    if args.replications is not None:
        plan = BenchmarkPlan(plan.settings, args.replications, plan.methods, plan.k)
    summaries = run_plan(plan, _backend.get_num_threads())
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputFileError(f"cannot create {out}: {exc.strerror or exc}") from None
    table = emit_table(summaries, "text")
    _write(str(out / "metrics.json"), summaries_to_json(summaries) + "\n")
    _write(str(out / "table.txt"), table)
    _write(str(out / "table.csv"), emit_table(summaries, "csv"))
    sys.stdout.write(table)
    return EXIT_OK


def jaccard(a, b) -> float:
    a, b = set(map(int, a)), set(map(int, b))
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def cmd_compare(args) -> int:
    x, y, names = _load_xy(args.x, args.y, None)
    data = standardize(x, y)
    k = _default_k(data, args.k)
    presets = lambda_presets(data.n, data.p)
    results = {}
    for i, lam in enumerate(presets, start=1):
        results[f"RPC{i}"] = screen(data, Method.RPC, k, lam)
    results["URPC"] = union_submodels([results["RPC1"], results["RPC2"], results["RPC3"]])
    results["HOLP"] = screen(data, Method.HOLP, k, presets[0])
    results["SIS"] = screen(data, Method.SIS, k)
    labels = list(results)
    payload = {
        "n": data.n, "p": data.p, "k": k,
        "lambdas": {"RPC1": presets[0], "RPC2": presets[1], "RPC3": presets[2],
                    "HOLP": presets[0]},
        "selected": {m: [int(i) for i in r.selected] for m, r in results.items()},
        "jaccard": {a: {b: jaccard(results[a].selected, results[b].selected) for b in labels}
                    for a in labels},
    }
    if names is not None:
        payload["names"] = names
    _write(args.out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


_COMMANDS = {"screen": cmd_screen, "simulate": cmd_simulate, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _backend.set_num_threads(args.threads)
        _backend.get_num_threads()  # surface a bad RPC_THREADS before doing work
    except ValueError as exc:
        print(f"rpcscreen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except RpcScreenError as exc:
        print(f"rpcscreen: error: {' '.join(str(exc).split())}", file=sys.stderr)
        return exc.exit_code
    finally:
        _backend.set_num_threads(None)


if __name__ == "__main__":
    sys.exit(main())
