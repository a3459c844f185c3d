"""Command-line entry point.

All result output is JSON on stdout (CSV only into --out files); logs go
to stderr. Exit codes are stable: 0 success, 1 usage error, 2 data or
schema error, 3 model error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace

from . import __version__, pipeline, stats
from .errors import AttritionError, DataError, ModelError, SchemaError
from .ingest import load_dataset
from .model_store import load_bundle, save_bundle
from .pipeline import TrainConfig
from .schema import default_schema, load_schema

log = logging.getLogger("attrition.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; this CLI reserves 2 for data
    errors, so usage problems exit 1 instead.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_config(path: str | None) -> TrainConfig:
    if path is None:
        return TrainConfig()
    with open(path, encoding="utf-8") as fh:
        return TrainConfig.from_dict(json.load(fh))


def cmd_train(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config = replace(config,
                         params=replace(config.params, seed=args.seed))
    bundle, metrics = pipeline.train_all(args.data, config, n_jobs=args.jobs)
    checksum = save_bundle(bundle, args.out)
    log.info("wrote %s (%s)", args.out, checksum)
    _emit(metrics.to_dict())
    return EXIT_OK


def cmd_evaluate(args) -> int:
    bundle = load_bundle(args.model)
    records = load_dataset(args.data, bundle.schema).records
    metrics = pipeline.evaluate(bundle, records)
    _emit(metrics.to_dict())
    return EXIT_OK


def cmd_predict(args) -> int:
    bundle = load_bundle(args.model)
    records = load_dataset(args.data, bundle.schema).records
    scored = pipeline.score_all(bundle, records)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "probability", "label", "ttl", "lead_time",
                         "overdue", "top_reason"])
        for s in scored:
            top = s.drivers.top_reasons[0] if s.drivers.top_reasons else ""
            writer.writerow([s.id, repr(s.attrition_probability), s.label,
                             repr(s.tenure.ttl), repr(s.tenure.lead_time),
                             s.tenure.overdue, top])
    flagged = sum(1 for s in scored if s.label == "Yes")
    _emit({
        "rows": len(scored),
        "flagged": flagged,
        "predicted_attrition_ratio": flagged / len(scored) if scored else 0.0,
        "out": args.out,
    })
    return EXIT_OK


def cmd_explain(args) -> int:
    bundle = load_bundle(args.model)
    records = load_dataset(args.data, bundle.schema).records
    match = [r for r in records if r.id == args.id]
    if not match:
        raise DataError(f"no employee with id {args.id} in {args.data}")
    scored = pipeline.score_employee(bundle, match[0], top_k=args.top_k)
    _emit(scored.to_dict())
    return EXIT_OK


def cmd_screen(args) -> int:
    bundle = load_bundle(args.model)
    with open(args.candidate, encoding="utf-8") as fh:
        candidate = json.load(fh)
    if not isinstance(candidate, dict):
        raise DataError(f"{args.candidate} must hold a JSON object")
    result = pipeline.screen_candidate(bundle, candidate, args.id)
    _emit(result.to_dict())
    return EXIT_OK


def cmd_eda(args) -> int:
    schema = load_schema(args.schema) if args.schema else default_schema()
    records = load_dataset(args.data, schema).records
    table = stats.crosstab(records, schema, args.x, args.y, bins=args.bins)
    result = stats.chi_square(table)
    _emit({
        "crosstab": table.to_dict(),
        "chi_square": {
            "statistic": result.statistic,
            "degrees_of_freedom": result.degrees_of_freedom,
            "p_value": result.p_value,
            "n": result.n,
        },
    })
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import app_from_paths
    app = app_from_paths(args.model, args.roster,
                         cors_origins=tuple(args.cors_origin or ["*"]))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="attrition",
                     description="Employee attrition decision support")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and write the artifact")
    p.add_argument("--data", required=True, help="labeled roster CSV")
    p.add_argument("--config", help="training config JSON")
    p.add_argument("--out", required=True, help="artifact path to write")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1, help="tree-build threads")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a labeled CSV and print metrics")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="batch-score a CSV to a results CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="results CSV path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", help="full driver report for one employee")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--id", required=True, help="employee id")
    p.add_argument("--top-k", type=int, default=None, dest="top_k")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("screen", help="score one candidate JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--candidate", required=True, help="candidate JSON file")
    p.add_argument("--id", help="candidate id for the report")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("eda", help="crosstab two columns with a chi-square test")
    p.add_argument("--data", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--schema", help="schema JSON (default: built-in)")
    p.add_argument("--bins", type=int, default=4,
                   help="bins for numeric variables")
    p.set_defaults(func=cmd_eda)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--model", required=True)
    p.add_argument("--roster", required=True, help="roster CSV to score")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cors-origin", action="append",
                   help="allowed CORS origin (repeatable, default any)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ModelError as exc:
        log.error("%s", exc)
        return EXIT_MODEL
    except (SchemaError, DataError) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except AttritionError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
