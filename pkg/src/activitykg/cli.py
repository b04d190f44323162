"""Command-line interface.

Subcommands: ingest, query experts, tasks, analytics, eval, export,
serve. All output is JSON on stdout (eval also prints the summary
tables to stderr), so results are scriptable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import applications, serde
from .config import RunConfig, load_config
from .corpus import generate_corpus
from .errors import ActivityKGError, UnknownEntity
from .evaluation import run_eval
from .ontology import entity_id, parse_timestamp
from .pipeline import PipelineRuntime, run_pipeline


def _runtime(args) -> PipelineRuntime:
    cfg = load_config(args.config) if args.config else RunConfig(store_dir=args.store)
    if getattr(args, "store", None):
        cfg.store_dir = args.store
    return PipelineRuntime(cfg)


def _resolve_user(runtime: PipelineRuntime, user: str) -> str:
    if user in runtime.store.entities:
        return user
    guess = entity_id(user, "person")
    if guess in runtime.store.entities:
        return guess
    raise UnknownEntity(user)


def _print(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, ensure_ascii=False)
    sys.stdout.write("\n")


def cmd_ingest(args) -> int:
    cfg = load_config(args.config)
    report = run_pipeline(cfg, args.input)
    _print(report.to_dict())
    return 0


def cmd_query_experts(args) -> int:
    runtime = _runtime(args)
    as_of = parse_timestamp(args.as_of) if args.as_of else None
    results = applications.discover_experts(
        runtime.store,
        args.text,
        top_n=args.top,
        provider=runtime.provider,
        mode=runtime.cfg.provider.mode,
        as_of=as_of,
        weights=runtime.cfg.expertise_weights,
        half_life_days=runtime.cfg.decay_half_life_days,
    )
    _print({"query": args.text, "results": [serde.ranked_result_dict(r, runtime.store) for r in results]})
    return 0


def cmd_tasks(args) -> int:
    runtime = _runtime(args)
    user = _resolve_user(runtime, args.user)
    as_of = parse_timestamp(args.as_of) if args.as_of else None
    results = applications.prioritize_tasks(
        runtime.store, user, horizon_days=args.horizon, as_of=as_of,
        weights=runtime.cfg.priority_weights,
    )
    _print({"user": user, "horizon_days": args.horizon,
            "results": [serde.ranked_result_dict(r, runtime.store) for r in results]})
    return 0


def cmd_analytics(args) -> int:
    runtime = _runtime(args)
    as_of = parse_timestamp(args.as_of) if args.as_of else None
    query = applications.translate_query(args.text, runtime.provider, now=as_of)
    result = applications.execute_analytics(runtime.store, query)
    _print(serde.analytics_dict(result))
    return 0


def cmd_eval(args) -> int:
    corpus = generate_corpus(seed=args.seed, n_activities=args.n, noise_level=args.noise)
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.store:
        cfg.store_dir = args.store
    if args.no_context:
        cfg.context_enabled = False
    report = run_eval(corpus, cfg)
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", "utf-8")
    print(report.render_tables(), file=sys.stderr)
    _print(json.loads(report.to_json()))
    return 0


def cmd_export(args) -> int:
    runtime = _runtime(args)
    text = runtime.store.export_graph()
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = load_config(args.config)
    app = create_app(cfg)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="activitykg", description="Activity-centric knowledge-graph engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="run the pipeline over an activity file")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_ingest)

    q = sub.add_parser("query", help="query the graph")
    qsub = q.add_subparsers(dest="query_command", required=True)
    p = qsub.add_parser("experts", help="expertise discovery")
    p.add_argument("--config")
    p.add_argument("--store", help="store directory (alternative to --config)")
    p.add_argument("--text", required=True)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--as-of", dest="as_of")
    p.set_defaults(func=cmd_query_experts)

    p = sub.add_parser("tasks", help="task prioritization for a user")
    p.add_argument("--config")
    p.add_argument("--store")
    p.add_argument("--user", required=True, help="person entity id or exact name")
    p.add_argument("--horizon", type=int, default=7)
    p.add_argument("--as-of", dest="as_of")
    p.set_defaults(func=cmd_tasks)

    p = sub.add_parser("analytics", help="natural-language analytics query")
    p.add_argument("--config")
    p.add_argument("--store")
    p.add_argument("--text", required=True)
    p.add_argument("--as-of", dest="as_of")
    p.set_defaults(func=cmd_analytics)

    p = sub.add_parser("eval", help="synthetic-corpus evaluation run")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--config")
    p.add_argument("--store")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--no-context", action="store_true",
                   help="A/B switch: extract without graph context")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export", help="canonical graph export")
    p.add_argument("--config")
    p.add_argument("--store")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ActivityKGError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
