"""Command-line interface.

Subcommands: verify (one-shot pipeline), index build (KB/KG),
train-ensemble, eval (metrics harness), serve (HTTP API).
Exit codes: 0 success, 1 pipeline error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ..detection import load_training_file, train_classifier
from ..errors import MedicoError
from ..evaluation import load_annotations, load_dataset, run_eval
from ..ingest import format_for_filename, ingest_file
from ..retrieval import build_kb_index, build_kg_index, load_kb_corpus, load_kg_corpus
from ..types import GeneratedContent, Query
from .config import load_config
from .pipeline import Pipeline

FIXTURE_WEB = "web.jsonl"
FIXTURE_KB = "kb.jsonl"
FIXTURE_KG = "kg.jsonl"
FIXTURE_MOCK = "mock_llm.jsonl"
FIXTURE_CLASSIFIER = "classifier.json"


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file (default: $MEDICO_CONFIG)")
    parser.add_argument("--fixtures", help="directory of fixture corpora and mock script")
    parser.add_argument("--mock-script", help="mock LLM script (JSON lines)")
    parser.add_argument("--data-dir", help="index/run-store directory")
    parser.add_argument("--sources", help="comma list of web,kb,kg,uf")
    for name in ("n", "m", "k", "j", "l"):
        parser.add_argument(f"--{name}", type=int)
    parser.add_argument("--tau", type=float)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--fuse-mode", choices=["Concatenation", "Summarization"])
    parser.add_argument("--detection-mode", choices=["FusedDirect", "Ensemble"])
    parser.add_argument("--classifier", help="trained ensemble classifier JSON")


def _build_pipeline(args: argparse.Namespace) -> Pipeline:
    cfg = load_config(args.config)
    if args.data_dir:
        cfg = dataclasses.replace(cfg, data_dir=args.data_dir)

    fixtures = Path(args.fixtures) if args.fixtures else None
    web = cfg.web
    llm = cfg.llm
    if fixtures:
        if (fixtures / FIXTURE_WEB).is_file():
            web = dataclasses.replace(web, kind="fixture", fixture_path=str(fixtures / FIXTURE_WEB))
        if (fixtures / FIXTURE_MOCK).is_file():
            llm = dataclasses.replace(llm, kind="mock", script_path=str(fixtures / FIXTURE_MOCK))
    if args.mock_script:
        llm = dataclasses.replace(llm, kind="mock", script_path=args.mock_script)
    cfg = dataclasses.replace(cfg, web=web, llm=llm)

    classifier_path = args.classifier or cfg.classifier_path
    if not classifier_path and fixtures and (fixtures / FIXTURE_CLASSIFIER).is_file():
        classifier_path = str(fixtures / FIXTURE_CLASSIFIER)
    if classifier_path:
        cfg = dataclasses.replace(cfg, classifier_path=classifier_path)

    overrides = {
        name: getattr(args, name)
        for name in ("n", "m", "k", "j", "l", "tau", "delta", "sources")
        if getattr(args, name, None) is not None
    }
    if args.fuse_mode:
        overrides["fuse_mode"] = args.fuse_mode
    if args.detection_mode:
        overrides["detection_mode"] = args.detection_mode
    cfg = cfg.with_overrides(overrides)

    pipeline = Pipeline.from_config(cfg)
    if fixtures:
        if pipeline.kb_index is None and (fixtures / FIXTURE_KB).is_file():
            pipeline.kb_index = build_kb_index(load_kb_corpus(fixtures / FIXTURE_KB))
        if pipeline.kg_index is None and (fixtures / FIXTURE_KG).is_file():
            pipeline.kg_index = build_kg_index(load_kg_corpus(fixtures / FIXTURE_KG))
    return pipeline


def _cmd_verify(args: argparse.Namespace) -> int:
    pipeline = _build_pipeline(args)
    for path in args.upload or []:
        data = Path(path).read_bytes()
        pipeline.add_upload(Path(path).name, ingest_file(data, format_for_filename(path)))
    q = Query(id="cli", text=args.query)
    o = GeneratedContent(text=args.answer, query_id=q.id)
    record = pipeline.run(q, o, persist=bool(pipeline.store))
    if args.json:
        print(json.dumps(record.to_dict(), ensure_ascii=False, indent=2))
    else:
        _print_report(record)
    return 1 if record.error else 0


def _print_report(record) -> None:
    verdict = record.verdict or {}
    print(f"run      {record.run_id}")
    print(f"query    {record.query['text']}")
    print(f"answer   {record.answer}")
    for source in ("S", "B", "G", "U"):
        items = record.sources.get(source, [])
        if items:
            print(f"evidence {source} ({len(items)})")
            for item in items:
                print(f"  - {item['text'][:100]}")
    if record.fused:
        print(f"fused ({record.fused['mode']}):")
        for line in record.fused["text"].splitlines():
            print(f"  {line}")
    if verdict:
        print(f"verdict  {'True' if verdict['label'] else 'False'} ({verdict['source_mode']})")
        print(f"rationale {verdict['rationale']}")
    if record.correction:
        print(f"correction ({record.correction['outcome']}):")
        for round_ in record.correction["rounds"]:
            mark = "accepted" if round_["accepted"] else (
                "approved, low preservation" if round_["verdict"]["label"] else "rejected"
            )
            print(
                f"  round {round_['index']}: {round_['candidate']}"
                f"  [prev={round_['preservation']:.3f}, {mark}]"
            )
    print(f"final    {record.final_answer}")
    for warning in record.warnings:
        print(f"warning  {warning}", file=sys.stderr)
    if record.error:
        print(f"error    {record.error}", file=sys.stderr)


def _cmd_index_build(args: argparse.Namespace) -> int:
    data_dir = Path(args.data_dir)
    if args.kind == "kb":
        index = build_kb_index(load_kb_corpus(args.corpus), data_dir=data_dir)
        print(f"built KB index: {len(index)} chunks -> {data_dir}")
    else:
        index = build_kg_index(load_kg_corpus(args.corpus), data_dir=data_dir)
        print(f"built KG index: {len(index)} triples -> {data_dir}")
    return 0


def _cmd_train_ensemble(args: argparse.Namespace) -> int:
    dataset = load_training_file(args.dataset)
    clf = train_classifier(
        dataset, epochs=args.epochs, step_size=args.step_size, tau=args.tau
    )
    clf.save(args.out)
    print(
        f"trained on {len(dataset)} samples, "
        f"loss {clf.loss_history[0]:.4f} -> {clf.loss_history[-1]:.4f}, saved {args.out}"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    pipeline = _build_pipeline(args)
    triplets = load_dataset(args.dataset, sample=args.sample, seed=args.seed)
    annotations = load_annotations(args.annotations) if args.annotations else None
    report = run_eval(pipeline, triplets, annotations)
    sys.stdout.write(report.to_text())
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import tempfile

    import uvicorn

    from .api import create_app
    from .store import RunStore

    pipeline = _build_pipeline(args)
    if pipeline.store is None:
        # keep GET /runs/{id} working without a configured data dir
        pipeline.store = RunStore(tempfile.mkdtemp(prefix="medico-runs-"))
    uvicorn.run(create_app(pipeline), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medico", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="verify one answer end to end")
    p_verify.add_argument("--query", required=True)
    p_verify.add_argument("--answer", required=True)
    p_verify.add_argument("--upload", action="append", help="file to ingest as a UF source")
    p_verify.add_argument("--json", action="store_true", help="print the raw run record")
    _add_pipeline_flags(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_index = sub.add_parser("index", help="index management")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)
    p_build = index_sub.add_parser("build", help="build a KB or KG index")
    p_build.add_argument("--kind", choices=["kb", "kg"], required=True)
    p_build.add_argument("--corpus", required=True, help="JSON-lines corpus file")
    p_build.add_argument("--data-dir", required=True)
    p_build.set_defaults(func=_cmd_index_build)

    p_train = sub.add_parser("train-ensemble", help="train the likelihood classifier")
    p_train.add_argument("--dataset", required=True, help="JSON lines {p_s..p_f, label}")
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--epochs", type=int, default=1000)
    p_train.add_argument("--step-size", type=float, default=1.0)
    p_train.add_argument("--tau", type=float, default=1.0)
    p_train.set_defaults(func=_cmd_train_ensemble)

    p_eval = sub.add_parser("eval", help="run the metrics harness over a dataset")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--annotations", help="golden-evidence override file")
    p_eval.add_argument("--sample", type=int)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", help="write the JSON report here")
    _add_pipeline_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    _add_pipeline_flags(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MedicoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
