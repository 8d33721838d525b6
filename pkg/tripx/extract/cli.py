import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from tripx.extract.checkpoint import loadcheckpoint, savecheckpoint
from tripx.extract.config import RunConfig, dumpconfig, loadconfig, logconfig, override
from tripx.extract.core import EntitySpan, RelationSet, Sentence, Triple
from tripx.extract.data import (
    datasetstats,
    loaddataset,
    readsentences,
    savedataset,
    split,
)
from tripx.extract.errors import (
    CheckpointError,
    ConfigError,
    DivergedLoss,
    ExtractionError,
    IdMismatch,
    ParseError,
    UnresolvableEntity,
)
from tripx.extract.eval import breakdown, rendertable, scoresubtasks, scoretriples
from tripx.extract.inference import Extraction, predictrecords, readpredictions, writepredictions
from tripx.extract.synthetic import gensynthetic, manifestdict
from tripx.extract.training import train

logger = logging.getLogger("tripx")

OK, USAGE, DATA, RUNTIME = 0, 1, 2, 3


class Parser(argparse.ArgumentParser):

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def parser() -> Parser:
    root = Parser(prog="tripx", description="Joint relational triple extraction")
    commands = root.add_subparsers(dest="command", required=True)

    common = Parser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--log-level", default="INFO")
    common.add_argument("--quiet", action="store_true", help="disable progress bars")

    trainer = commands.add_parser("train", parents=[common], help="train a model")
    trainer.add_argument("--train", type=Path, required=True)
    trainer.add_argument("--valid", type=Path)
    trainer.add_argument("--out", type=Path, required=True)
    trainer.add_argument("--epochs", type=int)
    trainer.add_argument("--batch-size", type=int)
    trainer.add_argument("--tagging", choices=("dual", "single"))
    trainer.add_argument("--mode", choices=("last_word", "full_span"))
    trainer.add_argument("--lambda1", type=float)
    trainer.add_argument("--lambda2", type=float)

    predictor = commands.add_parser("predict", parents=[common], help="extract triples")
    predictor.add_argument("--checkpoint", type=Path, required=True)
    predictor.add_argument("--test", type=Path, required=True)
    predictor.add_argument("--out", type=Path, required=True)
    predictor.add_argument("--lambda1", type=float)
    predictor.add_argument("--lambda2", type=float)
    predictor.add_argument("--pairing", choices=("global", "nearest"))
    predictor.add_argument(
        "--no-select", action="store_true", help="tag every relation"
    )

    evaluator = commands.add_parser("eval", parents=[common], help="score predictions")
    evaluator.add_argument("--pred", type=Path, required=True)
    evaluator.add_argument("--test", "--gold", dest="test", type=Path, required=True, help="gold dataset")
    evaluator.add_argument("--mode", choices=("last_word", "full_span"))
    evaluator.add_argument("--json", type=Path, help="write the reports as JSON")

    stats = commands.add_parser("stats", parents=[common], help="dataset statistics")
    stats.add_argument("data", type=Path)
    stats.add_argument("--mode", choices=("last_word", "full_span"))
    stats.add_argument("--relations", type=Path, help="relation vocabulary file")
    stats.add_argument("--json", type=Path, help="write the report as JSON")

    generate = commands.add_parser("generate", parents=[common], help="generate a synthetic corpus")
    generate.add_argument("--out", type=Path, required=True)
    generate.add_argument("--valid-out", type=Path)
    generate.add_argument("--valid-fraction", type=float, default=0.0)
    generate.add_argument("--manifest", type=Path)
    generate.add_argument("--tagging", choices=("dual", "single"))
    return root


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    handler = COMMANDS[args.command]
    try:
        handler(args)
    except ConfigError as e:
        logger.error("%s", e)
        return USAGE
    except (ParseError, IdMismatch, UnresolvableEntity) as e:
        logger.error("%s", e)
        return DATA
    except FileNotFoundError as e:
        logger.error("Cannot read %s, file does not exist", e.filename)
        return DATA
    except (DivergedLoss, CheckpointError) as e:
        logger.error("%s", e)
        return RUNTIME
    except (ExtractionError, ValueError) as e:
        logger.error("%s", e)
        return DATA
    except (OSError, RuntimeError) as e:
        logger.error("%s", e)
        return RUNTIME
    return OK


def resolve(args: argparse.Namespace) -> RunConfig:
    source = str(args.config) if args.config is not None else None
    config = loadconfig(args.config) if args.config is not None else RunConfig()
    logconfig(config, source)
    training = {"seed": getattr(args, "seed", None)}
    training["epochs"] = getattr(args, "epochs", None)
    training["batchsize"] = getattr(args, "batch_size", None)
    training["tagging"] = getattr(args, "tagging", None)
    if args.quiet:
        training["progress"] = False
    config = override(config, "training", **training)
    config = override(
        config,
        "inference",
        lambda1=getattr(args, "lambda1", None),
        lambda2=getattr(args, "lambda2", None),
        pairing=getattr(args, "pairing", None),
        selectall=True if getattr(args, "no_select", False) else None,
    )
    config = override(config, "data", mode=getattr(args, "mode", None))
    return config


def cmdtrain(args: argparse.Namespace) -> None:
    config = resolve(args)
    data = config.data
    trainset = loaddataset(args.train, data.mode, data.tokenizer, data.maxlen, data.relations)
    valid = None
    if args.valid is not None:
        valid = loaddataset(
            args.valid, data.mode, data.tokenizer, data.maxlen, trainset.relations
        ).sentences
    args.out.mkdir(parents=True, exist_ok=True)
    dumpconfig(config, args.out / "config.yaml")
    metrics = args.out / "metrics.jsonl"
    with open(metrics, mode="w", encoding="utf-8") as file:

        def record(entry: Dict[str, Any]) -> None:
            file.write(json.dumps(entry) + "\n")
            file.flush()

        checkpoint = train(
            trainset.sentences, trainset.relations, config, valid, callback=record
        )
    savecheckpoint(checkpoint, args.out / "model.npz")
    logger.info("wrote %s, %s and %s", args.out / "model.npz", metrics, args.out / "config.yaml")


def cmdpredict(args: argparse.Namespace) -> None:
    checkpoint = loadcheckpoint(args.checkpoint)
    config = checkpoint.config
    logconfig(config, str(args.checkpoint))
    if args.config is not None:
        logger.info("predict uses the checkpoint configuration, ignoring %s", args.config)
    inference = override(
        config,
        "inference",
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        pairing=args.pairing,
        selectall=True if args.no_select else None,
    ).inference
    sentences, _ = readsentences(args.test, config.data.tokenizer)
    records, diagnostics = predictrecords(
        checkpoint.model,
        sentences,
        inference.lambda1,
        inference.lambda2,
        inference.pairing,
        inference.selectall,
        inference.lenient,
    )
    writepredictions(records, args.out)
    logger.info("wrote %d predictions to %s (%s)", len(records), args.out, diagnostics.asdict())


def cmdeval(args: argparse.Namespace) -> None:
    config = resolve(args)
    data = config.data
    gold = loaddataset(args.test, data.mode, data.tokenizer, data.maxlen, data.relations)
    skipped = {s.id for s in gold.skipped}
    records = [r for r in readpredictions(args.pred) if str(r.get("id")) not in skipped]
    relations = gold.relations.extend(
        name for r in records for _, name, _ in r.get("pred_spans", [])
    )
    sentences = {a.id: a.sentence for a in gold.sentences}
    goldtriples = {a.id: a.triples for a in gold.sentences}
    predtriples = {}
    extractions = {}
    for r in records:
        id = str(r.get("id"))
        if id not in sentences:
            raise IdMismatch(f"Cannot score, prediction {id} has no gold sentence")
        predtriples[id] = _triples(r, relations, sentences[id])
        extractions[id] = _extraction(r, relations, predtriples[id])

    overall = scoretriples(predtriples, goldtriples, sentences, data.mode)
    perpattern = breakdown(predtriples, goldtriples, gold.sentences, data.mode, data.seo, data.soo)
    print(rendertable({"overall": overall}, f"triples ({data.mode})"))
    report: Dict[str, Any] = {"overall": overall.asdict(), "breakdown": perpattern.asdict()}
    if extractions and all(e is not None for e in extractions.values()):
        subtasks = scoresubtasks(extractions, {a.id: a for a in gold.sentences})
        rows = {
            "relations": subtasks.relations,
            "entities": subtasks.entities,
            "pairs": subtasks.pairs,
        }
        print()
        print(rendertable(rows, "subtasks"))
        report["subtasks"] = subtasks.asdict()
    print()
    print(rendertable(perpattern.patterns, "patterns"))
    print()
    print(rendertable(perpattern.counts, "triples per sentence"))
    if args.json is not None:
        args.json.write_text(json.dumps(report, indent=2), encoding="utf-8")


def _triples(record: Dict[str, Any], relations: RelationSet, sentence: Sentence) -> frozenset:
    triples = set()
    for entry in record.get("pred_spans", []):
        try:
            (s0, s1), name, (o0, o1) = entry
            triple = Triple(EntitySpan(s0, s1), relations.index(name), EntitySpan(o0, o1))
        except (TypeError, ValueError) as e:
            raise ParseError(f"Cannot parse prediction {record.get('id')}, bad triple {entry!r} ({e})") from None
        if max(s1, o1) >= sentence.length:
            raise ParseError(
                f"Cannot parse prediction {record.get('id')}, span {entry!r} leaves the sentence"
            )
        triples.add(triple)
    return frozenset(triples)


def _extraction(
    record: Dict[str, Any], relations: RelationSet, triples: frozenset
) -> Optional[Extraction]:
    if not all(key in record for key in ("relations", "entities", "pairs")):
        return None
    try:
        return Extraction(
            triples,
            frozenset(relations.index(n) for n in record["relations"]),
            frozenset((EntitySpan(*span), role) for span, role in record["entities"]),
            tuple((EntitySpan(*s), EntitySpan(*o)) for s, o in record["pairs"]),
        )
    except (TypeError, ValueError) as e:
        raise ParseError(f"Cannot parse intermediates of prediction {record.get('id')} ({e})") from None


def cmdstats(args: argparse.Namespace) -> None:
    config = resolve(args)
    data = config.data
    relations = args.relations if args.relations is not None else data.relations
    dataset = loaddataset(args.data, data.mode, data.tokenizer, data.maxlen, relations)
    report = datasetstats(dataset.sentences, dataset.relations, data.seo, data.soo)
    print(report.table())
    if dataset.skipped:
        logger.info("%d records skipped while loading", len(dataset.skipped))
    if args.json is not None:
        args.json.write_text(json.dumps(report.asdict(), indent=2), encoding="utf-8")


def cmdgenerate(args: argparse.Namespace) -> None:
    config = resolve(args)
    synth = override(config, "synth", seed=args.seed).synth
    corpus = gensynthetic(synth, config.training.tagging)
    sentences = corpus.sentences
    if args.valid_fraction:
        if args.valid_out is None:
            raise ConfigError("Cannot split corpus, --valid-fraction needs --valid-out")
        trainset, valid = split(sentences, args.valid_fraction, np.random.default_rng(synth.seed))
        savedataset(valid, corpus.relations, args.valid_out)
        logger.info("wrote %d validation sentences to %s", len(valid), args.valid_out)
    else:
        trainset = sentences
    savedataset(trainset, corpus.relations, args.out)
    logger.info("wrote %d sentences to %s", len(trainset), args.out)
    if args.manifest is not None:
        args.manifest.write_text(json.dumps(manifestdict(corpus), indent=2), encoding="utf-8")


COMMANDS = {
    "train": cmdtrain,
    "predict": cmdpredict,
    "eval": cmdeval,
    "stats": cmdstats,
    "generate": cmdgenerate,
}


if __name__ == "__main__":
    sys.exit(main())
