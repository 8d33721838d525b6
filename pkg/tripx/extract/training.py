import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

import tripx
import tripx.nn.functional as f
from tripx.nn import clipgradnorm
from tripx.nn.optimizers import Adam
from tripx.tensors import Tensor
from tripx.extract.config import RunConfig
from tripx.extract.core import AnnotatedSentence, RelationSet, TagSeq
from tripx.extract.decoder import (
    globalcorrespondence,
    predictrelations,
    tagjoint,
    tagsequences,
)
from tripx.extract.encoder import Vocabulary
from tripx.extract.eval import scoretriples
from tripx.extract.inference import extracttriples
from tripx.extract.errors import (
    DivergedLoss,
    LengthMismatch,
    MissingRelation,
    OverlappingSpans,
    SentenceTooLong,
    ShapeMismatch,
)
from tripx.extract.labeling import JOINTO, TAGIDS, GoldLabels, buildgold, samplenegatives
from tripx.extract.model import Extractor

logger = logging.getLogger(__name__)

EPS = 1e-12
Scalar = Union[Tensor, float]


def lossrel(prel: Tensor, relvector: np.ndarray) -> Tensor:
    relvector = np.asarray(relvector, dtype=np.float64)
    if prel.dim != relvector.shape:
        raise LengthMismatch(
            f"Cannot compute relation loss, {prel.dim} probabilities for {relvector.shape} labels"
        )
    return f.binarycrossentropy(prel, relvector, eps=EPS)


def lossseq(
    tagdists: Mapping[int, Tuple[Tensor, Tensor]],
    tagtargets: Mapping[int, Tuple[TagSeq, TagSeq]],
) -> Tensor:
    missing = sorted(set(tagtargets) - set(tagdists))
    if missing:
        raise MissingRelation(
            f"Cannot compute tagging loss, no predictions for relations {missing}"
        )
    if not tagtargets:
        return tripx.zeros(())
    potential = len(tagtargets)
    loss = None
    for k, (subtags, objtags) in tagtargets.items():
        sub, obj = tagdists[k]
        n = sub.dim[0]
        if len(subtags) != n or len(objtags) != n or obj.dim[0] != n:
            raise LengthMismatch(
                f"Cannot compute tagging loss, relation {k} has {n} positions but {len(subtags)} targets"
            )
        weight = 1 / (2 * n * potential)
        term = f.nllloss(sub, _ids(subtags), weight, EPS) + f.nllloss(
            obj, _ids(objtags), weight, EPS
        )
        loss = term if loss is None else loss + term
    return loss


def lossglobal(corr: Tensor, corrmatrix: np.ndarray) -> Tensor:
    corrmatrix = np.asarray(corrmatrix, dtype=np.float64)
    if corr.dim != corrmatrix.shape:
        raise ShapeMismatch(
            f"Cannot compute correspondence loss, {corr.dim} predictions for {corrmatrix.shape} labels"
        )
    return f.binarycrossentropy(corr, corrmatrix, eps=EPS)


def losstotal(
    lrel: Scalar,
    lseq: Scalar,
    lglobal: Scalar,
    alpha: float = 1.0,
    beta: float = 1.0,
    gamma: float = 1.0,
) -> Scalar:
    return alpha * lrel + beta * lseq + gamma * lglobal


@dataclass(frozen=True)
class Example:
    annotated: AnnotatedSentence
    gold: GoldLabels


@dataclass(frozen=True)
class Batch:
    ids: np.ndarray
    mask: np.ndarray
    relvectors: np.ndarray
    corrmatrices: np.ndarray
    sentences: np.ndarray
    relations: np.ndarray
    targets: Tuple[np.ndarray, ...]
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.ids.shape[0]


@dataclass
class Losses:
    rel: Tensor
    seq: Tensor
    glob: Tensor
    total: Tensor

    def values(self) -> Dict[str, float]:
        return {
            "loss_rel": float(self.rel.item()),
            "loss_seq": float(self.seq.item()),
            "loss_global": float(self.glob.item()),
            "loss_total": float(self.total.item()),
        }


@dataclass
class Checkpoint:
    model: Extractor
    config: RunConfig
    epoch: int = 0
    rngstate: Optional[Dict[str, Any]] = None
    history: List[Dict[str, Any]] = field(default_factory=list)


def prepare(
    sentences: Sequence[AnnotatedSentence], relations: RelationSet, maxlen: int
) -> List[Example]:
    examples = []
    for annotated in sentences:
        if annotated.sentence.length > maxlen:
            logger.warning(
                "skipping sentence %s: %s",
                annotated.id,
                SentenceTooLong(f"{annotated.sentence.length} tokens > maxlen {maxlen}"),
            )
            continue
        try:
            gold = buildgold(annotated, relations)
        except OverlappingSpans as e:
            logger.warning("skipping sentence %s: %s", annotated.id, e)
            continue
        examples.append(Example(annotated, gold))
    return examples


def collate(examples: Sequence[Example], model: Extractor) -> Batch:
    ids, mask = model.pad([e.annotated.sentence for e in examples])
    size, width = ids.shape
    single = model.tagging == "single"
    relvectors = np.stack([e.gold.relvector for e in examples])
    corrmatrices = np.zeros((size, width, width))
    sentences, relations, subs, objs, weights = [], [], [], [], []
    for b, e in enumerate(examples):
        n = e.gold.length
        corrmatrices[b, :n, :n] = e.gold.corrmatrix
        for k in e.gold.relations:
            sentences.append(b)
            relations.append(k)
            row = np.zeros(width)
            if single:
                tags = np.full(width, JOINTO, dtype=np.int64)
                tags[:n] = e.gold.jointids(k)
                subs.append(tags)
                row[:n] = 1 / (n * e.gold.potential * size)
            else:
                sub = np.full(width, TAGIDS["O"], dtype=np.int64)
                obj = sub.copy()
                sub[:n], obj[:n] = e.gold.tagids(k)
                subs.append(sub)
                objs.append(obj)
                row[:n] = 1 / (2 * n * e.gold.potential * size)
            weights.append(row)
    targets = (subs,) if single else (subs, objs)
    return Batch(
        ids,
        mask,
        relvectors,
        corrmatrices,
        np.array(sentences, dtype=np.int64),
        np.array(relations, dtype=np.int64),
        tuple(np.array(t, dtype=np.int64).reshape(-1, width) for t in targets),
        np.array(weights, dtype=np.float64).reshape(-1, width),
    )


def batchloss(model: Extractor, batch: Batch, config: Optional[RunConfig] = None) -> Losses:
    config = model.config if config is None else config
    decoder = model.decoder
    size = batch.size
    h = model(batch.ids, batch.mask)

    prel = predictrelations(h, decoder, batch.mask)
    lrel = f.binarycrossentropy(
        prel, batch.relvectors, 1 / (decoder.relations * size), EPS
    )

    if len(batch.sentences):
        hsel = h[batch.sentences]
        if model.tagging == "single":
            joint = tagjoint(hsel, batch.relations, decoder)
            lseq = f.nllloss(joint, batch.targets[0], batch.weights, EPS)
        else:
            sub, obj = tagsequences(hsel, batch.relations, decoder)
            lseq = f.nllloss(sub, batch.targets[0], batch.weights, EPS) + f.nllloss(
                obj, batch.targets[1], batch.weights, EPS
            )
    else:
        lseq = tripx.zeros(())

    corr = globalcorrespondence(h, decoder)
    cells = batch.mask[:, :, None] * batch.mask[:, None, :]
    counts = batch.mask.sum(axis=1)[:, None, None]
    lglobal = f.binarycrossentropy(
        corr, batch.corrmatrices, cells / np.square(counts) / size, EPS
    )

    training = config.training
    total = losstotal(lrel, lseq, lglobal, training.alpha, training.beta, training.gamma)
    return Losses(lrel, lseq, lglobal, total)


def train(
    train: Sequence[AnnotatedSentence],
    relations: RelationSet,
    config: RunConfig,
    valid: Optional[Sequence[AnnotatedSentence]] = None,
    vocab: Optional[Vocabulary] = None,
    callback: Optional[Callable[[Dict[str, Any]], None]] = None,
) -> Checkpoint:
    training = config.training
    generator = np.random.default_rng(training.seed)
    if vocab is None:
        vocab = Vocabulary.build(
            (a.sentence for a in train), config.encoder.mincount
        )
    model = Extractor.build(config, vocab, relations, generator)
    examples = prepare(train, relations, config.encoder.maxlen)
    if not examples:
        raise ValueError("Cannot train, no usable training sentences")
    if model.tagging == "single":
        # raises InfeasibleTagging on subject/object overlap
        for e in examples:
            for k in e.gold.relations:
                e.gold.jointids(k)
    logger.info(
        "training on %d sentences (%d skipped), %d relations, %d parameters",
        len(examples),
        len(train) - len(examples),
        relations.size,
        model.count(),
    )
    logger.debug("model layout\n%r", model)

    optimizer = Adam(
        [
            {"parameters": model.encoder.parameters(), "learnrate": training.encoderlr},
            {"parameters": model.decoder.parameters(), "learnrate": training.decoderlr},
        ],
        learnrate=training.decoderlr,
        decay=training.weightdecay,
    )

    history = []
    best, beststate, bestepoch = -math.inf, None, 0
    for epoch in range(1, training.epochs + 1):
        model.train()
        order = generator.permutation(len(examples))
        sums = dict.fromkeys(("loss_rel", "loss_seq", "loss_global", "loss_total"), 0.0)
        starts = range(0, len(order), training.batchsize)
        progress = tqdm(
            starts,
            desc=f"epoch {epoch}/{training.epochs}",
            leave=False,
            disable=not training.progress,
        )
        for start in progress:
            chosen = [examples[i] for i in order[start : start + training.batchsize]]
            if training.negatives:
                chosen = [
                    Example(
                        e.annotated,
                        e.gold.withnegatives(
                            samplenegatives(
                                e.gold.relations,
                                relations.size,
                                training.negatives,
                                generator,
                            )
                        ),
                    )
                    for e in chosen
                ]
            losses = batchloss(model, collate(chosen, model), config)
            values = losses.values()
            if not math.isfinite(values["loss_total"]):
                raise DivergedLoss(
                    f"Cannot continue training, loss became non-finite at epoch {epoch} ({values})"
                )
            optimizer.zerograd()
            losses.total.backward()
            clipgradnorm(optimizer.parameters(), training.clipnorm)
            optimizer.step()
            for key, value in values.items():
                sums[key] += value * len(chosen)
            progress.set_postfix(loss=f"{values['loss_total']:.4f}")

        record = {"epoch": epoch}
        record.update({k: v / len(examples) for k, v in sums.items()})
        record["val_f1"] = validate(model, valid) if valid else None
        history.append(record)
        logger.info(
            "epoch %d: loss %.4f (rel %.4f seq %.4f global %.4f) val_f1 %s",
            epoch,
            record["loss_total"],
            record["loss_rel"],
            record["loss_seq"],
            record["loss_global"],
            "n/a" if record["val_f1"] is None else f"{record['val_f1']:.4f}",
        )
        if callback is not None:
            callback(record)
        if training.select == "best" and record["val_f1"] is not None:
            if record["val_f1"] > best:
                best, beststate, bestepoch = record["val_f1"], model.statedict(), epoch

    epoch = training.epochs
    if beststate is not None:
        model.loadstatedict(beststate)
        epoch = bestepoch
        logger.info("selected epoch %d with val_f1 %.4f", bestepoch, best)
    model.eval()
    return Checkpoint(model, config, epoch, generator.bit_generator.state, history)


def validate(model: Extractor, valid: Sequence[AnnotatedSentence]) -> float:
    inference = model.config.inference
    usable = [a for a in valid if a.sentence.length <= model.encoder.maxlen]
    pred = {
        a.id: extracttriples(
            model,
            a.sentence,
            inference.lambda1,
            inference.lambda2,
            pairing=inference.pairing,
            selectall=inference.selectall,
            lenient=inference.lenient,
        )
        for a in usable
    }
    gold = {a.id: a.triples for a in usable}
    sentences = {a.id: a.sentence for a in usable}
    return scoretriples(pred, gold, sentences, model.config.data.mode).f1


def _ids(tags: TagSeq) -> np.ndarray:
    return np.array([TAGIDS[t] for t in tags], dtype=np.int64)
