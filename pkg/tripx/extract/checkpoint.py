import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from tripx.extract.config import fromdict, todict
from tripx.extract.core import RelationSet
from tripx.extract.encoder import PAD, UNK, Vocabulary
from tripx.extract.errors import CheckpointError, ConfigError
from tripx.extract.model import Extractor
from tripx.extract.training import Checkpoint

logger = logging.getLogger(__name__)

FORMAT = 1
_META = "meta"


def savecheckpoint(checkpoint: Checkpoint, path: Union[str, Path]) -> None:
    model = checkpoint.model
    meta = {
        "format": FORMAT,
        "config": todict(checkpoint.config),
        "relations": list(model.relations.names),
        "vocab": model.vocab.tokens,
        "epoch": checkpoint.epoch,
        "rngstate": checkpoint.rngstate,
        "history": checkpoint.history,
    }
    arrays = model.statedict()
    if _META in arrays:
        raise CheckpointError(f"Cannot save checkpoint, parameter name {_META!r} is reserved")
    arrays[_META] = np.array(json.dumps(meta))
    with open(path, mode="wb") as file:
        np.savez(file, **arrays)
    logger.info("saved checkpoint (epoch %d) to %s", checkpoint.epoch, path)


def loadcheckpoint(path: Union[str, Path]) -> Checkpoint:
    try:
        archive = np.load(path, allow_pickle=False)
    except FileNotFoundError:
        raise
    except (OSError, ValueError) as e:
        raise CheckpointError(f"Cannot load checkpoint {path}, not a readable archive ({e})") from None
    with archive:
        if _META not in archive.files:
            raise CheckpointError(f"Cannot load checkpoint {path}, missing {_META!r} entry")
        try:
            meta = json.loads(str(archive[_META]))
        except json.JSONDecodeError as e:
            raise CheckpointError(f"Cannot load checkpoint {path}, corrupt metadata ({e.msg})") from None
        version = meta.get("format")
        if version != FORMAT:
            raise CheckpointError(
                f"Cannot load checkpoint {path}, format version {version} is not supported (expected {FORMAT})"
            )
        state = {name: archive[name] for name in archive.files if name != _META}

    try:
        config = fromdict(meta["config"], source=str(path))
    except ConfigError as e:
        raise CheckpointError(f"Cannot load checkpoint {path}, invalid config ({e})") from None
    tokens = [t for t in meta["vocab"] if t not in (PAD, UNK)]
    vocab = Vocabulary(tokens)
    relations = RelationSet(meta["relations"])
    model = Extractor.build(config, vocab, relations, np.random.default_rng(0))
    try:
        model.loadstatedict(state)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"Cannot load checkpoint {path}, {e}") from None
    model.eval()
    logger.info("loaded checkpoint (epoch %d) from %s", meta["epoch"], path)
    return Checkpoint(model, config, meta["epoch"], meta["rngstate"], meta["history"])
