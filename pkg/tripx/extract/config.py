import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import yaml

from tripx.extract.errors import ConfigError

logger = logging.getLogger(__name__)

PATTERNS = ("Normal", "SEO", "EPO", "SOO")


@dataclass(frozen=True)
class EncoderConfig:
    dim: int = 32
    layers: int = 2
    mixer: str = "conv"
    window: int = 3
    heads: int = 4
    positions: bool = False
    maxlen: int = 100
    mincount: int = 1


@dataclass(frozen=True)
class TrainConfig:
    encoderlr: float = 5e-5
    decoderlr: float = 1e-3
    weightdecay: float = 0.01
    batchsize: int = 64
    epochs: int = 100
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    seed: int = 0
    negatives: int = 0
    clipnorm: float = 1.0
    tagging: str = "dual"
    select: str = "last"
    progress: bool = True


@dataclass(frozen=True)
class InferenceConfig:
    lambda1: float = 0.5
    lambda2: float = 0.5
    pairing: str = "global"
    selectall: bool = False
    lenient: bool = False


@dataclass(frozen=True)
class DataConfig:
    mode: str = "full_span"
    tokenizer: str = "punct"
    maxlen: int = 100
    relations: Optional[str] = None
    seo: str = "exactly_one"
    soo: str = "within"


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 7
    relations: int = 6
    entities: int = 40
    fillers: int = 30
    counts: Dict[str, int] = field(
        default_factory=lambda: {"Normal": 10, "SEO": 0, "EPO": 0, "SOO": 0}
    )
    lengthrange: Tuple[int, int] = (5, 14)
    triplerange: Tuple[int, int] = (2, 3)
    entitylength: Tuple[int, int] = (1, 2)
    clauses: Tuple[int, int] = (1, 1)


@dataclass(frozen=True)
class RunConfig:
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    inference: InferenceConfig = field(default_factory=InferenceConfig)
    data: DataConfig = field(default_factory=DataConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)


_CHOICES = {
    ("encoder", "mixer"): ("conv", "attention"),
    ("training", "tagging"): ("dual", "single"),
    ("training", "select"): ("last", "best"),
    ("inference", "pairing"): ("global", "nearest"),
    ("data", "mode"): ("last_word", "full_span"),
    ("data", "tokenizer"): ("whitespace", "punct"),
    ("data", "seo"): ("exactly_one", "at_least_one"),
    ("data", "soo"): ("within", "cross"),
}


def loadconfig(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Cannot load config, {path} does not exist") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot load config {path}, invalid YAML ({e})") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"Cannot load config {path}, top level must be a mapping")
    return fromdict(raw, source=str(path))


def fromdict(raw: Mapping[str, Any], source: str = "<dict>") -> RunConfig:
    sections = {f.name: f for f in fields(RunConfig)}
    built = {}
    for name, values in raw.items():
        if name not in sections:
            raise ConfigError(f"Cannot load config {source}, unknown section {name!r}")
        if values is None:
            values = {}
        if not isinstance(values, dict):
            raise ConfigError(
                f"Cannot load config {source}, section {name!r} must be a mapping"
            )
        default = sections[name].default_factory()
        built[name] = _section(default, name, values, source)
    config = RunConfig(**built)
    _crosscheck(config, source)
    return config


def override(config: RunConfig, section: str, **values: Any) -> RunConfig:
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return config
    current = getattr(config, section)
    updated = _section(current, section, values, "command line")
    for key, value in values.items():
        logger.info("config %s.%s = %r (flag)", section, key, value)
    config = replace(config, **{section: updated})
    _crosscheck(config, "command line")
    return config


def dumpconfig(config: RunConfig, path: Union[str, Path]) -> None:
    Path(path).write_text(
        yaml.safe_dump(todict(config), sort_keys=False), encoding="utf-8"
    )


def todict(config: RunConfig) -> Dict[str, Any]:
    out = asdict(config)
    for section in out.values():
        for key, value in section.items():
            if isinstance(value, tuple):
                section[key] = list(value)
    return out


def logconfig(config: RunConfig, source: Optional[str] = None) -> None:
    origin = "file" if source else "default"
    defaults = RunConfig()
    for name, section in todict(config).items():
        base = todict(defaults)[name]
        for key, value in section.items():
            tag = origin if value != base[key] else "default"
            logger.info("config %s.%s = %r (%s)", name, key, value, tag)


def _section(default: Any, name: str, values: Mapping[str, Any], source: str) -> Any:
    known = {f.name: getattr(default, f.name) for f in fields(default)}
    updates = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"Cannot load config {source}, unknown key {name}.{key}")
        updates[key] = _coerce(name, key, value, known[key], source)
    result = replace(default, **updates)
    _validate(name, result, source)
    return result


def _coerce(section: str, key: str, value: Any, default: Any, source: str) -> Any:
    where = f"{section}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"Cannot load config {source}, {where} must be a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"Cannot load config {source}, {where} must be an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, str):
            # PyYAML reads exponents without a dot ("1e-3") as strings
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"Cannot load config {source}, {where} must be a number")
        return float(value)
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(default):
            raise ConfigError(
                f"Cannot load config {source}, {where} must be a list of {len(default)} integers"
            )
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"Cannot load config {source}, {where} must hold integers")
        return tuple(value)
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError(f"Cannot load config {source}, {where} must be a mapping")
        merged = dict.fromkeys(PATTERNS, 0)
        for k, v in value.items():
            if k not in PATTERNS:
                raise ConfigError(
                    f"Cannot load config {source}, unknown pattern {where}.{k}"
                )
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ConfigError(
                    f"Cannot load config {source}, {where}.{k} must be a non-negative integer"
                )
            merged[k] = v
        return merged
    if default is None or isinstance(default, str):
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"Cannot load config {source}, {where} must be a string")
        return value
    return value


def _validate(name: str, section: Any, source: str) -> None:
    for f in fields(section):
        choices = _CHOICES.get((name, f.name))
        value = getattr(section, f.name)
        if choices is not None and value not in choices:
            raise ConfigError(
                f"Cannot load config {source}, {name}.{f.name} must be one of {choices}, received {value!r}"
            )
    if name == "encoder":
        if section.dim < 2:
            raise ConfigError(f"Cannot load config {source}, encoder.dim must be >= 2")
        if section.maxlen < 1 or section.layers < 0:
            raise ConfigError(
                f"Cannot load config {source}, encoder.maxlen and encoder.layers must be positive"
            )
        if section.window < 1 or section.window % 2 == 0:
            raise ConfigError(
                f"Cannot load config {source}, encoder.window must be odd and positive"
            )
        if section.mixer == "attention" and section.dim % section.heads:
            raise ConfigError(
                f"Cannot load config {source}, encoder.dim must be divisible by encoder.heads"
            )
    if name == "training":
        if section.encoderlr <= 0 or section.decoderlr <= 0:
            raise ConfigError(
                f"Cannot load config {source}, learning rates must be positive"
            )
        if min(section.alpha, section.beta, section.gamma) < 0:
            raise ConfigError(
                f"Cannot load config {source}, loss weights must be non-negative"
            )
        if section.batchsize < 1 or section.epochs < 0 or section.negatives < 0:
            raise ConfigError(
                f"Cannot load config {source}, batchsize, epochs and negatives must be non-negative"
            )
    if name == "inference":
        for key in ("lambda1", "lambda2"):
            if not 0 < getattr(section, key) < 1:
                raise ConfigError(
                    f"Cannot load config {source}, inference.{key} must lie in (0, 1)"
                )
    if name == "synth":
        low, high = section.lengthrange
        if low < 1 or high < low:
            raise ConfigError(
                f"Cannot load config {source}, synth.lengthrange must be increasing and positive"
            )
        if section.relations < 1 or section.entities < 2 or section.fillers < 1:
            raise ConfigError(
                f"Cannot load config {source}, synth sizes must be positive"
            )
        low, high = section.clauses
        if low < 1 or high < low:
            raise ConfigError(
                f"Cannot load config {source}, synth.clauses must be increasing and positive"
            )


def _crosscheck(config: RunConfig, source: str) -> None:
    longest = config.synth.lengthrange[1]
    if longest > config.encoder.maxlen:
        raise ConfigError(
            f"Cannot load config {source}, synth.lengthrange reaches {longest} tokens but encoder.maxlen is {config.encoder.maxlen}"
        )
