import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

from jsonschema import Draft202012Validator  # type: ignore
from jsonschema.exceptions import best_match  # type: ignore

from fedscore import logging as fedscore_logging
from fedscore import utils
from fedscore.core import LabelSpace
from fedscore.data import ShardSchedule, SyntheticSpec
from fedscore.errors import ConfigInvalid, InvalidArch, InvalidSpec, UnknownLabel
from fedscore.learner import ArchSpec, TrainConfig
from fedscore.protocol import AggregateMode, BetaAccuracy
from fedscore.simulator import ArchSchedule, ClientConfig, DataConfig, ExperimentConfig

logger = fedscore_logging.get_logger(__name__)

SEED_ENV = "FEDSCORE_SEED"


@lru_cache(maxsize=1)
def load_schema() -> dict[str, Any]:
    return json.loads(utils.read_resource_text("experiment.schema.json"))


def _json_path(parts) -> str:
    return "/".join(str(p) for p in parts)


def validate_document(document: Any) -> None:
    """Schema check; the first, most relevant violation becomes a ConfigInvalid."""
    validator = Draft202012Validator(load_schema())
    error = best_match(validator.iter_errors(document))
    if error is not None:
        raise ConfigInvalid(_json_path(error.absolute_path), error.message)


def _merge_train(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def _train_config(data: Mapping[str, Any], path: str) -> TrainConfig:
    try:
        return TrainConfig.from_dict(data)
    except ValueError as exc:
        raise ConfigInvalid(path, str(exc)) from exc


def _sizes(value: Any, labels: tuple[str, ...], path: str) -> dict[str, int]:
    if isinstance(value, int):
        return {label: value for label in labels}
    for label in value:
        if label not in labels:
            raise ConfigInvalid(f"{path}/{label}", f"label {label!r} is not one of the client's labels")
    return {label: int(value[label]) for label in labels if label in value}


def _shard_schedule(doc: Mapping[str, Any], labels: tuple[str, ...], iterations: int, path: str) -> ShardSchedule:
    default_sizes = _sizes(doc["per_label"], labels, f"{path}/per_label")
    overrides: dict[int, dict[str, int]] = {}
    for key, value in doc.get("overrides", {}).items():
        iteration = int(key)
        if iteration > iterations:
            raise ConfigInvalid(f"{path}/overrides/{key}", f"iteration {iteration} exceeds iterations={iterations}")
        overrides[iteration] = _sizes(value, labels, f"{path}/overrides/{key}")
    skew: dict[int, dict[str, float]] = {}
    for key, multipliers in doc.get("skew", {}).items():
        iteration = int(key)
        if iteration > iterations:
            raise ConfigInvalid(f"{path}/skew/{key}", f"iteration {iteration} exceeds iterations={iterations}")
        for label in multipliers:
            if label not in labels:
                raise ConfigInvalid(f"{path}/skew/{key}/{label}", f"label {label!r} is not one of the client's labels")
        skew[iteration] = {label: float(m) for label, m in multipliers.items()}
    return ShardSchedule(labels, default_sizes, overrides, skew)


def _arch_schedule(steps: list[Mapping[str, Any]], path: str) -> ArchSchedule:
    parsed = []
    for k, step in enumerate(steps):
        try:
            arch = ArchSpec.from_dict({key: value for key, value in step.items() if key != "from"})
        except InvalidArch as exc:
            raise ConfigInvalid(f"{path}/{k}", str(exc)) from exc
        parsed.append((int(step["from"]), arch))
    try:
        return ArchSchedule(tuple(parsed))
    except ValueError as exc:
        raise ConfigInvalid(path, str(exc)) from exc


def _resolve(base_dir: Path, value: str) -> str:
    candidate = Path(value).expanduser()
    if not candidate.is_absolute():
        candidate = base_dir / candidate
    return str(candidate)


def _data_config(doc: Mapping[str, Any], label_space: LabelSpace, base_dir: Path) -> DataConfig:
    source = doc["source"]
    standardize = bool(doc.get("standardize", True))
    if source == "synthetic":
        if "synthetic" not in doc:
            raise ConfigInvalid("data", "source 'synthetic' needs a 'synthetic' section")
        declared = set(doc["synthetic"]["labels"])
        for label in declared:
            if label not in label_space:
                raise ConfigInvalid(f"data/synthetic/labels/{label}", f"label {label!r} is not in labels")
        for label in label_space:
            if label not in declared:
                raise ConfigInvalid("data/synthetic/labels", f"no distribution for label {label!r}")
        try:
            spec = SyntheticSpec.from_dict(doc["synthetic"])
        except (InvalidSpec, UnknownLabel) as exc:
            raise ConfigInvalid("data/synthetic", str(exc)) from exc
        return DataConfig(
            source=source,
            synthetic=spec,
            public_per_label=int(doc.get("public_per_label", 500)),
            standardize=standardize,
        )

    paths = {}
    for key in ("public_csv", "private_csv"):
        if key not in doc:
            raise ConfigInvalid("data", f"source 'csv' needs '{key}'")
        resolved = _resolve(base_dir, doc[key])
        if not os.path.isfile(resolved):
            raise ConfigInvalid(f"data/{key}", f"file not found: {resolved}")
        paths[key] = resolved
    return DataConfig(source=source, standardize=standardize, **paths)


def _seed(document: Mapping[str, Any], seed_override: int | None) -> int:
    if seed_override is not None:
        return seed_override
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ConfigInvalid(SEED_ENV, f"not an integer: {env_seed!r}") from None
        if not 0 <= seed < 2 ** 64:
            raise ConfigInvalid(SEED_ENV, f"out of range: {seed}")
        return seed
    return int(document.get("master_seed", 0))


def build_config(document: Any, *, base_dir: Path | None = None, source_path: str | None = None,
                 seed_override: int | None = None, workers_override: int | None = None,
                 default_workers: int = 1) -> ExperimentConfig:
    """Validate an already-decoded config document and resolve every cross reference."""
    validate_document(document)
    base_dir = base_dir or Path.cwd()
    label_space = LabelSpace(tuple(document["labels"]))
    iterations = int(document["iterations"])
    base_train = document.get("train", {})

    clients: list[ClientConfig] = []
    seen: set[str] = set()
    for k, doc in enumerate(document["clients"]):
        path = f"clients/{k}"
        client_id = doc["id"]
        if client_id in seen:
            raise ConfigInvalid(f"{path}/id", f"duplicate client id {client_id!r}")
        seen.add(client_id)
        for j, label in enumerate(doc["labels"]):
            if label not in label_space:
                raise ConfigInvalid(f"{path}/labels/{j}", f"label {label!r} is not in labels")
        labels = label_space.ordered(doc["labels"])
        clients.append(ClientConfig(
            client_id=client_id,
            labels=labels,
            arch_schedule=_arch_schedule(doc["arch"], f"{path}/arch"),
            train=_train_config(_merge_train(base_train, doc.get("train", {})), f"{path}/train"),
            shard=_shard_schedule(doc["shard"], labels, iterations, f"{path}/shard"),
        ))

    claimed = {label for client in clients for label in client.labels}
    unclaimed = [label for label in label_space if label not in claimed]
    if unclaimed:
        raise ConfigInvalid("labels", f"labels {unclaimed} are claimed by no client")

    workers = workers_override
    if workers is None:
        workers = int(document.get("parallel_workers", default_workers))
    if workers < 1:
        raise ConfigInvalid("parallel_workers", f"must be >= 1, got {workers}")

    config = ExperimentConfig(
        name=document.get("name", Path(source_path).stem if source_path else "experiment"),
        label_space=label_space,
        data=_data_config(document["data"], label_space, base_dir),
        clients=tuple(clients),
        iterations=iterations,
        master_seed=_seed(document, seed_override),
        aggregate=AggregateMode(document.get("aggregate", AggregateMode.NORMALIZED.value)),
        beta_acc=BetaAccuracy(document.get("beta_acc", BetaAccuracy.PER_LABEL.value)),
        parallel_workers=workers,
        warm_start=bool(document.get("warm_start", False)),
        source_path=source_path,
    )
    logger.debug("Parsed config %s: %d clients, %d labels, %d iterations", config.name,
                 len(config.clients), len(label_space), iterations)
    return config


def parse_config(path: str, seed_override: int | None = None, workers_override: int | None = None,
                 default_workers: int = 1) -> ExperimentConfig:
    """Read, validate and resolve an experiment config file.

    Relative CSV paths resolve against the config file's directory.
    ``seed_override`` wins over ``FEDSCORE_SEED``, which wins over ``master_seed``.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("", f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigInvalid("", f"cannot read {path}: {exc.strerror or exc}") from exc
    return build_config(
        document,
        base_dir=Path(path).resolve().parent,
        source_path=str(path),
        seed_override=seed_override,
        workers_override=workers_override,
        default_workers=default_workers,
    )
