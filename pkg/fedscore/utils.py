import os
from importlib import resources
from pathlib import Path
from typing import Any, Iterator

import numpy as np
import tomli as toml

from fedscore import logging as fedscore_logging

logger = fedscore_logging.get_logger(__name__)

_RESOURCE_PACKAGE = "fedscore._resources"

# Stream tags keep the seed sequences of unrelated consumers apart.
STREAM_SYNTHETIC = 1
STREAM_PUBLIC = 2
STREAM_POOL = 3
STREAM_INIT = 4
STREAM_BATCH = 5


######## Seed Helpers ########
def seed_sequence(master_seed: int, stream: int, *keys: int) -> np.random.SeedSequence:
    """Derive an independent seed sequence for ``(master_seed, stream, *keys)``."""
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(stream)]
    entropy.extend(int(k) for k in keys)
    return np.random.SeedSequence(entropy)


def derive_rng(master_seed: int, stream: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for one derived stream; pure in its arguments."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, stream, *keys)))


def derive_seed(master_seed: int, stream: int, *keys: int) -> int:
    """Collapse a derived stream into a single unsigned 64-bit integer seed."""
    state = seed_sequence(master_seed, stream, *keys).generate_state(1, dtype=np.uint64)
    return int(state[0])


######## Resource / Config Helpers ########
def resource_path(*parts: str):
    return resources.files(_RESOURCE_PACKAGE).joinpath(*parts)


def read_resource_text(*parts: str) -> str:
    try:
        with resource_path(*parts).open("r", encoding="utf-8") as handle:
            return handle.read()
    except (FileNotFoundError, ModuleNotFoundError):
        fallback = Path(__file__).resolve().parent / "_resources" / Path(*parts)
        with open(fallback, "r", encoding="utf-8") as handle:
            return handle.read()


def _merge_configs(config, default_config):
    config_out = {}

    for key, default_value in default_config.items():
        if key in config:
            if isinstance(config[key], dict) and isinstance(default_value, dict):
                config_out[key] = _merge_configs(config[key], default_value)
            elif isinstance(config[key], dict) or isinstance(default_value, dict):
                raise ValueError(f"Type mismatch for key {key}, "
                                 f"config has {type(config[key])}, default_config has {type(default_value)}")
            else:
                config_out[key] = config[key]
        else:
            config_out[key] = default_value

    for key, value in config.items():
        if key not in default_config:
            config_out[key] = value

    return config_out


def load_default_config() -> dict[str, Any]:
    """Load the bundled default runtime settings from packaged resources."""
    return toml.loads(read_resource_text("fedscore.default.toml"))


def try_load_config(config_file=None) -> dict[str, Any]:
    """Load user runtime settings merged with defaults.

    Search order:
    1. Explicit `config_file` argument.
    2. `FEDSCORE_CONFIG` environment variable.
    3. `./fedscore.toml` relative to current working directory.
    4. `fedscore.toml` inside the repository checkout (development mode).
    If none are found, return the default config alone.
    """
    default_config = load_default_config()

    def _load_user_config(path: Path) -> dict:
        with open(path, "rb") as f:
            return toml.load(f)

    if config_file:
        candidate = Path(config_file).expanduser()
        if not candidate.is_file():
            raise FileNotFoundError(f"Could not find config file {candidate}")
        return _merge_configs(_load_user_config(candidate), default_config)

    env_candidate = os.environ.get("FEDSCORE_CONFIG")
    if env_candidate:
        env_path = Path(env_candidate).expanduser()
        if not env_path.is_file():
            raise FileNotFoundError(f"FEDSCORE_CONFIG={env_candidate} does not point to a readable file")
        return _merge_configs(_load_user_config(env_path), default_config)

    cwd_candidate = Path.cwd() / "fedscore.toml"
    if cwd_candidate.is_file():
        return _merge_configs(_load_user_config(cwd_candidate), default_config)

    package_dir = Path(__file__).resolve().parent
    repo_candidate = package_dir.parent / "fedscore.toml"
    if repo_candidate.is_file():
        return _merge_configs(_load_user_config(repo_candidate), default_config)

    logger.debug("No user settings found; falling back to default settings only")
    return default_config


def chunked(indices: np.ndarray, size: int) -> Iterator[np.ndarray]:
    for start in range(0, len(indices), size):
        yield indices[start:start + size]
