from .config_parser import SEED_ENV, build_config, load_schema, parse_config, validate_document

__all__ = [
    "SEED_ENV",
    "build_config",
    "load_schema",
    "parse_config",
    "validate_document",
]
