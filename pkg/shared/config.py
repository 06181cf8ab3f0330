# shared/config.py
"""Runtime configuration: environment variables plus an optional key/value budget file."""

from __future__ import annotations

import logging
import os
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from shared.bounder import Budget
from shared.exact_arith import Precision
from shared.tables import DEFAULT_TABLES_DIR

logger = logging.getLogger(__name__)

_SECTION = re.compile(r"^(default|C(1[0-9]|[1-9]))$")


class ConfigError(ValueError):
    """Invalid configuration file or environment value."""


@dataclass(frozen=True)
class CertificateSettings:
    max_depth: int = 48
    max_boxes: int = 10**6
    exp_terms: int = 24
    sqrt_bits: int = 96
    arctan_terms: int = 30
    bernstein_degree: int = 59  # C16 only

    def budget(self) -> Budget:
        return Budget(max_depth=self.max_depth, max_boxes=self.max_boxes)

    def precision(self) -> Precision:
        return Precision(exp_terms=self.exp_terms, sqrt_bits=self.sqrt_bits, arctan_terms=self.arctan_terms)


SETTING_FIELDS = tuple(CertificateSettings.__dataclass_fields__)


@dataclass
class RuntimeConfig:
    tables_dir: str
    workers: int
    config_path: Optional[str]
    report_bucket: Optional[str]
    log_level: str
    # section ("default" or a certificate ID) -> field -> value
    overrides: dict[str, dict[str, int]] = field(default_factory=dict)

    def settings_for(self, cert_id: str) -> CertificateSettings:
        settings = CertificateSettings()
        for section in ("default", cert_id):
            if section in self.overrides:
                settings = replace(settings, **self.overrides[section])
        return settings

    def to_dict(self) -> dict:
        return {
            "tables_dir": self.tables_dir,
            "workers": self.workers,
            "overrides": {k: dict(sorted(v.items())) for k, v in sorted(self.overrides.items())},
            "defaults": asdict(CertificateSettings()),
        }


def parse_config_text(text: str) -> dict[str, dict[str, int]]:
    """`default.<field> = N` or `<CERT_ID>.<field> = N`, one per line; `#` starts a comment."""
    overrides: dict[str, dict[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        section, _, name = key.partition(".")
        if not _SECTION.match(section) or name not in SETTING_FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            number = int(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} must be an integer, got {value!r}") from None
        if number <= 0:
            raise ConfigError(f"line {lineno}: {key} must be positive")
        overrides.setdefault(section, {})[name] = number
    return overrides


def load_config_file(path: str | Path) -> dict[str, dict[str, int]]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"))


def get_config(config_path: str | None = None) -> RuntimeConfig:
    """
    Runtime config for the certification runs.

    Values come from environment variables; an explicit config_path wins over CERTIFY_CONFIG.
    """
    raw_workers = os.environ.get("CERTIFY_WORKERS", "1")
    try:
        workers = int(raw_workers)
    except ValueError:
        raise ConfigError(f"CERTIFY_WORKERS must be an integer, got {raw_workers!r}") from None

    config_path = config_path or os.environ.get("CERTIFY_CONFIG")
    return RuntimeConfig(
        tables_dir=os.environ.get("CERTIFY_TABLES_DIR", str(DEFAULT_TABLES_DIR)),
        workers=workers,
        config_path=config_path,
        # Optional: archive reports in S3
        report_bucket=os.environ.get("CERTIFY_REPORT_BUCKET"),
        log_level=os.environ.get("LOG_LEVEL", "INFO"),
        overrides=load_config_file(config_path) if config_path else {},
    )


def validate_config(cfg: RuntimeConfig) -> list[str]:
    """Return a list of configuration errors; empty when valid."""
    errors = []
    if cfg.workers < 1:
        errors.append("CERTIFY_WORKERS must be at least 1")
    if not Path(cfg.tables_dir).is_dir():
        errors.append(f"CERTIFY_TABLES_DIR {cfg.tables_dir} is not a directory")
    if cfg.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"LOG_LEVEL {cfg.log_level!r} is not a logging level")

    for error in errors:
        logger.error("Configuration error", extra={"error": error})
    return errors


def get_validated_config(config_path: str | None = None) -> RuntimeConfig:
    """Get and validate configuration."""
    cfg = get_config(config_path)
    if validate_config(cfg):
        raise ValueError("Invalid configuration. Check environment variables.")
    return cfg
