"""Flat key-value run-config files.

The file format is INI-style: typed sections ([run], [system], [rates],
[pulse], [initial], [optimize], [scheme], [drive], [integrator], [output])
holding scalar key = value pairs; list-valued keys are comma-separated. The
parsed content validates through the RunConfig pydantic model, so files and
service JSON share one schema.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from pydantic import ValidationError

from .errors import ConfigError
from .schemas import RunConfig

_LIST_KEYS = {"ground", "excited", "couplings", "decays", "values", "target"}
_SECTIONS = (
    "run",
    "system",
    "rates",
    "pulse",
    "initial",
    "optimize",
    "scheme",
    "drive",
    "integrator",
    "output",
)


def _split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _free_parameters(section: dict[str, str]) -> list[dict[str, str]]:
    names = _split_list(section.pop("free", ""))
    free = []
    for name in names:
        lo_key, hi_key = f"{name}_min", f"{name}_max"
        if lo_key not in section or hi_key not in section:
            raise ConfigError(f"optimize.{name}: missing {lo_key} / {hi_key} bounds")
        free.append({"name": name, "lower": section.pop(lo_key), "upper": section.pop(hi_key)})
    return free


def _format_validation_error(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        loc = ".".join(str(p) for p in item["loc"]) or "config"
        parts.append(f"{loc}: {item['msg']}")
    return "; ".join(parts)


def config_from_mapping(sections: dict[str, dict[str, str]]) -> RunConfig:
    """Build a RunConfig from already-split section mappings."""
    data: dict[str, object] = {}
    for name, body in sections.items():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        body = dict(body)
        if name == "run":
            data.update(body)
            continue
        for key in list(body):
            if key in _LIST_KEYS:
                body[key] = _split_list(body[key])
        if name == "optimize":
            body["free"] = _free_parameters(body)
        data[name] = body
    try:
        return RunConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_validation_error(err)) from err


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as err:
        raise ConfigError(str(err)) from err
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    if "run" not in sections:
        raise ConfigError(f"{source}: missing [run] section with the scenario")
    return config_from_mapping(sections)


def parse_config_file(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_config_text(text, source=str(path))
