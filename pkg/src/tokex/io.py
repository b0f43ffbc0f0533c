"""Config JSON, log CSV and generic CSV/manifest writers."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import AllocationLog, GameConfig
from .errors import ConfigError, ValidationError

CONFIG_KEYS = ("n_players", "n_rounds", "initial_tokens", "groups")
LOG_HEADER = ["round", "giver", "receiver"]


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def config_from_dict(obj) -> GameConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(obj) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in CONFIG_KEYS if k not in obj]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    if not _is_int(obj["n_players"]) or not _is_int(obj["n_rounds"]):
        raise ConfigError("n_players and n_rounds must be integers")
    groups = obj["groups"]
    if not isinstance(groups, list) or not all(_is_int(g) for g in groups):
        raise ConfigError("groups must be an array of integer group ids")
    tokens = obj["initial_tokens"]
    if not (_is_int(tokens) or (isinstance(tokens, list) and all(_is_int(v) for v in tokens))):
        raise ConfigError("initial_tokens must be an integer or an array of integers")
    return GameConfig(obj["n_players"], obj["n_rounds"], tuple(groups),
                      tokens if _is_int(tokens) else tuple(tokens))


def read_config(path) -> GameConfig:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(obj)


def config_json(config: GameConfig) -> str:
    return json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))


def write_config(config: GameConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n")


def config_hash(config: GameConfig) -> str:
    return hashlib.sha256(config_json(config).encode()).hexdigest()


def read_log(path) -> AllocationLog:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != LOG_HEADER:
            raise ValidationError(f"{path}: header must be {','.join(LOG_HEADER)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                rows.append([int(v) for v in row])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-integer field in {row}") from None
    return AllocationLog(rows)


def write_log(log: AllocationLog, path) -> None:
    write_csv(path, LOG_HEADER, log.canonical().array.tolist())


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path
