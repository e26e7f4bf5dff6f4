"""Runtime configuration: defaults < config file < SENTRY_ environment
overrides < explicit CLI flags.  The file format is line-oriented
key=value; '#' starts a comment."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "SENTRY_"


@dataclass
class RunConfig:
    bind: str = "127.0.0.1"
    gateway_port: int = 8080
    predict_port: int = 8081
    storage_path: str | None = None
    storage_backend: str = "file"
    ttl_seconds: float = 20.0
    queue_capacity: int = 100
    queue_workers: int = 2
    max_image_bytes: int = 1_048_576
    admin_email: str = "admin@example.com"
    admin_password: str = "admin-password-1"
    policy_interval: float = 60.0
    seed: int = 0
    model_dir: str | None = None
    divergence_path: str | None = None
    static_dir: str | None = None

    def describe(self) -> str:
        pairs = []
        for f in fields(self):
            value = getattr(self, f.name)
            if "password" in f.name and value:
                value = "***"
            pairs.append(f"{f.name}={value}")
        return "\n".join(pairs)


def _coerce(name: str, raw: str, target_type):
    if target_type is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    if raw == "" and target_type is not str:
        return None
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
    except ValueError as exc:
        raise ValueError(f"config key {name}: cannot parse {raw!r}") from exc
    return raw


def parse_config_file(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


_FIELD_TYPES = {
    "gateway_port": int,
    "predict_port": int,
    "queue_capacity": int,
    "queue_workers": int,
    "max_image_bytes": int,
    "seed": int,
    "ttl_seconds": float,
    "policy_interval": float,
}


def load_config(
    path: str | Path | None = None,
    env: dict[str, str] | None = None,
    overrides: dict | None = None,
) -> RunConfig:
    env = os.environ if env is None else env
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}

    def apply(source: dict, coerce: bool) -> None:
        for key, value in source.items():
            if key not in known or value is None:
                continue
            if coerce and isinstance(value, str):
                value = _coerce(key, value, _FIELD_TYPES.get(key, str))
            if value is not None:
                setattr(cfg, key, value)

    if path:
        apply(parse_config_file(path), coerce=True)
    env_pairs = {
        key[len(ENV_PREFIX):].lower(): value
        for key, value in env.items()
        if key.startswith(ENV_PREFIX)
    }
    apply(env_pairs, coerce=True)
    if overrides:
        apply(overrides, coerce=False)
    return cfg
