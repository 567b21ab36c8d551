"""key = value configuration with JSON values and environment overrides."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

ENV_NODE_LIMIT = "PCFVAR_NODE_LIMIT"
ENV_TIME_LIMIT = "PCFVAR_TIME_LIMIT"


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    ring: str = "Z"
    unit_generators: list = field(default_factory=list)
    node_limit: int | None = 10**9
    time_limit: float | None = None
    output: str | None = None
    jobs: int = 1

    def dumps(self) -> str:
        return "".join(f"{k} = {json.dumps(v)}\n" for k, v in asdict(self).items())

    @classmethod
    def loads(cls, text: str) -> Config:
        known = {f.name for f in fields(cls)}
        values = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or key not in known:
                raise ConfigError(f"line {n}: unknown or malformed entry {raw!r}")
            try:
                values[key] = json.loads(val)
            except json.JSONDecodeError:
                # bare strings such as  ring = Z[sqrt(2)]
                values[key] = val
        cfg = cls(**values)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | None) -> Config:
        if path is None:
            cfg = cls()
        else:
            with open(path, encoding="utf-8") as fh:
                cfg = cls.loads(fh.read())
        return cfg.with_env()

    def with_env(self, env=None) -> Config:
        env = os.environ if env is None else env
        out = Config(**asdict(self))
        try:
            if env.get(ENV_NODE_LIMIT):
                out.node_limit = int(env[ENV_NODE_LIMIT])
            if env.get(ENV_TIME_LIMIT):
                out.time_limit = float(env[ENV_TIME_LIMIT])
        except ValueError as exc:
            raise ConfigError(f"bad budget override: {exc}") from exc
        return out

    def validate(self):
        if not isinstance(self.ring, str):
            raise ConfigError("ring must be a string")
        if not isinstance(self.unit_generators, list) or not all(isinstance(g, str) for g in self.unit_generators):
            raise ConfigError("unit_generators must be a list of strings")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs must be a positive integer")
