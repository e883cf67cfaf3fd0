"""Run configuration: a flat ``key = value`` text file.

Lines starting with ``#`` and blank lines are ignored.  Every key is
optional; unknown keys and malformed values are errors naming the key.

Keys (default in brackets):

``n_min``, ``n_max``        quadric dimensions covered [2, 4]
``seed``                    master seed for every random draw [0]
``newton_starts``           multistart Newton starts per n [200]
``geometry_samples``        GZ / Biran / torus / sphere samples per n [1000]
``flow_n``                  comma list of n for the flow suite [2,3]
``flow_starts``             torus and sphere starts each, per n [100]
``scalar_checks``           randomized scalar law checks [10000]
``out``                     output directory [reports]
``table_override``          comma list of table files replacing built-ins []
``del_pezzo_dir``           directory with D<k>.qh and D<k>_registry.json [data]
``tol_aks``                 eigenvalue / critical value match [1e-8]
``tol_crit``                critical points vs closed form [1e-9]
``tol_spectrum``            c1-spectrum vs closed form [1e-9]
``tol_gz``                  dual GZ evaluators [1e-10]
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

SUPPORTED_N = range(1, 7)


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


def _int_list(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(",") if x.strip())


def _str_list(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


@dataclass(frozen=True)
class RunConfig:
    n_min: int = 2
    n_max: int = 4
    seed: int = 0
    newton_starts: int = 200
    geometry_samples: int = 1000
    flow_n: tuple[int, ...] = (2, 3)
    flow_starts: int = 100
    scalar_checks: int = 10000
    out: str = "reports"
    table_override: tuple[str, ...] = ()
    del_pezzo_dir: str = "data"
    tol_aks: float = 1e-8
    tol_crit: float = 1e-9
    tol_spectrum: float = 1e-9
    tol_gz: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            if f.name.startswith("tol_") and not getattr(self, f.name) > 0:
                raise ConfigError(f.name, "tolerance must be positive")
        for key in ("n_min", "n_max"):
            if getattr(self, key) not in SUPPORTED_N:
                raise ConfigError(key, f"n must lie in {SUPPORTED_N.start}..{SUPPORTED_N.stop - 1}")
        if self.n_min > self.n_max:
            raise ConfigError("n_max", "n_max < n_min")
        for n in self.flow_n:
            if n < 2:
                raise ConfigError("flow_n", "flow needs n >= 2")
        for key in ("newton_starts", "geometry_samples", "flow_starts", "scalar_checks"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "count must be positive")

    @property
    def n_values(self) -> list[int]:
        return list(range(self.n_min, self.n_max + 1))

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    def as_dict(self) -> dict:
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self)}


def _plain(v):
    return list(v) if isinstance(v, tuple) else v


# field annotations are strings under postponed evaluation
_PARSERS = {
    "int": int,
    "float": float,
    "str": str,
    "tuple[int, ...]": _int_list,
    "tuple[str, ...]": _str_list,
}


def parse_config(text: str) -> RunConfig:
    known = {f.name: f for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in known:
            raise ConfigError(key, "unknown key")
        try:
            values[key] = _PARSERS[known[key].type](val)
        except ValueError as exc:
            raise ConfigError(key, f"bad value {val!r} ({exc})") from None
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def config_to_text(cfg: RunConfig) -> str:
    lines = []
    for k, v in cfg.as_dict().items():
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
