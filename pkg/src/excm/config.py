"""Run configuration: seeds, budgets and environment overrides."""

import os
import random
from dataclasses import asdict, dataclass, field, replace

from .congruence import DEFAULT_BFS_CAP
from .heights import DEFAULT_HEIGHT_BUDGET
from .lattice import DEFAULT_ENUM_BUDGET
from .reduction import DEFAULT_ITER_CAP, DEFAULT_PREC

ENV_VARS = {
    "enum_budget": "EXCM_ENUM_BUDGET",
    "height_budget": "EXCM_HEIGHT_BUDGET",
    "prec_bits": "EXCM_PREC_BITS",
    "iter_cap": "EXCM_ITER_CAP",
    "bfs_cap": "EXCM_BFS_CAP",
}


@dataclass(frozen=True)
class Caps:
    enum_budget: int = DEFAULT_ENUM_BUDGET
    height_budget: int = DEFAULT_HEIGHT_BUDGET
    prec_bits: int = DEFAULT_PREC
    iter_cap: int = DEFAULT_ITER_CAP
    bfs_cap: int = DEFAULT_BFS_CAP

    @classmethod
    def from_env(cls, environ=None):
        environ = os.environ if environ is None else environ
        kwargs = {}
        for name, var in ENV_VARS.items():
            if var in environ:
                kwargs[name] = int(environ[var])
        return cls(**kwargs)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    caps: Caps = field(default_factory=Caps)
    output: str = None
    fmt: str = "json"
    params: dict = field(default_factory=dict)

    def rng(self, label, index=None):
        """Independent stream for (seed, label, index); stable across runs."""
        tail = "" if index is None else f"/{index}"
        return random.Random(f"{self.seed}/{label}{tail}")

    def param(self, name, default):
        return self.params.get(name, default)

    def with_params(self, **kw):
        return replace(self, params={**self.params, **kw})

    def to_json(self):
        out = asdict(self)
        out.pop("output")
        return out
