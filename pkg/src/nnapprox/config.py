"""JSON run configuration shared by every CLI subcommand."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .sigmoids import catalog
from .testfunctions import CORPUS

DEFAULT_TOLERANCES = {
    "moment_eps": 1e-14,
    "fourier": 1e-10,
    "strang_fix": 1e-6,
    "constancy": 1e-6,
}


@dataclass
class RunConfig:
    activation: str = "logistic"
    interval: tuple[int, int] = (0, 3)
    delta: float = 0.25
    m: int = 2
    beta: float | None = None
    alpha: float | None = None
    decay: dict | None = None
    kernel_scale: float = 1.0
    negative_control: bool = False
    functions: list[str] = field(default_factory=lambda: ["sin"])
    n_list: list[int] = field(default_factory=lambda: [20, 40, 80, 160])
    s_list: list[int] = field(default_factory=lambda: [0, 1, 2])
    x_list: list[float] = field(default_factory=lambda: [1.5])
    nu_list: list[int] = field(default_factory=lambda: [0, 1, 2])
    k_max: int = 3
    nu_max: int = 2
    grid_resolution: int = 241
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = "out"

    @property
    def effective_beta(self) -> float:
        return float(2 * self.m + 2 if self.beta is None else self.beta)

    @property
    def effective_alpha(self) -> float:
        return float(self.effective_beta if self.alpha is None else self.alpha)

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        kwargs = dict(data)
        if "interval" in kwargs:
            kwargs["interval"] = tuple(kwargs["interval"])
        if "tolerances" in kwargs:
            bad = sorted(set(kwargs["tolerances"]) - set(DEFAULT_TOLERANCES))
            if bad:
                raise ConfigError(f"unknown tolerance keys: {bad}")
            kwargs["tolerances"] = {**DEFAULT_TOLERANCES, **kwargs["tolerances"]}
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["interval"] = list(self.interval)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def validate(self) -> None:
        """Structural checks; analytic hypotheses are checked by each command."""
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.activation in catalog(), f"unknown activation {self.activation!r}")
        need(len(self.interval) == 2 and all(isinstance(v, int) and not isinstance(v, bool)
                                             for v in self.interval),
             "interval must be two integers")
        a, b = self.interval
        need(a < b, "interval must satisfy a < b")
        need(isinstance(self.delta, (int, float)) and 0 < self.delta and a + self.delta < b - self.delta,
             "delta must leave a non-trivial I_delta")
        need(isinstance(self.m, int) and self.m >= 2, "m must be an integer >= 2")
        for name in ("beta", "alpha"):
            v = getattr(self, name)
            need(v is None or isinstance(v, (int, float)), f"{name} must be a number")
        need(isinstance(self.kernel_scale, (int, float)) and self.kernel_scale > 0,
             "kernel_scale must be positive")
        need(isinstance(self.functions, list) and self.functions, "functions must be a non-empty list")
        for fid in self.functions:
            need(fid in CORPUS, f"unknown function id {fid!r}")
        for name in ("n_list", "s_list", "nu_list"):
            v = getattr(self, name)
            need(isinstance(v, list) and all(isinstance(i, int) and i >= 0 for i in v),
                 f"{name} must be a list of non-negative integers")
        need(all(n >= 1 for n in self.n_list), "n_list entries must be >= 1")
        need(all(s <= self.m for s in self.s_list), "s_list entries must not exceed m")
        need(isinstance(self.x_list, list) and all(isinstance(x, (int, float)) for x in self.x_list),
             "x_list must be a list of numbers")
        need(isinstance(self.k_max, int) and self.k_max >= 1, "k_max must be >= 1")
        need(isinstance(self.nu_max, int) and 0 <= self.nu_max <= self.m,
             "nu_max must lie in 0..m")
        need(isinstance(self.grid_resolution, int) and self.grid_resolution >= 2,
             "grid_resolution must be an integer >= 2")
        need(all(isinstance(v, (int, float)) and v > 0 for v in self.tolerances.values()),
             "tolerances must be positive numbers")
        if self.decay is not None:
            need(isinstance(self.decay, dict) and {"K", "C"} <= set(self.decay)
                 and set(self.decay) <= {"beta", "alpha", "K", "C", "K0", "C0"},
                 "decay must hold K and C arrays (optional beta, alpha, K0, C0)")
            need(len(self.decay["K"]) == self.m and len(self.decay["C"]) == self.m,
                 "decay K and C need one entry per order 1..m")
            for name in ("beta", "alpha"):
                if name in self.decay:
                    need(float(self.decay[name]) == getattr(self, f"effective_{name}"),
                         f"decay.{name} disagrees with the configured {name}")

    def require(self, field_name: str) -> None:
        if not getattr(self, field_name):
            raise ConfigError(f"{field_name} must not be empty for this command")


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    try:
        return RunConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
