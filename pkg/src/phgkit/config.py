"""Run configuration: weights, grid layout, tolerance block, corpus
selection, output directory.  Loaded from JSON, every field defaulted."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from phgkit.grading import InvalidParameterError, Weights

__all__ = ["Tolerances", "RunConfig"]


@dataclass(frozen=True)
class Tolerances:
    slope_tolerance: float = 0.3
    limit_tolerance: float = 1e-6
    tail_tolerance: float = 1e-10
    t_switch: float = 1e-3
    drift_tolerance: float = 0.25
    homogeneity_tolerance: float = 1e-8
    k_max: int = 4
    deriv_max: int = 2

    def __post_init__(self):
        for name in ("slope_tolerance", "limit_tolerance", "tail_tolerance",
                     "t_switch", "drift_tolerance", "homogeneity_tolerance"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.k_max < 1:
            raise InvalidParameterError("k_max must be at least 1")
        if self.deriv_max < 0:
            raise InvalidParameterError("deriv_max must be nonnegative")


@dataclass(frozen=True)
class RunConfig:
    rho: tuple[int, ...] = (1, 1)
    variant: str = "smooth"
    n_x: int = 0
    base_points: tuple[tuple[float, ...], ...] = ((),)
    r0: float = 1.0
    shells: int = 10
    ndir: int | None = None
    seed: int = 7
    tolerances: Tolerances = field(default_factory=Tolerances)
    corpus: tuple[str, ...] = ()
    out_dir: str = "reports"

    @property
    def weights(self) -> Weights:
        return Weights(self.rho)

    def payload(self) -> dict:
        d = asdict(self)
        d["tolerances"] = asdict(self.tolerances)
        return d

    @staticmethod
    def from_json(path_or_text: str) -> "RunConfig":
        try:
            text = path_or_text
            if not path_or_text.lstrip().startswith("{"):
                with open(path_or_text) as fh:
                    text = fh.read()
            raw = json.loads(text)
        except (OSError, json.JSONDecodeError) as err:
            raise InvalidParameterError(f"cannot load config: {err}") from None
        tol = Tolerances(**raw.pop("tolerances", {}))
        basep = raw.pop("base_points", None)
        kwargs = {}
        for key in ("variant", "n_x", "r0", "shells", "ndir", "seed", "out_dir"):
            if key in raw:
                kwargs[key] = raw.pop(key)
        if "rho" in raw:
            kwargs["rho"] = tuple(int(r) for r in raw.pop("rho"))
        if "corpus" in raw:
            kwargs["corpus"] = tuple(raw.pop("corpus"))
        if raw:
            raise InvalidParameterError(f"unknown config keys: {sorted(raw)}")
        if basep is not None:
            kwargs["base_points"] = tuple(tuple(float(v) for v in p) for p in basep)
        return RunConfig(tolerances=tol, **kwargs)

    def with_seed(self, seed: int) -> "RunConfig":
        return RunConfig(**{**self.payload_flat(), "seed": seed})

    def payload_flat(self) -> dict:
        d = asdict(self)
        d["tolerances"] = self.tolerances
        return d
