"""Run configuration: one flat JSON document describing an experiment."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import ConfigError

DEFAULT_TAU_LIST = (4.0, 6.0, 8.0, 10.0, 12.0, 14.0)


def shape_to_dict(shape) -> dict:
    if isinstance(shape, geometry.Disk):
        return {"kind": "disk", "center": list(shape.center), "radius": shape.radius}
    if isinstance(shape, geometry.ConvexPolygon):
        return {"kind": "polygon", "vertices": shape.vertices.tolist()}
    if isinstance(shape, geometry.ShapeUnion):
        return {"kind": "union", "members": [shape_to_dict(m) for m in shape.members]}
    raise ConfigError(f"unknown shape object {type(shape).__name__}")


def shape_from_dict(block, field_name: str):
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError(f"field '{field_name}' must be a shape block with a 'kind' key")
    kind = block["kind"]
    try:
        if kind == "disk":
            return geometry.Disk(center=tuple(float(c) for c in block["center"]),
                                 radius=float(block["radius"]))
        if kind == "polygon":
            return geometry.ConvexPolygon(np.asarray(block["vertices"], dtype=float))
        if kind == "union":
            return geometry.ShapeUnion(tuple(
                shape_from_dict(m, field_name) for m in block["members"]
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"field '{field_name}': invalid {kind} block ({exc})") from exc
    raise ConfigError(f"field '{field_name}': unknown shape kind '{kind}'")


@dataclass(eq=False)
class RunConfig:
    """Everything a reconstruction run needs, mirroring the JSON keys."""

    p: float
    domain: object
    inclusion: object | None = None
    sigma_d: float = 1.0
    directions: int = 16
    tau_list: tuple = DEFAULT_TAU_LIST
    mesh_budget: int = 40000
    solver_tol: float = 1e-9
    out_dir: str = "out"
    seed: int = 0
    workers: int = 0            # 0 means available parallelism
    boundary: dict | None = None   # forward command: boundary-data block
    rho: tuple | None = None       # sweep command: single direction
    t_offset: float | None = None  # sweep command: level offset (default h_Omega(rho))
    monotonicity: dict = field(default_factory=dict)

    def validate(self, require=()) -> "RunConfig":
        if not (isinstance(self.p, (int, float)) and 1.0 < self.p < math.inf):
            raise ConfigError(f"field 'p' must lie in (1, inf), got {self.p}")
        if self.inclusion is not None and not (-1.0 + 1e-6 < self.sigma_d < math.inf):
            raise ConfigError(
                f"field 'sigma_d' must exceed -1 (conductivity stays positive), got {self.sigma_d}"
            )
        if not (isinstance(self.directions, int) and self.directions >= 8):
            raise ConfigError(f"field 'directions' must be an integer >= 8, got {self.directions}")
        taus = tuple(float(t) for t in self.tau_list)
        if len(taus) < 2 or any(t <= 0 for t in taus) or any(
            b <= a for a, b in zip(taus, taus[1:])
        ):
            raise ConfigError("field 'tau_list' must be strictly increasing positive values")
        if not (isinstance(self.mesh_budget, int) and self.mesh_budget >= 16):
            raise ConfigError(f"field 'mesh_budget' must be an integer >= 16, got {self.mesh_budget}")
        if not (0.0 < self.solver_tol <= 1e-2):
            raise ConfigError(f"field 'solver_tol' must lie in (0, 1e-2], got {self.solver_tol}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ConfigError(f"field 'seed' must be a u64, got {self.seed}")
        if not (isinstance(self.workers, int) and self.workers >= 0):
            raise ConfigError(f"field 'workers' must be a nonnegative integer, got {self.workers}")
        if self.rho is not None:
            r = np.asarray(self.rho, dtype=float)
            if r.shape != (2,) or float(np.hypot(r[0], r[1])) == 0.0:
                raise ConfigError("field 'rho' must be a nonzero 2-vector")
        for name in require:
            if getattr(self, name) is None:
                raise ConfigError(f"field '{name}' is required for this command")
        return self

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def to_dict(self) -> dict:
        d = {
            "p": self.p,
            "domain": shape_to_dict(self.domain),
            "inclusion": None if self.inclusion is None else shape_to_dict(self.inclusion),
            "sigma_d": self.sigma_d,
            "directions": self.directions,
            "tau_list": list(self.tau_list),
            "mesh_budget": self.mesh_budget,
            "solver_tol": self.solver_tol,
            "out_dir": self.out_dir,
            "seed": self.seed,
            "workers": self.workers,
        }
        if self.boundary is not None:
            d["boundary"] = self.boundary
        if self.rho is not None:
            d["rho"] = list(self.rho)
        if self.t_offset is not None:
            d["t_offset"] = self.t_offset
        if self.monotonicity:
            d["monotonicity"] = self.monotonicity
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config document must be a JSON object")
        known = {
            "p", "domain", "inclusion", "sigma_d", "directions", "tau_list",
            "mesh_budget", "solver_tol", "out_dir", "seed", "workers",
            "boundary", "rho", "t_offset", "monotonicity",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        if "p" not in raw or "domain" not in raw:
            raise ConfigError("fields 'p' and 'domain' are required")
        try:
            p = float(raw["p"])
        except (TypeError, ValueError):
            raise ConfigError(f"field 'p' must be a number, got {raw['p']!r}")
        inclusion = raw.get("inclusion")
        return cls(
            p=p,
            domain=shape_from_dict(raw["domain"], "domain"),
            inclusion=None if inclusion is None else shape_from_dict(inclusion, "inclusion"),
            sigma_d=float(raw.get("sigma_d", 1.0)),
            directions=raw.get("directions", 16),
            tau_list=tuple(float(t) for t in raw.get("tau_list", DEFAULT_TAU_LIST)),
            mesh_budget=raw.get("mesh_budget", 40000),
            solver_tol=float(raw.get("solver_tol", 1e-9)),
            out_dir=str(raw.get("out_dir", "out")),
            seed=raw.get("seed", 0),
            workers=raw.get("workers", 0),
            boundary=raw.get("boundary"),
            rho=None if raw.get("rho") is None else tuple(float(c) for c in raw["rho"]),
            t_offset=None if raw.get("t_offset") is None else float(raw["t_offset"]),
            monotonicity=raw.get("monotonicity", {}),
        )

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
