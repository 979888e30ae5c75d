"""Box-constrained hyperparameter domains.

A space is an ordered list of dimensions, each real, log-real, integer, or
categorical. Points are plain dicts keyed by dimension name. Sampling uses
one unit coordinate per dimension; the surrogate-model embedding expands
categoricals to one-hot blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("real", "log", "int", "cat")


@dataclass(frozen=True)
class Dimension:
    name: str
    kind: str
    low: float = 0.0
    high: float = 0.0
    categories: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dimension kind {self.kind!r}")
        if self.kind == "cat":
            if len(self.categories) < 1:
                raise ValueError(f"{self.name}: empty category set")
            return
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValueError(f"{self.name}: bounds must be finite")
        if self.low >= self.high:
            raise ValueError(f"{self.name}: low must be < high")
        if self.kind == "log" and self.low <= 0:
            raise ValueError(f"{self.name}: log bounds must be positive")

    def from_unit(self, u: float):
        u = min(1.0, max(0.0, u))
        if self.kind == "real":
            return self.low + u * (self.high - self.low)
        if self.kind == "log":
            return math.exp(
                math.log(self.low) + u * (math.log(self.high) - math.log(self.low))
            )
        if self.kind == "int":
            lo, hi = int(self.low), int(self.high)
            return min(hi, lo + math.floor(u * (hi - lo + 1)))
        idx = min(len(self.categories) - 1, int(u * len(self.categories)))
        return self.categories[idx]

    def check(self, value) -> None:
        if self.kind == "cat":
            if value not in self.categories:
                raise ValueError(f"{self.name}: {value!r} not in {self.categories}")
            return
        if self.kind == "int":
            if value != int(value):
                raise ValueError(f"{self.name}: {value!r} is not integral")
        if not self.low <= value <= self.high:
            raise ValueError(
                f"{self.name}: {value!r} outside [{self.low}, {self.high}]"
            )

    def embed_width(self) -> int:
        return len(self.categories) if self.kind == "cat" else 1

    def embed(self, value) -> list[float]:
        if self.kind == "cat":
            out = [0.0] * len(self.categories)
            out[self.categories.index(value)] = 1.0
            return out
        if self.kind == "real" or self.kind == "int":
            return [(value - self.low) / (self.high - self.low)]
        return [
            (math.log(value) - math.log(self.low))
            / (math.log(self.high) - math.log(self.low))
        ]


@dataclass(frozen=True)
class HyperSpace:
    dimensions: tuple[Dimension, ...] = field(default_factory=tuple)

    def __post_init__(self):
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    def validate(self, point: dict) -> None:
        for d in self.dimensions:
            if d.name not in point:
                raise ValueError(f"point is missing dimension {d.name!r}")
            d.check(point[d.name])
        extra = set(point) - set(self.names)
        if extra:
            raise ValueError(f"point has unknown dimensions {sorted(extra)}")

    def point_from_unit(self, u: np.ndarray) -> dict:
        if len(u) != len(self.dimensions):
            raise ValueError("unit vector length mismatch")
        return {d.name: d.from_unit(float(x)) for d, x in zip(self.dimensions, u)}

    def sample(self, rng: np.random.Generator) -> dict:
        return self.point_from_unit(rng.random(len(self.dimensions)))

    def latin_hypercube(self, n: int, rng: np.random.Generator) -> list[dict]:
        """n points stratifying every dimension into n equal slices."""
        if n < 1:
            raise ValueError("n must be >= 1")
        u = np.empty((n, len(self.dimensions)))
        for col in range(len(self.dimensions)):
            u[:, col] = (rng.permutation(n) + rng.random(n)) / n
        return [self.point_from_unit(row) for row in u]

    def embed(self, point: dict) -> np.ndarray:
        out: list[float] = []
        for d in self.dimensions:
            out.extend(d.embed(point[d.name]))
        return np.asarray(out)

    def embed_width(self) -> int:
        return sum(d.embed_width() for d in self.dimensions)
