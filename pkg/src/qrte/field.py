"""Configuration, source description and per-site lattice fields."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError

EXACT = "exact"
SAMPLED = "sampled"


@dataclass(frozen=True)
class SourceSpec:
    """Piecewise-constant source on ``[0, 1]``, the same for both directions.

    ``segments`` is a sequence of ``(x_lo, x_hi, value)``; a point belongs to a
    segment when ``x_lo < x < x_hi``.
    """

    segments: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        segs = tuple(sorted((float(a), float(b), float(v)) for a, b, v in self.segments))
        object.__setattr__(self, "segments", segs)
        for lo, hi, _ in segs:
            if not (0.0 <= lo < hi <= 1.0):
                raise ConfigError(f"source segment ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1")
        for (_, hi, _), (lo, _, _) in zip(segs, segs[1:]):
            if lo < hi:
                raise ConfigError(f"source segments overlap near x={lo}")

    @classmethod
    def parse(cls, text: str) -> "SourceSpec":
        """Parse ``"lo:hi:val[,lo:hi:val...]"``; an empty string means no source."""
        segs = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            try:
                lo, hi, val = (float(v) for v in part.split(":"))
            except ValueError as exc:
                raise ConfigError(f"bad source segment {part!r}, expected lo:hi:val") from exc
            segs.append((lo, hi, val))
        return cls(tuple(segs))

    def format(self) -> str:
        return ",".join(f"{lo!r}:{hi!r}:{v!r}" for lo, hi, v in self.segments)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for lo, hi, val in self.segments:
            out[(x > lo) & (x < hi)] = val
        return out


def reference_source() -> SourceSpec:
    """Unit source on the middle half of the slab, zero elsewhere."""
    return SourceSpec(((0.25, 0.75, 1.0),))


@dataclass(frozen=True)
class RteConfig:
    """Physical and discretisation parameters for a 1-D two-direction run.

    ``dt`` defaults to ``1 / (c * mu * 2**n)`` so that the ``2**n`` cells of
    width ``dx = c * mu * dt`` tile ``[0, 1]``.
    """

    kappa: float = 2.5
    sigma: float = 0.5
    mu: float = 1.0
    c: float = 1.0
    n: int = 5
    dt: float | None = None
    source: SourceSpec = field(default_factory=reference_source)
    steps: int = 64
    mode: str = EXACT
    shots: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", 1.0 / (self.c * self.mu * 2**self.n))
        self.validate()

    def validate(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n}")
        for name in ("mu", "c", "dt"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v}")
        for name in ("kappa", "sigma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be non-negative and finite, got {v}")
        if self.steps < 0:
            raise ConfigError(f"steps must be >= 0, got {self.steps}")
        if self.mode not in (EXACT, SAMPLED):
            raise ConfigError(f"mode must be {EXACT!r} or {SAMPLED!r}, got {self.mode!r}")
        if self.shots <= 0:
            raise ConfigError(f"shots must be positive, got {self.shots}")

    @property
    def M(self) -> int:
        return 2**self.n

    @property
    def dx(self) -> float:
        return self.c * self.mu * self.dt

    @property
    def x(self) -> np.ndarray:
        """Cell centres ``(i + 1/2) * dx``."""
        return (np.arange(self.M) + 0.5) * self.dx

    @property
    def t_final(self) -> float:
        return self.steps * self.dt

    def with_(self, **changes) -> "RteConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["source"] = self.source.format()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RteConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if isinstance(d.get("source"), str):
            d["source"] = SourceSpec.parse(d["source"])
        return cls(**d)


@dataclass
class LatticeField:
    """Intensities and sources on ``M`` lattice sites."""

    I_plus: np.ndarray
    I_minus: np.ndarray
    S_plus: np.ndarray
    S_minus: np.ndarray

    def __post_init__(self):
        for name in ("I_plus", "I_minus", "S_plus", "S_minus"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        m = self.I_plus.shape
        if len(m) != 1 or any(
            getattr(self, k).shape != m for k in ("I_minus", "S_plus", "S_minus")
        ):
            raise ConfigError("all field arrays must be 1-D with the same length")
        if m[0] & (m[0] - 1) or m[0] == 0:
            raise ConfigError(f"lattice size must be a power of two, got {m[0]}")

    @property
    def M(self) -> int:
        return self.I_plus.shape[0]

    @classmethod
    def zeros(cls, M: int) -> "LatticeField":
        z = np.zeros(M)
        return cls(z, z.copy(), z.copy(), z.copy())

    @classmethod
    def initial(cls, config: RteConfig, I_plus=None, I_minus=None) -> "LatticeField":
        """Discretised source plus the given (default zero) intensities."""
        S_plus, S_minus = discretize_source(config.source, config.n, config.dx)
        zero = np.zeros(config.M)
        return cls(
            zero if I_plus is None else I_plus,
            zero.copy() if I_minus is None else I_minus,
            S_plus,
            S_minus,
        )

    def phi(self, dt: float) -> np.ndarray:
        """Stacked vector ``(I+, I-, dt*S+/2, dt*S-/2)``."""
        return np.concatenate(
            [self.I_plus, self.I_minus, 0.5 * dt * self.S_plus, 0.5 * dt * self.S_minus]
        )

    @property
    def total_intensity(self) -> float:
        return float(self.I_plus.sum() + self.I_minus.sum())

    def copy(self) -> "LatticeField":
        return LatticeField(
            self.I_plus.copy(), self.I_minus.copy(), self.S_plus.copy(), self.S_minus.copy()
        )


def discretize_source(spec: SourceSpec, n: int, dx: float) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``spec`` at the cell centres ``(i + 1/2) * dx`` of ``2**n`` sites."""
    x = (np.arange(2**n) + 0.5) * dx
    s = spec(x)
    return s, s.copy()


def rms(a: Sequence[float], b: Sequence[float]) -> float:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.sqrt(np.mean(d * d)))


def field_rms(a: LatticeField, b: LatticeField) -> float:
    """RMS intensity difference over both directions and every site."""
    return rms(np.concatenate([a.I_plus, a.I_minus]), np.concatenate([b.I_plus, b.I_minus]))
