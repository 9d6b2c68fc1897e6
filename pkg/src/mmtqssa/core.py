"""Domain types, configuration and seeding for the Michaelis-Menten system.

Reaction network (hard-coded)::

    S + E  <-> C   (binding k1, unbinding km1)
        C  ->  P + E   (product formation k2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class RateConstants:
    """n-free rate constants of the three reactions."""

    k1: float
    km1: float
    k2: float

    def __post_init__(self):
        for name in ("k1", "km1", "k2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"rate constant {name} must be positive, got {v!r}")

    @property
    def michaelis(self) -> float:
        """Michaelis constant (km1 + k2) / k1."""
        return (self.km1 + self.k2) / self.k1


@dataclass(frozen=True)
class ScalingRegime:
    alpha_s: float
    alpha_e: float
    alpha_c: float
    alpha_p: float
    beta_1: float
    beta_m1: float
    beta_2: float
    gamma: float

    @property
    def alphas(self) -> np.ndarray:
        return np.array([self.alpha_s, self.alpha_e, self.alpha_c, self.alpha_p])

    def species_scales(self, n: int) -> np.ndarray:
        """n**alpha for (S, E, C, P)."""
        return float(n) ** self.alphas

    def rate_multipliers(self, n: int) -> tuple[float, float, float]:
        """Factors turning (k1, km1, k2) into copy-number propensity
        coefficients on the rescaled clock n**gamma * t."""
        n = float(n)
        return (
            n ** (self.beta_1 + self.gamma),
            n ** (self.beta_m1 + self.gamma),
            n ** (self.beta_2 + self.gamma),
        )


TQSSA = ScalingRegime(1, 1, 1, 1, 0, 1, 0, 0)
SQSSA = ScalingRegime(1, 0, 0, 1, 0, 1, 1, 0)
REGIMES = {"tqssa": TQSSA, "sqssa": SQSSA}


@dataclass(frozen=True)
class CopyState:
    xs: int
    xe: int
    xc: int
    xp: int

    def __post_init__(self):
        for name in ("xs", "xe", "xc", "xp"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"copy number {name} must be a non-negative integer, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.xs, self.xe, self.xc, self.xp], dtype=np.int64)


@dataclass(frozen=True)
class ScaledState:
    zs: float
    ze: float
    zc: float
    zp: float

    def __post_init__(self):
        for name in ("zs", "ze", "zc", "zp"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"scaled component {name} must be finite and >= 0, got {v!r}")

    @property
    def zv(self) -> float:
        return self.zs + self.zc

    def as_array(self) -> np.ndarray:
        return np.array([self.zs, self.ze, self.zc, self.zp], dtype=float)


@dataclass(frozen=True)
class ConservedQuantities:
    k1_tot: float
    k2_tot: float


def _floor_count(v: float) -> int:
    # values like 0.29 * 100 = 28.999999999999996 are meant to be exact
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1.0, abs(v)):
        return int(r)
    return math.floor(v)


def initial_copy_state(z0: ScaledState, n: int, regime: ScalingRegime = TQSSA) -> CopyState:
    """Copy numbers floor(n**alpha * z0) that start the simulation."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = z0.as_array()
    if np.any(z < 0):
        raise ValueError("initial scaled state has negative components")
    counts = [_floor_count(v) for v in z * regime.species_scales(n)]
    return CopyState(*counts)


def to_scaled(x: CopyState, n: int, regime: ScalingRegime = TQSSA) -> ScaledState:
    return ScaledState(*(x.as_array() / regime.species_scales(n)))


def conserved_counts(x: CopyState) -> tuple[int, int]:
    """Integer invariants (xs + xc + xp, xe + xc)."""
    return x.xs + x.xc + x.xp, x.xe + x.xc


def conserved(z: ScaledState | CopyState, n: int = 1, regime: ScalingRegime = TQSSA) -> ConservedQuantities:
    """Conserved totals K1 = zs + zc + zp and K2 = ze + zc in scaled units.

    Copy states are first rescaled with ``n`` and ``regime``.  The scaled
    totals are only invariant when the species share one abundance exponent,
    which is the case for the tQSSA regime.
    """
    if isinstance(z, CopyState):
        z = to_scaled(z, n, regime)
    return ConservedQuantities(z.zs + z.zc + z.zp, z.ze + z.zc)


def derive_seed(master_seed: int, replica_index: int) -> int:
    """Deterministic 64-bit seed for one replica."""
    if replica_index < 0:
        raise ValueError("replica_index must be >= 0")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(replica_index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.SFC64(seed))


def zv_from_counts(counts: np.ndarray, scales: np.ndarray) -> np.ndarray:
    """Scaled S + C.  With a shared scale the integer sum is divided once,
    so the value does not depend on how the total splits between S and C."""
    counts = np.asarray(counts)
    if scales[0] == scales[2]:
        return (counts[..., 0] + counts[..., 2]) / scales[0]
    return counts[..., 0] / scales[0] + counts[..., 2] / scales[2]


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-constant sample path, one record per jump.

    ``counts[i]`` holds on ``[times[i], times[i+1])``; the last record holds
    until ``t_end``.
    """

    times: np.ndarray
    counts: np.ndarray
    n: int
    seed: int
    t_end: float
    regime: ScalingRegime = TQSSA

    def __len__(self):
        return len(self.times)

    @property
    def scaled(self) -> np.ndarray:
        return self.counts / self.regime.species_scales(self.n)

    @property
    def zc(self) -> np.ndarray:
        return self.scaled[:, 2]

    @property
    def zv(self) -> np.ndarray:
        return zv_from_counts(self.counts, self.regime.species_scales(self.n))

    def state(self, i: int) -> ScaledState:
        return ScaledState(*self.scaled[i])

    def copy_state(self, i: int) -> CopyState:
        return CopyState(*(int(v) for v in self.counts[i]))

    def zv_at(self, grid) -> np.ndarray:
        grid = np.asarray(grid, dtype=float)
        if grid.size and (grid.max() > self.t_end or grid.min() < 0):
            raise ValueError("grid point outside [0, t_end]")
        return self.zv[np.searchsorted(self.times, grid, side="right") - 1]


@dataclass
class ExperimentConfig:
    rates: RateConstants = field(default_factory=lambda: RateConstants(1.0, 1.0, 0.75))
    regime: ScalingRegime = TQSSA
    n: int = 1000
    z0: ScaledState = field(default_factory=lambda: ScaledState(1.0, 0.1, 0.0, 0.0))
    t_end: float = 10.0
    replicas: int = 100
    master_seed: int = 42
    grid_points: int = 1001
    k2_tilde: float = 0.0
    sde_dt: float = 1e-3
    max_jumps: int = 10**9
    threads: int = 0

    def __post_init__(self):
        if not self.t_end > 0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.grid_points < 2:
            raise ConfigError("grid_points must be >= 2")
        if not self.sde_dt > 0:
            raise ConfigError("sde_dt must be positive")
        initial_copy_state(self.z0, self.n, self.regime)

    @property
    def x0(self) -> CopyState:
        return initial_copy_state(self.z0, self.n, self.regime)

    @property
    def k1_tot(self) -> float:
        return self.z0.zs + self.z0.zc + self.z0.zp

    @property
    def k2_tot(self) -> float:
        return self.z0.ze + self.z0.zc

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.grid_points)

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def fig1_config(**overrides) -> ExperimentConfig:
    """Reference tQSSA comparison setup: k=(1, 1, 0.75),
    K1 = 1 (all substrate unbound), K2 = 0.1, n = 1000."""
    return ExperimentConfig(**overrides)


# flat config file keys -> how they land in ExperimentConfig
_RATE_KEYS = ("k1", "km1", "k2")
_Z0_KEYS = ("zs0", "ze0", "zc0", "zp0")
_EXPONENT_KEYS = tuple(f.name for f in fields(ScalingRegime))
_SCALAR_KEYS = {
    "n": int,
    "t_end": float,
    "replicas": int,
    "master_seed": int,
    "grid_points": int,
    "k2_tilde": float,
    "sde_dt": float,
    "max_jumps": int,
    "threads": int,
}
CONFIG_KEYS = frozenset(("regime",) + _RATE_KEYS + _Z0_KEYS + _EXPONENT_KEYS + tuple(_SCALAR_KEYS))


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        out[key] = value
    return out


def build_config(values: dict[str, object], base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Apply flat key/value overrides to ``base`` (defaults: the fig1 reference setup)."""
    base = base or ExperimentConfig()
    unknown = set(values) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r}")

    def num(key, cast=float):
        try:
            return cast(values[key])
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key!r}: {values[key]!r}") from None

    try:
        rates = base.rates
        if any(k in values for k in _RATE_KEYS):
            rates = RateConstants(*(num(k) if k in values else getattr(rates, k) for k in _RATE_KEYS))

        regime = base.regime
        if "regime" in values:
            name = str(values["regime"]).lower()
            if name not in REGIMES:
                raise ConfigError(f"unknown regime {values['regime']!r} (expected one of {sorted(REGIMES)})")
            regime = REGIMES[name]
        if any(k in values for k in _EXPONENT_KEYS):
            regime = replace(regime, **{k: num(k) for k in _EXPONENT_KEYS if k in values})

        z0 = base.z0
        if any(k in values for k in _Z0_KEYS):
            cur = z0.as_array()
            z0 = ScaledState(*(num(k) if k in values else cur[i] for i, k in enumerate(_Z0_KEYS)))

        scalars = {k: num(k, cast) for k, cast in _SCALAR_KEYS.items() if k in values}
        return replace(base, rates=rates, regime=regime, z0=z0, **scalars)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path, overrides: dict[str, object] | None = None) -> ExperimentConfig:
    path = Path(path)
    values: dict[str, object] = dict(parse_config_text(path.read_text(), str(path)))
    values.update(overrides or {})
    return build_config(values)


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = [f"k1 = {cfg.rates.k1!r}", f"km1 = {cfg.rates.km1!r}", f"k2 = {cfg.rates.k2!r}"]
    lines += [f"{k} = {getattr(cfg.regime, k)!r}" for k in _EXPONENT_KEYS]
    lines += [f"{k} = {v!r}" for k, v in zip(_Z0_KEYS, cfg.z0.as_array().tolist())]
    lines += [f"{k} = {getattr(cfg, k)!r}" for k in _SCALAR_KEYS]
    return "\n".join(lines) + "\n"
