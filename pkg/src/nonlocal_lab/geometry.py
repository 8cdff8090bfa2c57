"""Balls, two-ball disconnected configurations, and 1d cell meshes.

Points are numpy arrays of shape (n,); n = 1 throughout the solver stack,
but configurations validate in any dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigParseError,
    ContainmentViolation,
    SeparationViolation,
    UnsupportedDimension,
)

CONFIG_KEYS = ("n", "x1", "x2", "r", "R", "N")


def _point(x, n: int) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.shape != (n,):
        raise ConfigParseError(f"point {x!r} does not have dimension {n}")
    return p


@dataclass(frozen=True)
class Ball:
    """Open ball; an open interval when n = 1."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ConfigParseError(f"ball radius must be positive, got {self.radius}")

    def contains(self, x) -> bool:
        return bool(np.linalg.norm(np.atleast_1d(x) - self.center) < self.radius)


@dataclass(frozen=True)
class DisconnectedConfig:
    """Two reference balls B_r(x1), B_r(x2) inside B_{R/2}(0).

    Validation enforces 4r <= |x1 - x2| <= 8r and containment of both
    2r-balls in B_{R/2}(0), which makes the 2r-balls disjoint.  A config
    built with unsafe=True skips both checks but is stamped `checked=False`
    and every report downstream carries the stamp.
    """

    n: int
    x1: np.ndarray
    x2: np.ndarray
    r: float
    R: float
    checked: bool = field(default=True)

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "x1", _point(self.x1, self.n))
        object.__setattr__(self, "x2", _point(self.x2, self.n))

    @property
    def separation(self) -> float:
        return float(np.linalg.norm(self.x1 - self.x2))

    def ball1(self, scale: float = 1.0) -> Ball:
        return Ball(self.x1, scale * self.r)

    def ball2(self, scale: float = 1.0) -> Ball:
        return Ball(self.x2, scale * self.r)

    def as_dict(self) -> dict:
        d = {
            "n": self.n,
            "x1": self.x1.tolist() if self.n > 1 else float(self.x1[0]),
            "x2": self.x2.tolist() if self.n > 1 else float(self.x2[0]),
            "r": self.r,
            "R": self.R,
        }
        if not self.checked:
            d["unsafe"] = True
        return d


def make_disconnected_config(n, x1, x2, r, R, unsafe: bool = False) -> DisconnectedConfig:
    """Validate and build a two-ball configuration.

    Raises SeparationViolation if |x1 - x2| is outside [4r, 8r] and
    ContainmentViolation if either B_{2r}(x_i) is not inside B_{R/2}(0).
    Both inequalities are non-strict.  unsafe=True skips the checks and
    stamps the config.
    """
    n = int(n)
    r = float(r)
    R = float(R)
    if not r > 0:
        raise ConfigParseError(f"r must be positive, got {r}")
    if not R > 0:
        raise ConfigParseError(f"R must be positive, got {R}")
    cfg = DisconnectedConfig(n=n, x1=x1, x2=x2, r=r, R=R, checked=not unsafe)
    if unsafe:
        return cfg
    d = cfg.separation
    tol = 1e-12 * max(r, 1.0)
    if not (4.0 * r - tol <= d <= 8.0 * r + tol):
        raise SeparationViolation(
            f"|x1 - x2| = {d:g} outside [4r, 8r] = [{4 * r:g}, {8 * r:g}]"
        )
    for x in (cfg.x1, cfg.x2):
        if np.linalg.norm(x) + 2.0 * r > R / 2.0 + tol:
            raise ContainmentViolation(
                f"B_2r({np.array2string(x)}) not contained in B_R/2(0) with R = {R:g}"
            )
    return cfg


@dataclass(frozen=True)
class Mesh1D:
    """Uniform cell partitions of a union of disjoint open intervals.

    centers/widths/lo/hi are flat arrays over all cells, interval by
    interval in ascending order; `interval_of` maps a cell index to its
    interval index.
    """

    intervals: tuple
    centers: np.ndarray
    widths: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    interval_of: np.ndarray

    @property
    def ncells(self) -> int:
        return self.centers.size

    def cells_in(self, ball: Ball) -> np.ndarray:
        """Indices of cells whose center lies in the (open) ball."""
        return np.nonzero(np.abs(self.centers - ball.center[0]) < ball.radius)[0]


def mesh_intervals(intervals, N: int) -> Mesh1D:
    """Tile each open interval (a, b) with N uniform cells."""
    N = int(N)
    if N < 4:
        raise ConfigParseError(f"N must be at least 4, got {N}")
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    for (a, b) in ivs:
        if not b > a:
            raise ConfigParseError(f"degenerate interval ({a}, {b})")
    for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
        if a1 < b0:
            raise ConfigParseError(f"overlapping intervals ({a0},{b0}) and ({a1},{b1})")
    lo, hi, owner = [], [], []
    for k, (a, b) in enumerate(ivs):
        edges = np.linspace(a, b, N + 1)
        lo.append(edges[:-1])
        hi.append(edges[1:])
        owner.append(np.full(N, k))
    lo = np.concatenate(lo)
    hi = np.concatenate(hi)
    return Mesh1D(
        intervals=tuple(ivs),
        centers=0.5 * (lo + hi),
        widths=hi - lo,
        lo=lo,
        hi=hi,
        interval_of=np.concatenate(owner),
    )


def mesh_over(config: DisconnectedConfig, N: int) -> Mesh1D:
    """Mesh over B_2r(x1) u B_2r(x2) with N uniform cells per interval."""
    if config.n != 1:
        raise UnsupportedDimension(f"meshing implemented for n = 1, got n = {config.n}")
    a1, a2 = float(config.x1[0]), float(config.x2[0])
    r2 = 2.0 * config.r
    return mesh_intervals([(a1 - r2, a1 + r2), (a2 - r2, a2 + r2)], N)


def config_to_text(config: DisconnectedConfig, N: int | None = None) -> str:
    """Serialize to the flat key=value format (keys n, x1, x2, r, R, N)."""
    lines = [f"n = {config.n}"]
    for key, val in (("x1", config.x1), ("x2", config.x2)):
        flat = ",".join(repr(float(v)) for v in val)
        lines.append(f"{key} = {flat}")
    lines.append(f"r = {config.r!r}")
    lines.append(f"R = {config.R!r}")
    if N is not None:
        lines.append(f"N = {int(N)}")
    if not config.checked:
        lines.append("unsafe = true")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> tuple[DisconnectedConfig, int | None]:
    """Parse the flat key=value format; returns (config, N or None)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    missing = [k for k in ("n", "x1", "x2", "r", "R") if k not in values]
    if missing:
        raise ConfigParseError(f"missing keys: {', '.join(missing)}")
    try:
        n = int(values["n"])
        x1 = [float(v) for v in values["x1"].split(",")]
        x2 = [float(v) for v in values["x2"].split(",")]
        r = float(values["r"])
        R = float(values["R"])
        N = int(values["N"]) if "N" in values else None
    except ValueError as exc:
        raise ConfigParseError(str(exc)) from exc
    unsafe = values.get("unsafe", "false").lower() in ("true", "1", "yes")
    cfg = make_disconnected_config(n, x1, x2, r, R, unsafe=unsafe)
    return cfg, N
