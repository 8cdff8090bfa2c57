"""Symmetric jump kernels with two-sided ellipticity.

Three families share one descriptor: the pure power kernel ("fractional"),
translation-invariant kernels given by a radial profile K(|z|), and general
symmetric kernels given by a pair callable k(x, y).  The optional
one-minus-s normalization multiplies the kernel by (1 - s); it keeps the
operator meaningful as s -> 1 and is what the robustness sweeps use.

Kernel values are absolute (not relative to the power envelope); ellipticity
is checked as k(x,y) * |x-y|^(n+2s) / norm_factor against [1/lam, lam].
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigParseError, DiagonalEvaluation

FAMILIES = ("fractional", "translation-invariant", "general")


@dataclass(frozen=True)
class Kernel:
    n: int
    s: float
    lam: float = 1.0
    family: str = "fractional"
    normalization: str = "plain"
    profile: Callable | None = None  # |z| -> K(|z|), translation-invariant family
    pair_fn: Callable | None = None  # (x, y) -> k(x, y), general family
    scale: float = 1.0  # extra positive factor, for scaling tests

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ConfigParseError(f"s must lie in (0, 1), got {self.s}")
        if self.lam < 1.0:
            raise ConfigParseError(f"lam must be >= 1, got {self.lam}")
        if self.family not in FAMILIES:
            raise ConfigParseError(f"unknown kernel family {self.family!r}")
        if self.normalization not in ("plain", "one-minus-s"):
            raise ConfigParseError(f"unknown normalization {self.normalization!r}")
        if self.family == "translation-invariant" and self.profile is None:
            raise ConfigParseError("translation-invariant family needs a profile")
        if self.family == "general" and self.pair_fn is None:
            raise ConfigParseError("general family needs a pair callable")
        if not self.scale > 0:
            raise ConfigParseError(f"scale must be positive, got {self.scale}")

    @property
    def norm_factor(self) -> float:
        return 1.0 - self.s if self.normalization == "one-minus-s" else 1.0

    @property
    def translation_invariant(self) -> bool:
        return self.family in ("fractional", "translation-invariant")

    @property
    def power(self) -> float:
        """Exponent of the envelope |x - y|^(-power)."""
        return self.n + 2.0 * self.s

    def upper_envelope(self) -> float:
        """Constant A with k(x,y) <= A * |x-y|^(-n-2s), from ellipticity."""
        return self.lam * self.norm_factor * self.scale

    def eval_at_distance(self, d):
        """Kernel value at separation |x - y| = d (radial families only)."""
        d = np.asarray(d, dtype=float)
        if np.any(d <= 0):
            raise DiagonalEvaluation("kernel evaluated at zero separation")
        pref = self.norm_factor * self.scale
        if self.family == "fractional":
            return pref * d ** (-self.power)
        if self.family == "translation-invariant":
            return pref * self.profile(d)
        raise DiagonalEvaluation("general kernels are not radial; use eval_kernel")

    def eval_pairs(self, x, y):
        """Vectorized k(x, y) for coordinate arrays (n = 1)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = np.abs(x - y)
        if np.any(d == 0):
            raise DiagonalEvaluation("kernel evaluated on the diagonal x = y")
        if self.family == "general":
            return self.norm_factor * self.scale * self.pair_fn(x, y)
        return self.eval_at_distance(d)

    def with_scale(self, c: float) -> "Kernel":
        """The kernel c * k; used by scaling-invariance checks."""
        return replace(self, scale=self.scale * float(c))

    def tag(self) -> str:
        norm = "" if self.normalization == "plain" else ",1-s"
        return f"{self.family}(s={self.s:g},lam={self.lam:g}{norm})"


def eval_kernel(kernel: Kernel, x, y):
    """k(x, y) for points x != y (arrays of shape (n,) or scalars for n=1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    d = float(np.linalg.norm(x - y))
    if d == 0.0:
        raise DiagonalEvaluation("kernel evaluated on the diagonal x = y")
    if kernel.family == "general":
        if kernel.n != 1:
            raise ConfigParseError("general pair kernels implemented for n = 1")
        return float(kernel.norm_factor * kernel.scale * kernel.pair_fn(float(x[0]), float(y[0])))
    return float(kernel.eval_at_distance(d))


@dataclass(frozen=True)
class EllipticityReport:
    min_ratio: float
    max_ratio: float
    passed: bool
    lam: float
    samples: int


def check_ellipticity(kernel: Kernel, pairs) -> EllipticityReport:
    """Ratios k(x,y)|x-y|^(n+2s)/norm_factor over sample pairs vs [1/lam, lam].

    pairs: iterable of (x, y) points with x != y.
    """
    ratios = []
    for x, y in pairs:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        d = float(np.linalg.norm(x - y))
        ratios.append(eval_kernel(kernel, x, y) * d ** kernel.power / kernel.norm_factor)
    ratios = np.asarray(ratios)
    lo, hi = float(ratios.min()), float(ratios.max())
    tol = 1e-12
    passed = (lo >= 1.0 / kernel.lam - tol) and (hi <= kernel.lam + tol)
    return EllipticityReport(min_ratio=lo, max_ratio=hi, passed=passed, lam=kernel.lam, samples=len(ratios))


def fractional_kernel(n: int, s: float, lam: float = 1.0, one_minus_s: bool = False) -> Kernel:
    """|x-y|^(-n-2s), exactly; lam only widens the declared envelope."""
    return Kernel(n=int(n), s=float(s), lam=float(lam), family="fractional",
                  normalization="one-minus-s" if one_minus_s else "plain")


def ti_demo_kernel(s: float, lam: float = 1.5, one_minus_s: bool = False) -> Kernel:
    """Oscillating translation-invariant demo: (1 + z^2/(2(1+z^2))) |z|^(-1-2s)."""
    power = 1.0 + 2.0 * float(s)

    def profile(d):
        d = np.asarray(d, dtype=float)
        return (1.0 + 0.5 * d * d / (1.0 + d * d)) * d ** (-power)

    return Kernel(n=1, s=float(s), lam=float(lam), family="translation-invariant",
                  normalization="one-minus-s" if one_minus_s else "plain", profile=profile)


def general_demo_kernel(s: float, lam: float = 1.5, one_minus_s: bool = False) -> Kernel:
    """Anisotropic symmetric demo: (1 + sin(x+y)^2 / 2) |x-y|^(-1-2s)."""
    power = 1.0 + 2.0 * float(s)

    def pair(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (1.0 + 0.5 * np.sin(x + y) ** 2) * np.abs(x - y) ** (-power)

    return Kernel(n=1, s=float(s), lam=float(lam), family="general",
                  normalization="one-minus-s" if one_minus_s else "plain", pair_fn=pair)


def make_kernel(family: str, n: int, s: float, lam: float | None = None,
                one_minus_s: bool = False) -> Kernel:
    """Factory behind the CLI flags --kernel {frac|ti|general}."""
    if family in ("frac", "fractional"):
        return fractional_kernel(n, s, lam if lam is not None else 1.0, one_minus_s)
    if family == "ti":
        if n != 1:
            raise ConfigParseError("ti demo kernel is 1d")
        return ti_demo_kernel(s, lam if lam is not None else 1.5, one_minus_s)
    if family == "general":
        if n != 1:
            raise ConfigParseError("general demo kernel is 1d")
        return general_demo_kernel(s, lam if lam is not None else 1.5, one_minus_s)
    raise ConfigParseError(f"unknown kernel family {family!r}")
