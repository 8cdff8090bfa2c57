"""Experiment harness around the two-ball solver.

Each experiment solves the Dirichlet problem for a family of exterior
data on the disconnected domain, measures sup / inf / average over the
reference balls together with the tail of the negative part, and records
the empirical constant tying them.  Everything is seeded and the sample
order is fixed, so reports are reproducible bit for bit; the optional
thread pool (NONLOCAL_LAB_THREADS) only spreads the solves, never the
sampling.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigParseError, EmptySample, NoPositiveC0
from .geometry import Ball, DisconnectedConfig, mesh_intervals, mesh_over
from .kernel import Kernel, make_kernel
from .operator import (
    PointFunction,
    barrier_w1,
    barrier_w2,
    eval_L,
    piecewise_constant,
    tail,
)
from .solver1d import GridFunction, assemble, solve

DEFAULT_SAMPLES = 20
DEFAULT_MASSES = (1.0, 10.0, 100.0, 1000.0)
SUBCELLS_PER_GAP = 8  # resolution of the random piecewise data
C0_GRID = np.geomspace(1e-4, 10.0, 81)


@dataclass(frozen=True)
class HarnackReport:
    """One solved sample, reduced to the quantities the inequality ties.

    sup and avg run over cell centers in B_r(x2), inf over B_r(x1);
    tail_term is (r/R)^(2s) times the tail of the negative part at the
    origin with cutoff R.  C_estimate is sup / (inf + tail_term), or the
    string "trivial" when that denominator vanishes.
    """

    config: DisconnectedConfig
    s: float
    kernel: str
    sup: float
    inf: float
    avg: float
    tail_term: float
    C_estimate: float | str
    seed: int
    N: int
    sample_id: int = 0

    def as_dict(self) -> dict:
        return {
            "config": {
                "n": self.config.n,
                "x1": float(self.config.x1[0]),
                "x2": float(self.config.x2[0]),
                "r": self.config.r,
                "R": self.config.R,
                "checked": self.config.checked,
            },
            "s": self.s,
            "kernel": self.kernel,
            "sup": self.sup,
            "inf": self.inf,
            "avg": self.avg,
            "tail_term": self.tail_term,
            "C_estimate": self.C_estimate,
            "seed": self.seed,
            "N": self.N,
            "sample_id": self.sample_id,
        }

    def csv_row(self) -> list:
        return [self.s, self.sample_id, self.sup, self.inf, self.avg,
                self.tail_term, self.C_estimate]


CSV_COLUMNS = ("s", "sample_id", "sup", "inf", "avg", "tail", "C_estimate")


def _thread_count() -> int:
    raw = os.environ.get("NONLOCAL_LAB_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    # sample order is the determinism contract; ex.map preserves it
    items = list(items)
    k = min(_thread_count(), len(items))
    if k <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def _ball_values(u: GridFunction, ball: Ball) -> np.ndarray:
    idx = u.mesh.cells_in(ball)
    if idx.size == 0:
        raise EmptySample(
            f"no cell centers in ball at {float(ball.center[0]):g} "
            f"radius {ball.radius:g}")
    return u.values[idx]


def _tail_of_negative(u: GridFunction, config: DisconnectedConfig,
                      s: float) -> float:
    pf = u.as_point_function().negative_part()
    t = tail(pf, 0.0, config.R, s)
    return (config.r / config.R) ** (2.0 * s) * t.value


def harnack_report(u: GridFunction, config: DisconnectedConfig, s: float,
                   kernel_tag: str = "", seed: int = 0,
                   N: int | None = None, sample_id: int = 0) -> HarnackReport:
    """Reduce one solved sample to a HarnackReport."""
    v2 = _ball_values(u, config.ball2())
    v1 = _ball_values(u, config.ball1())
    sup = float(v2.max())
    avg = float(v2.mean())
    inf_ = float(v1.min())
    tail_term = _tail_of_negative(u, config, s)
    den = inf_ + tail_term
    c_est = sup / den if den > 0.0 else "trivial"
    return HarnackReport(config=config, s=float(s), kernel=kernel_tag,
                         sup=sup, inf=inf_, avg=avg, tail_term=tail_term,
                         C_estimate=c_est, seed=seed,
                         N=u.mesh.ncells if N is None else int(N),
                         sample_id=sample_id)


# -- data families ------------------------------------------------------------

def _data_gaps(config: DisconnectedConfig):
    """Components of B_R minus the solved domain, left to right."""
    x_lo, x_hi = sorted((float(config.x1[0]), float(config.x2[0])))
    r, R = config.r, config.R
    gaps = [(-R, x_lo - 2.0 * r), (x_lo + 2.0 * r, x_hi - 2.0 * r),
            (x_hi + 2.0 * r, R)]
    return [(a, b) for a, b in gaps if b - a > 1e-12 * R]


def random_nonneg_data(config: DisconnectedConfig, rng,
                       label: str = "rand") -> PointFunction:
    """Cellwise-constant uniform [0,1] values on B_R minus the domain."""
    pieces = []
    for a, b in _data_gaps(config):
        edges = np.linspace(a, b, SUBCELLS_PER_GAP + 1)
        vals = rng.uniform(0.0, 1.0, SUBCELLS_PER_GAP)
        pieces.extend(zip(edges[:-1], edges[1:], vals))
    return piecewise_constant(pieces, label=label)


def mass_near_x2_data(config: DisconnectedConfig, mass: float,
                      label: str | None = None) -> PointFunction:
    """Unit baseline on B_R minus the domain plus mass on (x2+2r, x2+3r).

    The baseline keeps inf over B_r(x1) at order one independently of the
    mass, so the ratio genuinely tests how much of the concentrated datum
    leaks across the gap; a pure multiple of one indicator would leave the
    ratio exactly unchanged by linearity.
    """
    x_hi = max(float(config.x1[0]), float(config.x2[0]))
    r, R = config.r, config.R
    w_lo, w_hi = x_hi + 2.0 * r, x_hi + 3.0 * r
    pieces = []
    for a, b in _data_gaps(config):
        cuts = sorted({a, b, min(max(w_lo, a), b), min(max(w_hi, a), b)})
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi <= lo:
                continue
            v = 1.0 + (mass if (lo >= w_lo and hi <= w_hi) else 0.0)
            pieces.append((lo, hi, v))
    if w_hi > R:  # window sticking out past B_R carries no baseline
        pieces.append((max(w_lo, R), w_hi, float(mass)))
    return piecewise_constant(pieces, label=label or f"mass{mass:g}")


def far_negative_data(config: DisconnectedConfig, rng=None,
                      magnitude: float = 1.0,
                      label: str = "farneg") -> PointFunction:
    """Random nonnegative inside B_R, constant -magnitude beyond it."""
    pieces = []
    if rng is not None:
        pieces = list(random_nonneg_data(config, rng).pieces)
    return piecewise_constant(pieces, far_value=-float(magnitude),
                              far_radius=config.R, label=label)


def disconnected_harnack_experiment(s: float, kernel: Kernel,
                                    config: DisconnectedConfig,
                                    data_family: str, seed: int = 0,
                                    N: int = 256,
                                    samples: int = DEFAULT_SAMPLES,
                                    masses=DEFAULT_MASSES,
                                    ) -> list[HarnackReport]:
    """Solve one data family and report each sample.

    Families: random-nonneg (seeded cellwise uniform on B_R minus the
    domain), mass-near-x2 (saturation scan over `masses`), far-negative
    (random inside, -1 beyond B_R).  All samples are drawn up front from
    one generator, so the reports do not depend on the thread count.
    """
    rng = np.random.default_rng(seed)
    if data_family == "random-nonneg":
        data = [random_nonneg_data(config, rng, label=f"rand{i}")
                for i in range(samples)]
    elif data_family == "mass-near-x2":
        data = [mass_near_x2_data(config, m) for m in masses]
    elif data_family == "far-negative":
        data = [far_negative_data(config, rng, label=f"farneg{i}")
                for i in range(samples)]
    else:
        raise ConfigParseError(f"unknown data family {data_family!r}")
    mesh = mesh_over(config, N)

    def run(item):
        i, g = item
        u = solve(assemble(kernel, mesh, g))
        return harnack_report(u, config, s, kernel_tag=kernel.tag(),
                              seed=seed, N=N, sample_id=i)

    return _map_ordered(run, enumerate(data))


def aggregate_c_max(reports) -> float:
    """Largest finite empirical constant of a report batch."""
    vals = [rep.C_estimate for rep in reports
            if not isinstance(rep.C_estimate, str)]
    if not vals:
        raise EmptySample("every report in the batch is trivial")
    return float(max(vals))


def weak_harnack_check(u: GridFunction, config: DisconnectedConfig,
                       s: float) -> dict:
    """Cell average over B_r(x2) against inf over B_r(x1) plus tail."""
    lhs_avg = float(_ball_values(u, config.ball2()).mean())
    rhs = float(_ball_values(u, config.ball1()).min()) \
        + _tail_of_negative(u, config, s)
    if rhs > 0.0:
        constant, ok = lhs_avg / rhs, True
    else:
        constant, ok = (0.0, True) if lhs_avg <= 0.0 else (np.inf, False)
    return {"lhs_avg": lhs_avg, "rhs": rhs, "constant": constant, "pass": ok}


def localized_mp_check(kernel: Kernel, config: DisconnectedConfig, s: float,
                       far_data: PointFunction, N: int = 256) -> dict:
    """Solve on B_r(x1) alone and bound the dip by the negative tail."""
    x1, r = float(config.x1[0]), config.r
    mesh = mesh_intervals([(x1 - r, x1 + r)], N)
    u = solve(assemble(kernel, mesh, far_data))
    min_u = float(u.values.min())
    tail_term = _tail_of_negative(u, config, s)
    c_emp = -min_u / tail_term if (min_u < 0.0 and tail_term > 0.0) else 0.0
    return {"min_u": min_u, "tail_term": tail_term, "C_empirical": c_emp}


def barrier_combination_check(kernel: Kernel, config: DisconnectedConfig,
                              s: float | None = None, grid: int = 101,
                              c0_grid=None, tol: float = 1e-8) -> dict:
    """Largest c0 on a log grid keeping L(w1 + c0 w2) <= 0 on B_r(x1).

    Both operator profiles are evaluated once per grid point; linearity
    then turns the scan over c0 into a vector comparison.
    """
    if s is not None and abs(float(s) - kernel.s) > 1e-12:
        raise ConfigParseError(
            f"s = {s:g} does not match the kernel order {kernel.s:g}")
    x1, r = float(config.x1[0]), config.r
    xs = np.linspace(x1 - r, x1 + r, int(grid))
    w1 = barrier_w1(config)
    w2 = barrier_w2(config)
    lw1 = np.array([eval_L(kernel, w1, float(x), tol=tol).value for x in xs])
    lw2 = np.array([eval_L(kernel, w2, float(x), tol=tol).value for x in xs])
    c0s = C0_GRID if c0_grid is None else np.asarray(c0_grid, dtype=float)
    feasible = [float(c0) for c0 in c0s if np.max(lw1 + c0 * lw2) <= 0.0]
    if not feasible:
        raise NoPositiveC0(
            f"no c0 in [{c0s.min():g}, {c0s.max():g}] keeps the "
            f"combination a subsolution on the grid")
    c0_max = max(feasible)
    return {"c0_max": c0_max, "grid": xs,
            "v_profile": w1(xs) + c0_max * w2(xs),
            "Lw1": lw1, "Lw2": lw2}


def s_sweep(kernel_family: str, config: DisconnectedConfig, s_grid,
            data_family: str = "random-nonneg", seed: int = 0,
            N: int = 128, samples: int = 8, one_minus_s: bool = True,
            grid: int = 101) -> dict:
    """Aggregate constants per order: table rows (s, C_max, c0_max)."""
    table, reports = [], {}
    for s in s_grid:
        s = float(s)
        k = make_kernel(kernel_family, config.n, s, one_minus_s=one_minus_s)
        reps = disconnected_harnack_experiment(
            s, k, config, data_family, seed=seed, N=N, samples=samples)
        c0 = barrier_combination_check(k, config, grid=grid)["c0_max"]
        table.append({"s": s, "C_max": aggregate_c_max(reps),
                      "c0_max": c0})
        reports[s] = reps
    return {"table": table, "reports": reports}


def classical_harnack_check(u: GridFunction, ball: Ball, s: float) -> dict:
    """Single-ball baseline: sup and inf over the half-radius window.

    The comparison window is the concentric half-radius ball and the tail
    cutoff is the full solved ball, so everything outside the known-sign
    region counts as tail.
    """
    center = float(ball.center[0])
    vals = _ball_values(u, Ball(ball.center, ball.radius / 2.0))
    sup, inf_ = float(vals.max()), float(vals.min())
    t = tail(u.as_point_function().negative_part(), center, ball.radius,
             s).value
    den = inf_ + t
    if den > 0.0:
        c_emp = sup / den
    else:
        c_emp = 0.0 if sup <= 0.0 else np.inf
    return {"sup": sup, "inf": inf_, "tail": t, "C_empirical": c_emp}
