"""Joint grid search of the end-to-end rate over (mu, L0, F_t).

Exhaustive evaluation on configurable grids, vectorized over the mu and
L0 axes with one planner pass per F_t value, plus the sweep drivers
producing rate-vs-distance and rate-vs-fidelity curves. The batch path
shares the raw map arithmetic with performance_model/evaluate_point,
so every reported optimum replays identically through the scalar path.

Reductions use one total order, maximize (R, L0, -mu, F_t, -h), which
makes results independent of evaluation schedule and worker count.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from satqnet.errors import (
    REASON_INSUFFICIENT_HOPS,
    REASON_INSUFFICIENT_REACH,
    DegenerateLambdaError,
    InfeasibleFidelityError,
    NonconvergenceError,
    ProtocolCollapseError,
    UnreachableTargetError,
    ValidationError,
    ZeroGainError,
)
from satqnet.performance_model import (
    DEGENERATE_LAMBDA_TOL,
    NetworkModel,
    PerformancePoint,
    coherence_margin,
    evaluate_point,
)
from satqnet.photon_source import MAX_MU, _overall_gain_raw, _qber_raw
from satqnet.repeater_protocol import (
    ROUND_CAP,
    TARGET_EQUAL_TOL,
    ProtocolPlan,
    _purify_raw,
    _swap_raw,
    nesting_level_cost,
    platform_f_l,
    upper_fixed_point,
)

logger = logging.getLogger(__name__)

WORKERS_ENV_VAR = "SATQNET_WORKERS"

# per-point outcome codes used inside the batch arrays
_OK = 0
_HOPS = 1
_REACH = 2
_UNREACHABLE = 3
_NONCONVERGENCE = 4
_COLLAPSE = 5
_DEGENERATE = 6
_INFEASIBLE_FIDELITY = 7
_ZERO_GAIN = 8
_CODE_REASONS = {
    _OK: "",
    _HOPS: REASON_INSUFFICIENT_HOPS,
    _REACH: REASON_INSUFFICIENT_REACH,
    _UNREACHABLE: UnreachableTargetError.reason,
    _NONCONVERGENCE: NonconvergenceError.reason,
    _COLLAPSE: ProtocolCollapseError.reason,
    _DEGENERATE: DegenerateLambdaError.reason,
    _INFEASIBLE_FIDELITY: InfeasibleFidelityError.reason,
    _ZERO_GAIN: ZeroGainError.reason,
}


@dataclass(frozen=True)
class GridSpec:
    """Grid resolutions and bounds for the (mu, L0, F_t) search.

    Attributes:
        mu_min, mu_max: Brightness range, log-spaced sampling.
        n_mu: Number of mu samples.
        ft_min, ft_max: Target-fidelity range, inclusive.
        ft_step: Linear F_t step.
        l0_min_m: Smallest admissible ground-station spacing (m).
        l0_lattice_start_m, l0_lattice_step_m: Uniform L0 lattice merged
            with the divisors L/n of the end-to-end distance.
    """
    mu_min: float = 2e-4
    mu_max: float = 0.2
    n_mu: int = 40
    ft_min: float = 0.95
    ft_max: float = 1.0
    ft_step: float = 0.002
    l0_min_m: float = 500e3
    l0_lattice_start_m: float = 500e3
    l0_lattice_step_m: float = 250e3

    def __post_init__(self):
        if not 0.0 < self.mu_min < self.mu_max <= MAX_MU:
            raise ValidationError(
                f"need 0 < mu_min < mu_max <= {MAX_MU}, got "
                f"[{self.mu_min}, {self.mu_max}]")
        if self.n_mu < 1:
            raise ValidationError(f"n_mu must be >= 1, got {self.n_mu}")
        if not 0.5 < self.ft_min <= self.ft_max <= 1.0:
            raise ValidationError(
                f"need 0.5 < ft_min <= ft_max <= 1, got "
                f"[{self.ft_min}, {self.ft_max}]")
        if self.ft_step <= 0.0:
            raise ValidationError(f"ft_step must be > 0, got {self.ft_step}")
        for name in ("l0_min_m", "l0_lattice_start_m", "l0_lattice_step_m"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be > 0")


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class SearchSpace:
    """Concrete, sorted sample grids for one (L, L_max) combination."""
    mu_grid: tuple
    ft_grid: tuple
    l0_grid_m: tuple
    altitudes_m: tuple

    def __post_init__(self):
        for name in ("mu_grid", "ft_grid", "l0_grid_m"):
            values = getattr(self, name)
            if len(values) == 0:
                raise ValidationError(f"{name} must not be empty")
            if list(values) != sorted(values):
                raise ValidationError(f"{name} must be sorted ascending")
        if max(self.mu_grid) > MAX_MU:
            raise ValidationError(f"mu grid exceeds the hard cap {MAX_MU}")


def _ft_values(grid: GridSpec) -> tuple:
    count = int(math.floor((grid.ft_max - grid.ft_min) / grid.ft_step + 0.5))
    values = [round(grid.ft_min + i * grid.ft_step, 9) for i in range(count + 1)]
    return tuple(v for v in values if v <= grid.ft_max + 1e-12)

def _l0_values(grid: GridSpec, l_m: float, l_max_m: float) -> tuple:
    upper = min(l_m, l_max_m)
    values = set()
    if l_m <= l_max_m:
        # direct transmission is always a candidate when geometry allows
        values.add(l_m)
    for n in range(1, math.ceil(l_m / grid.l0_min_m) + 1):
        spacing = l_m / n
        if grid.l0_min_m <= spacing <= upper:
            values.add(spacing)
    k = 0
    while True:
        spacing = grid.l0_lattice_start_m + k * grid.l0_lattice_step_m
        if spacing > upper:
            break
        if spacing >= grid.l0_min_m:
            values.add(spacing)
        k += 1
    return tuple(sorted(values))


def build_search_space(grid: GridSpec, l_m: float, l_max_m: float,
                       altitudes_m: Sequence[float] = ()) -> SearchSpace:
    """Materialize the sample grids for one end-to-end distance.

    The L0 axis merges the divisors L/n (repeater counts are integers)
    with a uniform lattice (covers the L-independent regime), clipped to
    [l0_min, min(L, L_max)].

    Args:
        grid: Resolution and bound settings.
        l_m: End-to-end distance (m).
        l_max_m: Geometric ceiling on L0 at the chosen altitude (m).

    Returns:
        SearchSpace with non-empty sorted grids.

    Raises:
        ValidationError: No admissible L0 sample exists (L beyond reach
            of a single hop and below the lattice floor).
    """
    if l_m <= 0.0:
        raise ValidationError(f"distance must be positive, got {l_m}")
    mu_grid = tuple(float(v) for v in
                    np.geomspace(grid.mu_min, grid.mu_max, grid.n_mu))
    return SearchSpace(mu_grid=mu_grid, ft_grid=_ft_values(grid),
                       l0_grid_m=_l0_values(grid, l_m, l_max_m),
                       altitudes_m=tuple(altitudes_m))


@dataclass(frozen=True)
class Optimum:
    """Outcome of one exhaustive search at a fixed end-to-end distance.

    best is None when no grid point was feasible; failure_counts then
    tallies every reason code encountered across the grid.
    """
    l_m: float
    scenario: str
    platform_name: str
    best: Optional[PerformancePoint]
    n_evaluated: int
    n_feasible: int
    failure_counts: dict
    grid_points: tuple = ()

    @property
    def argmax(self) -> Optional[tuple]:
        """(mu, L0 m, F_t, h m) of the best point, or None."""
        if self.best is None:
            return None
        return (self.best.mu, self.best.l0_m, self.best.f_t, self.best.h_m)


@dataclass(frozen=True)
class TradeoffPoint:
    """Best rate over (mu, L0, h) at one pinned target fidelity."""
    f_t: float
    best: Optional[PerformancePoint]
    n_feasible: int


class _SourceGrids:
    """F_t-independent arrays over the (mu, L0) plane for one model."""

    def __init__(self, model: NetworkModel, space: SearchSpace, l_m: float):
        self.model = model
        self.space = space
        self.l_m = l_m
        self.mu = np.asarray(space.mu_grid)[:, None]
        self.l0 = np.asarray(space.l0_grid_m)[None, :]
        eta = np.array([model.chain.channel_efficiency(model.geometry(l0))
                        for l0 in space.l0_grid_m])[None, :]
        y0 = model.chain.background_click()
        q = _overall_gain_raw(self.mu, eta, eta, y0, y0)
        self.zero_gain = q <= 0.0
        q_safe = np.where(self.zero_gain, 1.0, q)
        raw_qber = _qber_raw(self.mu, eta, eta, y0, y0,
                             model.e_0, model.e_d, q_safe)
        self.f_init = (2.0 - 3.0 * np.clip(raw_qber, 0.0, model.e_0)) / 2.0
        ground = model.ground
        self.r0 = (ground.n_m * model.f_hz * ground.beta
                   * ground.eta_caps_etad * ground.eta_demux ** 2 * q)
        # zero-gain points keep f_init/r0 at their scalar defaults (0)
        self.f_init = np.where(self.zero_gain, 0.0, self.f_init)
        self.r0 = np.where(self.zero_gain, 0.0, self.r0)


class _FtSlice:
    """Planner and capacity arrays for one F_t over the (mu, L0) plane."""

    def __init__(self, grids: _SourceGrids, f_t: float):
        self.f_t = f_t
        platform = grids.model.platform
        shape = np.broadcast_shapes(grids.f_init.shape, grids.l0.shape)
        self.code = np.zeros(shape, dtype=np.int64)
        self.code[np.broadcast_to(grids.zero_gain, shape)] = _ZERO_GAIN
        self.s = np.zeros(shape, dtype=np.int64)
        self.m = np.zeros(shape, dtype=np.int64)
        self.p_tilde = np.ones(shape)
        self.f_reached = np.zeros(shape)
        self.planned = np.zeros(shape, dtype=bool)
        self.k_level = 0
        self.lambda_ = 1.0
        self.d_star = np.zeros(shape)
        self.t = np.zeros(shape)
        self.l_star = np.zeros(shape)
        self.r = np.zeros(shape)
        self.feasible = np.zeros(shape, dtype=bool)

        f_l = platform_f_l(platform)
        f_max = upper_fixed_point(platform)
        alive = self.code == _OK
        if f_t >= f_max or f_t <= f_l:
            self.code[alive] = _UNREACHABLE
            return
        f_init = np.broadcast_to(grids.f_init, shape)
        low = alive & (f_init <= f_l)
        self.code[low] = _UNREACHABLE
        alive &= ~low
        try:
            self.k_level, self.lambda_ = nesting_level_cost(f_t, platform)
        except ProtocolCollapseError:
            self.code[alive] = _COLLAPSE
            return
        if not np.any(alive):
            return

        f = np.array(np.broadcast_to(grids.f_init, shape))
        sum_log_p = np.zeros(shape)
        equal = alive & (np.abs(f - f_t) <= TARGET_EQUAL_TOL)
        pending = alive & ~equal

        swapping = pending & (f > f_t)
        for _ in range(ROUND_CAP):
            active = swapping & (f >= f_t)
            if not np.any(active):
                break
            f[active] = _swap_raw(f[active], platform.eta_ro)
            self.s[active] += 1
        stuck = swapping & (f >= f_t)
        self.code[stuck] = _NONCONVERGENCE
        pending &= ~stuck

        purifying = pending & (f < f_t)
        for _ in range(ROUND_CAP):
            active = purifying & (f < f_t)
            if not np.any(active):
                break
            f_out, accept = _purify_raw(f[active], platform.epsilon_g,
                                        platform.eta_ro, platform.p_x,
                                        platform.p_y, platform.p_z)
            f[active] = f_out
            sum_log_p[active] += np.log(accept)
            self.m[active] += 1
        stuck = purifying & (f < f_t)
        self.code[stuck] = _NONCONVERGENCE
        pending &= ~stuck

        done = equal | pending
        self.planned = done
        self.f_reached = np.where(done, f, 0.0)
        self.p_tilde = np.exp(sum_log_p / np.maximum(self.m, 1))

        # capacity and overhead, mirroring max_hops / resource_overhead
        if self.lambda_ <= 1.0 + DEGENERATE_LAMBDA_TOL:
            self.code[done] = _DEGENERATE
            return
        try:
            margin = coherence_margin(f_l, platform.eta_ro, f_t)
        except InfeasibleFidelityError:
            self.code[done] = _INFEASIBLE_FIDELITY
            return
        r0 = np.broadcast_to(grids.r0, shape)
        l0 = np.broadcast_to(grids.l0, shape)
        l_m = grids.l_m
        exponent = 1.0 / (self.lambda_ - 1.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            bracket = ((2.0 / self.p_tilde) ** -self.m.astype(float)
                       * r0 * platform.t2_s * margin)
            d_star = 2.0 ** self.s.astype(float) * bracket ** exponent
            base = np.maximum(2.0 ** -self.s.astype(float) * (l_m / l0), 1.0)
            t = ((2.0 / self.p_tilde) ** self.m.astype(float)
                 * base ** (self.lambda_ - 1.0))
        self.d_star = np.where(done, d_star, 0.0)
        self.l_star = self.d_star * l0
        self.t = np.where(done, t, 0.0)
        hops = done & (self.d_star < 1.0)
        self.code[hops] = _HOPS
        reach = done & ~hops & (self.l_star < l_m)
        self.code[reach] = _REACH
        self.feasible = done & ~hops & ~reach
        self.r = np.where(self.feasible, r0 / np.where(self.t > 0.0, self.t, 1.0),
                          0.0)


def _slice_best(grids: _SourceGrids, sl: _FtSlice):
    """Best feasible point of one slice under (R, L0, -mu) ordering."""
    idx = np.flatnonzero(sl.feasible)
    if idx.size == 0:
        return None
    shape = sl.r.shape
    r = sl.r.ravel()[idx]
    l0 = np.broadcast_to(grids.l0, shape).ravel()[idx]
    mu = np.broadcast_to(grids.mu, shape).ravel()[idx]
    winner = np.lexsort((-mu, l0, r))[-1]
    mi, ni = np.unravel_index(idx[winner], shape)
    key = (float(r[winner]), float(l0[winner]), float(-mu[winner]))
    return key, int(mi), int(ni)


def _grid_rows(grids: _SourceGrids, sl: _FtSlice) -> list:
    """All PerformancePoint records of one slice, row-major (mu, L0)."""
    model = grids.model
    n_mu = len(grids.space.mu_grid)
    n_l0 = len(grids.space.l0_grid_m)
    rows = []
    for mi in range(n_mu):
        for ni in range(n_l0):
            plan = None
            if sl.planned[mi, ni]:
                plan = ProtocolPlan(
                    s=int(sl.s[mi, ni]), m=int(sl.m[mi, ni]),
                    p_tilde=float(sl.p_tilde[mi, ni]),
                    k_level=sl.k_level, lambda_=sl.lambda_,
                    f_reached=float(sl.f_reached[mi, ni]))
            rows.append(PerformancePoint(
                mu=grids.space.mu_grid[mi], l0_m=grids.space.l0_grid_m[ni],
                f_t=sl.f_t, l_m=grids.l_m, h_m=model.h_m,
                f_init=float(grids.f_init[mi, ni]),
                r0_hz=float(grids.r0[mi, ni]), plan=plan,
                t_overhead=float(sl.t[mi, ni]),
                d_star=float(sl.d_star[mi, ni]),
                l_star_m=float(sl.l_star[mi, ni]),
                r_hz=float(sl.r[mi, ni]),
                feasible=bool(sl.feasible[mi, ni]),
                reason=_CODE_REASONS[int(sl.code[mi, ni])]))
    return rows


def _merge_counts(total: dict, sl: _FtSlice) -> None:
    codes, counts = np.unique(sl.code[sl.code != _OK], return_counts=True)
    for code, count in zip(codes, counts):
        reason = _CODE_REASONS[int(code)]
        total[reason] = total.get(reason, 0) + int(count)


def _search_model(model: NetworkModel, l_m: float, grid: GridSpec,
                  collect: bool):
    """Exhaustive batch search on one model; returns the pieces of an
    Optimum plus the winning slice coordinates."""
    space = build_search_space(grid, l_m, model.reach_m(), (model.h_m,))
    grids = _SourceGrids(model, space, l_m)
    failure_counts: dict = {}
    rows: list = []
    best = None
    n_evaluated = 0
    n_feasible = 0
    for f_t in space.ft_grid:
        sl = _FtSlice(grids, f_t)
        n_evaluated += sl.code.size
        n_feasible += int(np.count_nonzero(sl.feasible))
        _merge_counts(failure_counts, sl)
        cand = _slice_best(grids, sl)
        if cand is not None:
            key, mi, ni = cand
            full_key = key + (f_t, -model.h_m)
            if best is None or full_key > best[0]:
                best = (full_key, f_t, mi, ni)
        if collect:
            rows.extend(_grid_rows(grids, sl))
    best_point = None
    if best is not None:
        _, f_t, mi, ni = best
        best_point = evaluate_point(model, space.mu_grid[mi],
                                    space.l0_grid_m[ni], f_t, l_m)
    return best_point, n_evaluated, n_feasible, failure_counts, rows


def _point_key(point: PerformancePoint) -> tuple:
    """Total tie-break order: maximize (R, L0, -mu, F_t, -h)."""
    return (point.r_hz, point.l0_m, -point.mu, point.f_t, -point.h_m)


def optimize_rate(model: NetworkModel, l_m: float,
                  grid: GridSpec = DEFAULT_GRID,
                  collect_grid: bool = False) -> Optimum:
    """Maximize the end-to-end rate over (mu, L0, F_t) at one altitude.

    Exhaustive search over the materialized grids; infeasibility is
    data, not failure, so an empty feasible set yields best=None with
    the per-reason failure tally.

    Args:
        model: Scenario/platform/altitude bundle.
        l_m: End-to-end distance (m).
        grid: Grid resolutions; defaults reproduce the study settings.
        collect_grid: Also record every evaluated point (grid_points).

    Returns:
        Optimum; best maximizes R with the deterministic tie-break
        (larger L0, then smaller mu, then larger F_t).
    """
    best_point, n_eval, n_feas, failures, rows = _search_model(
        model, l_m, grid, collect_grid)
    return Optimum(l_m=l_m, scenario=model.scenario,
                   platform_name=model.platform_name, best=best_point,
                   n_evaluated=n_eval, n_feasible=n_feas,
                   failure_counts=failures, grid_points=tuple(rows))


def optimize_over_altitudes(models: Sequence[NetworkModel], l_m: float,
                            grid: GridSpec = DEFAULT_GRID,
                            collect_grid: bool = False) -> Optimum:
    """Best optimize_rate outcome across an altitude list.

    Ties across altitudes resolve toward the lower altitude.
    """
    if not models:
        raise ValidationError("need at least one network model")
    merged_counts: dict = {}
    merged_rows: list = []
    best = None
    n_evaluated = 0
    n_feasible = 0
    for model in models:
        opt = optimize_rate(model, l_m, grid, collect_grid)
        n_evaluated += opt.n_evaluated
        n_feasible += opt.n_feasible
        for reason, count in opt.failure_counts.items():
            merged_counts[reason] = merged_counts.get(reason, 0) + count
        merged_rows.extend(opt.grid_points)
        if opt.best is not None:
            if best is None or _point_key(opt.best) > _point_key(best):
                best = opt.best
    return Optimum(l_m=l_m, scenario=models[0].scenario,
                   platform_name=models[0].platform_name, best=best,
                   n_evaluated=n_evaluated, n_feasible=n_feasible,
                   failure_counts=merged_counts,
                   grid_points=tuple(merged_rows))


def _worker_count(workers) -> int:
    if workers is None:
        raw = os.environ.get(WORKERS_ENV_VAR, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValidationError(
                f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}")
    if workers < 1:
        raise ValidationError(f"worker count must be >= 1, got {workers}")
    return workers


def _sweep_task(args) -> Optimum:
    models, l_m, grid = args
    return optimize_over_altitudes(models, l_m, grid)


def sweep_distance(models: Sequence[NetworkModel], l_list_m: Sequence[float],
                   grid: GridSpec = DEFAULT_GRID,
                   workers: int = None) -> list:
    """One altitude-maximized Optimum per end-to-end distance.

    Distances are independent tasks; with workers > 1 they run in a
    process pool whose ordered map keeps the output identical to the
    serial run. The optimal rate is expected to fall with distance;
    exceptions (the L0 grid is L-dependent) are logged, not raised.

    Args:
        models: One NetworkModel per altitude.
        l_list_m: Ascending end-to-end distances (m).
        grid: Grid resolutions.
        workers: Process count; None reads the SATQNET_WORKERS
            environment variable (default 1).

    Returns:
        list[Optimum], aligned with l_list_m.
    """
    l_list = [float(l) for l in l_list_m]
    if l_list != sorted(l_list):
        raise ValidationError("distance list must be ascending")
    count = _worker_count(workers)
    tasks = [(tuple(models), l_m, grid) for l_m in l_list]
    if count == 1 or len(tasks) <= 1:
        optima = [_sweep_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=count) as pool:
            optima = list(pool.map(_sweep_task, tasks))
    previous = None
    for opt in optima:
        rate = opt.best.r_hz if opt.best is not None else 0.0
        if previous is not None and rate > previous * (1.0 + 1e-12):
            logger.warning(
                "optimal rate rose from %.6g to %.6g Hz at L = %.0f km; "
                "the L-dependent L0 grid admits this", previous, rate,
                opt.l_m / 1e3)
        previous = rate
    return optima


def rate_fidelity_tradeoff(models: Sequence[NetworkModel], l_m: float,
                           grid: GridSpec = DEFAULT_GRID) -> list:
    """Best rate over (mu, L0, h) at each target fidelity separately.

    Args:
        models: One NetworkModel per altitude.
        l_m: End-to-end distance (m).
        grid: Grid resolutions; ft_grid defines the curve's abscissa.

    Returns:
        list[TradeoffPoint], one per F_t value, best=None where no
        feasible point exists (curve gap).
    """
    if not models:
        raise ValidationError("need at least one network model")
    ft_grid = _ft_values(grid)
    candidates: dict = {}
    feasible_counts = [0] * len(ft_grid)
    for model in models:
        space = build_search_space(grid, l_m, model.reach_m(), (model.h_m,))
        grids = _SourceGrids(model, space, l_m)
        for fi, f_t in enumerate(ft_grid):
            sl = _FtSlice(grids, f_t)
            feasible_counts[fi] += int(np.count_nonzero(sl.feasible))
            cand = _slice_best(grids, sl)
            if cand is None:
                continue
            key, mi, ni = cand
            full_key = key + (-model.h_m,)
            held = candidates.get(fi)
            if held is None or full_key > held[0]:
                candidates[fi] = (full_key, model, space, mi, ni)
    points = []
    for fi, f_t in enumerate(ft_grid):
        best = None
        if fi in candidates:
            _, model, space, mi, ni = candidates[fi]
            best = evaluate_point(model, space.mu_grid[mi],
                                  space.l0_grid_m[ni], f_t, l_m)
        points.append(TradeoffPoint(f_t=f_t, best=best,
                                    n_feasible=feasible_counts[fi]))
    return points
