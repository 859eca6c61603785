"""Swarm optimisers over a box-bounded real vector: PSO, GOA, breeding swarm.

All three minimise a user cost function, keep an elitist best, and record
a per-iteration best-cost trace (monotone non-increasing by construction).
A cost returning NaN is treated as +inf and counted. Results are fully
deterministic for a given seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ParameterError
from .fcm_anfis import AnfisModel, forward_batch, unflatten_params

VELOCITY_CLAMP_FRACTION = 0.2


@dataclass(frozen=True)
class PsoParams:
    c1: float = 2.0
    c2: float = 2.0
    w: float = 0.2


@dataclass(frozen=True)
class BsParams:
    w1: float = 1.8          # total acceleration, split evenly over the two pulls
    k1: float = 2.0          # mutation scale multiplier
    w: float = 0.2           # inertia
    ga_fraction: float = 0.5  # share of the population replaced by offspring
    mutation_rate: float = 0.05
    mutation_scale: float = 0.1  # of the per-dimension range, before k1


@dataclass(frozen=True)
class GoaParams:
    c_min: float = 0.00004
    c_max: float = 1.0
    f: float = 0.5
    l: float = 1.5


@dataclass(frozen=True)
class SwarmConfig:
    n_pop: int = 60
    max_iter: int = 400
    seed: int = 0
    pso: PsoParams = PsoParams()
    bs: BsParams = BsParams()
    goa: GoaParams = GoaParams()

    def __post_init__(self):
        if self.n_pop < 1:
            raise ParameterError(f"population must be >= 1, got {self.n_pop}")
        if self.max_iter < 1:
            raise ParameterError(f"iteration budget must be >= 1, got {self.max_iter}")
        if not 0.0 <= self.bs.ga_fraction < 1.0:
            raise ParameterError(f"ga_fraction must lie in [0, 1), got {self.bs.ga_fraction}")


@dataclass
class OptResult:
    best: np.ndarray
    best_cost: float
    trace: np.ndarray
    evaluations: int
    nan_costs: int = 0


CostFn = Callable[[np.ndarray], float]


class _Evaluator:
    def __init__(self, cost: CostFn):
        self.cost = cost
        self.evaluations = 0
        self.nan_costs = 0

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        out = np.empty(positions.shape[0])
        for i, x in enumerate(positions):
            value = float(self.cost(x))
            if np.isnan(value):
                value = np.inf
                self.nan_costs += 1
            out[i] = value
        self.evaluations += positions.shape[0]
        return out


def _check_bounds(bounds, dim: int) -> tuple[np.ndarray, np.ndarray]:
    lo = np.broadcast_to(np.asarray(bounds[0], dtype=np.float64), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(bounds[1], dtype=np.float64), (dim,)).copy()
    if np.any(lo > hi):
        raise ParameterError("lower bounds must not exceed upper bounds")
    return lo, hi


def _init_positions(rng, n_pop, lo, hi, x0):
    positions = rng.uniform(lo, hi, size=(n_pop, lo.size))
    if x0 is not None:
        positions[0] = np.clip(np.asarray(x0, dtype=np.float64), lo, hi)
    return positions


def pso_minimize(cost: CostFn, dim: int, bounds, cfg: SwarmConfig = SwarmConfig(),
                 x0=None) -> OptResult:
    """Canonical inertial PSO with position and velocity clamping."""
    if dim < 1:
        raise ParameterError(f"dimension must be >= 1, got {dim}")
    lo, hi = _check_bounds(bounds, dim)
    rng = np.random.default_rng(cfg.seed)
    evaluate = _Evaluator(cost)
    p = cfg.pso

    x = _init_positions(rng, cfg.n_pop, lo, hi, x0)
    v = np.zeros_like(x)
    v_max = VELOCITY_CLAMP_FRACTION * (hi - lo)
    costs = evaluate(x)
    pbest, pbest_cost = x.copy(), costs.copy()
    g = int(np.argmin(pbest_cost))
    gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
    trace = [gbest_cost]
    for _ in range(cfg.max_iter):
        r1 = rng.uniform(size=x.shape)
        r2 = rng.uniform(size=x.shape)
        v = p.w * v + p.c1 * r1 * (pbest - x) + p.c2 * r2 * (gbest - x)
        np.clip(v, -v_max, v_max, out=v)
        x = np.clip(x + v, lo, hi)
        costs = evaluate(x)
        improved = costs < pbest_cost
        pbest[improved] = x[improved]
        pbest_cost[improved] = costs[improved]
        g = int(np.argmin(pbest_cost))
        if pbest_cost[g] < gbest_cost:
            gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
        trace.append(gbest_cost)
    return OptResult(best=gbest, best_cost=gbest_cost, trace=np.asarray(trace),
                     evaluations=evaluate.evaluations, nan_costs=evaluate.nan_costs)


def goa_coefficient(iteration: int, max_iter: int, c_min: float, c_max: float) -> float:
    """Comfort coefficient: linear from c_max (first iteration) to c_min (last)."""
    if max_iter == 1:
        return c_max
    return c_max - iteration * (c_max - c_min) / (max_iter - 1)


def goa_minimize(cost: CostFn, dim: int, bounds, cfg: SwarmConfig = SwarmConfig(),
                 x0=None) -> OptResult:
    """Grasshopper dynamics: social forces between agents plus a shrinking
    pull toward the elitist target."""
    if dim < 1:
        raise ParameterError(f"dimension must be >= 1, got {dim}")
    lo, hi = _check_bounds(bounds, dim)
    rng = np.random.default_rng(cfg.seed)
    evaluate = _Evaluator(cost)
    g = cfg.goa

    x = _init_positions(rng, cfg.n_pop, lo, hi, x0)
    costs = evaluate(x)
    best_idx = int(np.argmin(costs))
    target, target_cost = x[best_idx].copy(), float(costs[best_idx])
    trace = [target_cost]
    half_range = (hi - lo) / 2.0
    eps = np.finfo(np.float64).eps
    for it in range(cfg.max_iter):
        c = goa_coefficient(it, cfg.max_iter, g.c_min, g.c_max)
        diff = x[None, :, :] - x[:, None, :]          # i x j x d, x_j - x_i
        dist = np.linalg.norm(diff, axis=2)
        social = g.f * np.exp(-np.abs(diff) / g.l) - np.exp(-np.abs(diff))
        unit = diff / (dist[:, :, None] + eps)
        forces = c * half_range[None, None, :] * social * unit
        np.einsum("iid->id", forces)[:] = 0.0  # no self-interaction
        x = np.clip(c * forces.sum(axis=1) + target, lo, hi)
        costs = evaluate(x)
        best_idx = int(np.argmin(costs))
        if costs[best_idx] < target_cost:
            target, target_cost = x[best_idx].copy(), float(costs[best_idx])
        trace.append(target_cost)
    return OptResult(best=target, best_cost=target_cost, trace=np.asarray(trace),
                     evaluations=evaluate.evaluations, nan_costs=evaluate.nan_costs)


def _roulette_pick(rng, fitness: np.ndarray, count: int) -> np.ndarray:
    total = fitness.sum()
    if total <= 0:
        return rng.integers(fitness.size, size=count)
    return rng.choice(fitness.size, size=count, p=fitness / total)


def bs_minimize(cost: CostFn, dim: int, bounds, cfg: SwarmConfig = SwarmConfig(),
                x0=None) -> OptResult:
    """Hybrid swarm: the better part of the population moves by PSO, the
    rest is replaced each generation by roulette-selected, blended and
    mutated offspring.

    With ``ga_fraction == 0`` the update degenerates to plain PSO with
    acceleration w1/2 on both pulls (same random stream).
    """
    if dim < 1:
        raise ParameterError(f"dimension must be >= 1, got {dim}")
    lo, hi = _check_bounds(bounds, dim)
    rng = np.random.default_rng(cfg.seed)
    evaluate = _Evaluator(cost)
    b = cfg.bs
    accel = b.w1 / 2.0
    n_breed = int(np.floor(b.ga_fraction * cfg.n_pop))
    sigma = b.k1 * b.mutation_scale * (hi - lo)

    x = _init_positions(rng, cfg.n_pop, lo, hi, x0)
    v = np.zeros_like(x)
    v_max = VELOCITY_CLAMP_FRACTION * (hi - lo)
    costs = evaluate(x)
    pbest, pbest_cost = x.copy(), costs.copy()
    g = int(np.argmin(pbest_cost))
    gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
    trace = [gbest_cost]
    for _ in range(cfg.max_iter):
        r1 = rng.uniform(size=x.shape)
        r2 = rng.uniform(size=x.shape)
        order = np.argsort(costs, kind="stable")
        keep = order[: cfg.n_pop - n_breed]
        breed = order[cfg.n_pop - n_breed :]

        v_keep = (b.w * v[keep] + accel * r1[keep] * (pbest[keep] - x[keep])
                  + accel * r2[keep] * (gbest - x[keep]))
        v[keep] = np.clip(v_keep, -v_max, v_max)
        x[keep] = np.clip(x[keep] + v[keep], lo, hi)

        if n_breed:
            fitness = costs.max() - costs
            parents_a = _roulette_pick(rng, fitness, n_breed)
            parents_b = _roulette_pick(rng, fitness, n_breed)
            blend = rng.uniform(size=(n_breed, dim))
            children = blend * x[parents_a] + (1.0 - blend) * x[parents_b]
            mutate = rng.uniform(size=children.shape) < b.mutation_rate
            children[mutate] += (rng.standard_normal(children.shape) * sigma)[mutate]
            children = np.clip(children, lo, hi)
            x[breed] = children
            v[breed] = 0.0
            pbest[breed] = children
            pbest_cost[breed] = np.inf

        costs = evaluate(x)
        improved = costs < pbest_cost
        pbest[improved] = x[improved]
        pbest_cost[improved] = costs[improved]
        g = int(np.argmin(pbest_cost))
        if pbest_cost[g] < gbest_cost:
            gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
        trace.append(gbest_cost)
    return OptResult(best=gbest, best_cost=gbest_cost, trace=np.asarray(trace),
                     evaluations=evaluate.evaluations, nan_costs=evaluate.nan_costs)


MINIMIZERS = {"pso": pso_minimize, "goa": goa_minimize, "bs": bs_minimize}


def make_anfis_cost(rows, targets, template: AnfisModel) -> CostFn:
    """Mean-squared training error as a function of the flattened parameters."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)

    def cost(theta: np.ndarray) -> float:
        model = unflatten_params(template, theta)
        if np.any(model.widths <= 0):
            return np.inf
        pred = forward_batch(model, rows)
        if not np.all(np.isfinite(pred)):
            return np.inf
        return float(np.mean((targets - pred) ** 2))

    return cost


def write_trace_csv(result: OptResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_cost"])
        for i, value in enumerate(result.trace):
            writer.writerow([i, f"{value:.12g}"])
