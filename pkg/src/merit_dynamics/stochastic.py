"""Exact finite-population Monte Carlo engine for both transition models.

Every generation: the integer selection rule fills C = round(2*N*alpha)
seats from the current high/low counts, then each individual transitions
independently — admits succeed with probability p, rejected high types
persist with q (plus epsilon for the leading group under affinity
advantage), rejected low types upgrade with 0 (or epsilon for the
leader). All sampling is exact binomial; the normal approximations in
``conditional_delta_moments`` serve only as large-N test oracles.

Runs are seeded as (master_seed, run_index) through a fixed 64-bit
SplitMix mix, so ensembles reproduce bit-for-bit regardless of execution
order or worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .allocation import AllocationResult, allocate_integer
from .core import Group, GroupState, ModelParams, Regime, TransitionModel, classify_regime, leader_of
from .errors import InvalidParamsError, UnsupportedModelError

# SplitMix64 finalizer constants (Steele, Lea & Flood's generator).
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Mix (master_seed, run_index) into an independent 64-bit run seed.

    run_seed = splitmix64(master_seed + (run_index + 1) * GAMMA), the
    standard SplitMix64 output function. Fixed here so ensembles are
    reproducible across platforms and thread counts.
    """
    z = (master_seed + (run_index + 1) * _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def make_rng(master_seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_run_seed(master_seed, run_index)))


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce an ensemble."""

    params: ModelParams
    model: TransitionModel
    initial: GroupState
    horizon_t: int
    master_seed: int = 0
    n_runs: int = 1

    def __post_init__(self):
        if self.horizon_t < 1:
            raise InvalidParamsError(f"horizon_t must be >= 1, got {self.horizon_t}")
        if self.n_runs < 1:
            raise InvalidParamsError(f"n_runs must be >= 1, got {self.n_runs}")
        if not self.initial.count_backed:
            raise InvalidParamsError("initial state must be count-backed")
        if self.initial.n != self.params.n_per_group:
            raise InvalidParamsError(
                f"initial state has n={self.initial.n}, params expect {self.params.n_per_group}"
            )


@dataclass
class Trajectory:
    """One realized run: states, integer allocations and regimes per step.

    Index t runs over 0..T. The allocation at index t is the one computed
    from the state at t (and consumed by the transition to t+1).
    """

    n: int
    capacity: int
    run_seed: int
    h_a: np.ndarray
    h_b: np.ndarray
    high_seats_a: np.ndarray
    high_seats_b: np.ndarray
    low_seats_a: np.ndarray
    low_seats_b: np.ndarray
    over_subscribed: np.ndarray

    @property
    def horizon_t(self) -> int:
        return len(self.h_a) - 1

    @property
    def x_a(self) -> np.ndarray:
        return self.h_a / self.n

    @property
    def x_b(self) -> np.ndarray:
        return self.h_b / self.n

    @property
    def delta(self) -> np.ndarray:
        return (self.h_a - self.h_b) / self.n

    @property
    def admits_a(self) -> np.ndarray:
        return self.high_seats_a + self.low_seats_a

    @property
    def admits_b(self) -> np.ndarray:
        return self.high_seats_b + self.low_seats_b

    def state_at(self, t: int) -> GroupState:
        return GroupState.from_counts(int(self.h_a[t]), int(self.h_b[t]), self.n)


@dataclass(frozen=True)
class DeltaMoments:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise InvalidParamsError(f"variance must be nonnegative, got {self.variance}")


def _transition_probs(
    params: ModelParams, model: TransitionModel, leader: Group | None
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Per-group (rejected-high persistence, rejected-low upgrade) probabilities."""
    base = (params.q, 0.0)
    if model is TransitionModel.EQUAL_ADVANTAGE or leader is None:
        return base, base
    boosted = (params.q + params.epsilon, params.epsilon)
    return (boosted, base) if leader is Group.A else (base, boosted)


def _step_counts(
    state: GroupState,
    alloc: AllocationResult,
    params: ModelParams,
    model: TransitionModel,
    leader: Group | None,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """Draw next-step high-type counts from exact binomials."""
    n = state.n
    (qa, la), (qb, lb) = _transition_probs(params, model, leader)
    admits_a = int(alloc.high_a + alloc.low_a)
    admits_b = int(alloc.high_b + alloc.low_b)
    rej_high_a = state.h_a - int(alloc.high_a)
    rej_high_b = state.h_b - int(alloc.high_b)
    rej_low_a = (n - state.h_a) - int(alloc.low_a)
    rej_low_b = (n - state.h_b) - int(alloc.low_b)
    new_a = (
        rng.binomial(admits_a, params.p)
        + rng.binomial(rej_high_a, qa)
        + rng.binomial(rej_low_a, la)
    )
    new_b = (
        rng.binomial(admits_b, params.p)
        + rng.binomial(rej_high_b, qb)
        + rng.binomial(rej_low_b, lb)
    )
    return int(new_a), int(new_b)


def sample_step(
    state: GroupState,
    params: ModelParams,
    model: TransitionModel,
    leader: Group | None,
    rng: np.random.Generator,
) -> GroupState:
    """One exact stochastic generation from a count-backed state."""
    alloc = allocate_integer(state, params)
    new_a, new_b = _step_counts(state, alloc, params, model, leader, rng)
    return GroupState.from_counts(new_a, new_b, state.n)


def sample_delta_replicates(
    state: GroupState,
    params: ModelParams,
    model: TransitionModel,
    leader: Group | None,
    rng: np.random.Generator,
    n_replicates: int,
) -> np.ndarray:
    """Vectorized one-step replicates of the separation Delta(t+1).

    The state (hence the integer allocation) is fixed; only the binomial
    outcomes vary. Used to compare empirical one-step moments against the
    analytic conditional moments.
    """
    n = state.n
    alloc = allocate_integer(state, params)
    (qa, la), (qb, lb) = _transition_probs(params, model, leader)
    admits_a = int(alloc.high_a + alloc.low_a)
    admits_b = int(alloc.high_b + alloc.low_b)
    size = n_replicates
    new_a = (
        rng.binomial(admits_a, params.p, size=size)
        + rng.binomial(state.h_a - int(alloc.high_a), qa, size=size)
        + rng.binomial((n - state.h_a) - int(alloc.low_a), la, size=size)
    )
    new_b = (
        rng.binomial(admits_b, params.p, size=size)
        + rng.binomial(state.h_b - int(alloc.high_b), qb, size=size)
        + rng.binomial((n - state.h_b) - int(alloc.low_b), lb, size=size)
    )
    return (new_a - new_b) / n


def conditional_delta_moments(
    state: GroupState, params: ModelParams, model: TransitionModel = TransitionModel.EQUAL_ADVANTAGE
) -> DeltaMoments:
    """Analytic conditional mean/variance of Delta(t+1) given the state.

    Over-subscribed:
        mean = (2*alpha*(p-q)/X + q) * Delta
        var  = (2*alpha*p*(1-p) + q*(1-q)*(X - 2*alpha)) / N
    Under-subscribed:
        mean = 2*(1-alpha)*p / (2-X) * Delta
        var  = 2*alpha*p*(1-p) / N

    Derived for the equal-advantage model only.
    """
    if model is not TransitionModel.EQUAL_ADVANTAGE:
        raise UnsupportedModelError("conditional moments are derived for the EA model only")
    n = params.n_per_group
    alpha, p, q = params.alpha, params.p, params.q
    x = state.total
    delta = state.delta
    if classify_regime(state, params) is Regime.OVER_SUBSCRIBED:
        if x == 0.0:
            raise InvalidParamsError("moments undefined at X = 0 in the over-subscribed regime")
        mean = (2.0 * alpha * (p - q) / x + q) * delta
        var = (2.0 * alpha * p * (1.0 - p) + q * (1.0 - q) * (x - 2.0 * alpha)) / n
    else:
        mean = 2.0 * (1.0 - alpha) * p / (2.0 - x) * delta
        var = 2.0 * alpha * p * (1.0 - p) / n
    return DeltaMoments(mean=mean, variance=var)


def run_trajectory(config: SimConfig, run_index: int) -> Trajectory:
    """Simulate one seeded run; deterministic given (master_seed, run_index).

    Regime and (for affinity advantage) the leading group are recomputed
    from the realized counts at every step.
    """
    params = config.params
    horizon = config.horizon_t
    rng = make_rng(config.master_seed, run_index)
    size = horizon + 1
    h_a = np.zeros(size, dtype=np.int64)
    h_b = np.zeros(size, dtype=np.int64)
    seats = [np.zeros(size, dtype=np.int64) for _ in range(4)]
    over = np.zeros(size, dtype=bool)

    state = config.initial
    for t in range(size):
        alloc = allocate_integer(state, params)
        h_a[t], h_b[t] = state.h_a, state.h_b
        seats[0][t], seats[1][t] = int(alloc.high_a), int(alloc.high_b)
        seats[2][t], seats[3][t] = int(alloc.low_a), int(alloc.low_b)
        over[t] = classify_regime(state, params) is Regime.OVER_SUBSCRIBED
        if t == horizon:
            break
        leader = leader_of(state) if config.model is TransitionModel.AFFINITY_ADVANTAGE else None
        new_a, new_b = _step_counts(state, alloc, params, config.model, leader, rng)
        state = GroupState.from_counts(new_a, new_b, state.n)

    return Trajectory(
        n=params.n_per_group,
        capacity=params.capacity,
        run_seed=derive_run_seed(config.master_seed, run_index),
        h_a=h_a,
        h_b=h_b,
        high_seats_a=seats[0],
        high_seats_b=seats[1],
        low_seats_a=seats[2],
        low_seats_b=seats[3],
        over_subscribed=over,
    )


def run_ensemble(config: SimConfig, n_workers: int = 1) -> list[Trajectory]:
    """All runs of the configured ensemble, ordered by run index.

    Per-run seeding makes the result identical whether runs execute
    serially or across a process pool.
    """
    indices = range(config.n_runs)
    if n_workers <= 1 or config.n_runs == 1:
        return [run_trajectory(config, i) for i in indices]
    chunk = max(1, config.n_runs // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(partial(run_trajectory, config), indices, chunksize=chunk))
