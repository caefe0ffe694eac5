"""Continuous-ability inter-generational simulator.

Individuals carry real-valued abilities. Each generation the top
alpha-fraction by (globally standardized) ability is admitted; admits
draw a Gamma-distributed boost transmitted to the next generation scaled
by ``theta``, everyone picks up Gaussian inheritance noise, and — when a
group led the previous admissions round — that group's non-admits receive
an extra Gaussian affinity boost. Group sizes are fixed; only abilities
evolve.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import Group
from .errors import InvalidParamsError
from .stochastic import make_rng

GROUP_A = 0
GROUP_B = 1


@dataclass(frozen=True)
class RichParams:
    """Parameters of the continuous-ability model.

    Defaults follow the reference configuration: identical standard
    normal groups of 500, unit-mean/unit-sd college boost fully
    transmitted (theta=1), inheritance noise sd 0.5.

    ``standardize_scale`` keeps each generation's abilities on the
    population z-score scale (selection is by standardized ability, and
    the standardized values are the state carried forward). This keeps
    the process scale-stationary so admission churn never freezes; the
    raw-scale variant (False) accumulates boosts absolutely and is
    exposed for diagnostics of the bare inheritance equation.
    """

    n_a: int = 500
    n_b: int = 500
    mu_a: float = 0.0
    mu_b: float = 0.0
    sigma_a: float = 1.0
    sigma_b: float = 1.0
    alpha: float = 0.3
    boost_mean: float = 1.0
    boost_sd: float = 1.0
    theta: float = 1.0
    noise_sd: float = 0.5
    affinity_mean: float = 0.0
    affinity_sd: float = 0.0
    horizon_t: int = 500
    master_seed: int = 0
    standardize_scale: bool = True

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise InvalidParamsError("group sizes must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParamsError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.boost_mean <= 0.0 or self.boost_sd <= 0.0:
            raise InvalidParamsError("boost mean and sd must be positive")
        if self.sigma_a < 0.0 or self.sigma_b < 0.0:
            raise InvalidParamsError("ability sds must be nonnegative")
        if self.noise_sd < 0.0 or self.affinity_sd < 0.0:
            raise InvalidParamsError("noise and affinity sds must be nonnegative")
        if self.theta < 0.0:
            raise InvalidParamsError(f"theta must be nonnegative, got {self.theta}")
        if self.horizon_t < 1:
            raise InvalidParamsError(f"horizon_t must be >= 1, got {self.horizon_t}")

    @property
    def n_total(self) -> int:
        return self.n_a + self.n_b

    @property
    def n_admits(self) -> int:
        return int(self.alpha * self.n_total)


@dataclass
class RichPopulation:
    """Ability, group label, admission flag and college boost per individual."""

    ability: np.ndarray
    group: np.ndarray
    admitted: np.ndarray
    boost: np.ndarray

    @property
    def n_total(self) -> int:
        return len(self.ability)

    def mask(self, which: int) -> np.ndarray:
        return self.group == which


@dataclass(frozen=True)
class RichMetrics:
    """Per-generation summary, computed on the abilities that drove admission."""

    generation: int
    mean_a: float
    mean_b: float
    sd_a: float
    sd_b: float
    admits_a: int
    admits_b: int
    leader: Group | None
    leading_share: float


def init_population(params: RichParams, rng: np.random.Generator) -> RichPopulation:
    """Fresh generation-0 population with Gaussian abilities per group."""
    ability = np.concatenate([
        rng.normal(params.mu_a, params.sigma_a, params.n_a),
        rng.normal(params.mu_b, params.sigma_b, params.n_b),
    ])
    group = np.concatenate([
        np.full(params.n_a, GROUP_A, dtype=np.int8),
        np.full(params.n_b, GROUP_B, dtype=np.int8),
    ])
    n = params.n_total
    return RichPopulation(ability, group, np.zeros(n, dtype=bool), np.zeros(n))


def select_admits(population: RichPopulation, alpha: float) -> RichPopulation:
    """Admit the top floor(alpha * population) by standardized ability.

    Standardization is global (one population-wide z-score), so one shared
    threshold applies to both groups and the ranking matches the raw
    ability order. Ties break deterministically: higher ability, then
    group A, then original index.
    """
    n = population.n_total
    if n == 0:
        raise InvalidParamsError("population is empty")
    k = int(alpha * n)
    sd = population.ability.std()
    z = (population.ability - population.ability.mean()) / sd if sd > 0 else population.ability
    order = np.lexsort((np.arange(n), population.group, -z))
    admitted = np.zeros(n, dtype=bool)
    admitted[order[:k]] = True
    return replace(population, admitted=admitted)


def college_boosts(population: RichPopulation, params: RichParams, rng: np.random.Generator) -> np.ndarray:
    """Gamma boosts for this generation's admits; zero for everyone else.

    Shape/scale are boost_mean^2/boost_sd^2 and boost_sd^2/boost_mean, so
    draws have mean boost_mean and variance boost_sd^2.
    """
    shape = params.boost_mean**2 / params.boost_sd**2
    scale = params.boost_sd**2 / params.boost_mean
    boosts = np.zeros(population.n_total)
    idx = np.flatnonzero(population.admitted)
    boosts[idx] = rng.gamma(shape, scale, len(idx))
    return boosts


def _admit_leader(admits_a: int, admits_b: int) -> Group | None:
    if admits_a > admits_b:
        return Group.A
    if admits_b > admits_a:
        return Group.B
    return None


def ability_leader(population: RichPopulation) -> Group | None:
    """Alternative leader notion: the group with the higher mean ability."""
    mean_a = population.ability[population.mask(GROUP_A)].mean()
    mean_b = population.ability[population.mask(GROUP_B)].mean()
    if mean_a > mean_b:
        return Group.A
    if mean_b > mean_a:
        return Group.B
    return None


def step_generation(
    population: RichPopulation,
    params: RichParams,
    prev_leader: Group | None,
    rng: np.random.Generator,
) -> tuple[RichPopulation, RichMetrics]:
    """Advance one generation; admissions must already be decided.

    ability' = ability + theta * boost + noise (+ affinity for the
    previous leader's non-admits), re-standardized to the population
    z-score scale unless ``standardize_scale`` is off. The returned
    metrics describe the generation being advanced, including the leader
    its admit counts define for the following step.
    """
    mask_a = population.mask(GROUP_A)
    mask_b = population.mask(GROUP_B)
    admits_a = int((population.admitted & mask_a).sum())
    admits_b = int((population.admitted & mask_b).sum())
    leader = _admit_leader(admits_a, admits_b)
    total_admits = admits_a + admits_b
    if leader is None or total_admits == 0:
        share = 0.5
    else:
        share = max(admits_a, admits_b) / total_admits
    metrics = RichMetrics(
        generation=-1,
        mean_a=float(population.ability[mask_a].mean()),
        mean_b=float(population.ability[mask_b].mean()),
        sd_a=float(population.ability[mask_a].std()),
        sd_b=float(population.ability[mask_b].std()),
        admits_a=admits_a,
        admits_b=admits_b,
        leader=leader,
        leading_share=share,
    )

    boosts = college_boosts(population, params, rng)
    new_ability = population.ability + params.theta * boosts
    new_ability = new_ability + rng.normal(0.0, params.noise_sd, population.n_total)
    if prev_leader is not None and (params.affinity_mean != 0.0 or params.affinity_sd != 0.0):
        code = GROUP_A if prev_leader is Group.A else GROUP_B
        favored = (~population.admitted) & (population.group == code)
        new_ability[favored] += rng.normal(params.affinity_mean, params.affinity_sd, int(favored.sum()))
    if params.standardize_scale:
        spread = new_ability.std()
        if spread > 0.0:
            new_ability = (new_ability - new_ability.mean()) / spread

    n = population.n_total
    new_pop = RichPopulation(
        ability=new_ability,
        group=population.group,
        admitted=np.zeros(n, dtype=bool),
        boost=np.zeros(n),
    )
    return new_pop, metrics


def run_rich(
    params: RichParams,
    run_index: int = 0,
    snapshot_generations: tuple[int, ...] = (),
) -> tuple[list[RichMetrics], dict[int, RichPopulation]]:
    """Simulate the configured horizon; deterministic per (seed, run_index).

    Returns per-generation metrics plus, for each requested generation,
    a population snapshot taken right after that generation's admissions
    (so the admit flags defining the threshold are preserved).
    """
    rng = make_rng(params.master_seed, run_index)
    population = init_population(params, rng)
    wanted = set(snapshot_generations)
    history: list[RichMetrics] = []
    snapshots: dict[int, RichPopulation] = {}
    prev_leader: Group | None = None
    for t in range(params.horizon_t):
        population = select_admits(population, params.alpha)
        if t in wanted:
            snapshots[t] = RichPopulation(
                ability=population.ability.copy(),
                group=population.group.copy(),
                admitted=population.admitted.copy(),
                boost=population.boost.copy(),
            )
        population, metrics = step_generation(population, params, prev_leader, rng)
        metrics = replace(metrics, generation=t)
        prev_leader = metrics.leader
        history.append(metrics)
    return history, snapshots
