"""Stylized meritocratic-selection dynamics: simulation and analysis toolkit."""

from .core import (
    Group,
    GroupState,
    ModelParams,
    Regime,
    TransitionModel,
    classify_regime,
    leader_of,
)
from .allocation import (
    AllocationResult,
    PropertyReport,
    allocate_integer,
    allocate_real,
    check_properties,
)
from .meanfield import (
    ConvergenceReport,
    MeanFieldPoint,
    aa_equilibrium_separation_qpos,
    aa_fixed_point,
    aa_separation_lower_bound,
    ea_fixed_point,
    epsilon_threshold,
    iterate,
    step_aa,
    step_ea,
)
from .stochastic import (
    DeltaMoments,
    SimConfig,
    Trajectory,
    conditional_delta_moments,
    derive_run_seed,
    make_rng,
    run_ensemble,
    run_trajectory,
    sample_step,
)
from .bounds import (
    HittingTimeStats,
    ParityBoundInput,
    empirical_hitting_times,
    f_const,
    phi_c,
    separation_prob_ps,
    time_to_parity_bound,
    time_to_separation_bound,
)
from .richmodel import (
    RichMetrics,
    RichParams,
    RichPopulation,
    init_population,
    run_rich,
    select_admits,
    step_generation,
)
from .experiments import (
    ExperimentSpec,
    ResultTable,
    list_presets,
    preset_spec,
    run_experiment,
    write_results,
)
from . import errors

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
