"""Bayesian predictive inference for finite-population means under informative PPS sampling."""

from ._core import (
    ConstraintViolation,
    DecompositionError,
    DomainError,
    ExperimentCell,
    FinitePopulation,
    GibbsConfig,
    HtInterval,
    InfeasibleDesign,
    IntervalKind,
    ModelVariant,
    MvnOptions,
    NormConstConfig,
    NumericalFault,
    ObservedData,
    RandomStream,
    SuperParams,
    cell_metrics,
    emit_outputs,
    generate_population,
    ht_estimate,
    ig_infer,
    inclusion_probs,
    load_config,
    log_C,
    nig_infer,
    run_cell,
    systematic_pps,
)

__all__ = [name for name in dir() if not name.startswith("_")]
