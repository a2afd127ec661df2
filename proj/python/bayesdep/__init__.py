"""Bayesian dependence measures: evidence for dependence between two observed
systems from paired data."""

from ._core import (
    CopulaFit,
    DependenceMeasure,
    combine,
    copula_fit,
    copula_lnbf,
    functional_lnbf,
    gen_functional,
    gen_gamma_tcopula,
    gen_noisy_normal,
    gen_phase,
    gen_rossler,
    known_normal_lnbf,
    n0_curve,
    nested_bic_lnbf,
    noisy_normal_lnbf,
    run_sweep,
    vonmises_logr,
    __version__,
)

__all__ = [
    "CopulaFit",
    "DependenceMeasure",
    "combine",
    "copula_fit",
    "copula_lnbf",
    "functional_lnbf",
    "gen_functional",
    "gen_gamma_tcopula",
    "gen_noisy_normal",
    "gen_phase",
    "gen_rossler",
    "known_normal_lnbf",
    "n0_curve",
    "nested_bic_lnbf",
    "noisy_normal_lnbf",
    "run_sweep",
    "vonmises_logr",
    "__version__",
]
