"""Forecast uncompensated price elasticities from income elasticities under
additive preferences, with Monte-Carlo credible bands and a numerical
utility-maximization oracle."""

__version__ = "0.1.0"

from .core import (BundleSystem, ElasticityError, ElasticityInputs, ElasticityMatrix,
                   cross_price_elasticity, divisia_indices, frisch_deflator, full_matrix,
                   marginal_share, own_price, own_price_elasticity)
from .montecarlo import (CredibleBand, ParamDistributions, SimulationConfig,
                         band_width_profile, sample_params, sensitivity_sweep,
                         simulate_cross_band, simulate_own_band)

__all__ = [
    "BundleSystem", "CredibleBand", "ElasticityError", "ElasticityInputs",
    "ElasticityMatrix", "ParamDistributions", "SimulationConfig", "band_width_profile",
    "cross_price_elasticity", "divisia_indices", "frisch_deflator", "full_matrix",
    "marginal_share", "own_price", "own_price_elasticity", "sample_params",
    "sensitivity_sweep", "simulate_cross_band", "simulate_own_band",
]
