"""Model definition: dataset container, parameter layout and log posterior."""

from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ModelLayout, ParameterSet
from turbidvar.services.model.posterior import (
    TurbidityPosterior,
    complete_data,
    conditional_mean,
    conditional_variance,
    grad_log_posterior,
    log_posterior,
)

__all__ = [
    "Dataset",
    "ModelLayout",
    "ParameterSet",
    "TurbidityPosterior",
    "complete_data",
    "conditional_mean",
    "conditional_variance",
    "grad_log_posterior",
    "log_posterior",
]
