"""
turbidvar

Bayesian vector autoregressive models with conditionally heteroskedastic
errors for environmental sensor time series.
"""

__version__ = "0.1.0"
