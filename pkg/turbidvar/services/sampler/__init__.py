"""Hamiltonian Monte Carlo sampler with warmup adaptation."""

from turbidvar.services.sampler.nuts import LeapfrogResult, leapfrog
from turbidvar.services.sampler.service import PosteriorDraws, SamplerService, run_chains

__all__ = ["LeapfrogResult", "PosteriorDraws", "SamplerService", "leapfrog", "run_chains"]
