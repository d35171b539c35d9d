"""Finite-blocklength simulator for bisection decoding of classical-quantum codes."""

from .decoders import BisectionDecoder
from .ensembles import Codebook, SourceEnsemble, holevo_chi, load_ensemble

__all__ = [
    "BisectionDecoder",
    "Codebook",
    "SourceEnsemble",
    "holevo_chi",
    "load_ensemble",
]

__version__ = "0.1.0"
