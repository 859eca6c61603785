"""EEG seizure-detection toolkit.

Sub-band decomposition with a tunable-Q wavelet transform, a family of
thirteen fuzzy-entropy features with micro-benchmarks, autoencoder
feature reduction, and Sugeno neuro-fuzzy classifiers trained by hybrid
least-squares/gradient descent or by swarm optimisers, evaluated under
repeated stratified cross-validation.
"""

from .dataio import CaseSpec, Recording, SignalFrame, assemble_case, load_bonn_segment, load_csv_multichannel, window
from .entropy import ALL_KERNELS, DEFAULT_PARAMS, PRIMARY_KERNELS, EntropyParams, EntropyResult, compute
from .tqwt import SubBandSet, TqwtParams, analysis_filters, decompose, synthesize

__version__ = "0.1.0"

__all__ = [
    "CaseSpec", "Recording", "SignalFrame", "assemble_case",
    "load_bonn_segment", "load_csv_multichannel", "window",
    "ALL_KERNELS", "DEFAULT_PARAMS", "PRIMARY_KERNELS",
    "EntropyParams", "EntropyResult", "compute",
    "SubBandSet", "TqwtParams", "analysis_filters", "decompose", "synthesize",
    "__version__",
]
