"""MIMO detection by simulated bifurcation on the Ising formulation.

The package turns maximum-likelihood MIMO detection into an Ising
ground-state search, solves it with a digital simulated bifurcation
solver, and benchmarks the result (BER vs. SNR) against a linear MMSE
baseline and an exhaustive ML oracle.
"""

from sbmimo.ising import IsingModel, energy, validate
from sbmimo.sb import SBParams, SBState, SolveResult, solve
from sbmimo.channel import (
    Constellation,
    ChannelInstance,
    RealizedSystem,
    get_constellation,
    modulate,
    demodulate_hard,
    realify,
    sample_channel,
    sample_instance,
    noise_variance_for_snr,
)
from sbmimo.reduction import (
    ReductionContext,
    build_ising,
    regularize,
    spins_to_bits,
    symbols_to_spins,
)
from sbmimo.detectors import DetectionResult, mmse_detect, ml_oracle, sb_detect
from sbmimo.bench import SweepConfig, BerRecord, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "IsingModel",
    "energy",
    "validate",
    "SBParams",
    "SBState",
    "SolveResult",
    "solve",
    "Constellation",
    "ChannelInstance",
    "RealizedSystem",
    "get_constellation",
    "modulate",
    "demodulate_hard",
    "realify",
    "sample_channel",
    "sample_instance",
    "noise_variance_for_snr",
    "ReductionContext",
    "build_ising",
    "regularize",
    "spins_to_bits",
    "symbols_to_spins",
    "DetectionResult",
    "mmse_detect",
    "ml_oracle",
    "sb_detect",
    "SweepConfig",
    "BerRecord",
    "run_sweep",
    "write_csv",
]
