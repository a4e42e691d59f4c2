"""Numerics workbench for random MPS, Clifford-enhanced MPS and stabilizer
ensembles: exact stabilizer Renyi entropies, replica transfer matrices,
frame potentials, purity fluctuations and entanglement cooling."""

__version__ = "0.1.0"

from .kernels import Rng
from .mps import MpsState, load_mps, sample_rmps_obc, save_mps
from .paulis import PauliString
from .replica import delta_chi, fit_power_law, obc_chain_value, pbc_delta
from .tableau import CliffordTableau, random_clifford

__all__ = [
    "CliffordTableau",
    "MpsState",
    "PauliString",
    "Rng",
    "__version__",
    "delta_chi",
    "fit_power_law",
    "load_mps",
    "obc_chain_value",
    "pbc_delta",
    "random_clifford",
    "sample_rmps_obc",
    "save_mps",
]
