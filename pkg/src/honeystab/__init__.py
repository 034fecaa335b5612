"""Dirac lattice models on the dimer chain and the honeycomb, their SL(2,C)
stabilizer deformations, and numerical checks of the resulting invariants."""

__version__ = "0.1.0"

from .algebra import (EPS_ALG, METRIC, SIGMA0, SIGMA1, SIGMA2, SIGMA3, GammaSet,  # noqa: E402
                      SingularTransformError, StabilizerElement, conjugate, exp_generator,
                      gamma_set, inverse, lorentz_action, pauli, sigma_action)
from .lattice import (CouplingTable, Hop, KineticVector, LatticeModel, base_couplings,  # noqa: E402
                      bloch_at_k, bloch_hamiltonian, dirac_points, dispersion, kinetic_of_k,
                      mass_shell_residual, structure_factor)
from .stabilizer import (TransformedModel, boosted_couplings, fw_transform,  # noqa: E402
                         rotated_couplings, transform_bloch, transformed_couplings)

__all__ = [
    "EPS_ALG", "METRIC", "SIGMA0", "SIGMA1", "SIGMA2", "SIGMA3", "GammaSet",
    "SingularTransformError", "StabilizerElement", "conjugate", "exp_generator", "gamma_set",
    "inverse", "lorentz_action", "pauli", "sigma_action", "CouplingTable", "Hop",
    "KineticVector", "LatticeModel", "base_couplings", "bloch_at_k", "bloch_hamiltonian",
    "dirac_points", "dispersion", "kinetic_of_k", "mass_shell_residual", "structure_factor",
    "TransformedModel", "boosted_couplings", "fw_transform", "rotated_couplings",
    "transform_bloch", "transformed_couplings",
]
