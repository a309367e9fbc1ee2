from .exponent import convergence_verdict, exponent_model_integral, exponent_study
from .functional import EnergyParams, EnergyResult, chord_squared, energy, integrand
from .ohara import ohara_energy
from .taylor import TaylorTerms, taylor_terms
from .torus import reduced_integrand, torus_energy_reduced

__all__ = [
    "EnergyParams", "EnergyResult", "TaylorTerms", "chord_squared", "convergence_verdict",
    "energy", "exponent_model_integral", "exponent_study", "integrand", "ohara_energy",
    "reduced_integrand", "taylor_terms", "torus_energy_reduced",
]
