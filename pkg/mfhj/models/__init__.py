from .measure import SpinMeasure, custom_atoms, custom_density, dichotomic, equally_spaced_atoms, uniform
from .single_party import critical_time, free_energy, hopf_lax, self_consistent_M
from .finite_n import FiniteSystem, convergence_study, exact_pressure, phi_n_quadrature, u_n_quadrature
from .shock import characteristic, detect_shock, entropy_scan
from .bipartite import BipartiteParams, coupled_fixed_point, exact_bipartite_pressure, minmax_solve


__all__ = [
    "SpinMeasure", "dichotomic", "uniform", "equally_spaced_atoms", "custom_atoms", "custom_density",
    "hopf_lax", "self_consistent_M", "free_energy", "critical_time",
    "FiniteSystem", "exact_pressure", "phi_n_quadrature", "u_n_quadrature", "convergence_study",
    "characteristic", "detect_shock", "entropy_scan",
    "BipartiteParams", "coupled_fixed_point", "minmax_solve", "exact_bipartite_pressure",
]
