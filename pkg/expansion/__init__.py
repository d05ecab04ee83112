"""Special-function kernels and tail expansions."""
from .kernels import SQRT_2PI, ExpansionError, gaussian_kernels, normal_cdf, gamma_function
from .terms import (
    sfh_expansion_2d, convex_expansion_2d, expansion_3d, joint_exceedance_asymptotic,
    tangent_pair_coefficient, tangent_pair_expansion, tangent_joint_expansion, euler_density_2d,
    polygon_upper_bound, dihedral_expansion, rice_segment_bound,
)

__all__ = [
    "SQRT_2PI", "ExpansionError", "gaussian_kernels", "normal_cdf", "gamma_function",
    "sfh_expansion_2d", "convex_expansion_2d", "expansion_3d", "joint_exceedance_asymptotic",
    "tangent_pair_coefficient", "tangent_pair_expansion", "tangent_joint_expansion", "euler_density_2d",
    "polygon_upper_bound", "dihedral_expansion", "rice_segment_bound",
]
