"""Generalised hyperbolic functions and the spectral theory of (-iD)^p."""

from .cyclo import RootSystem, dft_matrix, kp_component, roots_of_unity
from .pfun import PFunQuery, eval_all, eval_c, eval_s, euler_reconstruct, identity_residuals_p3, w_matrix

__all__ = [
    "PFunQuery",
    "RootSystem",
    "dft_matrix",
    "euler_reconstruct",
    "eval_all",
    "eval_c",
    "eval_s",
    "identity_residuals_p3",
    "kp_component",
    "roots_of_unity",
    "w_matrix",
]
__version__ = "0.1.0"
