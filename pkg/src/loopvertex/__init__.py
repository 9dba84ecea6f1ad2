"""Loop vertex representation and expansion for the zero-dimensional
(phibar phi)^p model: exact combinatorics, the Fuss-Catalan kernel, jet
derivatives, quadrature oracles, and the convergent tree expansion of
log Z, all cross-checked against each other."""

__version__ = "0.1.0"

from .errors import (ContractError, DomainError, LoopVertexError,
                     NumericalError, SizeError, SlowConvergenceWarning)
from .exact import (binom_pn_n, cayley_count, fuss_catalan_number,
                    majorant_partial_sum, perturbative_partial_sum,
                    z_series_coefficient)
from .jets import (BivariateJet, UnivariateJet, corner_derivative, e_jet,
                   s_derivatives)
from .kernel import (CutPlanePoint, KernelEval, ModelSpec, RayEvaluator,
                     bound_constant, classify, e_eval, f_eval, radius,
                     s_eval, t_closed_form, t_series, t_solve)
from .lve import (LabeledTree, LveConfig, MCEstimate, OrientedTree,
                  ReplicaCovariance, covariance, enumerate_trees,
                  log_z_partial, order_one_ibp_check, orient_tree,
                  sample_replicas, tree_integrand, tree_term)
from .oracle import (QuadratureResult, g2_lvr, g2_oracle,
                     gallavotti_free_energy, z_lvr, z_oracle)

__all__ = [
    "__version__",
    "LoopVertexError", "ContractError", "DomainError", "NumericalError",
    "SizeError", "SlowConvergenceWarning",
    "binom_pn_n", "cayley_count", "fuss_catalan_number",
    "majorant_partial_sum", "perturbative_partial_sum", "z_series_coefficient",
    "BivariateJet", "UnivariateJet", "corner_derivative", "e_jet",
    "s_derivatives",
    "CutPlanePoint", "KernelEval", "ModelSpec", "RayEvaluator",
    "bound_constant", "classify", "e_eval", "f_eval", "radius", "s_eval",
    "t_closed_form", "t_series", "t_solve",
    "LabeledTree", "LveConfig", "MCEstimate", "OrientedTree",
    "ReplicaCovariance", "covariance", "enumerate_trees", "log_z_partial",
    "order_one_ibp_check", "orient_tree", "sample_replicas",
    "tree_integrand", "tree_term",
    "QuadratureResult", "g2_lvr", "g2_oracle", "gallavotti_free_energy",
    "z_lvr", "z_oracle",
]
