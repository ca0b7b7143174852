"""Gamma calculus for mean-field information metrics on finite graphs."""

__version__ = "0.1.0"

from .curvature import global_curvature, kappa, local_curvature
from .energies import energy_from_config, shannon
from .errors import MfigError
from .gamma import build_context, gamma1, gamma2
from .graphs import Graph, build_standard, cartesian_product, graph_from_spec
from .means import mean_from_name

__all__ = [
    "Graph", "MfigError", "build_context", "build_standard", "cartesian_product",
    "energy_from_config", "gamma1", "gamma2", "global_curvature", "graph_from_spec",
    "kappa", "local_curvature", "mean_from_name", "shannon", "__version__",
]
