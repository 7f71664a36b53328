"""Quasi-uniform scatterings on weight polytope boundaries, with exact
nearest-center search."""

from .core import (BOUNDARY, COSINE, EUCLIDEAN, INTERIOR, METRICS, OUTSIDE,
                   Permutation, ScaledPoint, YoungDiagram, distance,
                   dominant_sort, membership, polytope_center)
from .enumeration import (LevelSet, TableauWord, boundary_rule,
                          enumerate_dominant_boundary, enumerate_level,
                          initial_tableau)
from .oracle import (OracleConfig, brute_boundary, brute_nearest,
                     brute_nn_distances, brute_nn_sq_numerators,
                     sample_queries)
from .scattering import (PrefixStats, Scattering, UniformityReport,
                         build_scattering, embed_diagram, iota_embed,
                         is_subsequence, orbit_size, verify_scattering,
                         weyl_orbit)
from .search import (FaceDescriptor, QueryResult, cosine_nearest,
                     expand_neighbors, locate_face, nearest_center,
                     round_in_face)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY", "COSINE", "EUCLIDEAN", "INTERIOR", "METRICS", "OUTSIDE",
    "Permutation", "ScaledPoint", "YoungDiagram", "distance", "dominant_sort",
    "membership", "polytope_center",
    "LevelSet", "TableauWord", "boundary_rule", "enumerate_dominant_boundary",
    "enumerate_level", "initial_tableau",
    "OracleConfig", "brute_boundary", "brute_nearest", "brute_nn_distances",
    "brute_nn_sq_numerators", "sample_queries",
    "PrefixStats", "Scattering", "UniformityReport", "build_scattering",
    "embed_diagram", "iota_embed", "is_subsequence", "orbit_size",
    "verify_scattering", "weyl_orbit",
    "FaceDescriptor", "QueryResult", "cosine_nearest", "expand_neighbors",
    "locate_face", "nearest_center", "round_in_face",
    "__version__",
]
