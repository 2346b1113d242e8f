"""Wishart laws, eigenvalue densities and Bartlett tests on irreducible symmetric cones."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    AlgebraDescriptor,
    Element,
    Family,
    SpectralDecomposition,
    determinant,
    eigenvalues,
    haar_frame,
    identity,
    inner,
    inverse,
    jordan_product,
    principal_power,
    quad_rep,
    realify,
    rel_eigenvalues,
    spectral,
    sqrt_cone,
    star,
    trace,
)
from .special import (  # noqa: E402
    SeriesResult,
    TruncationPolicy,
    beta_cone,
    det_identity_check,
    gamma_cone,
    hypergeom,
    partitions,
    pochhammer_cone,
    zonal,
)

__all__ = [
    "__version__",
    "AlgebraDescriptor",
    "Element",
    "Family",
    "SpectralDecomposition",
    "determinant",
    "eigenvalues",
    "haar_frame",
    "identity",
    "inner",
    "inverse",
    "jordan_product",
    "principal_power",
    "quad_rep",
    "realify",
    "rel_eigenvalues",
    "spectral",
    "sqrt_cone",
    "star",
    "trace",
    "SeriesResult",
    "TruncationPolicy",
    "beta_cone",
    "det_identity_check",
    "gamma_cone",
    "hypergeom",
    "partitions",
    "pochhammer_cone",
    "zonal",
]
