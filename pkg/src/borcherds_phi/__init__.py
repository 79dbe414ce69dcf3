"""Exact-arithmetic toolkit for the Borcherds Phi-function on the
Enriques-lattice period domain: q-series, lattices, embeddings, theta
constants, ternary-quadric resultants, and the identity checks tying
them together."""

from .qseries import (
    GaussInt,
    ExactSeries,
    factor_power,
    eta_series,
    eta_quotient,
    c_coeffs,
)
from .multiseries import MultiSeries
from . import lattice  # noqa: F401  (submodules embed/phi/theta/resultant/kummer import lazily below)

try:  # during incremental builds some submodules may not exist yet
    from . import embed, phi, theta, resultant, kummer  # noqa: F401
except ImportError:  # pragma: no cover
    pass

__all__ = [
    "GaussInt",
    "ExactSeries",
    "MultiSeries",
    "factor_power",
    "eta_series",
    "eta_quotient",
    "c_coeffs",
    "lattice",
    "embed",
    "phi",
    "theta",
    "resultant",
    "kummer",
]

__version__ = "0.1.0"
