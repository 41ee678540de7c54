"""Hierarchies of Poisson brackets on rational Weyl functions.

Subpackages cover: rational-function arithmetic (`ratfun`), the bracket
engine and structure matrices (`brackets`), Poisson-structure verification
(`verify`), Camassa-Holm peakons and the discrete string (`peakon`), the open
Toda lattice (`toda`), periodic KdV monodromy (`kdv`), and the batch CLI
(`cli`).  Hot numerical kernels live in `_kernels` with a compiled core and a
pure-Python fallback selected at import.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
from .ratfun import WeylRational, from_pole_residue  # noqa: F401
from .brackets import (  # noqa: F401
    BracketSpec,
    QuadratureConfig,
    StructureMatrix,
    second_kind_bracket,
    structure_matrix,
    third_kind_bracket_closed,
    third_kind_bracket_quadrature,
    toda_restricted_bracket,
)
