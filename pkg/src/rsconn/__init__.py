"""Exact normal forms for regular singular systems theta y = A(x) y.

Coefficients live in truncated parameter algebras Q[t1..tr]/m^(k+1); all
arithmetic is exact.
"""

from .connection import (Connection, dual, exponents, gauge_transform, internal_hom, rank_one_class,
                         residue, tensor, truncate_params)
from .equivalence import ZRepData, from_representation, hom_space, horizontal_sections, to_representation
from .errors import (IncompatibleAlgebraError, InternalError, NonUnitError, NotLogarithmicError, ParseError,
                     PreconditionError, ResonanceError, RSConnError, StepBudgetExceeded,
                     UnsupportedExponentFieldError)
from .io import parse_system, serialize_system
from .linalg import LocalMatrix, block_decompose, kernel, lift_idempotents, rational_eigenvalues, sylvester_solve
from .normalize import EulerForm, deligne_manin, euler_reduce, shear_once
from .p1 import P1Lattice, infinity_exponents, p1_lattice
from .ring import LocalElem, ParamAlgebra
from .series import LaurentSeries, SeriesMatrix, dlog, series_inv, series_mul

__version__ = "0.1.0"

__all__ = [
    "Connection", "dual", "exponents", "gauge_transform", "internal_hom", "rank_one_class", "residue", "tensor",
    "truncate_params", "ZRepData", "from_representation", "hom_space", "horizontal_sections", "to_representation",
    "IncompatibleAlgebraError", "InternalError", "NonUnitError", "NotLogarithmicError", "ParseError",
    "PreconditionError", "ResonanceError", "RSConnError", "StepBudgetExceeded", "UnsupportedExponentFieldError",
    "parse_system", "serialize_system", "LocalMatrix", "block_decompose", "kernel", "lift_idempotents",
    "rational_eigenvalues", "sylvester_solve", "EulerForm", "deligne_manin", "euler_reduce", "shear_once",
    "P1Lattice", "infinity_exponents", "p1_lattice", "LocalElem", "ParamAlgebra", "LaurentSeries", "SeriesMatrix",
    "dlog", "series_inv", "series_mul",
]
