"""novikit: exact arithmetic over Novikov fields.

Valuated formal series, moment polytopes, bulk-deformed superpotentials with
certified critical points, barcodes of filtered complexes, semisimple algebra
splitting with mod-p transfer, and the Z/p Tate construction on model
complexes.  Everything is exact rational arithmetic; nothing floats.
"""

from .errors import NovikitError
from .fields import QQ, QI, GaussianRat, PrimeField, ExtensionField, extend_field, reduce_mod_p
from .series import NovikovSeries
from .polytope import Polytope, parse_polytope, preset

__all__ = [
    "NovikitError",
    "QQ",
    "QI",
    "GaussianRat",
    "PrimeField",
    "ExtensionField",
    "extend_field",
    "reduce_mod_p",
    "NovikovSeries",
    "Polytope",
    "parse_polytope",
    "preset",
]

__version__ = "0.1.0"
