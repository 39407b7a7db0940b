"""Exact calculator for classes of constructible sets over F_p or Q.

Modules, bottom up: ``poly`` (sparse polynomials), ``gf`` (finite fields),
``formula`` (first-order formulas), ``constructible`` (cells and sets),
``qe`` (quantifier elimination), ``k0`` (ring elements and comparison),
``realize`` (point counts and derived invariants), ``cli``.
"""

from .constructible import Cell, ConstructibleSet
from .errors import InputError, K0CalcError, NotABijection, ParseError, SizeLimit
from .formula import parse, parse_polynomial, pretty
from .gf import build_field
from .k0 import (BijectionCertificate, CertificateRegistry, K0Element, Verdict, base_extend, class_of,
                 compare, register_bijection)
from .poly import FieldTag, Polynomial
from .qe import decide, definably_equivalent, eliminate_all, quantifier_free
from .realize import (CountTable, NoFit, NoSeparation, count_class, count_table, euler_characteristic,
                      fibration_check, interpolate_qpoly, poincare_proxy, separate)

__all__ = [
    "BijectionCertificate", "Cell", "CertificateRegistry", "ConstructibleSet", "CountTable", "FieldTag",
    "InputError", "K0CalcError", "K0Element", "NoFit", "NoSeparation", "NotABijection", "ParseError",
    "Polynomial", "SizeLimit", "Verdict", "base_extend", "build_field", "class_of", "compare", "count_class",
    "count_table", "decide", "definably_equivalent", "eliminate_all", "euler_characteristic",
    "fibration_check", "interpolate_qpoly", "parse", "parse_polynomial", "poincare_proxy", "pretty",
    "quantifier_free", "register_bijection", "separate",
]

__version__ = "0.1.0"
