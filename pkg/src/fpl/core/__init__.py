"""Domain types shared by every part of the library."""

from .atom import (
    AnyAtom,
    Atom,
    AtomError,
    DiagonalCov,
    DiagonalStdCov,
    FullCov,
    TopAtom,
    atom_truncate,
    format_number,
    linear_atom,
)
from .formula import (
    AtomRef,
    Concat,
    Formula,
    FormulaError,
    Or,
    Top,
    Until,
    atoms,
    count_ops,
    formula_dim,
    h_min,
    is_atomic,
    is_lnf,
)
from .paths import INF, ExtendedDistance, FuzzyPath, format_distance
from .plf import DOMAIN_TOL, OutOfDomain, PiecewiseLinearFn, eval_plf
from .trajectory import Trajectory, traj_shift

__all__ = [name for name in dir() if not name.startswith("_")]
