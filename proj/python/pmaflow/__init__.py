"""Python face of the parabolic Monge-Ampere flow laboratory.

Everything here is a thin re-export of the compiled module; the solver,
transforms, and counterexample searches all run in C++.
"""

from ._core import (
    builtin_problems,
    bump_rho,
    bump_w,
    bump_w_dx,
    bump_w_t,
    conjugate_1d,
    eig_2x2,
    grid_info,
    p6,
    radial_psi_eff,
    run,
    validate,
    version,
)

__version__ = version()

__all__ = [
    "builtin_problems",
    "bump_rho",
    "bump_w",
    "bump_w_dx",
    "bump_w_t",
    "conjugate_1d",
    "eig_2x2",
    "grid_info",
    "p6",
    "radial_psi_eff",
    "run",
    "validate",
    "version",
]
