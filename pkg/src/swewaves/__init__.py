"""Exact wave fans and wave interactions for shallow water over a bottom step.

Modules:
    states: state type, eigenstructure and domain labels.
    curves: wave curves and the stationary contact across the step.
    riemann: step Riemann problem constructions and checks.
    interaction_rs, interaction_ss: a forward rarefaction or shock meeting a descending step.
    penetration: shocks travelling through rarefaction fans.
    fv: well-balanced finite-volume oracle.
    cli: command-line front end.
"""

from .states import (
    G_DEFAULT,
    DomainError,
    NumericalFailure,
    State,
    UnsupportedConfiguration,
)

__all__ = ["G_DEFAULT", "DomainError", "NumericalFailure", "State", "UnsupportedConfiguration"]
__version__ = "0.1.0"
