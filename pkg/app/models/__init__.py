from .momentos import (
    MomentIndex,
    SystemState,
    enumerate_moments,
    indices_par,
    margen_incertidumbre,
    uncertainty_ok
)
from .expresiones import (
    SymbolicExpression,
    Termino,
    G,
    simbolo,
    constante
)

__all__ = [
    "MomentIndex",
    "SystemState",
    "enumerate_moments",
    "indices_par",
    "margen_incertidumbre",
    "uncertainty_ok",
    "SymbolicExpression",
    "Termino",
    "G",
    "simbolo",
    "constante"
]
