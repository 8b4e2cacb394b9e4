from .corchetes_service import (
    CorchetesService,
    NormalizacionCorchete,
    bracket_moments,
    kcal_coefficient,
    k_coefficient_1dof
)
from .oraculo_weyl_service import (
    OraculoWeylService,
    get_oraculo_service
)
from .hamiltoniano_service import (
    ClassicalModel,
    build_HQ_taylor,
    build_HQ_hydrogen,
    classical_limit,
    evaluate,
    modelo_hidrogeno,
    modelo_oscilador
)
from .ecuaciones_service import (
    EffectiveSystem,
    generate,
    restrict,
    compare_systems,
    energy_closure
)
from .sistemas_referencia import reference_system
from .integrador_service import (
    Trajectory,
    integrate,
    monitor_validity,
    monitor_uncertainty
)

# escenarios_service importa schemas_escenario, que depende de este paquete:
# se importa directamente desde su módulo

__all__ = [
    "CorchetesService",
    "NormalizacionCorchete",
    "bracket_moments",
    "kcal_coefficient",
    "k_coefficient_1dof",
    "OraculoWeylService",
    "get_oraculo_service",
    "ClassicalModel",
    "build_HQ_taylor",
    "build_HQ_hydrogen",
    "classical_limit",
    "evaluate",
    "modelo_hidrogeno",
    "modelo_oscilador",
    "EffectiveSystem",
    "generate",
    "restrict",
    "compare_systems",
    "energy_closure",
    "reference_system",
    "Trajectory",
    "integrate",
    "monitor_validity",
    "monitor_uncertainty"
]
