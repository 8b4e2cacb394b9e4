from .schemas_reportes import (
    ParVerificado,
    ReporteOraculo,
    TripleJacobi,
    ReporteJacobi,
    DiferenciaVariable,
    ReporteComparacion,
    VentanaValidez,
    ReporteIncertidumbre,
    ReporteEnergia,
    ReporteL0,
    Reporte2D,
    FilaBarrido,
    ResumenBarrido,
    RunManifest
)
from .schemas_integrador import (
    MetodoIntegracion,
    MotivoFin,
    IntegratorConfig
)

# schemas_escenario depende de servicios; se importa directamente desde su módulo

__all__ = [
    "ParVerificado",
    "ReporteOraculo",
    "TripleJacobi",
    "ReporteJacobi",
    "DiferenciaVariable",
    "ReporteComparacion",
    "VentanaValidez",
    "ReporteIncertidumbre",
    "ReporteEnergia",
    "ReporteL0",
    "Reporte2D",
    "FilaBarrido",
    "ResumenBarrido",
    "RunManifest",
    "MetodoIntegracion",
    "MotivoFin",
    "IntegratorConfig"
]
