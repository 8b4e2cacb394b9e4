"""
Schemas del integrador numérico
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.config import settings


class MetodoIntegracion(str, Enum):
    """Métodos disponibles"""
    RK4 = "rk4"
    DOPRI5 = "dopri5"


class MotivoFin(str, Enum):
    """Razón por la que termina una trayectoria"""
    T_FIN = "t_fin"
    R_MIN = "r_min"
    PASO_MINIMO = "paso_minimo"
    NO_FINITO = "no_finito"
    MAX_PASOS = "max_pasos"
    DIVERGENCIA = "divergencia"  # algún |G| superó la cota de momentos

    @property
    def es_normal(self) -> bool:
        """Término sin falla numérica: tiempo final alcanzado o expansión agotada"""
        return self in (MotivoFin.T_FIN, MotivoFin.DIVERGENCIA)


class IntegratorConfig(BaseModel):
    """
    Configuración de una corrida.

    Con rk4 el paso fijo es paso_inicial (por defecto 1e-3); con dopri5
    paso_inicial es opcional y se estima a partir del estado inicial.
    """

    metodo: MetodoIntegracion = Field(
        default=MetodoIntegracion.DOPRI5,
        description="rk4 (paso fijo) o dopri5 (par encajado 5(4) adaptativo)"
    )

    atol: float = Field(default=1e-10, gt=0, description="Tolerancia absoluta")
    rtol: float = Field(default=1e-10, gt=0, description="Tolerancia relativa")

    paso_inicial: Optional[float] = Field(None, gt=0, description="Paso inicial (o fijo con rk4)")
    paso_max: Optional[float] = Field(None, gt=0, description="Paso máximo del método adaptativo")
    paso_min: float = Field(default=1e-14, gt=0, description="Por debajo de este paso se aborta")

    t_end: float = Field(..., gt=0, description="Tiempo final")
    r_min: float = Field(default_factory=lambda: settings.R_MIN, gt=0, description="Guarda de singularidad")
    cota_momentos: float = Field(
        default_factory=lambda: settings.COTA_MOMENTOS, gt=0,
        description="Se detiene la corrida cuando algún |G| supera este valor"
    )

    # Monitores
    umbral: float = Field(default_factory=lambda: settings.UMBRAL_VALIDEZ, gt=0)
    p_floor: float = Field(default_factory=lambda: settings.P_FLOOR, gt=0)

    max_pasos: int = Field(default=2_000_000, ge=1)
    remuestreo: Optional[int] = Field(
        None, ge=2, description="Número de muestras uniformes para gráficos (None = sin remuestreo)"
    )

    @model_validator(mode="after")
    def _validar_pasos(self):
        if self.paso_max is not None and self.paso_inicial is not None and self.paso_inicial > self.paso_max:
            raise ValueError("paso_inicial no puede superar paso_max")
        return self

    @property
    def paso_fijo(self) -> float:
        return self.paso_inicial if self.paso_inicial is not None else 1e-3
