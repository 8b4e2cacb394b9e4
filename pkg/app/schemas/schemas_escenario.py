"""
Schemas de escenarios del átomo de hidrógeno

Un escenario es un archivo plano CLAVE=VALOR (ver escenarios/README.md);
este modelo valida sus tipos y rechaza claves desconocidas.
"""
from enum import Enum
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.models.momentos import MomentIndex
from app.schemas.schemas_integrador import IntegratorConfig, MetodoIntegracion
from app.services.corchetes_service import NormalizacionCorchete


class ModoMomentos(str, Enum):
    """Interpretación de 'dispersiones del orden de ε'"""
    DIAGONALES = "diagonales"  # momentos diagonales de segundo orden = ε, mixtos = 0
    TODOS = "todos"            # todo momento seguido = ε


class Scenario(BaseModel):
    """
    Definición completa de una corrida.

    Las claves del archivo son los alias en mayúsculas; los momentos
    adicionales (G_a_b_c_d=valor) llegan agrupados en MOMENTOS_EXTRA.
    """
    model_config = ConfigDict(extra="forbid", populate_by_name=True, use_enum_values=False)

    # Identificación
    nombre: str = Field(..., alias="NOMBRE", min_length=1)
    descripcion: str = Field(default="", alias="DESCRIPCION")

    # Modelo
    orden: int = Field(default=2, alias="ORDEN", ge=2, description="Orden de truncamiento N")
    hbar: Union[float, Literal["auto"]] = Field(
        default_factory=lambda: settings.HBAR,
        alias="HBAR",
        description="Valor de ħ o 'auto' (ħ = 2ε)"
    )
    m: float = Field(default=1.0, alias="M", gt=0)
    k: float = Field(default=1.0, alias="K", gt=0)
    l: float = Field(default=0.0, alias="L", description="Momento angular p_θ")
    normalizacion: NormalizacionCorchete = Field(
        default_factory=lambda: NormalizacionCorchete(settings.NORMALIZACION_CORCHETE),
        alias="NORMALIZACION"
    )

    # Valores iniciales clásicos
    r0: float = Field(..., alias="R0", gt=0)
    pr0: float = Field(default=0.0, alias="PR0")
    theta0: float = Field(default=0.0, alias="THETA0")

    # Prescripción de momentos
    dispersion: Optional[float] = Field(None, alias="DISPERSION", ge=0, description="Escala ε")
    modo_momentos: ModoMomentos = Field(default=ModoMomentos.DIAGONALES, alias="MODO_MOMENTOS")
    sigma_r: Optional[float] = Field(None, alias="SIGMA_R", ge=0, description="Δr: G^{2,0,0,0} = σ_r²")
    sigma_theta: Optional[float] = Field(None, alias="SIGMA_THETA", ge=0, description="Δθ: G^{0,0,2,0} = σ_θ²")
    delta_l2: Optional[float] = Field(None, alias="DELTA_L2", ge=0, description="G^{0,0,0,2}")
    saturar: bool = Field(default=False, alias="SATURAR")
    fisico: bool = Field(default=False, alias="FISICO", description="Exige la relación de incertidumbre")
    clasico: bool = Field(default=False, alias="CLASICO", description="Todos los momentos en cero")
    momentos_extra: Dict[str, float] = Field(default_factory=dict, alias="MOMENTOS_EXTRA")

    # Integración
    metodo: MetodoIntegracion = Field(default=MetodoIntegracion.DOPRI5, alias="METODO")
    tol: float = Field(default=1e-10, alias="TOL", gt=0)
    paso: Optional[float] = Field(None, alias="PASO", gt=0)
    paso_max: Optional[float] = Field(None, alias="PASO_MAX", gt=0)
    t_fin: float = Field(..., alias="T_FIN", gt=0)
    r_min: float = Field(default_factory=lambda: settings.R_MIN, alias="R_MIN", gt=0)
    cota_momentos: float = Field(
        default_factory=lambda: settings.COTA_MOMENTOS, alias="COTA_MOMENTOS", gt=0,
        description="Cota de |G| que detiene la corrida"
    )
    umbral: float = Field(default_factory=lambda: settings.UMBRAL_VALIDEZ, alias="UMBRAL", gt=0)
    p_floor: float = Field(default_factory=lambda: settings.P_FLOOR, alias="P_FLOOR", gt=0)
    remuestreo: Optional[int] = Field(None, alias="REMUESTREO", ge=2)

    # Salida
    escalera: List[float] = Field(default_factory=list, alias="ESCALERA", description="Dispersiones del barrido")
    semilla: int = Field(default_factory=lambda: settings.SEMILLA_COMPARACION, alias="SEMILLA")

    @field_validator("escalera", mode="before")
    @classmethod
    def _separar_escalera(cls, valor):
        if isinstance(valor, str):
            return [float(v) for v in valor.replace(";", ",").split(",") if v.strip()]
        return valor

    @field_validator("momentos_extra")
    @classmethod
    def _validar_extra(cls, valor: Dict[str, float]) -> Dict[str, float]:
        for nombre in valor:
            idx = MomentIndex.desde_nombre(nombre)
            if idx.k != 2:
                raise ValueError(f"{nombre}: los momentos del hidrógeno llevan cuatro índices")
        return valor

    @model_validator(mode="after")
    def _validar_hbar(self):
        if self.hbar == "auto" and not self.dispersion:
            raise ValueError("HBAR=auto requiere DISPERSION > 0")
        if isinstance(self.hbar, float) and self.hbar < 0:
            raise ValueError("HBAR debe ser ≥ 0")
        return self

    @property
    def hbar_efectivo(self) -> float:
        """ħ numérico; con 'auto', ħ = 2ε satura ε·ε = ħ²/4"""
        if self.hbar == "auto":
            return 2.0 * float(self.dispersion)
        return float(self.hbar)

    @property
    def parametros(self) -> Dict[str, float]:
        return {"m": self.m, "k": self.k}

    @property
    def clasicas_iniciales(self) -> Dict[str, float]:
        return {"r": self.r0, "p_r": self.pr0, "theta": self.theta0, "p_theta": self.l}

    def config_integrador(self) -> IntegratorConfig:
        return IntegratorConfig(
            metodo=self.metodo,
            atol=self.tol,
            rtol=self.tol,
            paso_inicial=self.paso,
            paso_max=self.paso_max,
            t_end=self.t_fin,
            r_min=self.r_min,
            cota_momentos=self.cota_momentos,
            umbral=self.umbral,
            p_floor=self.p_floor,
            remuestreo=self.remuestreo,
        )

    def con_cambios(self, **cambios) -> "Scenario":
        """Copia validada con campos reemplazados (por nombre de campo)"""
        datos = self.model_dump()
        datos.update({k: v for k, v in cambios.items() if v is not None})
        return Scenario.model_validate(datos)

    def a_registro(self) -> Dict:
        """Configuración resuelta con las claves del archivo"""
        return self.model_dump(mode="json", by_alias=True)
