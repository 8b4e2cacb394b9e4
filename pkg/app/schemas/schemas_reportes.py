"""
Schemas Pydantic de reportes y manifiestos

Define los reportes de verificación (oráculo, Jacobi, comparación de
sistemas), los monitores de trayectoria y el manifiesto de corrida.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


# ============================================================================
# SCHEMAS DE VERIFICACIÓN
# ============================================================================

class ParVerificado(BaseModel):
    """Resultado de comparar motor y oráculo en un par de momentos"""
    a: str
    b: str
    coincide: bool
    motor: str = ""
    oraculo: str = ""


class ReporteOraculo(BaseModel):
    """Verificación del motor de corchetes contra el álgebra de operadores"""
    normalizacion: str
    sigma: int = Field(..., description="Convención de signo ajustada una única vez")
    pares: List[ParVerificado] = Field(default_factory=list)

    @property
    def discrepancias(self) -> List[ParVerificado]:
        return [p for p in self.pares if not p.coincide]

    @property
    def exitoso(self) -> bool:
        return not self.discrepancias

    def a_texto(self) -> str:
        lineas = [
            f"# Oráculo de Weyl: normalización {self.normalizacion}, sigma = {self.sigma:+d}",
            f"# pares verificados: {len(self.pares)}, discrepancias: {len(self.discrepancias)}",
        ]
        for par in self.pares:
            estado = "OK" if par.coincide else "DIFIERE"
            lineas.append(f"{par.a} , {par.b} : {estado}")
            if not par.coincide:
                lineas.append(f"    motor   = {par.motor}")
                lineas.append(f"    oraculo = {par.oraculo}")
        return "\n".join(lineas) + "\n"


class TripleJacobi(BaseModel):
    triple: List[str]
    residuo: str


class ReporteJacobi(BaseModel):
    """Suma cíclica de corchetes anidados sobre ternas de momentos"""
    normalizacion: str
    orden_maximo: int
    k: int
    ternas_verificadas: int
    residuos: List[TripleJacobi] = Field(default_factory=list)

    @property
    def exacto(self) -> bool:
        return not self.residuos

    def a_texto(self) -> str:
        lineas = [
            f"# Jacobi: normalización {self.normalizacion}, k = {self.k}, orden ≤ {self.orden_maximo}",
            f"# ternas: {self.ternas_verificadas}, con residuo: {len(self.residuos)}",
        ]
        for t in self.residuos:
            lineas.append(f"{', '.join(t.triple)} : {t.residuo}")
        return "\n".join(lineas) + "\n"


class DiferenciaVariable(BaseModel):
    """Términos presentes sólo en uno de los dos sistemas para una variable"""
    solo_en_a: List[str] = Field(default_factory=list)
    solo_en_b: List[str] = Field(default_factory=list)
    imaginarios_a: List[str] = Field(default_factory=list)
    imaginarios_b: List[str] = Field(default_factory=list)

    @property
    def solo_imaginaria(self) -> bool:
        return not self.solo_en_a and not self.solo_en_b


class ReporteComparacion(BaseModel):
    """Diferencia simbólica y numérica entre dos sistemas efectivos"""
    sistema_a: str
    sistema_b: str
    diferencias: Dict[str, DiferenciaVariable] = Field(default_factory=dict)
    desviacion_relativa_maxima: float = 0.0
    estados_evaluados: int = 0
    semilla: int = 0

    @property
    def vacio(self) -> bool:
        return not self.diferencias

    @property
    def diferencias_reales(self) -> Dict[str, DiferenciaVariable]:
        """Diferencias que no se explican por términos marcados iħ"""
        return {v: d for v, d in self.diferencias.items() if not d.solo_imaginaria}

    @property
    def confinada_a_imaginarios(self) -> bool:
        return not self.diferencias_reales

    def a_texto(self) -> str:
        lineas = [
            f"# Comparación {self.sistema_a} vs {self.sistema_b}",
            f"# variables con diferencias: {len(self.diferencias)} "
            f"(reales: {len(self.diferencias_reales)})",
            f"# estados numéricos: {self.estados_evaluados} (semilla {self.semilla}), "
            f"desviación relativa máxima: {self.desviacion_relativa_maxima:.3e}",
        ]
        for variable, dif in self.diferencias.items():
            lineas.append(f"[{variable}]")
            for t in dif.solo_en_a:
                lineas.append(f"  solo en {self.sistema_a}: {t}")
            for t in dif.solo_en_b:
                lineas.append(f"  solo en {self.sistema_b}: {t}")
            for t in dif.imaginarios_a:
                lineas.append(f"  iħ en {self.sistema_a}: {t}")
            for t in dif.imaginarios_b:
                lineas.append(f"  iħ en {self.sistema_b}: {t}")
        return "\n".join(lineas) + "\n"


# ============================================================================
# SCHEMAS DE MONITORES
# ============================================================================

class VentanaValidez(BaseModel):
    """Ventana temporal inicial en que los momentos son perturbativos"""
    umbral: float
    t_inicio: float
    t_fin: float
    vacia: bool
    indice_violacion: Optional[int] = Field(None, description="Primera muestra que viola el umbral")

    @property
    def duracion(self) -> float:
        return 0.0 if self.vacia else self.t_fin - self.t_inicio


class ReporteIncertidumbre(BaseModel):
    """Evolución del margen de la relación de incertidumbre de un par"""
    par: str
    margen_inicial: float
    margen_minimo: float
    primera_violacion: Optional[float] = None


class ReporteEnergia(BaseModel):
    """Deriva de H_Q a lo largo de una corrida"""
    energia_inicial: float
    deriva_maxima: float
    deriva_relativa: float
    tolerancia: float
    supera_tolerancia: bool = Field(
        ..., description="La deriva excede 100× la tolerancia del integrador (efecto de truncamiento)"
    )


class ReporteL0(BaseModel):
    """Resultado del escenario cuasi unidimensional (l = 0)"""
    escenario: str
    desviacion_theta_maxima: float
    umbral_2d: float
    movimiento_2d: bool
    desviacion_theta_estricta: float
    estricto_constante: bool
    restriccion_simbolica_nula: bool
    motivo_fin: str
    motivo_fin_estricto: str
    motivo_fin_clasico: str
    ventana: VentanaValidez


class Reporte2D(BaseModel):
    """Observables derivados del escenario bidimensional"""
    escenario: str
    motivo_fin: str
    motivo_fin_clasico: str
    ventana: VentanaValidez
    incertidumbre: ReporteIncertidumbre
    energia: ReporteEnergia
    energia_clasica: float
    media_tardia_r: float
    amplitud_temprana_r: float
    amplitud_tardia_r: float


class FilaBarrido(BaseModel):
    """Una fila de la tabla de resumen de un barrido de dispersiones"""
    dispersion: float
    hbar: float
    ventana_validez: float
    primera_violacion: Optional[float] = None
    deriva_energia: float
    motivo_fin: str
    directorio: str


class ResumenBarrido(BaseModel):
    escenario: str
    filas: List[FilaBarrido]

    @property
    def monotona(self) -> bool:
        """Ventana no decreciente al achicar las dispersiones"""
        ordenadas = sorted(self.filas, key=lambda f: f.dispersion, reverse=True)
        return all(
            b.ventana_validez >= a.ventana_validez
            for a, b in zip(ordenadas, ordenadas[1:])
        )


# ============================================================================
# SCHEMAS DE MANIFIESTO
# ============================================================================

class RunManifest(BaseModel):
    """Todo lo necesario para reproducir una corrida byte a byte"""
    escenario: str
    configuracion: Dict = Field(default_factory=dict)
    orden: int
    hbar: float
    normalizacion: str
    integrador: Dict = Field(default_factory=dict)
    semilla: int
    motivo_fin: Optional[str] = None
    version: str
    sumas_verificacion: Dict[str, str] = Field(default_factory=dict)
