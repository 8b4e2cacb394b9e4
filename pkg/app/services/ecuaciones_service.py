"""
Servicio generador de ecuaciones de movimiento

Genera el sistema truncado ḟ = {f, H_Q} para variables clásicas y momentos,
lo compara contra otros sistemas (simbólica y numéricamente) y lo exporta
como listado de texto y como archivo de ecuaciones legible por máquina.
"""
import json
from dataclasses import dataclass, field
from math import pi
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
from loguru import logger

from app import __version__
from app.config import settings
from app.excepciones import VariablesIncompatiblesError
from app.models.expresiones import SymbolicExpression
from app.models.momentos import MomentIndex, enumerate_moments
from app.schemas.schemas_reportes import DiferenciaVariable, ReporteComparacion
from app.services.corchetes_service import CorchetesService, NormalizacionCorchete
from app.services.hamiltoniano_service import ClassicalModel, build_HQ_taylor, obtener_modelo


@dataclass(frozen=True)
class EffectiveSystem:
    """
    Sistema de ecuaciones efectivas: variables ordenadas y un lado derecho por variable.

    Orden de variables: clásicas (q₁, p₁, q₂, p₂, …) y luego momentos en
    el orden de enumerate_moments.
    """
    modelo: str
    orden: int
    pares: Tuple[Tuple[str, str], ...]
    variables: Tuple[str, ...]
    rhs: Mapping[str, SymbolicExpression]
    parametros: Tuple[str, ...] = ()
    hamiltoniano: Optional[SymbolicExpression] = None
    metadatos: Mapping[str, str] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.pares)

    @property
    def variables_clasicas(self) -> Tuple[str, ...]:
        return tuple(v for par in self.pares for v in par)

    @property
    def momentos(self) -> List[MomentIndex]:
        clasicas = set(self.variables_clasicas)
        return [MomentIndex.desde_nombre(v) for v in self.variables if v not in clasicas]

    @property
    def variables_nulas(self) -> List[str]:
        return [v for v in self.variables if self.rhs[v].es_cero()]

    @property
    def ecuaciones_vivas(self) -> int:
        """Ecuaciones con lado derecho no idénticamente nulo"""
        return len(self.variables) - len(self.variables_nulas)

    def con_rhs(self, rhs: Mapping[str, SymbolicExpression], **metadatos) -> "EffectiveSystem":
        datos = dict(self.metadatos)
        datos.update(metadatos)
        return EffectiveSystem(
            modelo=self.modelo,
            orden=self.orden,
            pares=self.pares,
            variables=self.variables,
            rhs=dict(rhs),
            parametros=self.parametros,
            hamiltoniano=self.hamiltoniano,
            metadatos=datos,
        )

    def a_texto(self) -> str:
        """Listado determinista de las ecuaciones"""
        lineas = [
            f"# modelo: {self.modelo}",
            f"# orden de truncamiento: {self.orden}",
            f"# variables: {len(self.variables)}, ecuaciones vivas: {self.ecuaciones_vivas}",
        ]
        for clave in sorted(self.metadatos):
            lineas.append(f"# {clave}: {self.metadatos[clave]}")
        if self.hamiltoniano is not None:
            lineas.append(f"H_Q = {self.hamiltoniano}")
        for v in self.variables:
            lineas.append(f"d/dt {v} = {self.rhs[v]}")
        return "\n".join(lineas) + "\n"


def variables_del_sistema(model: ClassicalModel, N: int) -> Tuple[str, ...]:
    return model.variables + tuple(idx.nombre for idx in enumerate_moments(model.k, N))


# ============================================================================
# GENERACIÓN
# ============================================================================

def generate(
    model: Union[ClassicalModel, str],
    N: int,
    normalizacion: Union[NormalizacionCorchete, str, None] = None,
) -> EffectiveSystem:
    """
    Genera ḟ = {f, H_Q} para todas las variables, truncando tras el corchete.

    Args:
        model: Modelo clásico o su nombre ("hidrogeno", "oscilador")
        N: Orden de truncamiento
        normalizacion: Normalización del término cuántico del corchete

    Returns:
        EffectiveSystem determinista
    """
    if isinstance(model, str):
        model = obtener_modelo(model)
    corchetes = CorchetesService(model.pares, normalizacion)
    hq = build_HQ_taylor(model, N)
    variables = variables_del_sistema(model, N)
    clasicas = set(model.variables)

    rhs: Dict[str, SymbolicExpression] = {}
    for v in variables:
        if v in clasicas:
            f = SymbolicExpression.simbolo(v)
        else:
            f = SymbolicExpression.momento(MomentIndex.desde_nombre(v))
        rhs[v] = corchetes.bracket_functions(f, hq).truncar(N)

    sistema = EffectiveSystem(
        modelo=model.nombre,
        orden=N,
        pares=model.pares,
        variables=variables,
        rhs=rhs,
        parametros=model.parametros,
        hamiltoniano=hq,
        metadatos={
            "origen": "generado",
            "normalizacion": corchetes.normalizacion.value,
            "version": __version__,
        },
    )
    logger.info(
        f"✅ Sistema {model.nombre} N={N}: {len(variables)} variables, "
        f"{sistema.ecuaciones_vivas} ecuaciones vivas"
    )
    return sistema


def restrict(
    system: EffectiveSystem,
    simbolos: Iterable[str] = (),
    momentos: Iterable[MomentIndex] = (),
) -> EffectiveSystem:
    """Anula en todos los lados derechos los símbolos y momentos indicados"""
    simbolos = tuple(simbolos)
    momentos = tuple(momentos)
    rhs = {v: expr.anular(simbolos, momentos) for v, expr in system.rhs.items()}
    return system.con_rhs(rhs, restriccion=",".join(list(simbolos) + [m.nombre for m in momentos]))


def classical_system(system: EffectiveSystem) -> EffectiveSystem:
    """Restricción con todos los momentos en cero"""
    return system.con_rhs(
        {v: expr.sin_momentos() for v, expr in system.rhs.items()},
        restriccion="momentos_nulos",
    )


def energy_closure(system: EffectiveSystem) -> SymbolicExpression:
    """
    Residuo dH_Q/dt = Σ_v ∂H_Q/∂v · rhs(v) a lo largo del sistema truncado.
    """
    if system.hamiltoniano is None:
        raise ValueError("El sistema no lleva H_Q asociado")
    hq = system.hamiltoniano
    clasicas = set(system.variables_clasicas)
    residuo = SymbolicExpression.cero()
    for v in system.variables:
        if v in clasicas:
            derivada = hq.derivar_simbolo(v)
        else:
            derivada = hq.derivar_momento(MomentIndex.desde_nombre(v))
        if derivada:
            residuo = residuo + derivada * system.rhs[v]
    return residuo


def cantidades_conservadas(system: EffectiveSystem) -> List[str]:
    """Variables cuyo lado derecho debe ser nulo: p_θ y G^{0,0,0,n} en hidrógeno"""
    if system.modelo != "hidrogeno":
        return []
    conservadas = ["p_theta"]
    conservadas.extend(
        idx.nombre for idx in system.momentos
        if idx.indices[:3] == (0, 0, 0)
    )
    return conservadas


def verificar_conservacion(system: EffectiveSystem) -> List[str]:
    """Devuelve las cantidades que deberían conservarse y no tienen rhs nulo"""
    return [v for v in cantidades_conservadas(system) if not system.rhs[v].es_cero()]


# ============================================================================
# COMPARACIÓN
# ============================================================================

def _estados_aleatorios(system: EffectiveSystem, semilla: int, cantidad: int) -> List[Dict[str, float]]:
    rng = np.random.default_rng(semilla)
    coordenadas = {q for q, _ in system.pares}
    estados = []
    for _ in range(cantidad):
        valores: Dict[str, float] = {}
        for v in system.variables:
            if v in coordenadas:
                valores[v] = float(rng.uniform(0.5, 2.0)) if v != "theta" else float(rng.uniform(0.0, 2 * pi))
            elif v in system.variables_clasicas:
                valores[v] = float(rng.uniform(-1.0, 1.0))
            elif MomentIndex.desde_nombre(v).es_diagonal:
                valores[v] = float(rng.uniform(0.0, 0.05))
            else:
                valores[v] = float(rng.uniform(-0.05, 0.05))
        for p in system.parametros:
            valores[p] = float(rng.uniform(0.5, 2.0))
        estados.append(valores)
    return estados


def compare_systems(
    A: EffectiveSystem,
    B: EffectiveSystem,
    semilla: Optional[int] = None,
    estados: Optional[int] = None,
    hbar: Optional[float] = None,
    nombres: Tuple[str, str] = ("A", "B"),
) -> ReporteComparacion:
    """
    Diferencia simbólica término a término y comparación numérica.

    Args:
        A, B: Sistemas sobre el mismo conjunto de variables
        semilla: Semilla de los estados aleatorios (settings.SEMILLA_COMPARACION)
        estados: Número de estados (settings.ESTADOS_COMPARACION)
        hbar: Valor de ħ para la evaluación numérica
        nombres: Etiquetas de los sistemas en el reporte

    Raises:
        VariablesIncompatiblesError: los conjuntos de variables difieren
    """
    semilla = settings.SEMILLA_COMPARACION if semilla is None else semilla
    estados = settings.ESTADOS_COMPARACION if estados is None else estados
    hbar = settings.HBAR if hbar is None else hbar

    if set(A.variables) != set(B.variables):
        faltan = sorted(set(A.variables) ^ set(B.variables))
        raise VariablesIncompatiblesError(f"Conjuntos de variables distintos: {faltan}")

    diferencias: Dict[str, DiferenciaVariable] = {}
    for v in A.variables:
        terminos_a = set(A.rhs[v].terminos)
        terminos_b = set(B.rhs[v].terminos)
        solo_a = sorted(terminos_a - terminos_b, key=str)
        solo_b = sorted(terminos_b - terminos_a, key=str)
        if solo_a or solo_b:
            diferencias[v] = DiferenciaVariable(
                solo_en_a=[str(t) for t in solo_a if not t.imaginario],
                solo_en_b=[str(t) for t in solo_b if not t.imaginario],
                imaginarios_a=[str(t) for t in solo_a if t.imaginario],
                imaginarios_b=[str(t) for t in solo_b if t.imaginario],
            )

    desviacion = 0.0
    for valores in _estados_aleatorios(A, semilla, estados):
        for v in A.variables:
            va = A.rhs[v].evaluar(valores, hbar)
            vb = B.rhs[v].evaluar(valores, hbar)
            escala = max(abs(va), abs(vb))
            if escala > 0:
                desviacion = max(desviacion, abs(va - vb) / escala)

    reporte = ReporteComparacion(
        sistema_a=nombres[0],
        sistema_b=nombres[1],
        diferencias=diferencias,
        desviacion_relativa_maxima=desviacion,
        estados_evaluados=estados,
        semilla=semilla,
    )
    if reporte.vacio:
        logger.info(f"✅ {nombres[0]} ≡ {nombres[1]} (desviación {desviacion:.1e})")
    else:
        logger.warning(
            f"⚠️ {nombres[0]} vs {nombres[1]}: {len(diferencias)} variables difieren "
            f"({len(reporte.diferencias_reales)} con términos reales)"
        )
    return reporte


# ============================================================================
# EXPORTACIÓN
# ============================================================================

def exportar_sistema(system: EffectiveSystem, ruta: Path) -> Path:
    """
    Escribe el archivo de ecuaciones: una cabecera y una línea JSON por variable.

    Cada término es [coeficiente, potencia de ħ, potencias clásicas, momentos, imaginario].
    """
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    cabecera = {
        "modelo": system.modelo,
        "orden": system.orden,
        "pares": [list(p) for p in system.pares],
        "parametros": list(system.parametros),
        "variables": list(system.variables),
        "hamiltoniano": system.hamiltoniano.a_registro() if system.hamiltoniano is not None else None,
        "metadatos": dict(sorted(system.metadatos.items())),
    }
    with open(ruta, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(cabecera, ensure_ascii=False, sort_keys=True) + "\n")
        for v in system.variables:
            f.write(json.dumps({"variable": v, "terminos": system.rhs[v].a_registro()}, ensure_ascii=False) + "\n")
    return ruta


def leer_sistema(ruta: Path) -> EffectiveSystem:
    """Carga un archivo de ecuaciones escrito por exportar_sistema"""
    ruta = Path(ruta)
    with open(ruta, encoding="utf-8") as f:
        lineas = [json.loads(linea) for linea in f if linea.strip()]
    if not lineas:
        raise ValueError(f"Archivo de ecuaciones vacío: {ruta}")
    cabecera, cuerpo = lineas[0], lineas[1:]
    rhs = {fila["variable"]: SymbolicExpression.desde_registro(fila["terminos"]) for fila in cuerpo}
    hamiltoniano = cabecera.get("hamiltoniano")
    return EffectiveSystem(
        modelo=cabecera["modelo"],
        orden=int(cabecera["orden"]),
        pares=tuple(tuple(p) for p in cabecera["pares"]),
        variables=tuple(cabecera["variables"]),
        rhs=rhs,
        parametros=tuple(cabecera.get("parametros", ())),
        hamiltoniano=SymbolicExpression.desde_registro(hamiltoniano) if hamiltoniano is not None else None,
        metadatos=cabecera.get("metadatos", {}),
    )
