"""
Servicio de escenarios del átomo de hidrógeno

Carga escenarios desde archivos CLAVE=VALOR, construye condiciones
iniciales (saturadas o no), ejecuta el caso cuasi unidimensional (l = 0),
el caso bidimensional con su compañero clásico y los barridos de
dispersiones, y guarda cada corrida con su manifiesto.
"""
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from loguru import logger
from pydantic import BaseModel, ValidationError

from app import __version__
from app.config import settings
from app.excepciones import ArchivoEscenarioError, EscenarioIncorrectoError, EstadoInicialRechazadoError
from app.models.momentos import MomentIndex, SystemState, enumerate_moments, indices_par, uncertainty_ok
from app.schemas.schemas_escenario import ModoMomentos, Scenario
from app.schemas.schemas_reportes import (
    FilaBarrido,
    Reporte2D,
    ReporteEnergia,
    ReporteIncertidumbre,
    ReporteL0,
    ResumenBarrido,
    RunManifest,
    VentanaValidez,
)
from app.services.corchetes_service import NormalizacionCorchete
from app.services.ecuaciones_service import EffectiveSystem, classical_system, generate, restrict
from app.services.integrador_service import (
    PlanEvaluacion,
    Trajectory,
    integrate,
    monitor_uncertainty,
    monitor_validity,
)
from app.utils.salida import escribir_csv, escribir_json, preparar_directorio, sumas_verificacion

CLAVE_MOMENTO = re.compile(r"^G(_\d+)+$")
ESCALERA_POR_DEFECTO = (1e-3, 1e-4, 1e-5)


# ============================================================================
# CARGA DE ESCENARIOS
# ============================================================================

def _lineas_de_claves(ruta: Path) -> Dict[str, int]:
    lineas = {}
    with open(ruta, encoding="utf-8") as f:
        for numero, linea in enumerate(f, start=1):
            linea = linea.strip()
            if not linea or linea.startswith("#") or "=" not in linea:
                continue
            clave = linea.split("=", 1)[0].strip()
            if clave.startswith("export "):
                clave = clave[len("export "):].strip()
            lineas.setdefault(clave, numero)
    return lineas


def cargar_escenario(ruta: Union[str, Path]) -> Scenario:
    """
    Lee y valida un archivo de escenario.

    Args:
        ruta: Archivo CLAVE=VALOR (comentarios con '#')

    Returns:
        Scenario validado

    Raises:
        FileNotFoundError: el archivo no existe
        ArchivoEscenarioError: claves desconocidas o valores mal tipados (con número de línea)
    """
    ruta = Path(ruta)
    if not ruta.is_file():
        raise FileNotFoundError(f"No existe el archivo de escenario: {ruta}")

    valores = dotenv_values(dotenv_path=ruta)
    lineas = _lineas_de_claves(ruta)
    diagnosticos: List[str] = []
    datos: Dict[str, object] = {}
    extra: Dict[str, float] = {}

    for clave, valor in valores.items():
        if valor is None:
            diagnosticos.append(f"línea {lineas.get(clave, '?')}: {clave} sin valor")
        elif CLAVE_MOMENTO.match(clave):
            try:
                extra[clave] = float(valor)
            except ValueError:
                diagnosticos.append(f"línea {lineas.get(clave, '?')}: {clave}: no es un número ({valor!r})")
        else:
            datos[clave] = valor
    if extra:
        datos["MOMENTOS_EXTRA"] = extra
    if diagnosticos:
        raise ArchivoEscenarioError(ruta, diagnosticos)

    try:
        escenario = Scenario.model_validate(datos)
    except ValidationError as e:
        for error in e.errors():
            campo = str(error["loc"][0]) if error["loc"] else "escenario"
            linea = lineas.get(campo)
            prefijo = f"línea {linea}: " if linea else ""
            diagnosticos.append(f"{prefijo}{campo}: {error['msg']}")
        raise ArchivoEscenarioError(ruta, diagnosticos) from e

    logger.info(f"📌 Escenario {escenario.nombre} cargado desde {ruta}")
    return escenario


def escenario_desde_manifiesto(ruta: Union[str, Path]) -> Scenario:
    """Reconstruye el escenario resuelto guardado en un manifiesto"""
    with open(ruta, encoding="utf-8") as f:
        manifiesto = json.load(f)
    return Scenario.model_validate(manifiesto["configuracion"])


# ============================================================================
# CONDICIONES INICIALES
# ============================================================================

def build_initial_conditions(
    clasicas: Mapping[str, float],
    orden: int,
    hbar: float,
    sigma_r: Optional[float] = None,
    sigma_theta: Optional[float] = None,
    saturate: bool = False,
    dispersion: Optional[float] = None,
    modo: ModoMomentos = ModoMomentos.DIAGONALES,
    delta_l2: Optional[float] = None,
    extra: Optional[Mapping[str, float]] = None,
    fisico: bool = False,
    clasico: bool = False,
) -> SystemState:
    """
    Estado inicial del hidrógeno con todos los momentos de orden 2..N.

    Precedencia: dispersión ε → σ_r, σ_θ → saturación → Δl² → momentos extra.
    Con saturate, G^{0,2} = ħ²/(4 G^{2,0}) y G^{1,1} = 0 en cada par.

    Args:
        clasicas: r, p_r, theta, p_theta
        orden: Orden de truncamiento N
        hbar: Valor de ħ
        sigma_r, sigma_theta: Dispersiones Δr, Δθ
        saturate: Satura la relación de incertidumbre en ambos pares
        dispersion: Escala ε ("dispersiones del orden de ε")
        modo: diagonales (segundo orden diagonal = ε) o todos (todo momento = ε)
        delta_l2: Valor explícito de G^{0,0,0,2}
        extra: Momentos adicionales por nombre (G_a_b_c_d)
        fisico: Rechaza estados que violen la relación de incertidumbre
        clasico: Todos los momentos en cero

    Raises:
        EstadoInicialRechazadoError: violación con fisico, o saturación con varianza nula
    """
    momentos: Dict[MomentIndex, float] = {idx: 0.0 for idx in enumerate_moments(2, orden)}

    if clasico:
        if extra:
            logger.warning("⚠️ Momentos extra ignorados en una corrida clásica")
        return SystemState(t=0.0, clasicas=clasicas, momentos=momentos)

    if dispersion is not None:
        for idx in momentos:
            if modo == ModoMomentos.TODOS or (idx.orden == 2 and idx.es_diagonal):
                momentos[idx] = float(dispersion)

    for par, sigma in ((0, sigma_r), (1, sigma_theta)):
        if sigma is not None:
            momentos[indices_par(2, par)[0]] = float(sigma) ** 2

    if saturate:
        for par in (0, 1):
            g_qq, g_qp, g_pp = indices_par(2, par)
            if momentos[g_qq] <= 0:
                raise EstadoInicialRechazadoError(
                    f"No se puede saturar el par {par}: {g_qq.nombre} = {momentos[g_qq]}"
                )
            momentos[g_pp] = hbar * hbar / (4.0 * momentos[g_qq])
            momentos[g_qp] = 0.0

    if delta_l2 is not None:
        momentos[MomentIndex.de(0, 0, 0, 2)] = float(delta_l2)

    for nombre, valor in (extra or {}).items():
        idx = MomentIndex.desde_nombre(nombre)
        if idx not in momentos:
            raise ValueError(f"{nombre} no pertenece al sistema de orden {orden}")
        momentos[idx] = float(valor)

    estado = SystemState(t=0.0, clasicas=clasicas, momentos=momentos)
    try:
        estado.validar(orden)
    except ValueError as e:
        raise EstadoInicialRechazadoError(str(e)) from e

    margenes = []
    for par in (0, 1):
        ok, margen = uncertainty_ok(estado, par, hbar, tolerancia=settings.TOLERANCIA_MARGEN)
        margenes.append(margen)
        if fisico and not ok:
            logger.error(f"❌ Estado inicial viola la relación de incertidumbre en el par {par}: {margen:.3e}")
            raise EstadoInicialRechazadoError(
                f"Relación de incertidumbre violada en el par {par} (margen {margen:.3e})"
            )
    logger.info(f"📌 Márgenes iniciales: (r, p_r) = {margenes[0]:.3e}, (θ, p_θ) = {margenes[1]:.3e}")
    return estado


def estado_inicial(escenario: Scenario) -> SystemState:
    return build_initial_conditions(
        clasicas=escenario.clasicas_iniciales,
        orden=escenario.orden,
        hbar=escenario.hbar_efectivo,
        sigma_r=escenario.sigma_r,
        sigma_theta=escenario.sigma_theta,
        saturate=escenario.saturar,
        dispersion=escenario.dispersion,
        modo=escenario.modo_momentos,
        delta_l2=escenario.delta_l2,
        extra=escenario.momentos_extra,
        fisico=escenario.fisico,
        clasico=escenario.clasico,
    )


def estado_clasico(estado: SystemState) -> SystemState:
    """Mismos valores clásicos, momentos en cero"""
    return SystemState(t=estado.t, clasicas=estado.clasicas, momentos={idx: 0.0 for idx in estado.momentos})


@lru_cache(maxsize=8)
def sistema_hidrogeno(orden: int, normalizacion: NormalizacionCorchete) -> EffectiveSystem:
    return generate("hidrogeno", orden, normalizacion)


# ============================================================================
# CORRIDAS
# ============================================================================

@dataclass
class ResultadoCorrida:
    """Trayectoria y monitores de una corrida individual"""
    escenario: Scenario
    sistema: EffectiveSystem
    trayectoria: Trajectory
    ventana: VentanaValidez
    margenes: pd.Series
    incertidumbre: ReporteIncertidumbre
    energia: pd.Series
    reporte_energia: ReporteEnergia


@dataclass
class ResultadoL0:
    corrida: ResultadoCorrida
    estricta: ResultadoCorrida
    clasica: ResultadoCorrida
    reporte: ReporteL0


@dataclass
class Resultado2D:
    corrida: ResultadoCorrida
    clasica: ResultadoCorrida
    orbita: pd.DataFrame
    fase: pd.DataFrame
    reporte: Reporte2D


def energy_trace(
    traj: Trajectory,
    system: EffectiveSystem,
    parametros: Mapping[str, float],
    tolerancia: float,
) -> Tuple[pd.Series, ReporteEnergia]:
    """
    H_Q por muestra y su deriva máxima respecto de t = 0.

    Args:
        traj: Trayectoria del mismo modelo
        system: Sistema con H_Q asociado
        parametros: m, k
        tolerancia: Tolerancia del integrador; una deriva > 100× indica efecto de truncamiento
    """
    if system.hamiltoniano is None:
        raise ValueError("El sistema no lleva H_Q asociado")
    if tuple(traj.variables) != tuple(system.variables):
        raise ValueError("La trayectoria y el sistema no comparten variables")
    plan = PlanEvaluacion([system.hamiltoniano], system.variables, parametros, traj.hbar)
    valores = plan.evaluar(traj.matriz_estados())[:, 0]
    serie = pd.Series(valores, index=traj.tiempos, name="energia")
    inicial = float(valores[0])
    deriva = float(np.max(np.abs(valores - inicial)))
    reporte = ReporteEnergia(
        energia_inicial=inicial,
        deriva_maxima=deriva,
        deriva_relativa=deriva / abs(inicial) if inicial else deriva,
        tolerancia=tolerancia,
        supera_tolerancia=deriva > 100 * tolerancia * max(1.0, abs(inicial)),
    )
    return serie, reporte


def correr(
    escenario: Scenario,
    system: Optional[EffectiveSystem] = None,
    inicial: Optional[SystemState] = None,
) -> ResultadoCorrida:
    """Integra un escenario y aplica los monitores de validez, incertidumbre y energía"""
    system = system or sistema_hidrogeno(escenario.orden, escenario.normalizacion)
    inicial = inicial or estado_inicial(escenario)
    config = escenario.config_integrador()
    hbar = escenario.hbar_efectivo

    trayectoria = integrate(system, inicial, config, hbar=hbar, parametros=escenario.parametros)
    ventana = monitor_validity(trayectoria, config.umbral, config.p_floor)
    margenes, incertidumbre = monitor_uncertainty(trayectoria)
    energia, reporte_energia = energy_trace(trayectoria, system, escenario.parametros, escenario.tol)
    return ResultadoCorrida(
        escenario=escenario,
        sistema=system,
        trayectoria=trayectoria,
        ventana=ventana,
        margenes=margenes,
        incertidumbre=incertidumbre,
        energia=energia,
        reporte_energia=reporte_energia,
    )


def correr_clasica(escenario: Scenario, corrida: ResultadoCorrida) -> ResultadoCorrida:
    """Compañero clásico: mismos datos clásicos y mismo integrador, momentos nulos"""
    inicial = estado_clasico(estado_inicial(escenario))
    return correr(escenario, classical_system(corrida.sistema), inicial)


def _indices_ventana(traj: Trajectory, ventana: VentanaValidez) -> slice:
    if ventana.vacia:
        return slice(0, 1)
    if ventana.indice_violacion is None:
        return slice(0, len(traj))
    return slice(0, ventana.indice_violacion)


def run_l0(escenario: Scenario) -> ResultadoL0:
    """
    Caso cuasi unidimensional: l = 0.

    Además de la corrida completa integra la variante estricta con todo el
    sector angular anulado (verificada simbólicamente antes de integrar) y
    el compañero clásico.

    Raises:
        EscenarioIncorrectoError: el escenario tiene l ≠ 0
    """
    if escenario.l != 0:
        raise EscenarioIncorrectoError(f"run_l0 requiere l = 0 (escenario {escenario.nombre}: l = {escenario.l})")

    corrida = correr(escenario)
    theta = corrida.trayectoria.columna("theta")
    en_ventana = theta[_indices_ventana(corrida.trayectoria, corrida.ventana)]
    desviacion = float(np.max(np.abs(en_ventana - theta[0])))

    angulares = [idx for idx in corrida.sistema.momentos if idx.indices[2] or idx.indices[3]]
    estricto = restrict(corrida.sistema, simbolos=("p_theta",), momentos=angulares)
    nula = all(estricto.rhs[v].es_cero() for v in ["theta"] + [idx.nombre for idx in angulares])
    if not nula:
        logger.warning("⚠️ La restricción estricta 1D no anula el sector angular simbólicamente")
    inicial = estado_inicial(escenario)
    inicial_estricto = SystemState(
        t=0.0,
        clasicas=inicial.clasicas,
        momentos={idx: (0.0 if idx in angulares else v) for idx, v in inicial.momentos.items()},
    )
    estricta = correr(escenario, estricto, inicial_estricto)
    theta_estricto = estricta.trayectoria.columna("theta")
    desviacion_estricta = float(np.max(np.abs(theta_estricto - theta_estricto[0])))

    clasica = correr_clasica(escenario, corrida)

    reporte = ReporteL0(
        escenario=escenario.nombre,
        desviacion_theta_maxima=desviacion,
        umbral_2d=settings.UMBRAL_2D,
        movimiento_2d=desviacion > settings.UMBRAL_2D,
        desviacion_theta_estricta=desviacion_estricta,
        estricto_constante=desviacion_estricta == 0.0,
        restriccion_simbolica_nula=nula,
        motivo_fin=corrida.trayectoria.motivo_fin.value,
        motivo_fin_estricto=estricta.trayectoria.motivo_fin.value,
        motivo_fin_clasico=clasica.trayectoria.motivo_fin.value,
        ventana=corrida.ventana,
    )
    if reporte.movimiento_2d:
        logger.info(f"✅ Movimiento bidimensional inducido: max|Δθ| = {desviacion:.3e}")
    return ResultadoL0(corrida=corrida, estricta=estricta, clasica=clasica, reporte=reporte)


def orbita(traj: Trajectory) -> pd.DataFrame:
    """Órbita en proyección cartesiana con banda r ∓ √G^{2,0,0,0}"""
    r = traj.columna("r")
    theta = traj.columna("theta")
    with np.errstate(invalid="ignore"):
        delta_r = np.sqrt(traj.columna("G_2_0_0_0"))
    interior, exterior = r - delta_r, r + delta_r
    return pd.DataFrame({
        "t": traj.tiempos,
        "x": r * np.cos(theta),
        "y": r * np.sin(theta),
        "x_interior": interior * np.cos(theta),
        "y_interior": interior * np.sin(theta),
        "x_exterior": exterior * np.cos(theta),
        "y_exterior": exterior * np.sin(theta),
    })


def espacio_fase(traj: Trajectory) -> pd.DataFrame:
    return pd.DataFrame({"t": traj.tiempos, "r": traj.columna("r"), "p_r": traj.columna("p_r")})


def metricas_radiales(traj: Trajectory, fraccion: float = 0.25, muestras: int = 2001) -> Dict[str, float]:
    """
    Media tardía y amplitudes temprana/tardía de r sobre una grilla uniforme.

    Las ventanas son la primera y la última 'fraccion' del tiempo recorrido.
    """
    tiempos = traj.tiempos
    grilla = np.linspace(tiempos[0], tiempos[-1], muestras)
    r = np.interp(grilla, tiempos, traj.columna("r"))
    n = max(2, int(muestras * fraccion))
    temprana, tardia = r[:n], r[-n:]
    return {
        "media_tardia_r": float(np.mean(tardia)),
        "amplitud_temprana_r": float((np.max(temprana) - np.min(temprana)) / 2),
        "amplitud_tardia_r": float((np.max(tardia) - np.min(tardia)) / 2),
    }


def run_2d(escenario: Scenario) -> Resultado2D:
    """
    Caso bidimensional (l ≠ 0) con observables derivados y compañero clásico.

    Raises:
        EscenarioIncorrectoError: el escenario tiene l = 0
    """
    if escenario.l == 0:
        raise EscenarioIncorrectoError(f"run_2d requiere l ≠ 0 (escenario {escenario.nombre})")

    corrida = correr(escenario)
    clasica = correr_clasica(escenario, corrida)
    metricas = metricas_radiales(corrida.trayectoria)
    reporte = Reporte2D(
        escenario=escenario.nombre,
        motivo_fin=corrida.trayectoria.motivo_fin.value,
        motivo_fin_clasico=clasica.trayectoria.motivo_fin.value,
        ventana=corrida.ventana,
        incertidumbre=corrida.incertidumbre,
        energia=corrida.reporte_energia,
        energia_clasica=clasica.reporte_energia.energia_inicial,
        **metricas,
    )
    logger.info(
        f"✅ {escenario.nombre}: ventana de validez {corrida.ventana.duracion:.4g}, "
        f"media tardía de r {metricas['media_tardia_r']:.4g}"
    )
    return Resultado2D(
        corrida=corrida,
        clasica=clasica,
        orbita=orbita(corrida.trayectoria),
        fase=espacio_fase(corrida.trayectoria),
        reporte=reporte,
    )


# ============================================================================
# PERSISTENCIA
# ============================================================================

def guardar_corrida(
    corrida: ResultadoCorrida,
    directorio: Union[str, Path],
    clasica: Optional[ResultadoCorrida] = None,
    tablas: Optional[Mapping[str, pd.DataFrame]] = None,
    reporte: Optional[BaseModel] = None,
) -> RunManifest:
    """
    Escribe trayectoria.csv (y clasica.csv, tablas, reporte.json) y el manifiesto.

    Returns:
        RunManifest con sumas sha256 de todo lo emitido
    """
    directorio = preparar_directorio(directorio)
    escenario = corrida.escenario
    emitidos = [escribir_csv(corrida.trayectoria.datos, directorio / "trayectoria.csv")]
    if clasica is not None:
        emitidos.append(escribir_csv(clasica.trayectoria.datos, directorio / "clasica.csv"))
    for nombre, tabla in (tablas or {}).items():
        emitidos.append(escribir_csv(tabla, directorio / f"{nombre}.csv"))
    if reporte is not None:
        emitidos.append(escribir_json(reporte, directorio / "reporte.json"))

    manifiesto = RunManifest(
        escenario=escenario.nombre,
        configuracion=escenario.a_registro(),
        orden=escenario.orden,
        hbar=escenario.hbar_efectivo,
        normalizacion=escenario.normalizacion.value,
        integrador=escenario.config_integrador().model_dump(mode="json"),
        semilla=escenario.semilla,
        motivo_fin=corrida.trayectoria.motivo_fin.value,
        version=__version__,
        sumas_verificacion=sumas_verificacion(emitidos, directorio),
    )
    escribir_json(manifiesto, directorio / "manifiesto.json")
    logger.info(f"✅ Corrida guardada en {directorio}")
    return manifiesto


def ejecutar_y_guardar(escenario: Scenario, directorio: Union[str, Path]) -> Tuple[ResultadoCorrida, BaseModel]:
    """run_l0 si l = 0, run_2d en otro caso; guarda todo en el directorio"""
    if escenario.l == 0:
        resultado = run_l0(escenario)
        guardar_corrida(
            resultado.corrida,
            directorio,
            clasica=resultado.clasica,
            tablas={"estricta": resultado.estricta.trayectoria.datos},
            reporte=resultado.reporte,
        )
    else:
        resultado = run_2d(escenario)
        guardar_corrida(
            resultado.corrida,
            directorio,
            clasica=resultado.clasica,
            tablas={"orbita": resultado.orbita, "fase": resultado.fase},
            reporte=resultado.reporte,
        )
    return resultado.corrida, resultado.reporte


# ============================================================================
# BARRIDOS
# ============================================================================

def _correr_peldano(tarea: Tuple[Dict, str]) -> Dict:
    datos, directorio = tarea
    escenario = Scenario.model_validate(datos)
    corrida, _ = ejecutar_y_guardar(escenario, directorio)
    fila = FilaBarrido(
        dispersion=float(escenario.dispersion),
        hbar=escenario.hbar_efectivo,
        ventana_validez=corrida.ventana.duracion,
        primera_violacion=corrida.incertidumbre.primera_violacion,
        deriva_energia=corrida.reporte_energia.deriva_maxima,
        motivo_fin=corrida.trayectoria.motivo_fin.value,
        directorio=Path(directorio).name,
    )
    return fila.model_dump()


def sweep(
    escenario: Scenario,
    directorio: Union[str, Path],
    escalera: Optional[Sequence[float]] = None,
    trabajadores: Optional[int] = None,
) -> ResumenBarrido:
    """
    Escalera de dispersiones: una corrida independiente por peldaño.

    Cada peldaño escribe en su propio subdirectorio; el resumen conserva el
    orden de la escalera sin importar el orden de término de los procesos.

    Args:
        escenario: Escenario base (DISPERSION se reemplaza por cada peldaño)
        directorio: Directorio raíz del barrido
        escalera: Dispersiones (por defecto ESCALERA del escenario o 1e-3, 1e-4, 1e-5)
        trabajadores: Procesos concurrentes (settings.MAX_TRABAJADORES; 1 = secuencial)
    """
    escalera = list(escalera or escenario.escalera or ESCALERA_POR_DEFECTO)
    trabajadores = settings.MAX_TRABAJADORES if trabajadores is None else trabajadores
    directorio = preparar_directorio(directorio)

    tareas = []
    for eps in escalera:
        peldano = escenario.con_cambios(dispersion=eps, nombre=f"{escenario.nombre}_eps{eps:.0e}")
        tareas.append((peldano.model_dump(mode="json"), str(directorio / f"dispersion_{eps:.0e}")))

    logger.info(f"🚀 Barrido {escenario.nombre}: {len(tareas)} peldaños, {trabajadores} procesos")
    if trabajadores <= 1:
        filas = [_correr_peldano(t) for t in tareas]
    else:
        with ProcessPoolExecutor(max_workers=trabajadores) as pool:
            filas = list(pool.map(_correr_peldano, tareas))

    resumen = ResumenBarrido(escenario=escenario.nombre, filas=[FilaBarrido(**f) for f in filas])
    escribir_csv(pd.DataFrame([f.model_dump() for f in resumen.filas]), directorio / "resumen.csv")
    escribir_json(resumen, directorio / "resumen.json")
    if resumen.monotona:
        logger.info("✅ Ventana de validez no decreciente al achicar las dispersiones")
    else:
        logger.warning("⚠️ La ventana de validez no es monótona en la escalera")
    return resumen
