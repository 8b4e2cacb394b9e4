"""
Servicio de integración numérica de sistemas efectivos

Compila el lado derecho simbólico a un plan plano de términos (matriz de
exponentes + coeficientes) y lo integra con RK4 de paso fijo o con el par
encajado de Dormand–Prince 5(4) con control PI del paso. Las trayectorias
se guardan en un DataFrame con columnas de diagnóstico por par canónico.
"""
from dataclasses import dataclass, field
from math import ceil
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from app.config import settings
from app.excepciones import EstadoIncompletoError, SingularidadError
from app.models.expresiones import SymbolicExpression
from app.models.momentos import MomentIndex, SystemState, indices_par, margen_incertidumbre
from app.schemas.schemas_integrador import IntegratorConfig, MetodoIntegracion, MotivoFin
from app.schemas.schemas_reportes import ReporteIncertidumbre, VentanaValidez
from app.services.ecuaciones_service import EffectiveSystem


# ============================================================================
# PLAN DE EVALUACIÓN
# ============================================================================

# Filas por lote en evaluaciones vectorizadas
_BLOQUE = 512


class PlanEvaluacion:
    """
    Lista precompilada de términos de varias expresiones.

    Cada término se reduce a coeficiente·Π y_j^{E_tj}; los parámetros y ħ
    quedan absorbidos en el coeficiente. Los términos marcados iħ se omiten.

    Uso:
        plan = PlanEvaluacion([expr1, expr2], columnas=("r", "p_r"), parametros={"m": 1.0}, hbar=1.0)
        plan.evaluar(np.array([1.0, 0.5]))
    """

    def __init__(
        self,
        expresiones: Sequence[SymbolicExpression],
        columnas: Sequence[str],
        parametros: Optional[Mapping[str, float]] = None,
        hbar: float = 1.0,
    ):
        self.columnas = tuple(columnas)
        self.n_salidas = len(expresiones)
        parametros = dict(parametros or {})
        posicion = {nombre: j for j, nombre in enumerate(self.columnas)}

        coeficientes: List[float] = []
        exponentes: List[np.ndarray] = []
        destinos: List[int] = []
        self.imaginarios_excluidos = 0
        singulares = set()

        for i, expr in enumerate(expresiones):
            for termino in expr.terminos:
                if termino.imaginario:
                    self.imaginarios_excluidos += 1
                    continue
                coef = float(termino.coeficiente) * hbar ** termino.hbar
                fila = np.zeros(len(self.columnas))
                for nombre, exp in termino.simbolos:
                    if nombre in posicion:
                        fila[posicion[nombre]] += exp
                        if exp < 0:
                            singulares.add(nombre)
                    elif nombre in parametros:
                        coef *= parametros[nombre] ** exp
                    else:
                        raise EstadoIncompletoError(f"Falta el símbolo o parámetro {nombre!r}")
                for m in termino.momentos:
                    if m.nombre not in posicion:
                        raise EstadoIncompletoError(f"Falta el momento {m.nombre}")
                    fila[posicion[m.nombre]] += 1
                coeficientes.append(coef)
                exponentes.append(fila)
                destinos.append(i)

        self.coeficientes = np.array(coeficientes, dtype=float)
        self.exponentes = (
            np.vstack(exponentes) if exponentes else np.zeros((0, len(self.columnas)))
        )
        self.asignacion = np.zeros((len(destinos), self.n_salidas))
        self.asignacion[np.arange(len(destinos)), destinos] = 1.0
        self.nulas = np.array(
            [not np.any(self.asignacion[:, i]) for i in range(self.n_salidas)], dtype=bool
        )
        # Variables con potencia negativa en algún término: requieren la guarda r_min
        self.singulares = tuple(sorted(singulares, key=posicion.get))
        self.indices_singulares = np.array([posicion[n] for n in self.singulares], dtype=int)

    def __len__(self) -> int:
        return len(self.coeficientes)

    def evaluar(self, y: np.ndarray) -> np.ndarray:
        """
        Evalúa todas las expresiones en un estado (V,) o en un lote (S, V).

        Returns:
            Arreglo (n_salidas,) o (S, n_salidas)
        """
        y = np.asarray(y, dtype=float)
        if y.ndim == 2 and len(y) > _BLOQUE:
            return np.vstack([self.evaluar(y[i:i + _BLOQUE]) for i in range(0, len(y), _BLOQUE)])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            monomios = np.prod(np.power(y[..., np.newaxis, :], self.exponentes), axis=-1)
            return (monomios * self.coeficientes) @ self.asignacion


def compilar_sistema(
    system: EffectiveSystem,
    parametros: Mapping[str, float],
    hbar: float,
) -> PlanEvaluacion:
    """Plan del lado derecho en el orden de system.variables"""
    plan = PlanEvaluacion([system.rhs[v] for v in system.variables], system.variables, parametros, hbar)
    if plan.imaginarios_excluidos:
        logger.warning(
            f"⚠️ {plan.imaginarios_excluidos} términos marcados iħ excluidos de la evaluación real"
        )
    logger.debug(f"Plan compilado: {len(plan)} términos, {len(system.variables)} variables")
    return plan


# ============================================================================
# TRAYECTORIA
# ============================================================================

@dataclass
class Trajectory:
    """
    Muestras ordenadas en el tiempo con diagnósticos por muestra.

    Columnas de 'datos': t, variables del sistema en su orden y luego los
    diagnósticos (energia, margen_q, validez_q, validez_p, razon_q por par).
    """
    datos: pd.DataFrame
    variables: Tuple[str, ...]
    pares: Tuple[Tuple[str, str], ...]
    motivo_fin: MotivoFin
    hbar: float
    p_floor: float
    pasos_aceptados: int = 0
    pasos_rechazados: int = 0
    imaginarios_excluidos: int = 0
    plan_energia: Optional[PlanEvaluacion] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.datos)

    @property
    def tiempos(self) -> np.ndarray:
        return self.datos["t"].to_numpy()

    @property
    def t_final(self) -> float:
        return float(self.datos["t"].iloc[-1])

    @property
    def k(self) -> int:
        return len(self.pares)

    def columna(self, nombre: str) -> np.ndarray:
        return self.datos[nombre].to_numpy()

    def matriz_estados(self) -> np.ndarray:
        return self.datos[list(self.variables)].to_numpy()

    @property
    def samples(self) -> List[SystemState]:
        clasicas = [v for par in self.pares for v in par]
        estados = []
        for fila in self.datos.itertuples(index=False):
            valores = dict(zip(self.datos.columns, fila))
            estados.append(SystemState(
                t=valores["t"],
                clasicas={v: valores[v] for v in clasicas},
                momentos={
                    MomentIndex.desde_nombre(v): valores[v]
                    for v in self.variables if v not in clasicas
                },
            ))
        return estados


def _diagnosticos(
    estados: np.ndarray,
    variables: Sequence[str],
    pares: Sequence[Tuple[str, str]],
    hbar: float,
    p_floor: float,
    plan_energia: Optional[PlanEvaluacion],
) -> Dict[str, np.ndarray]:
    posicion = {v: j for j, v in enumerate(variables)}
    columnas: Dict[str, np.ndarray] = {}
    if plan_energia is not None:
        columnas["energia"] = plan_energia.evaluar(estados)[:, 0]
    k = len(pares)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, (q, p) in enumerate(pares):
            g_qq, g_qp, g_pp = (idx.nombre for idx in indices_par(k, i))
            if g_qq not in posicion:
                continue
            vqq = estados[:, posicion[g_qq]]
            vqp = estados[:, posicion[g_qp]]
            vpp = estados[:, posicion[g_pp]]
            columnas[f"margen_{q}"] = margen_incertidumbre(vqq, vqp, vpp, hbar)
            columnas[f"validez_{q}"] = np.sqrt(vqq) / np.abs(estados[:, posicion[q]])
            columnas[f"validez_{p}"] = np.sqrt(vpp) / np.maximum(np.abs(estados[:, posicion[p]]), p_floor)
            columnas[f"razon_{q}"] = np.sqrt(vqq) / np.sqrt(vpp)
    return columnas


def _armar_trayectoria(
    tiempos: Sequence[float],
    estados: np.ndarray,
    system: EffectiveSystem,
    hbar: float,
    p_floor: float,
    plan_energia: Optional[PlanEvaluacion],
    **extra,
) -> Trajectory:
    datos = pd.DataFrame(estados, columns=list(system.variables))
    datos.insert(0, "t", np.asarray(tiempos, dtype=float))
    for nombre, valores in _diagnosticos(estados, system.variables, system.pares, hbar, p_floor, plan_energia).items():
        datos[nombre] = valores
    return Trajectory(
        datos=datos,
        variables=system.variables,
        pares=system.pares,
        hbar=hbar,
        p_floor=p_floor,
        plan_energia=plan_energia,
        **extra,
    )


# ============================================================================
# MÉTODOS
# ============================================================================

class _FallaEvaluacion(Exception):
    def __init__(self, motivo: MotivoFin):
        self.motivo = motivo


# Tablero de Dormand–Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

# Control PI
_ALFA, _BETA, _SEGURIDAD = 0.17, 0.04, 0.9
_FACTOR_MIN, _FACTOR_MAX = 0.2, 5.0


class _Evaluador:
    """Lado derecho con guarda de singularidad y chequeo de finitud"""

    def __init__(
        self,
        plan: PlanEvaluacion,
        r_min: float,
        indices_momentos: Optional[np.ndarray] = None,
        cota_momentos: float = np.inf,
    ):
        self.plan = plan
        self.r_min = r_min
        self.indices_momentos = (
            np.zeros(0, dtype=int) if indices_momentos is None else np.asarray(indices_momentos, dtype=int)
        )
        self.cota_momentos = cota_momentos
        self.evaluaciones = 0

    def singular(self, y: np.ndarray) -> bool:
        return bool(np.any(y[self.plan.indices_singulares] <= self.r_min))

    def diverge(self, y: np.ndarray) -> bool:
        return bool(np.any(np.abs(y[self.indices_momentos]) > self.cota_momentos))

    def __call__(self, y: np.ndarray) -> np.ndarray:
        if self.singular(y):
            raise _FallaEvaluacion(MotivoFin.R_MIN)
        self.evaluaciones += 1
        f = self.plan.evaluar(y)
        if not np.all(np.isfinite(f)):
            raise _FallaEvaluacion(MotivoFin.NO_FINITO)
        return f


def _norma_error(error: np.ndarray, y0: np.ndarray, y1: np.ndarray, atol: float, rtol: float) -> float:
    escala = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((error / escala) ** 2)))


def _paso_inicial(f, y0, f0, atol, rtol, t_end) -> float:
    """Estimación estándar del primer paso a partir de y₀ y f(y₀)"""
    escala = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / escala) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / escala) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_end)
    try:
        f1 = f(y0 + h0 * f0)
    except _FallaEvaluacion:
        return h0
    d2 = float(np.sqrt(np.mean(((f1 - f0) / escala) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, t_end)


def _rk4(f, y0: np.ndarray, config: IntegratorConfig, fijas: np.ndarray):
    h = config.paso_fijo
    n = max(1, ceil(config.t_end / h - 1e-9))
    tiempos, estados = [0.0], [y0.copy()]
    y, t = y0.copy(), 0.0
    for i in range(1, n + 1):
        if i > config.max_pasos:
            return tiempos, estados, MotivoFin.MAX_PASOS, i - 1, 0
        t_nuevo = min(i * h, config.t_end)
        paso = t_nuevo - t
        try:
            k1 = f(y)
            k2 = f(y + paso / 2 * k1)
            k3 = f(y + paso / 2 * k2)
            k4 = f(y + paso * k3)
        except _FallaEvaluacion as falla:
            return tiempos, estados, falla.motivo, i - 1, 0
        y_nuevo = y + paso / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        y_nuevo[fijas] = y0[fijas]
        if not np.all(np.isfinite(y_nuevo)):
            return tiempos, estados, MotivoFin.NO_FINITO, i - 1, 0
        y, t = y_nuevo, t_nuevo
        tiempos.append(t)
        estados.append(y.copy())
        if f.singular(y):
            return tiempos, estados, MotivoFin.R_MIN, i, 0
        if f.diverge(y):
            return tiempos, estados, MotivoFin.DIVERGENCIA, i, 0
    return tiempos, estados, MotivoFin.T_FIN, n, 0


def _dopri5(f, y0: np.ndarray, config: IntegratorConfig, fijas: np.ndarray):
    tiempos, estados = [0.0], [y0.copy()]
    t, y = 0.0, y0.copy()
    try:
        k1 = f(y)
    except _FallaEvaluacion as falla:
        return tiempos, estados, falla.motivo, 0, 0

    h = config.paso_inicial or _paso_inicial(f, y, k1, config.atol, config.rtol, config.t_end)
    paso_max = config.paso_max or config.t_end
    h = min(h, paso_max)
    error_previo = 1e-4
    rechazado = False
    aceptados = rechazados = 0
    ultima_falla = MotivoFin.PASO_MINIMO

    while t < config.t_end:
        if aceptados + rechazados >= config.max_pasos:
            return tiempos, estados, MotivoFin.MAX_PASOS, aceptados, rechazados
        if h < config.paso_min:
            return tiempos, estados, ultima_falla, aceptados, rechazados
        ultimo = t + h >= config.t_end
        paso = config.t_end - t if ultimo else h

        try:
            ks = [k1]
            for etapa in range(1, 7):
                incremento = sum(a * kj for a, kj in zip(_A[etapa], ks) if a)
                ks.append(f(y + paso * incremento))
        except _FallaEvaluacion as falla:
            ultima_falla = falla.motivo
            rechazados += 1
            rechazado = True
            h = paso * 0.25
            continue

        y_nuevo = y + paso * sum(b * kj for b, kj in zip(_B5, ks) if b)
        y_nuevo[fijas] = y0[fijas]
        error = paso * sum(e * kj for e, kj in zip(_E, ks) if e)
        norma = _norma_error(error, y, y_nuevo, config.atol, config.rtol)

        if not np.isfinite(norma):
            ultima_falla = MotivoFin.NO_FINITO
            rechazados += 1
            rechazado = True
            h = paso * 0.25
            continue

        if norma <= 1.0:
            t = config.t_end if ultimo else t + paso
            y = y_nuevo
            k1 = ks[6]
            tiempos.append(t)
            estados.append(y.copy())
            aceptados += 1
            ultima_falla = MotivoFin.PASO_MINIMO
            if f.singular(y):
                return tiempos, estados, MotivoFin.R_MIN, aceptados, rechazados
            if f.diverge(y):
                return tiempos, estados, MotivoFin.DIVERGENCIA, aceptados, rechazados
            factor = _SEGURIDAD * max(norma, 1e-10) ** (-_ALFA) * error_previo ** _BETA
            factor = min(_FACTOR_MAX, max(_FACTOR_MIN, factor))
            if rechazado:
                factor = min(factor, 1.0)
            error_previo = max(norma, 1e-4)
            rechazado = False
            h = min(paso * factor, paso_max)
        else:
            factor = max(_FACTOR_MIN, _SEGURIDAD * norma ** (-_ALFA))
            rechazados += 1
            rechazado = True
            h = paso * factor

    return tiempos, estados, MotivoFin.T_FIN, aceptados, rechazados


# ============================================================================
# OPERACIONES PÚBLICAS
# ============================================================================

def vector_inicial(system: EffectiveSystem, initial: SystemState) -> np.ndarray:
    """
    Vector de estado en el orden de system.variables.

    Raises:
        EstadoIncompletoError: falta una variable clásica o sobra un momento
    """
    clasicas = system.variables_clasicas
    faltantes = [v for v in clasicas if v not in initial.clasicas]
    if faltantes:
        raise EstadoIncompletoError(f"Faltan variables clásicas en el estado inicial: {faltantes}")
    conocidos = set(system.variables)
    sobrantes = [idx.nombre for idx in initial.momentos if idx.nombre not in conocidos]
    if sobrantes:
        raise EstadoIncompletoError(f"Momentos fuera del sistema de orden {system.orden}: {sobrantes}")
    valores = initial.valores()
    return np.array([valores.get(v, 0.0) for v in system.variables], dtype=float)


def integrate(
    system: EffectiveSystem,
    initial: SystemState,
    config: IntegratorConfig,
    hbar: Optional[float] = None,
    parametros: Optional[Mapping[str, float]] = None,
) -> Trajectory:
    """
    Integra el sistema desde el estado inicial.

    Args:
        system: Sistema efectivo (generado, transcrito o cargado de archivo)
        initial: Estado inicial en t = 0
        config: Método, tolerancias y tiempo final
        hbar: Valor de ħ (settings.HBAR por defecto)
        parametros: Valores de los parámetros del modelo

    Returns:
        Trajectory con motivo de término; las fallas numéricas no lanzan excepción

    Raises:
        SingularidadError: el estado inicial ya está en r ≤ r_min
    """
    hbar = settings.HBAR if hbar is None else hbar
    parametros = dict(parametros or {})
    y0 = vector_inicial(system, initial)

    plan = compilar_sistema(system, parametros, hbar)
    clasicas = set(system.variables_clasicas)
    momentos = [j for j, v in enumerate(system.variables) if v not in clasicas]
    f = _Evaluador(plan, config.r_min, np.array(momentos, dtype=int), config.cota_momentos)
    if f.singular(y0):
        logger.error(f"❌ Estado inicial singular: {plan.singulares} ≤ r_min = {config.r_min}")
        raise SingularidadError(f"Estado inicial con {plan.singulares} ≤ r_min = {config.r_min}")

    plan_energia = None
    if system.hamiltoniano is not None:
        plan_energia = PlanEvaluacion([system.hamiltoniano], system.variables, parametros, hbar)

    logger.info(
        f"🚀 Integrando {system.modelo} N={system.orden} con {config.metodo.value} hasta t={config.t_end}"
    )
    metodo = _rk4 if config.metodo == MetodoIntegracion.RK4 else _dopri5
    tiempos, estados, motivo, aceptados, rechazados = metodo(f, y0, config, plan.nulas)

    trayectoria = _armar_trayectoria(
        tiempos,
        np.vstack(estados),
        system,
        hbar,
        config.p_floor,
        plan_energia,
        motivo_fin=motivo,
        pasos_aceptados=aceptados,
        pasos_rechazados=rechazados,
        imaginarios_excluidos=plan.imaginarios_excluidos,
    )
    logger.debug(
        f"Pasos aceptados: {aceptados}, rechazados: {rechazados}, evaluaciones: {f.evaluaciones}"
    )
    if motivo == MotivoFin.T_FIN:
        logger.info(f"✅ Trayectoria completa: {len(trayectoria)} muestras")
    elif motivo == MotivoFin.DIVERGENCIA:
        logger.warning(
            f"⚠️ Momentos por encima de {config.cota_momentos:.3g} en t={trayectoria.t_final:.6g}: "
            f"corrida detenida ({len(trayectoria)} muestras)"
        )
    else:
        logger.warning(f"⚠️ Trayectoria abortada en t={trayectoria.t_final:.6g}: {motivo.value}")

    if config.remuestreo:
        trayectoria = remuestrear(trayectoria, config.remuestreo)
    return trayectoria


def remuestrear(traj: Trajectory, muestras: int) -> Trajectory:
    """Interpolación lineal a una grilla uniforme; los diagnósticos se recalculan"""
    tiempos = traj.tiempos
    grilla = np.linspace(tiempos[0], tiempos[-1], muestras)
    estados = np.column_stack([np.interp(grilla, tiempos, traj.columna(v)) for v in traj.variables])
    datos = pd.DataFrame(estados, columns=list(traj.variables))
    datos.insert(0, "t", grilla)
    for nombre, valores in _diagnosticos(
        estados, traj.variables, traj.pares, traj.hbar, traj.p_floor, traj.plan_energia
    ).items():
        datos[nombre] = valores
    return Trajectory(
        datos=datos,
        variables=traj.variables,
        pares=traj.pares,
        motivo_fin=traj.motivo_fin,
        hbar=traj.hbar,
        p_floor=traj.p_floor,
        pasos_aceptados=traj.pasos_aceptados,
        pasos_rechazados=traj.pasos_rechazados,
        imaginarios_excluidos=traj.imaginarios_excluidos,
        plan_energia=traj.plan_energia,
    )


def monitor_validity(
    traj: Trajectory,
    threshold: Optional[float] = None,
    p_floor: Optional[float] = None,
    par: int = 0,
) -> VentanaValidez:
    """
    Ventana inicial máxima en que √G_qq/|q| y √G_pp/max(|p|, p_floor) quedan bajo el umbral.

    Args:
        traj: Trayectoria no vacía
        threshold: Umbral (settings.UMBRAL_VALIDEZ)
        p_floor: Piso de |p| (settings.P_FLOOR)
        par: Par canónico monitoreado (0 = (r, p_r))
    """
    threshold = settings.UMBRAL_VALIDEZ if threshold is None else threshold
    p_floor = settings.P_FLOOR if p_floor is None else p_floor
    if not len(traj):
        raise ValueError("Trayectoria vacía")

    q, p = traj.pares[par]
    g_qq, _, g_pp = (idx.nombre for idx in indices_par(traj.k, par))
    tiempos = traj.tiempos
    with np.errstate(divide="ignore", invalid="ignore"):
        razon_q = np.sqrt(traj.columna(g_qq)) / np.abs(traj.columna(q))
        razon_p = np.sqrt(traj.columna(g_pp)) / np.maximum(np.abs(traj.columna(p)), p_floor)
    validas = (razon_q < threshold) & (razon_p < threshold)

    violaciones = np.flatnonzero(~validas)
    if not len(violaciones):
        return VentanaValidez(umbral=threshold, t_inicio=tiempos[0], t_fin=tiempos[-1], vacia=False)
    primera = int(violaciones[0])
    if primera == 0:
        return VentanaValidez(
            umbral=threshold, t_inicio=tiempos[0], t_fin=tiempos[0], vacia=True, indice_violacion=0
        )
    return VentanaValidez(
        umbral=threshold,
        t_inicio=tiempos[0],
        t_fin=tiempos[primera - 1],
        vacia=False,
        indice_violacion=primera,
    )


def monitor_uncertainty(
    traj: Trajectory,
    par: int = 0,
    tolerancia: Optional[float] = None,
) -> Tuple[pd.Series, ReporteIncertidumbre]:
    """
    Margen G^{2,0}G^{0,2} − (G^{1,1})² − ħ²/4 por muestra y primer instante negativo.

    La holgura 'tolerancia' es relativa a ħ²/4 y absorbe el redondeo de
    estados saturados.
    """
    tolerancia = settings.TOLERANCIA_MARGEN if tolerancia is None else tolerancia
    if not len(traj):
        raise ValueError("Trayectoria vacía")
    q, _ = traj.pares[par]
    g_qq, g_qp, g_pp = (idx.nombre for idx in indices_par(traj.k, par))
    margenes = margen_incertidumbre(
        traj.columna(g_qq), traj.columna(g_qp), traj.columna(g_pp), traj.hbar
    )
    serie = pd.Series(margenes, index=traj.tiempos, name=f"margen_{q}")
    violadas = np.flatnonzero(margenes < -tolerancia * traj.hbar ** 2 / 4)
    reporte = ReporteIncertidumbre(
        par=f"({q}, {traj.pares[par][1]})",
        margen_inicial=float(margenes[0]),
        margen_minimo=float(np.min(margenes)),
        primera_violacion=float(traj.tiempos[violadas[0]]) if len(violadas) else None,
    )
    return serie, reporte
