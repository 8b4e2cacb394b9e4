"""
Interfaz de línea de comandos
Subcomandos derive, integrate, verify, sweep y plot; configuración de logging
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger
from pydantic import ValidationError

from app import __version__
from app.config import settings
from app.excepciones import MomentosError
from app.services.corchetes_service import CorchetesService, NormalizacionCorchete
from app.services.ecuaciones_service import (
    compare_systems,
    energy_closure,
    exportar_sistema,
    generate,
    verificar_conservacion,
)
from app.services.escenarios_service import (
    cargar_escenario,
    ejecutar_y_guardar,
    escenario_desde_manifiesto,
    sweep,
)
from app.services.oraculo_weyl_service import get_oraculo_service
from app.services.sistemas_referencia import reference_system
from app.utils.graficos import graficar_csv
from app.utils.salida import escribir_json, escribir_texto

EXITO, ERROR_USO, ERROR_NUMERICO, ERROR_VERIFICACION = 0, 1, 2, 3


class ErrorUso(Exception):
    """Argumentos inválidos en la línea de comandos"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ErrorUso(message)


def configurar_logging() -> None:
    """Sinks de loguru: stdout coloreado y archivo rotativo"""
    Path(settings.LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
    logger.remove()  # Remover handler por defecto
    logger.add(
        sys.stdout,
        colorize=True,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> | <level>{message}</level>",
        level=settings.LOG_LEVEL
    )
    logger.add(
        settings.LOG_FILE,
        rotation="10 MB",
        retention="1 week",
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} | {message}",
        level=settings.LOG_LEVEL
    )


def construir_parser() -> argparse.ArgumentParser:
    comunes = _Parser(add_help=False)
    comunes.add_argument("--scenario", type=Path, help="Archivo de escenario (.env) o manifiesto (.json)")
    comunes.add_argument("--order", type=int, help="Orden de truncamiento N")
    comunes.add_argument("--hbar", type=float, help="Valor de ħ")
    comunes.add_argument("--t-end", type=float, dest="t_end", help="Tiempo final")
    comunes.add_argument("--tol", type=float, help="Tolerancia del integrador (absoluta y relativa)")
    comunes.add_argument("--out", type=Path, help="Directorio de salida")
    comunes.add_argument("--seed", type=int, help="Semilla de la comparación numérica")
    comunes.add_argument("--classical", action="store_true", help="Todos los momentos en cero")
    comunes.add_argument("--saturate", action="store_true", help="Satura la relación de incertidumbre")
    comunes.add_argument(
        "--normalization",
        choices=[n.value for n in NormalizacionCorchete],
        help="Normalización del corchete de momentos",
    )

    parser = _Parser(prog="momentos", description="Mecánica cuántica por momentos: hidrógeno y Kepler")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="comando", required=True, parser_class=_Parser)

    derive = sub.add_parser("derive", parents=[comunes], help="Genera y exporta el sistema efectivo")
    derive.add_argument("--model", default="hidrogeno", help="Modelo clásico (hidrogeno, oscilador)")

    sub.add_parser("integrate", parents=[comunes], help="Integra un escenario")

    sub.add_parser("verify", parents=[comunes], help="Oráculo, sistemas impresos, Jacobi y conservación")

    barrido = sub.add_parser("sweep", parents=[comunes], help="Barrido de dispersiones")
    barrido.add_argument("--workers", type=int, help="Procesos concurrentes")
    barrido.add_argument("--ladder", help="Dispersiones separadas por comas")

    plot = sub.add_parser("plot", parents=[comunes], help="SVG a partir de un CSV de trayectoria")
    plot.add_argument("--csv", type=Path, required=True, help="CSV de trayectoria")
    return parser


# ============================================================================
# SUBCOMANDOS
# ============================================================================

def _directorio(args, *partes: str) -> Path:
    return args.out if args.out is not None else Path(settings.DIRECTORIO_SALIDA, *partes)


def _escenario(args):
    if args.scenario is None:
        raise ErrorUso("Se requiere --scenario")
    if args.scenario.suffix == ".json":
        if not args.scenario.is_file():
            raise FileNotFoundError(f"No existe el manifiesto: {args.scenario}")
        escenario = escenario_desde_manifiesto(args.scenario)
    else:
        escenario = cargar_escenario(args.scenario)
    return escenario.con_cambios(
        orden=args.order,
        hbar=args.hbar,
        t_fin=args.t_end,
        tol=args.tol,
        semilla=args.seed,
        normalizacion=args.normalization,
        clasico=True if args.classical else None,
        saturar=True if args.saturate else None,
    )


def comando_derive(args) -> int:
    orden = args.order or 2
    sistema = generate(args.model, orden, args.normalization)
    directorio = _directorio(args, "ecuaciones")
    base = f"ecuaciones_{sistema.modelo}_N{orden}"
    escribir_texto(sistema.a_texto(), directorio / f"{base}.txt")
    exportar_sistema(sistema, directorio / f"{base}.jsonl")
    logger.info(f"✅ {sistema.ecuaciones_vivas} ecuaciones vivas escritas en {directorio}")
    return EXITO


def comando_integrate(args) -> int:
    escenario = _escenario(args)
    directorio = _directorio(args, escenario.nombre)
    corrida, _ = ejecutar_y_guardar(escenario, directorio)
    if not corrida.trayectoria.motivo_fin.es_normal:
        logger.error(f"❌ Trayectoria abortada: {corrida.trayectoria.motivo_fin.value}")
        return ERROR_NUMERICO
    return EXITO


def comando_verify(args) -> int:
    orden = args.order or 3
    semilla = settings.SEMILLA_COMPARACION if args.seed is None else args.seed
    hbar = settings.HBAR if args.hbar is None else args.hbar
    directorio = _directorio(args, "verificacion")
    fallas: List[str] = []
    resumen = {"semilla": semilla, "orden": orden}

    oraculo = get_oraculo_service()
    reporte_moyal = oraculo.oracle_report(NormalizacionCorchete.MOYAL)
    escribir_texto(reporte_moyal.a_texto(), directorio / "oraculo_moyal.txt")
    if not reporte_moyal.exitoso:
        fallas.append(f"oráculo (moyal): {len(reporte_moyal.discrepancias)} pares difieren")
    reporte_multigrado = oraculo.oracle_report(NormalizacionCorchete.MULTIGRADO)
    escribir_texto(reporte_multigrado.a_texto(), directorio / "oraculo_multigrado.txt")
    resumen["sigma"] = reporte_moyal.sigma
    resumen["oraculo_moyal_discrepancias"] = len(reporte_moyal.discrepancias)
    resumen["oraculo_multigrado_discrepancias"] = len(reporte_multigrado.discrepancias)

    jacobi = CorchetesService([("x", "p")], NormalizacionCorchete.MOYAL).jacobi_report(orden_maximo=3)
    escribir_texto(jacobi.a_texto(), directorio / "jacobi.txt")
    resumen["jacobi_residuos"] = len(jacobi.residuos)
    if not jacobi.exacto:
        fallas.append(f"Jacobi: {len(jacobi.residuos)} ternas con residuo")

    for n in range(2, min(orden, 3) + 1):
        generado = generate("hidrogeno", n, args.normalization)
        comparacion = compare_systems(
            generado, reference_system(n), semilla=semilla, hbar=hbar, nombres=("generado", "impreso")
        )
        escribir_texto(comparacion.a_texto(), directorio / f"comparacion_orden{n}.txt")
        resumen[f"orden{n}_variables_con_diferencias"] = len(comparacion.diferencias)
        resumen[f"orden{n}_diferencias_reales"] = sorted(comparacion.diferencias_reales)
        if n == 2 and (not comparacion.vacio or comparacion.desviacion_relativa_maxima > 1e-12):
            fallas.append("el sistema de segundo orden no coincide con el impreso")
        elif n == 3 and not comparacion.confinada_a_imaginarios:
            logger.warning(
                f"⚠️ Tercer orden: {len(comparacion.diferencias_reales)} variables con diferencias "
                f"reales respecto de la transcripción (ver comparacion_orden3.txt)"
            )

        cierre = energy_closure(generado)
        resumen[f"orden{n}_cierre_energia"] = str(cierre)
        if cierre:
            fallas.append(f"cierre de energía no nulo en orden {n}")
        no_conservadas = verificar_conservacion(generado)
        if no_conservadas:
            fallas.append(f"cantidades no conservadas en orden {n}: {no_conservadas}")

    resumen["fallas"] = fallas
    escribir_json(resumen, directorio / "verificacion.json")
    if fallas:
        for falla in fallas:
            logger.error(f"❌ {falla}")
        return ERROR_VERIFICACION
    logger.info(f"✅ Verificación completa sin fallas ({directorio})")
    return EXITO


def comando_sweep(args) -> int:
    escenario = _escenario(args)
    escalera = None
    if args.ladder:
        try:
            escalera = [float(v) for v in args.ladder.split(",") if v.strip()]
        except ValueError as e:
            raise ErrorUso(f"--ladder inválido: {args.ladder}") from e
    resumen = sweep(escenario, _directorio(args, f"barrido_{escenario.nombre}"), escalera, args.workers)
    for fila in resumen.filas:
        logger.info(
            f"📌 ε = {fila.dispersion:.0e} | ħ = {fila.hbar:.3g} | ventana = {fila.ventana_validez:.4g} | "
            f"violación = {fila.primera_violacion} | fin = {fila.motivo_fin}"
        )
    return EXITO


def comando_plot(args) -> int:
    graficar_csv(args.csv, args.out)
    return EXITO


COMANDOS = {
    "derive": comando_derive,
    "integrate": comando_integrate,
    "verify": comando_verify,
    "sweep": comando_sweep,
    "plot": comando_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Punto de entrada; devuelve el código de salida"""
    configurar_logging()
    try:
        args = construir_parser().parse_args(argv)
        logger.info(f"🚀 momentos {__version__}: {args.comando}")
        return COMANDOS[args.comando](args)
    except ErrorUso as e:
        logger.error(f"❌ Uso: {e}")
        return ERROR_USO
    except FileNotFoundError as e:
        logger.error(f"❌ E/S: {e}")
        return ERROR_USO
    except ValidationError as e:
        logger.error(f"❌ Configuración inválida: {e}")
        return ERROR_USO
    except MomentosError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.codigo_salida
    except ValueError as e:
        logger.error(f"❌ Argumento inválido: {e}")
        return ERROR_USO


if __name__ == "__main__":
    sys.exit(main())
